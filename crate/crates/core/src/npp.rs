//! Number partitioning with prepartition encodings.
//!
//! A prepartition assigns a cluster to every number; numbers sharing a
//! cluster must receive the same sign. Summing each non-empty cluster gives a
//! smaller partitioning instance, which the largest differencing method
//! solves heuristically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;
use rand::Rng;

use crate::rng;
use crate::search::WalkTrace;
use crate::{Error, Result};

/// Largest instance [`brute_force_npp`] will enumerate.
pub const NPP_BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct NppInstance {
    numbers: Vec<f64>,
}

impl NppInstance {
    pub fn new(numbers: Vec<f64>) -> Result<Self> {
        if numbers.is_empty() {
            return Err(Error::InvalidParameter(
                "a partitioning instance needs at least one number".into(),
            ));
        }
        if let Some(bad) = numbers.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "numbers must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { numbers })
    }

    pub fn numbers(&self) -> &[f64] {
        &self.numbers
    }

    pub fn len(&self) -> usize {
        self.numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numbers.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.numbers.iter().sum()
    }
}

/// One ±1 sign per number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!("sign {bad} is not ±1")));
        }
        Ok(Self(signs))
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Cluster index per number, each in `0..N`. Empty clusters are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prepartition {
    cluster_of: Vec<usize>,
}

impl Prepartition {
    pub fn new(cluster_of: Vec<usize>) -> Result<Self> {
        let n = cluster_of.len();
        if let Some(bad) = cluster_of.iter().find(|&&c| c >= n) {
            return Err(Error::InvalidParameter(format!(
                "cluster id {bad} outside 0..{n}"
            )));
        }
        Ok(Self { cluster_of })
    }

    /// Every number in its own cluster: the unrestricted problem.
    pub fn identity(n: usize) -> Self {
        Self {
            cluster_of: (0..n).collect(),
        }
    }

    /// Two clusters reproducing `signs` exactly: 0 for −1 and 1 for +1.
    pub fn from_signs(signs: &SignVector) -> Self {
        Self {
            cluster_of: signs.signs().iter().map(|&s| usize::from(s > 0)).collect(),
        }
    }

    pub fn cluster_of(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn len(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_of.is_empty()
    }
}

/// Coarse instance of a prepartition with the map back to the full problem.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseNpp {
    pub instance: NppInstance,
    /// Cluster id of each coarse number, ascending.
    pub clusters: Vec<usize>,
    /// Coarse index of every original number.
    pub slot_of: Vec<usize>,
}

impl CoarseNpp {
    pub fn lift(&self, coarse: &SignVector) -> SignVector {
        SignVector(self.slot_of.iter().map(|&k| coarse.0[k]).collect())
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

/// `|Σ s_i a_i|`.
pub fn npp_cost(inst: &NppInstance, s: &SignVector) -> Result<f64> {
    check_len(inst.len(), s.len())?;
    Ok(signed_sum(inst.numbers(), s.signs()).abs())
}

fn signed_sum(numbers: &[f64], signs: &[i8]) -> f64 {
    numbers
        .iter()
        .zip(signs)
        .map(|(a, &s)| a * f64::from(s))
        .sum()
}

/// One number per non-empty cluster, the sum of its members.
pub fn coarse_npp(inst: &NppInstance, y: &Prepartition) -> Result<CoarseNpp> {
    check_len(inst.len(), y.len())?;
    let n = inst.len();
    let mut sums = vec![0.0; n];
    let mut used = vec![false; n];
    for (&c, &a) in y.cluster_of().iter().zip(inst.numbers()) {
        sums[c] += a;
        used[c] = true;
    }
    let mut slot = vec![usize::MAX; n];
    let mut clusters = Vec::new();
    let mut numbers = Vec::new();
    for c in 0..n {
        if used[c] {
            slot[c] = clusters.len();
            clusters.push(c);
            numbers.push(sums[c]);
        }
    }
    Ok(CoarseNpp {
        instance: NppInstance::new(numbers)?,
        clusters,
        slot_of: y.cluster_of().iter().map(|&c| slot[c]).collect(),
    })
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    value: OrderedFloat<f64>,
    // Among equal values the lower index pops first.
    index: std::cmp::Reverse<usize>,
}

/// Largest differencing method.
///
/// Repeatedly replaces the two largest numbers by their difference, recording
/// that the two must go to opposite sides; two-coloring the resulting tree
/// yields the signs. The reported discrepancy is `npp_cost` of those signs.
pub fn kk_differencing(inst: &NppInstance) -> (f64, SignVector) {
    let n = inst.len();
    let mut heap: BinaryHeap<Pending> = inst
        .numbers()
        .iter()
        .enumerate()
        .map(|(index, &a)| Pending {
            value: OrderedFloat(a),
            index: std::cmp::Reverse(index),
        })
        .collect();
    let mut opposite: Vec<Vec<usize>> = vec![Vec::new(); n];
    while heap.len() > 1 {
        let big = heap.pop().expect("two entries");
        let small = heap.pop().expect("two entries");
        let (b, s) = (big.index.0, small.index.0);
        opposite[b].push(s);
        opposite[s].push(b);
        heap.push(Pending {
            value: OrderedFloat(big.value.0 - small.value.0),
            index: big.index,
        });
    }
    let root = heap.pop().map_or(0, |p| p.index.0);

    let mut signs = vec![0i8; n];
    signs[root] = 1;
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &v in &opposite[u] {
            if signs[v] == 0 {
                signs[v] = -signs[u];
                stack.push(v);
            }
        }
    }
    let signs = SignVector(signs);
    let cost = signed_sum(inst.numbers(), signs.signs()).abs();
    (cost, signs)
}

/// Heuristic oracle for a prepartition: the differencing method on the coarse
/// instance, lifted back and evaluated on the full instance.
pub fn npp_heuristic_g(inst: &NppInstance, y: &Prepartition) -> Result<(f64, SignVector)> {
    let coarse = coarse_npp(inst, y)?;
    let (coarse_cost, coarse_signs) = kk_differencing(&coarse.instance);
    let signs = coarse.lift(&coarse_signs);
    let cost = signed_sum(inst.numbers(), signs.signs()).abs();
    debug_assert!(
        (cost - coarse_cost).abs() <= 1e-9 * (1.0 + inst.total()),
        "lifted cost {cost} disagrees with coarse cost {coarse_cost}"
    );
    Ok((cost, signs))
}

/// Exhaustive optimum; the first number is fixed to +1 by symmetry.
pub fn brute_force_npp(inst: &NppInstance) -> Result<(f64, SignVector)> {
    let n = inst.len();
    if n > NPP_BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            what: "number count",
            size: n,
            limit: NPP_BRUTE_FORCE_LIMIT,
        });
    }
    let mut signs = vec![1i8; n];
    let mut best = f64::INFINITY;
    let mut best_signs = signs.clone();
    for code in 0..(1u64 << (n - 1)) {
        for (k, s) in signs.iter_mut().enumerate().skip(1) {
            *s = if (code >> (k - 1)) & 1 == 1 { -1 } else { 1 };
        }
        let cost = signed_sum(inst.numbers(), &signs).abs();
        if cost.partial_cmp(&best) == Some(Ordering::Less) {
            best = cost;
            best_signs.copy_from_slice(&signs);
        }
    }
    Ok((best, SignVector(best_signs)))
}

/// Adaptive walk over prepartitions, starting from the identity.
///
/// Each step moves one uniformly chosen index to a uniformly chosen cluster
/// id in `0..N`; the move is kept iff the heuristic value does not increase.
/// The trace records step 0, every step where the value dropped, and `t_max`.
pub fn npp_adaptive_walk(
    inst: &NppInstance,
    t_max: u64,
    seed: u64,
) -> Result<WalkTrace<Prepartition>> {
    if t_max == 0 {
        return Err(Error::InvalidParameter("a walk needs t_max ≥ 1".into()));
    }
    let n = inst.len();
    let mut rng = rng::generator(seed);
    let mut y = Prepartition::identity(n);
    let mut value = npp_heuristic_g(inst, &y)?.0;
    let mut samples = vec![(0, value)];
    for t in 1..=t_max {
        let i = rng.random_range(0..n);
        let c = rng.random_range(0..n);
        if y.cluster_of[i] != c {
            let old = y.cluster_of[i];
            y.cluster_of[i] = c;
            let candidate = npp_heuristic_g(inst, &y)?.0;
            if candidate <= value {
                if candidate < value {
                    samples.push((t, candidate));
                }
                value = candidate;
            } else {
                y.cluster_of[i] = old;
            }
        }
    }
    if samples.last().map(|s| s.0) != Some(t_max) {
        samples.push((t_max, value));
    }
    Ok(WalkTrace {
        samples,
        best_state: y.clone(),
        final_state: y,
        best_value: value,
        seed,
    })
}
