//! Quadratic spin glasses.
//!
//! The energy of a configuration `x ∈ {-1,+1}^n` is
//!
//! ```text
//! f(x) = Σ_{bonds {i,j}} a_ij x_i x_j + Σ_i b_i x_i
//! ```
//!
//! with every unordered pair stored once. This is the symmetric double sum
//! with a factor one half, written without the double counting. Diagonal
//! terms are not representable; they only shift the energy by a constant.

use std::collections::HashMap;

use rand::Rng;

use crate::rng;
use crate::{Error, Result};

/// Largest system the exhaustive ground-state search will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Descriptor for instances generated on an `L × L` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridMeta {
    pub side: usize,
    pub periodic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

/// Couplings and fields of a quadratic spin glass.
///
/// Bonds are normalized to `i < j` and kept in insertion order, which is
/// also the summation order of [`energy`]. A compressed adjacency list is
/// built once so single-flip deltas only touch incident bonds.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinGlassInstance {
    n_sites: usize,
    bonds: Vec<Bond>,
    fields: Vec<f64>,
    grid: Option<GridMeta>,
    seed: Option<u64>,
    offsets: Vec<usize>,
    incident: Vec<(usize, f64)>,
}

impl SpinGlassInstance {
    pub fn new<I>(n_sites: usize, bonds: I, fields: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n_sites == 0 {
            return Err(Error::InvalidParameter(
                "an instance needs at least one site".into(),
            ));
        }
        if fields.len() != n_sites {
            return Err(Error::Dimension {
                expected: n_sites,
                got: fields.len(),
            });
        }
        if let Some(b) = fields.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite field {b}")));
        }

        let mut seen = HashMap::new();
        let mut stored = Vec::new();
        for (i, j, coupling) in bonds {
            for site in [i, j] {
                if site >= n_sites {
                    return Err(Error::InvalidSite { site, n_sites });
                }
            }
            if i == j {
                return Err(Error::InvalidParameter(format!(
                    "self-coupling on site {i} is not allowed"
                )));
            }
            if !coupling.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite coupling on bond ({i}, {j})"
                )));
            }
            let key = (i.min(j), i.max(j));
            if seen.insert(key, ()).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate bond ({}, {})",
                    key.0, key.1
                )));
            }
            stored.push(Bond {
                i: key.0,
                j: key.1,
                coupling,
            });
        }

        let (offsets, incident) = build_adjacency(n_sites, &stored);
        Ok(Self {
            n_sites,
            bonds: stored,
            fields,
            grid: None,
            seed: None,
            offsets,
            incident,
        })
    }

    /// Instance with all fields `b_i = 0`.
    pub fn without_fields<I>(n_sites: usize, bonds: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::new(n_sites, bonds, vec![0.0; n_sites])
    }

    pub fn with_grid(mut self, grid: GridMeta) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn grid(&self) -> Option<GridMeta> {
        self.grid
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// True if any `b_i` is nonzero.
    pub fn has_fields(&self) -> bool {
        self.fields.iter().any(|&b| b != 0.0)
    }

    /// Neighbors of `site` with the coupling of the connecting bond.
    pub fn neighbors(&self, site: usize) -> &[(usize, f64)] {
        &self.incident[self.offsets[site]..self.offsets[site + 1]]
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites {
            Ok(())
        } else {
            Err(Error::InvalidSite {
                site,
                n_sites: self.n_sites,
            })
        }
    }

    fn check_config(&self, x: &SpinConfig) -> Result<()> {
        if x.len() == self.n_sites {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.n_sites,
                got: x.len(),
            })
        }
    }

    /// Energy of raw spins; the caller guarantees length and ±1 entries.
    pub(crate) fn energy_of(&self, spins: &[i8]) -> f64 {
        let mut total = 0.0;
        for bond in &self.bonds {
            total += bond.coupling * f64::from(spins[bond.i] * spins[bond.j]);
        }
        for (b, &s) in self.fields.iter().zip(spins) {
            total += b * f64::from(s);
        }
        total
    }

    /// `f(x with spin i flipped) - f(x)` from the bonds incident on `i`.
    #[inline]
    pub(crate) fn flip_delta(&self, spins: &[i8], i: usize) -> f64 {
        let mut local = self.fields[i];
        for &(j, a) in self.neighbors(i) {
            local += a * f64::from(spins[j]);
        }
        -2.0 * f64::from(spins[i]) * local
    }
}

fn build_adjacency(n_sites: usize, bonds: &[Bond]) -> (Vec<usize>, Vec<(usize, f64)>) {
    let mut degree = vec![0usize; n_sites];
    for b in bonds {
        degree[b.i] += 1;
        degree[b.j] += 1;
    }
    let mut offsets = Vec::with_capacity(n_sites + 1);
    offsets.push(0);
    for d in &degree {
        offsets.push(offsets.last().unwrap() + d);
    }
    let mut fill = offsets.clone();
    let mut incident = vec![(0usize, 0.0f64); bonds.len() * 2];
    for b in bonds {
        incident[fill[b.i]] = (b.j, b.coupling);
        fill[b.i] += 1;
        incident[fill[b.j]] = (b.i, b.coupling);
        fill[b.j] += 1;
    }
    (offsets, incident)
}

/// A spin configuration with entries in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!(
                "spin value {bad} is not ±1"
            )));
        }
        Ok(Self(spins))
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self(
            (0..n)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect(),
        )
    }

    /// Configuration whose binary encoding (−1 ↦ 0, +1 ↦ 1, site 0 most
    /// significant) equals `code`.
    pub fn from_code(n: usize, code: u64) -> Self {
        Self(
            (0..n)
                .map(|k| {
                    if (code >> (n - 1 - k)) & 1 == 1 {
                        1
                    } else {
                        -1
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }
}

/// Relative orientation of a frozen spin pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Parallel,
    Antiparallel,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Parallel => 1,
            Orientation::Antiparallel => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Orientation::Parallel),
            -1 => Ok(Orientation::Antiparallel),
            other => Err(Error::InvalidParameter(format!(
                "relative sign must be ±1, got {other}"
            ))),
        }
    }
}

/// Result of freezing `x_l = rel · x_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionResult {
    /// Instance on `n - 1` sites.
    pub reduced: SpinGlassInstance,
    /// `rel · a_kl` of the parent instance.
    pub offset: f64,
    /// Parent site → reduced site; `l` maps to the image of `k`.
    pub site_map: Vec<usize>,
    pub relative_sign: Orientation,
    pub kept: usize,
    pub eliminated: usize,
}

impl ContractionResult {
    /// Restricts a parent configuration to the reduced sites.
    pub fn restrict(&self, x: &SpinConfig) -> SpinConfig {
        let mut spins = vec![1i8; self.reduced.n_sites()];
        for (old, &s) in x.spins().iter().enumerate() {
            if old != self.eliminated {
                spins[self.site_map[old]] = s;
            }
        }
        SpinConfig(spins)
    }

    /// Parent configuration with the eliminated spin set to `rel · x_k`.
    pub fn expand(&self, reduced: &SpinConfig) -> SpinConfig {
        let mut spins: Vec<i8> = self.site_map.iter().map(|&new| reduced.get(new)).collect();
        spins[self.eliminated] = self.relative_sign.sign() * spins[self.kept];
        SpinConfig(spins)
    }
}

/// Energy `f(x)`.
pub fn energy(inst: &SpinGlassInstance, x: &SpinConfig) -> Result<f64> {
    inst.check_config(x)?;
    Ok(inst.energy_of(x.spins()))
}

/// Energy change from flipping spin `i`, touching only bonds incident on `i`.
pub fn energy_delta(inst: &SpinGlassInstance, x: &SpinConfig, i: usize) -> Result<f64> {
    inst.check_config(x)?;
    inst.check_site(i)?;
    Ok(inst.flip_delta(x.spins(), i))
}

/// Periodic `L × L` grid with couplings i.i.d. uniform on [-1, 1] and no fields.
///
/// Site `(r, c)` has index `r·L + c`. Couplings are drawn site by site, right
/// neighbor before down neighbor.
pub fn gen_grid_instance(side: usize, seed: u64) -> Result<SpinGlassInstance> {
    if side < 3 {
        return Err(Error::InvalidParameter(format!(
            "grid side L = {side} must be at least 3: periodic wrap-around on a smaller grid \
             produces parallel bonds between the same pair of sites"
        )));
    }
    let mut rng = rng::generator(seed);
    let n = side * side;
    let mut bonds = Vec::with_capacity(2 * n);
    for r in 0..side {
        for c in 0..side {
            let site = r * side + c;
            let right = r * side + (c + 1) % side;
            let down = ((r + 1) % side) * side + c;
            bonds.push((site, right, rng.random_range(-1.0..=1.0)));
            bonds.push((site, down, rng.random_range(-1.0..=1.0)));
        }
    }
    Ok(SpinGlassInstance::without_fields(n, bonds)?
        .with_grid(GridMeta {
            side,
            periodic: true,
        })
        .with_seed(seed))
}

/// Exhaustive minimum over all `2^n` configurations.
///
/// Configurations are visited in increasing binary encoding
/// ([`SpinConfig::from_code`]) and only strict improvements replace the
/// incumbent, so ties resolve to the lexicographically smallest spin vector.
pub fn brute_force_ground_state(inst: &SpinGlassInstance) -> Result<(SpinConfig, f64)> {
    let n = inst.n_sites();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            what: "number of sites",
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut spins = vec![-1i8; n];
    let mut best_code = 0u64;
    let mut best = f64::INFINITY;
    for code in 0..(1u64 << n) {
        for (k, s) in spins.iter_mut().enumerate() {
            *s = if (code >> (n - 1 - k)) & 1 == 1 {
                1
            } else {
                -1
            };
        }
        let e = inst.energy_of(&spins);
        if e < best {
            best = e;
            best_code = code;
        }
    }
    Ok((SpinConfig::from_code(n, best_code), best))
}

/// Freezes `x_l = rel · x_k` and eliminates site `l`.
///
/// Couplings to `l` are folded onto `k` with sign `rel`, `b_k` becomes
/// `b_k + rel · b_l`, and the bond `(k, l)` turns into the constant offset
/// `rel · a_kl`. Bonds that land on the same reduced pair are summed.
pub fn contract_pair(
    inst: &SpinGlassInstance,
    k: usize,
    l: usize,
    rel: Orientation,
) -> Result<ContractionResult> {
    inst.check_site(k)?;
    inst.check_site(l)?;
    if k == l {
        return Err(Error::InvalidParameter(format!(
            "cannot contract site {k} with itself"
        )));
    }
    let sign = f64::from(rel.sign());
    let n = inst.n_sites();
    let mut site_map = Vec::with_capacity(n);
    let mut next = 0;
    for old in 0..n {
        if old == l {
            site_map.push(usize::MAX);
        } else {
            site_map.push(next);
            next += 1;
        }
    }
    site_map[l] = site_map[k];

    let mut offset = 0.0;
    let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
    let mut merged: Vec<(usize, usize, f64)> = Vec::new();
    for bond in inst.bonds() {
        let (i, j) = (bond.i, bond.j);
        if (i == k && j == l) || (i == l && j == k) {
            offset += sign * bond.coupling;
            continue;
        }
        let coupling = if i == l || j == l {
            sign * bond.coupling
        } else {
            bond.coupling
        };
        let (ni, nj) = (site_map[i], site_map[j]);
        let key = (ni.min(nj), ni.max(nj));
        match slot.get(&key) {
            Some(&idx) => merged[idx].2 += coupling,
            None => {
                slot.insert(key, merged.len());
                merged.push((key.0, key.1, coupling));
            }
        }
    }

    let mut fields = vec![0.0; n - 1];
    for (old, &b) in inst.fields().iter().enumerate() {
        if old != l {
            fields[site_map[old]] = b;
        }
    }
    fields[site_map[k]] += sign * inst.fields()[l];

    let reduced = SpinGlassInstance::new(n - 1, merged, fields)?;
    Ok(ContractionResult {
        reduced,
        offset,
        site_map,
        relative_sign: rel,
        kept: k,
        eliminated: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn triangle() -> SpinGlassInstance {
        // Sites 1, 2, 3 of the worked example are 0, 1, 2 here.
        SpinGlassInstance::without_fields(3, [(0, 1, 1.0), (0, 2, -1.0), (1, 2, 0.5)]).unwrap()
    }

    /// Independent re-summation over the symmetric coupling matrix with the
    /// factor one half.
    fn energy_matrix_oracle(inst: &SpinGlassInstance, x: &[i8]) -> f64 {
        let n = inst.n_sites();
        let mut a = vec![vec![0.0; n]; n];
        for b in inst.bonds() {
            a[b.i][b.j] = b.coupling;
            a[b.j][b.i] = b.coupling;
        }
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                total += 0.5 * a[i][j] * f64::from(x[i]) * f64::from(x[j]);
            }
            total += inst.fields()[i] * f64::from(x[i]);
        }
        total
    }

    #[test]
    fn grid_sizes_and_ranges() {
        let inst = gen_grid_instance(3, 11).unwrap();
        assert_eq!(inst.n_sites(), 9);
        assert_eq!(inst.bonds().len(), 18);
        let big = gen_grid_instance(20, 5).unwrap();
        assert_eq!(big.n_sites(), 400);
        assert_eq!(big.bonds().len(), 800);
        assert!(big.bonds().iter().all(|b| b.coupling.abs() <= 1.0));
        assert!(!big.has_fields());
        for site in 0..400 {
            assert_eq!(big.neighbors(site).len(), 4);
        }
    }

    #[test]
    fn grid_generation_is_deterministic() {
        assert_eq!(
            gen_grid_instance(3, 99).unwrap(),
            gen_grid_instance(3, 99).unwrap()
        );
        assert_ne!(
            gen_grid_instance(3, 99).unwrap().bonds(),
            gen_grid_instance(3, 100).unwrap().bonds()
        );
    }

    #[test]
    fn grid_rejects_parallel_bond_sides() {
        for side in [0, 1, 2] {
            match gen_grid_instance(side, 1) {
                Err(Error::InvalidParameter(msg)) => assert!(msg.contains("parallel bonds")),
                other => panic!("expected parameter error, got {other:?}"),
            }
        }
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            SpinGlassInstance::without_fields(2, [(0, 2, 1.0)]),
            Err(Error::InvalidSite { site: 2, .. })
        ));
        assert!(SpinGlassInstance::without_fields(2, [(1, 1, 1.0)]).is_err());
        assert!(SpinGlassInstance::without_fields(2, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(SpinGlassInstance::new(2, [], vec![0.0]).is_err());
        assert!(SpinConfig::new(vec![1, 0]).is_err());
    }

    #[test]
    fn single_bond_energy_and_delta() {
        let ferro = SpinGlassInstance::without_fields(2, [(0, 1, -1.0)]).unwrap();
        assert_eq!(energy(&ferro, &SpinConfig::all_up(2)).unwrap(), -1.0);
        let anti = SpinGlassInstance::without_fields(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(
            energy_delta(&anti, &SpinConfig::all_up(2), 0).unwrap(),
            -2.0
        );
        assert!(matches!(
            energy_delta(&anti, &SpinConfig::all_up(2), 2),
            Err(Error::InvalidSite { .. })
        ));
        assert!(matches!(
            energy(&anti, &SpinConfig::all_up(3)),
            Err(Error::Dimension {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn zero_couplings_have_zero_energy() {
        let inst = SpinGlassInstance::without_fields(4, [(0, 1, 0.0), (2, 3, 0.0)]).unwrap();
        for code in 0..16 {
            let x = SpinConfig::from_code(4, code);
            assert_eq!(energy(&inst, &x).unwrap(), 0.0);
            for i in 0..4 {
                assert_eq!(energy_delta(&inst, &x, i).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn energy_matches_matrix_resummation() {
        let inst = gen_grid_instance(3, 2024).unwrap();
        let x = SpinConfig::all_up(9);
        let direct = energy(&inst, &x).unwrap();
        assert!((direct - energy_matrix_oracle(&inst, x.spins())).abs() <= 1e-12);
    }

    #[test]
    fn delta_matches_recomputation_on_random_flips() {
        let inst = gen_grid_instance(4, 3).unwrap();
        let mut rng = rng::generator(17);
        for _ in 0..100 {
            let x = SpinConfig::random(16, &mut rng);
            let i = rng.random_range(0..16);
            let mut y = x.clone();
            y.flip(i);
            let diff = energy(&inst, &y).unwrap() - energy(&inst, &x).unwrap();
            assert!((energy_delta(&inst, &x, i).unwrap() - diff).abs() <= 1e-12);
        }
    }

    #[test]
    fn brute_force_small_cases() {
        let anti = SpinGlassInstance::without_fields(2, [(0, 1, 1.0)]).unwrap();
        let (x, e) = brute_force_ground_state(&anti).unwrap();
        assert_eq!(e, -1.0);
        // (-1, +1) has code 0b01, the smallest antiparallel encoding.
        assert_eq!(x.spins(), &[-1, 1]);

        let field = SpinGlassInstance::new(2, [], vec![1.0, 1.0]).unwrap();
        let (x, e) = brute_force_ground_state(&field).unwrap();
        assert_eq!(e, -2.0);
        assert_eq!(x.spins(), &[-1, -1]);
    }

    #[test]
    fn brute_force_matches_independent_enumeration() {
        let inst = gen_grid_instance(3, 8).unwrap();
        let (x, e) = brute_force_ground_state(&inst).unwrap();
        let oracle = (0..512u64)
            .map(|code| energy_matrix_oracle(&inst, SpinConfig::from_code(9, code).spins()))
            .fold(f64::INFINITY, f64::min);
        assert!((e - oracle).abs() <= 1e-12);
        assert_eq!(energy(&inst, &x).unwrap(), e);
    }

    #[test]
    fn brute_force_size_limit() {
        let inst = SpinGlassInstance::without_fields(25, []).unwrap();
        assert!(matches!(
            brute_force_ground_state(&inst),
            Err(Error::SizeLimit { size: 25, .. })
        ));
    }

    #[test]
    fn contraction_of_worked_triangle() {
        let tri = triangle();
        let plus = contract_pair(&tri, 1, 2, Orientation::Parallel).unwrap();
        assert_eq!(plus.reduced.n_sites(), 2);
        assert_eq!(plus.offset, 0.5);
        assert_eq!(plus.reduced.bonds().len(), 1);
        assert_eq!(plus.reduced.bonds()[0].coupling, 0.0);

        let minus = contract_pair(&tri, 1, 2, Orientation::Antiparallel).unwrap();
        assert_eq!(minus.offset, -0.5);
        assert_eq!(minus.reduced.bonds()[0].coupling, 2.0);
        assert!(!minus.reduced.has_fields());

        // Frozen values verified by enumerating all 8 parent states.
        for res in [&plus, &minus] {
            for code in 0..8 {
                let x = SpinConfig::from_code(3, code);
                if x.get(2) != res.relative_sign.sign() * x.get(1) {
                    continue;
                }
                let parent = energy(&tri, &x).unwrap();
                let child = energy(&res.reduced, &res.restrict(&x)).unwrap();
                assert_eq!(parent, child + res.offset);
                assert_eq!(res.expand(&res.restrict(&x)), x);
            }
        }
    }

    #[test]
    fn contraction_errors() {
        let tri = triangle();
        assert!(contract_pair(&tri, 1, 1, Orientation::Parallel).is_err());
        assert!(contract_pair(&tri, 0, 3, Orientation::Parallel).is_err());
        assert!(Orientation::from_sign(0).is_err());
    }

    #[test]
    fn contraction_folds_fields() {
        let inst =
            SpinGlassInstance::new(3, [(0, 1, 0.3), (1, 2, -0.7)], vec![0.25, -1.5, 2.0]).unwrap();
        let res = contract_pair(&inst, 0, 2, Orientation::Antiparallel).unwrap();
        assert_eq!(res.reduced.fields(), &[0.25 - 2.0, -1.5]);
        for code in 0..8 {
            let x = SpinConfig::from_code(3, code);
            if x.get(2) == -x.get(0) {
                let lhs = energy(&inst, &x).unwrap();
                let rhs = energy(&res.reduced, &res.restrict(&x)).unwrap() + res.offset;
                assert!((lhs - rhs).abs() <= 1e-12);
            }
        }
    }

    fn arb_instance(max_sites: usize) -> impl Strategy<Value = SpinGlassInstance> {
        (2..=max_sites).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            let m = pairs.len();
            (
                proptest::collection::vec(proptest::option::weighted(0.5, -2.0f64..2.0), m),
                proptest::collection::vec(proptest::option::weighted(0.3, -1.0f64..1.0), n),
            )
                .prop_map(move |(couplings, fields)| {
                    let bonds = pairs
                        .iter()
                        .zip(couplings)
                        .filter_map(|(&(i, j), a)| a.map(|a| (i, j, a)));
                    let fields = fields.into_iter().map(|b| b.unwrap_or(0.0)).collect();
                    SpinGlassInstance::new(n, bonds, fields).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn delta_equals_difference_exhaustively(inst in arb_instance(8)) {
            let n = inst.n_sites();
            for code in 0..(1u64 << n) {
                let x = SpinConfig::from_code(n, code);
                let e = energy(&inst, &x).unwrap();
                for i in 0..n {
                    let mut y = x.clone();
                    y.flip(i);
                    let diff = energy(&inst, &y).unwrap() - e;
                    prop_assert!((energy_delta(&inst, &x, i).unwrap() - diff).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn contraction_identity_and_ground_state(inst in arb_instance(8), k in 0usize..8, l in 0usize..8) {
            let n = inst.n_sites();
            let (k, l) = (k % n, l % n);
            prop_assume!(k != l);
            let (_, ground) = brute_force_ground_state(&inst).unwrap();
            let mut best = f64::INFINITY;
            for rel in [Orientation::Parallel, Orientation::Antiparallel] {
                let res = contract_pair(&inst, k, l, rel).unwrap();
                prop_assert_eq!(res.reduced.n_sites(), n - 1);
                for code in 0..(1u64 << n) {
                    let x = SpinConfig::from_code(n, code);
                    if x.get(l) != rel.sign() * x.get(k) {
                        continue;
                    }
                    let lhs = energy(&inst, &x).unwrap();
                    let rhs = energy(&res.reduced, &res.restrict(&x)).unwrap() + res.offset;
                    prop_assert!((lhs - rhs).abs() <= 1e-12);
                }
                let (_, sub) = brute_force_ground_state(&res.reduced).unwrap();
                best = best.min(sub + res.offset);
            }
            prop_assert!((best - ground).abs() <= 1e-12);
        }
    }
}
