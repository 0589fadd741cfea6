//! Spanning-forest encodings of spin glasses.
//!
//! A forest `y` freezes every connected component to a single block spin,
//! so `φ(y)` is the set of configurations that are constant on components.
//! Restricting the energy to `φ(y)` gives a smaller spin glass on the
//! components plus a constant:
//!
//! ```text
//! f(lift(y, z)) = Σ_{c<d} a_cd z_c z_d + offset
//! a_cd   = Σ_{i∈c, j∈d} a_ij
//! offset = Σ_{bonds inside a component} a_ij
//! ```
//!
//! Forest edges may join any two sites, not just lattice neighbors.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rustc_hash::FxHashMap;

use crate::spinglass::{SpinConfig, SpinGlassInstance};
use crate::{Error, Result, UnionFind};

/// Largest number of components the exact oracle will enumerate.
pub const ORACLE_LIMIT: usize = 24;

/// Block-spin configuration, one ±1 entry per component.
pub type CoarseConfig = SpinConfig;

/// Acyclic set of site pairs.
///
/// Edges are stored normalized (`i < j`) in insertion order; removals use
/// `swap_remove`, so the order depends on the move history but equality and
/// serialization use the sorted edge set.
#[derive(Clone, Debug)]
pub struct Forest {
    n_sites: usize,
    edges: Vec<(usize, usize)>,
}

impl PartialEq for Forest {
    fn eq(&self, other: &Self) -> bool {
        self.n_sites == other.n_sites && self.sorted_edges() == other.sorted_edges()
    }
}

impl Eq for Forest {}

impl Forest {
    pub fn empty(n_sites: usize) -> Self {
        Self {
            n_sites,
            edges: Vec::new(),
        }
    }

    pub fn from_edges<I>(n_sites: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut forest = Self::empty(n_sites);
        let mut uf = UnionFind::new(n_sites);
        for (i, j) in edges {
            forest.check_pair(i, j)?;
            if !uf.union(i, j) {
                return Err(Error::InvalidForest(format!(
                    "edge ({i}, {j}) closes a cycle or repeats an edge"
                )));
            }
            forest.edges.push((i.min(j), i.max(j)));
        }
        Ok(forest)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for site in [i, j] {
            if site >= self.n_sites {
                return Err(Error::InvalidSite {
                    site,
                    n_sites: self.n_sites,
                });
            }
        }
        if i == j {
            return Err(Error::InvalidForest(format!("self-loop on site {i}")));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_components(&self) -> usize {
        self.n_sites - self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.edges.contains(&key)
    }

    pub fn union_find(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.n_sites);
        for &(i, j) in &self.edges {
            uf.union(i, j);
        }
        uf
    }

    /// Adds edge `{i, j}`; fails if it would close a cycle.
    pub fn insert_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        if self.union_find().same(i, j) {
            return Err(Error::InvalidForest(format!(
                "edge ({i}, {j}) joins sites of the same component"
            )));
        }
        self.edges.push((i.min(j), i.max(j)));
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        match self.edges.iter().position(|&e| e == key) {
            Some(idx) => {
                self.edges.swap_remove(idx);
                true
            }
            None => false,
        }
    }

    pub fn partition(&self) -> Partition {
        components(self)
    }

    /// Forest with `n_edges` edges built by drawing uniform site pairs and
    /// keeping those that join two different components.
    pub fn random<R: Rng + ?Sized>(n_sites: usize, n_edges: usize, rng: &mut R) -> Result<Self> {
        if n_edges >= n_sites.max(1) {
            return Err(Error::InvalidParameter(format!(
                "a forest on {n_sites} sites has at most {} edges, {n_edges} requested",
                n_sites.saturating_sub(1)
            )));
        }
        let mut forest = Self::empty(n_sites);
        let mut uf = UnionFind::new(n_sites);
        while forest.edges.len() < n_edges {
            let (i, j) = draw_distinct_pair(n_sites, rng);
            if uf.union(i, j) {
                forest.edges.push((i.min(j), i.max(j)));
            }
        }
        Ok(forest)
    }
}

/// Ordered pair `(i, j)` with `i ≠ j`, uniform over all such pairs.
pub(crate) fn draw_distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Connected components of a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Component id of every site.
    pub component_of: Vec<usize>,
    /// Members of every component, ascending; ids ordered by smallest member.
    pub components: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }
}

/// Component id of every site and the number of components, ids ordered by
/// smallest member.
fn site_labels(y: &Forest) -> (Vec<usize>, usize) {
    let mut uf = y.union_find();
    let n = y.n_sites();
    let mut id_of_root = vec![usize::MAX; n];
    let mut component_of = Vec::with_capacity(n);
    let mut count = 0;
    for site in 0..n {
        let root = uf.find(site);
        if id_of_root[root] == usize::MAX {
            id_of_root[root] = count;
            count += 1;
        }
        component_of.push(id_of_root[root]);
    }
    (component_of, count)
}

pub fn components(y: &Forest) -> Partition {
    let (component_of, count) = site_labels(y);
    let mut comps: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (site, &c) in component_of.iter().enumerate() {
        comps[c].push(site);
    }
    Partition {
        component_of,
        components: comps,
    }
}

/// Block-spin Hamiltonian of a forest encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseInstance {
    pub n_components: usize,
    /// `(c, d, a_cd)` with `c < d`, sorted by `(c, d)`.
    pub couplings: Vec<(usize, usize, f64)>,
    /// Sum of the couplings internal to components.
    pub offset: f64,
}

impl CoarseInstance {
    pub fn coupling(&self, c: usize, d: usize) -> f64 {
        let key = (c.min(d), c.max(d));
        self.couplings
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|idx| self.couplings[idx].2)
            .unwrap_or(0.0)
    }

    /// `f_y(z)`, without the offset.
    pub fn energy(&self, z: &CoarseConfig) -> Result<f64> {
        if z.len() != self.n_components {
            return Err(Error::Dimension {
                expected: self.n_components,
                got: z.len(),
            });
        }
        let s = z.spins();
        Ok(self
            .couplings
            .iter()
            .map(|&(c, d, a)| a * f64::from(s[c] * s[d]))
            .sum())
    }
}

fn require_no_fields(inst: &SpinGlassInstance) -> Result<()> {
    if inst.has_fields() {
        return Err(Error::Unsupported(
            "forest encodings lump parallel spins only and need all fields b_i = 0".into(),
        ));
    }
    Ok(())
}

fn require_matching(inst: &SpinGlassInstance, y: &Forest) -> Result<()> {
    if inst.n_sites() != y.n_sites() {
        return Err(Error::Dimension {
            expected: inst.n_sites(),
            got: y.n_sites(),
        });
    }
    Ok(())
}

/// Stable counting sort of `items` by a key below `n_keys`.
fn counting_sort_by<T: Copy>(items: &[T], n_keys: usize, key: impl Fn(&T) -> usize) -> Vec<T> {
    let mut start = vec![0usize; n_keys + 1];
    for item in items {
        start[key(item) + 1] += 1;
    }
    for k in 0..n_keys {
        start[k + 1] += start[k];
    }
    let mut sorted = items.to_vec();
    for item in items {
        let slot = &mut start[key(item)];
        sorted[*slot] = *item;
        *slot += 1;
    }
    sorted
}

fn coarse_from_labels(
    inst: &SpinGlassInstance,
    component_of: &[usize],
    n_components: usize,
) -> CoarseInstance {
    let mut offset = 0.0;
    let mut cross = Vec::with_capacity(inst.bonds().len());
    for bond in inst.bonds() {
        let c = component_of[bond.i];
        let d = component_of[bond.j];
        if c == d {
            offset += bond.coupling;
        } else {
            cross.push((c.min(d), c.max(d), bond.coupling));
        }
    }
    // Stable sort keeps bond order within a pair, so sums are reproducible.
    let cross = counting_sort_by(
        &counting_sort_by(&cross, n_components, |e| e.1),
        n_components,
        |e| e.0,
    );
    let mut couplings: Vec<(usize, usize, f64)> = Vec::with_capacity(cross.len());
    for (c, d, a) in cross {
        match couplings.last_mut() {
            Some(last) if last.0 == c && last.1 == d => last.2 += a,
            _ => couplings.push((c, d, a)),
        }
    }
    CoarseInstance {
        n_components,
        couplings,
        offset,
    }
}

/// Coarse-grained couplings and offset of `inst` under forest `y`.
pub fn coarse_grain(inst: &SpinGlassInstance, y: &Forest) -> Result<CoarseInstance> {
    require_matching(inst, y)?;
    require_no_fields(inst)?;
    let (labels, count) = site_labels(y);
    Ok(coarse_from_labels(inst, &labels, count))
}

fn lift_labels(component_of: &[usize], z: &[i8]) -> SpinConfig {
    SpinConfig::new(component_of.iter().map(|&c| z[c]).collect()).expect("block spins are ±1")
}

/// Spin configuration with every site set to its component's block spin.
pub fn lift(y: &Forest, z: &CoarseConfig) -> Result<SpinConfig> {
    let (labels, count) = site_labels(y);
    if z.len() != count {
        return Err(Error::Dimension {
            expected: count,
            got: z.len(),
        });
    }
    Ok(lift_labels(&labels, z.spins()))
}

/// Exact oracle: the minimum energy over `φ(y)`.
///
/// Enumerates all block-spin vectors of the coarse instance (ties go to the
/// smallest binary encoding, component 0 most significant). The returned
/// value is the energy of the lifted minimizer.
pub fn oracle_f(inst: &SpinGlassInstance, y: &Forest) -> Result<(f64, SpinConfig)> {
    require_matching(inst, y)?;
    require_no_fields(inst)?;
    let (labels, n) = site_labels(y);
    if n > ORACLE_LIMIT {
        return Err(Error::SizeLimit {
            what: "number of components",
            size: n,
            limit: ORACLE_LIMIT,
        });
    }
    let coarse = coarse_from_labels(inst, &labels, n);
    let terms: Vec<(u32, u32, f64)> = coarse
        .couplings
        .iter()
        .map(|&(c, d, a)| ((n - 1 - c) as u32, (n - 1 - d) as u32, a))
        .collect();
    let mut best = f64::INFINITY;
    let mut best_code = 0u64;
    for code in 0..(1u64 << n) {
        let mut e = 0.0;
        for &(bc, bd, a) in &terms {
            let same = ((code >> bc) ^ (code >> bd)) & 1 == 0;
            e += if same { a } else { -a };
        }
        if e < best {
            best = e;
            best_code = code;
        }
    }
    let z = SpinConfig::from_code(n, best_code);
    let x = lift_labels(&labels, z.spins());
    Ok((inst.energy_of(x.spins()), x))
}

/// Greedy block-spin assignment on a coarse instance.
///
/// While more than two blocks remain, the pair with the smallest working
/// coupling is merged as parallel and its coupling rows are added. Pairs
/// without a coupling count as zero. With two blocks left their relative
/// orientation is chosen to minimize the remaining coupling; one block is
/// all-parallel. Returns one ±1 entry per component, component 0 set to +1.
pub fn greedy_block_spins(coarse: &CoarseInstance) -> Vec<i8> {
    let n = coarse.n_components;
    if n <= 1 {
        return vec![1; n];
    }
    let mut merger = GreedyMerger::new(coarse);
    while merger.live.count > 2 {
        let (p, q) = merger.select_pair();
        merger.merge(p, q);
    }
    let first = merger.live.first_from(0);
    let second = merger.live.first_from(first + 1);
    let remaining = merger.coupling(first, second).unwrap_or(0.0);
    let second_sign: i8 = if remaining > 0.0 { -1 } else { 1 };

    let root_first = merger.groups.find(first as usize);
    let mut z: Vec<i8> = (0..n)
        .map(|c| {
            if merger.groups.find(c) == root_first {
                1
            } else {
                second_sign
            }
        })
        .collect();
    if z[0] == -1 {
        z.iter_mut().for_each(|s| *s = -*s);
    }
    z
}

/// Working state of the greedy merge. Blocks are addressed by slot index.
/// `weight` holds every nonzero coupling; neighbor lists may hold stale
/// entries, which are skipped, while `degree` counts live couplings exactly.
/// A merge keeps the slot with more neighbors.
///
/// Merging never turns nonnegative couplings negative, so the merge runs in
/// three phases: negative couplings, then zero pairs, then (on a complete
/// graph) positive couplings. The heap holds negative couplings until the
/// last phase starts and is then rebuilt from `weight`. Heap entries are
/// checked against `weight` when they reach the top.
struct GreedyMerger {
    weight: FxHashMap<u64, f64>,
    neighbors: NeighborLists,
    degree: Vec<usize>,
    heap: BinaryHeap<Reverse<u128>>,
    complete: bool,
    live: LiveSlots,
    groups: UnionFind,
    stored: usize,
    /// `(p, f)`: every live slot strictly between `p` and `f` couples to `p`.
    frontier: Option<(u32, u32)>,
}

const NIL: u32 = u32::MAX;

/// Singly linked neighbor lists sharing one arena.
struct NeighborLists {
    head: Vec<u32>,
    next: Vec<u32>,
    target: Vec<u32>,
}

impl NeighborLists {
    fn new(n: usize, capacity: usize) -> Self {
        Self {
            head: vec![NIL; n],
            next: Vec::with_capacity(capacity),
            target: Vec::with_capacity(capacity),
        }
    }

    fn push(&mut self, slot: u32, r: u32) {
        self.next.push(self.head[slot as usize]);
        self.target.push(r);
        self.head[slot as usize] = (self.target.len() - 1) as u32;
    }

    /// Detaches the list of `slot`; returns its first link.
    fn take(&mut self, slot: u32) -> u32 {
        std::mem::replace(&mut self.head[slot as usize], NIL)
    }
}

/// Live slots in ascending order. `skip[s]` points at or before the next
/// live slot at or after `s`; slot `n` is a sentinel.
struct LiveSlots {
    skip: Vec<u32>,
    count: usize,
}

impl LiveSlots {
    fn new(n: usize) -> Self {
        Self {
            skip: (0..=n as u32).collect(),
            count: n,
        }
    }

    /// Smallest live slot `≥ s`, or `n` if there is none.
    fn first_from(&mut self, s: u32) -> u32 {
        let mut root = s;
        while self.skip[root as usize] != root {
            root = self.skip[root as usize];
        }
        let mut node = s;
        while self.skip[node as usize] != root {
            let next = self.skip[node as usize];
            self.skip[node as usize] = root;
            node = next;
        }
        root
    }

    fn remove(&mut self, s: u32) {
        self.skip[s as usize] = s + 1;
        self.count -= 1;
    }
}

fn pair_key(a: u32, b: u32) -> u64 {
    (u64::from(a.min(b)) << 32) | u64::from(a.max(b))
}

/// Heap key ordered like `(w, min(a, b), max(a, b))` for non-NaN `w`.
fn heap_key(w: f64, a: u32, b: u32) -> u128 {
    let bits = w.to_bits();
    let ordered = if bits >> 63 == 1 {
        !bits
    } else {
        bits | 1 << 63
    };
    (u128::from(ordered) << 64) | u128::from(pair_key(a, b))
}

fn split_heap_key(key: u128) -> (f64, u32, u32) {
    let ordered = (key >> 64) as u64;
    let bits = if ordered >> 63 == 1 {
        ordered & !(1 << 63)
    } else {
        !ordered
    };
    (f64::from_bits(bits), (key >> 32) as u32, key as u32)
}

impl GreedyMerger {
    fn new(coarse: &CoarseInstance) -> Self {
        let n = coarse.n_components;
        let mut weight = FxHashMap::default();
        weight.reserve(coarse.couplings.len());
        let mut neighbors = NeighborLists::new(n, 2 * coarse.couplings.len());
        let mut degree = vec![0; n];
        let mut entries = Vec::with_capacity(coarse.couplings.len());
        for &(c, d, a) in &coarse.couplings {
            if a != 0.0 {
                let (c, d) = (c as u32, d as u32);
                weight.insert(pair_key(c, d), a);
                neighbors.push(c, d);
                neighbors.push(d, c);
                degree[c as usize] += 1;
                degree[d as usize] += 1;
                if a < 0.0 {
                    entries.push(Reverse(heap_key(a, c, d)));
                }
            }
        }
        Self {
            stored: weight.len(),
            weight,
            neighbors,
            degree,
            heap: BinaryHeap::from(entries),
            complete: false,
            live: LiveSlots::new(n),
            groups: UnionFind::new(n),
            frontier: None,
        }
    }

    fn coupling(&self, a: u32, b: u32) -> Option<f64> {
        self.weight.get(&pair_key(a, b)).copied()
    }

    /// Smallest current coupling as `(w, lo, hi)`, discarding stale entries.
    fn smallest_stored(&mut self) -> Option<(f64, u32, u32)> {
        while let Some(&Reverse(key)) = self.heap.peek() {
            let (w, p, q) = split_heap_key(key);
            if self.coupling(p, q) == Some(w) {
                return Some((w, p, q));
            }
            self.heap.pop();
        }
        None
    }

    fn select_pair(&mut self) -> (u32, u32) {
        if let Some((_, p, q)) = self.smallest_stored() {
            return (p, q);
        }
        let alive = self.live.count;
        if self.stored < alive * (alive - 1) / 2 {
            // The first block lacking a neighbor has all its missing partners
            // after it, so it starts the lexicographically smallest zero pair.
            let mut p = self.live.first_from(0);
            while self.degree[p as usize] == alive - 1 {
                p = self.live.first_from(p + 1);
            }
            let mut q = match self.frontier {
                Some((fp, f)) if fp == p => self.live.first_from(f),
                _ => self.live.first_from(p + 1),
            };
            while self.weight.contains_key(&pair_key(p, q)) {
                q = self.live.first_from(q + 1);
            }
            debug_assert!((q as usize) < self.degree.len());
            self.frontier = Some((p, q));
            return (p, q);
        }
        debug_assert!(!self.complete);
        self.complete = true;
        self.heap = self
            .weight
            .iter()
            .map(|(&pair, &w)| Reverse(heap_key(w, (pair >> 32) as u32, pair as u32)))
            .collect();
        let (_, p, q) = self
            .smallest_stored()
            .expect("complete graph has couplings");
        (p, q)
    }

    fn unlink(&mut self, a: u32, b: u32) -> Option<f64> {
        let w = self.weight.remove(&pair_key(a, b))?;
        self.degree[a as usize] -= 1;
        self.degree[b as usize] -= 1;
        self.stored -= 1;
        Some(w)
    }

    fn merge(&mut self, p: u32, q: u32) {
        let (keep, gone) = if self.degree[q as usize] > self.degree[p as usize] {
            (q, p)
        } else {
            (p, q)
        };
        if matches!(self.frontier, Some((fp, _)) if fp == gone) {
            self.frontier = None;
        }
        self.unlink(keep, gone);
        let mut link = self.neighbors.take(gone);
        while link != NIL {
            let r = self.neighbors.target[link as usize];
            link = self.neighbors.next[link as usize];
            // Stale entries and duplicates find no coupling.
            let Some(w) = self.unlink(gone, r) else {
                continue;
            };
            let combined = self.unlink(keep, r).map_or(w, |v| v + w);
            if combined == 0.0 {
                if matches!(self.frontier, Some((fp, _)) if fp == keep || fp == r) {
                    self.frontier = None;
                }
                continue;
            }
            self.weight.insert(pair_key(keep, r), combined);
            self.degree[keep as usize] += 1;
            self.degree[r as usize] += 1;
            self.stored += 1;
            self.neighbors.push(keep, r);
            self.neighbors.push(r, keep);
            if combined < 0.0 || self.complete {
                self.heap.push(Reverse(heap_key(combined, keep, r)));
            }
        }
        self.live.remove(gone);
        self.groups.union(keep as usize, gone as usize);
    }
}

/// Heuristic oracle: greedy merging of the coarse instance, evaluated on the
/// original instance. Always `G(y) ≥ F(y)`, with equality for at most two
/// components.
pub fn heuristic_g(inst: &SpinGlassInstance, y: &Forest) -> Result<(f64, SpinConfig)> {
    require_matching(inst, y)?;
    require_no_fields(inst)?;
    let (labels, count) = site_labels(y);
    let coarse = coarse_from_labels(inst, &labels, count);
    let z = greedy_block_spins(&coarse);
    let x = lift_labels(&labels, &z);
    Ok((inst.energy_of(x.spins()), x))
}

/// Neighbor of `y` in the forest move set.
///
/// Draws an ordered pair `i ≠ j` uniformly. If `i` and `j` lie in different
/// components the edge `{i, j}` is added; otherwise a uniformly chosen
/// existing edge is removed. Forests with fewer than two sites are returned
/// unchanged.
pub fn propose_forest_move<R: Rng + ?Sized>(y: &Forest, rng: &mut R) -> Forest {
    let mut next = y.clone();
    if y.n_sites() < 2 {
        return next;
    }
    let (i, j) = draw_distinct_pair(y.n_sites(), rng);
    if !y.union_find().same(i, j) {
        next.edges.push((i.min(j), i.max(j)));
    } else if !next.edges.is_empty() {
        let idx = rng.random_range(0..next.edges.len());
        next.edges.swap_remove(idx);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::spinglass::{energy, gen_grid_instance};
    use proptest::prelude::*;

    fn toy_three_blocks() -> SpinGlassInstance {
        // Three isolated sites with couplings a'12 = -2, a'13 = 1, a'23 = 0.5.
        SpinGlassInstance::without_fields(3, [(0, 1, -2.0), (0, 2, 1.0), (1, 2, 0.5)]).unwrap()
    }

    /// Minimum energy over φ(y) by enumerating every configuration and
    /// keeping those constant on the forest's components.
    fn restricted_minimum(inst: &SpinGlassInstance, y: &Forest) -> f64 {
        let n = inst.n_sites();
        let mut uf = y.union_find();
        let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
        (0..(1u64 << n))
            .map(|code| SpinConfig::from_code(n, code))
            .filter(|x| (0..n).all(|i| x.get(i) == x.get(roots[i])))
            .map(|x| energy(inst, &x).unwrap())
            .fold(f64::INFINITY, f64::min)
    }

    /// Dense-matrix greedy merge: argmin of `(w, p, q)` over all live slot
    /// pairs, absent pairs counting as zero.
    fn dense_greedy(coarse: &CoarseInstance) -> Vec<i8> {
        let n = coarse.n_components;
        if n <= 1 {
            return vec![1; n];
        }
        let mut w = vec![vec![0.0f64; n]; n];
        for &(c, d, a) in &coarse.couplings {
            w[c][d] = a;
            w[d][c] = a;
        }
        let mut alive: Vec<usize> = (0..n).collect();
        let mut group: Vec<usize> = (0..n).collect();
        let degree = |w: &Vec<Vec<f64>>, alive: &[usize], p: usize| {
            alive.iter().filter(|&&r| r != p && w[p][r] != 0.0).count()
        };
        while alive.len() > 2 {
            let mut best = (f64::INFINITY, 0, 0);
            for (a, &p) in alive.iter().enumerate() {
                for &q in &alive[a + 1..] {
                    if (w[p][q], p, q) < best {
                        best = (w[p][q], p, q);
                    }
                }
            }
            let (_, p, q) = best;
            let (keep, gone) = if degree(&w, &alive, q) > degree(&w, &alive, p) {
                (q, p)
            } else {
                (p, q)
            };
            alive.retain(|&s| s != gone);
            for &r in &alive {
                if r != keep {
                    let v = w[keep][r] + w[gone][r];
                    w[keep][r] = v;
                    w[r][keep] = v;
                }
            }
            for g in group.iter_mut() {
                if *g == gone {
                    *g = keep;
                }
            }
        }
        let sign = if w[alive[0]][alive[1]] > 0.0 { -1 } else { 1 };
        let mut z: Vec<i8> = group
            .iter()
            .map(|&g| if g == alive[0] { 1 } else { sign })
            .collect();
        if z[0] == -1 {
            z.iter_mut().for_each(|s| *s = -*s);
        }
        z
    }

    #[test]
    fn components_examples() {
        let empty = Forest::empty(4).partition();
        assert_eq!(empty.components, vec![vec![0], vec![1], vec![2], vec![3]]);
        let path = Forest::from_edges(4, [(0, 1), (1, 2)]).unwrap().partition();
        assert_eq!(path.components, vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(path.component_of, vec![0, 0, 0, 1]);
        let tree = Forest::from_edges(5, [(4, 0), (0, 2), (3, 1), (1, 4)]).unwrap();
        assert_eq!(tree.partition().len(), 1);
        // Ids follow smallest members.
        let p = Forest::from_edges(4, [(2, 3), (1, 0)]).unwrap().partition();
        assert_eq!(p.components, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn forest_validation() {
        assert!(Forest::from_edges(3, [(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Forest::from_edges(3, [(0, 0)]).is_err());
        assert!(Forest::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Forest::from_edges(3, [(0, 3)]).is_err());
        let mut f = Forest::from_edges(3, [(0, 1)]).unwrap();
        assert!(f.insert_edge(1, 0).is_err());
        f.insert_edge(2, 1).unwrap();
        assert_eq!(f.n_components(), 1);
        assert!(f.remove_edge(0, 1));
        assert!(!f.remove_edge(0, 1));
        assert_eq!(f, Forest::from_edges(3, [(1, 2)]).unwrap());
    }

    #[test]
    fn coarse_grain_extremes() {
        let inst = gen_grid_instance(3, 4).unwrap();
        let same = coarse_grain(&inst, &Forest::empty(9)).unwrap();
        assert_eq!(same.offset, 0.0);
        assert_eq!(same.couplings.len(), 18);
        for b in inst.bonds() {
            assert_eq!(same.coupling(b.i, b.j), b.coupling);
        }
        let tree = Forest::from_edges(9, (1..9).map(|i| (i - 1, i))).unwrap();
        let one = coarse_grain(&inst, &tree).unwrap();
        assert!(one.couplings.is_empty());
        let total: f64 = inst.bonds().iter().map(|b| b.coupling).sum();
        assert!((one.offset - total).abs() <= 1e-12);
    }

    #[test]
    fn coarse_grain_rejects_fields() {
        let inst = SpinGlassInstance::new(2, [(0, 1, 1.0)], vec![0.5, 0.0]).unwrap();
        assert!(matches!(
            coarse_grain(&inst, &Forest::empty(2)),
            Err(Error::Unsupported(_))
        ));
        assert!(heuristic_g(&inst, &Forest::empty(2)).is_err());
    }

    #[test]
    fn lift_examples() {
        let z = SpinConfig::new(vec![1, -1, -1]).unwrap();
        assert_eq!(lift(&Forest::empty(3), &z).unwrap(), z);
        let tree = Forest::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            lift(&tree, &SpinConfig::all_up(1)).unwrap(),
            SpinConfig::all_up(3)
        );
        let two = Forest::from_edges(3, [(0, 1)]).unwrap();
        let x = lift(&two, &SpinConfig::new(vec![1, -1]).unwrap()).unwrap();
        assert_eq!(x.spins(), &[1, 1, -1]);
        assert!(matches!(
            lift(&two, &SpinConfig::all_up(3)),
            Err(Error::Dimension {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn oracle_examples() {
        let toy = toy_three_blocks();
        let y = Forest::empty(3);
        // Enumeration of the 8 sign vectors: best is z1 = z2 = -z3, energy -2 - 1 - 0.5.
        let (f, x) = oracle_f(&toy, &y).unwrap();
        assert_eq!(f, -3.5);
        assert_eq!(energy(&toy, &x).unwrap(), -3.5);

        let inst = gen_grid_instance(3, 77).unwrap();
        let (f, _) = oracle_f(&inst, &Forest::empty(9)).unwrap();
        let (_, ground) = crate::spinglass::brute_force_ground_state(&inst).unwrap();
        assert!((f - ground).abs() <= 1e-12);

        // Two blocks {0,1} and {2,3} with cross coupling 3 and internal -1, 0.25.
        let pair = SpinGlassInstance::without_fields(
            4,
            [(0, 1, -1.0), (2, 3, 0.25), (1, 2, 2.0), (0, 3, 1.0)],
        )
        .unwrap();
        let y = Forest::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let offset = -1.0 + 0.25;
        assert_eq!(oracle_f(&pair, &y).unwrap().0, -3.0 + offset);
        let (g, x) = heuristic_g(&pair, &y).unwrap();
        assert_eq!(g, -3.0 + offset);
        assert_eq!(x.spins(), &[1, 1, -1, -1]);
    }

    #[test]
    fn heuristic_examples() {
        let toy = toy_three_blocks();
        let (g, x) = heuristic_g(&toy, &Forest::empty(3)).unwrap();
        // Merges {1,2} first (coupling -2), then places {3} antiparallel.
        assert_eq!(g, -3.5);
        assert_eq!(x.spins(), &[1, 1, -1]);

        let zero = SpinGlassInstance::without_fields(5, [(0, 1, 0.0), (3, 4, 0.0)]).unwrap();
        let mut rng = rng::generator(3);
        for edges in 0..5 {
            let y = Forest::random(5, edges, &mut rng).unwrap();
            assert_eq!(heuristic_g(&zero, &y).unwrap().0, 0.0);
        }

        let single = SpinGlassInstance::without_fields(1, []).unwrap();
        assert_eq!(heuristic_g(&single, &Forest::empty(1)).unwrap().0, 0.0);
    }

    #[test]
    fn greedy_prefers_zero_pairs_over_positive_couplings() {
        // Antiferromagnetic path 0-1-2-3: no negative couplings, so the
        // uncoupled pair (0, 2) merges first, then (1, 3) via the summed row.
        let coarse = CoarseInstance {
            n_components: 4,
            couplings: vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
            offset: 0.0,
        };
        assert_eq!(greedy_block_spins(&coarse), vec![1, -1, 1, -1]);
    }

    #[test]
    fn proposals_on_empty_and_spanning_forests() {
        let mut rng = rng::generator(9);
        for _ in 0..50 {
            let y = propose_forest_move(&Forest::empty(6), &mut rng);
            assert_eq!(y.n_edges(), 1);
        }
        let tree = Forest::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        for _ in 0..50 {
            let y = propose_forest_move(&tree, &mut rng);
            assert_eq!(y.n_edges(), 4);
            assert!(y.edges().iter().all(|&(i, j)| tree.contains_edge(i, j)));
        }
        let lone = Forest::empty(1);
        assert_eq!(propose_forest_move(&lone, &mut rng), lone);
    }

    #[test]
    fn proposals_preserve_acyclicity() {
        let mut rng = rng::generator(12345);
        let mut y = Forest::empty(100);
        for _ in 0..100_000 {
            y = propose_forest_move(&y, &mut rng);
        }
        // Re-validating from scratch rejects any cycle or duplicate.
        let rebuilt = Forest::from_edges(100, y.edges().iter().copied()).unwrap();
        assert_eq!(rebuilt.n_components(), 100 - y.n_edges());
    }

    proptest! {
        #[test]
        fn greedy_matches_dense_reference(
            n in 1usize..12,
            raw in prop::collection::vec((0usize..12, 0usize..12, -2i32..=2), 0..40),
        ) {
            // Small integer couplings make ties and exact cancellations common.
            let mut map = std::collections::BTreeMap::new();
            for (c, d, a) in raw {
                let (c, d) = (c % n, d % n);
                if c != d {
                    map.insert((c.min(d), c.max(d)), f64::from(a));
                }
            }
            let coarse = CoarseInstance {
                n_components: n,
                couplings: map.into_iter().map(|((c, d), a)| (c, d, a)).collect(),
                offset: 0.0,
            };
            prop_assert_eq!(greedy_block_spins(&coarse), dense_greedy(&coarse));
        }

    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lifted_energy_identity(seed in any::<u64>(), side in 3usize..=6, frac in 0.0f64..1.0) {
            let inst = gen_grid_instance(side, seed).unwrap();
            let n = inst.n_sites();
            let mut rng = rng::generator(seed ^ 0x5eed);
            let edges = ((n - 1) as f64 * frac) as usize;
            let y = Forest::random(n, edges, &mut rng).unwrap();
            let coarse = coarse_grain(&inst, &y).unwrap();
            let z = SpinConfig::random(coarse.n_components, &mut rng);
            let lhs = energy(&inst, &lift(&y, &z).unwrap()).unwrap();
            let rhs = coarse.energy(&z).unwrap() + coarse.offset;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }

        #[test]
        fn oracles_agree_with_restricted_enumeration(seed in any::<u64>(), edges in 0usize..9) {
            let inst = gen_grid_instance(3, seed).unwrap();
            let mut rng = rng::generator(seed.rotate_left(7));
            let y = Forest::random(9, edges, &mut rng).unwrap();
            let exact = restricted_minimum(&inst, &y);
            let (f, x) = oracle_f(&inst, &y).unwrap();
            prop_assert!((f - exact).abs() <= 1e-12);
            prop_assert_eq!(lift(&y, &SpinConfig::new(
                y.partition().components.iter().map(|c| x.get(c[0])).collect()).unwrap()).unwrap(), x);
            let (g, xg) = heuristic_g(&inst, &y).unwrap();
            prop_assert!(f <= g + 1e-12);
            prop_assert_eq!(energy(&inst, &xg).unwrap(), g);
            if y.n_components() <= 2 {
                prop_assert!((g - f).abs() <= 1e-12);
            }
        }

        #[test]
        fn move_sequences_keep_a_forest(seed in any::<u64>(), n in 2usize..30, steps in 1usize..400) {
            let mut rng = rng::generator(seed);
            let mut y = Forest::empty(n);
            for _ in 0..steps {
                let next = propose_forest_move(&y, &mut rng);
                prop_assert_eq!(next.n_edges().abs_diff(y.n_edges()), 1);
                y = next;
            }
            let rebuilt = Forest::from_edges(n, y.edges().iter().copied());
            prop_assert!(rebuilt.is_ok());
        }
    }
}
