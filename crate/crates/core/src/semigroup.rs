//! Encoding digraphs and their collapsing maps on small, fully enumerated
//! encoding spaces.
//!
//! An encoding digraph has the encodings as vertices and an arc `y → y'`
//! for every adjacent pair with `h(y) ≥ h(y')`, where `h(y) = |φ(y)|` counts
//! the configurations an encoding admits. Equal-`h` neighbors get arcs in
//! both directions. The elementary collapsing map of an arc sends its tail
//! to its head and fixes every other vertex; compositions of these maps can
//! only lower `h`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::encoding::Forest;
use crate::{Error, Result};

/// Longest schema whose members [`schema_members`] will list.
pub const SCHEMA_MEMBER_LIMIT: usize = 20;
/// Longest schema for which the full digraph (3^N vertices) is built.
pub const SCHEMA_DIGRAPH_LIMIT: usize = 4;
/// Most sites for which all forests are enumerated.
pub const FOREST_SPACE_LIMIT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    Wildcard,
}

impl Symbol {
    fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Wildcard => '*',
        }
    }
}

/// String over `{0, 1, *}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schema(Vec<Symbol>);

impl Schema {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn wildcards(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::Wildcard).count()
    }

    /// Members as bit masks, position 0 in the most significant bit.
    pub fn member_masks(&self) -> BTreeSet<u64> {
        let n = self.len();
        let mut fixed = 0u64;
        let mut free = Vec::new();
        for (k, &s) in self.0.iter().enumerate() {
            let bit = 1u64 << (n - 1 - k);
            match s {
                Symbol::One => fixed |= bit,
                Symbol::Zero => {}
                Symbol::Wildcard => free.push(bit),
            }
        }
        (0..(1u64 << free.len()))
            .map(|choice| {
                free.iter()
                    .enumerate()
                    .filter(|(b, _)| (choice >> b) & 1 == 1)
                    .fold(fixed, |acc, (_, &bit)| acc | bit)
            })
            .collect()
    }

    fn hamming(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                '*' => Ok(Symbol::Wildcard),
                other => Err(Error::Format(format!(
                    "schema symbol {other:?} is not one of 0, 1, *"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Schema)
    }
}

/// All binary strings matching `y` on its fixed positions.
pub fn schema_members(y: &Schema) -> Result<BTreeSet<String>> {
    if y.len() > SCHEMA_MEMBER_LIMIT {
        return Err(Error::SizeLimit {
            what: "schema length",
            size: y.len(),
            limit: SCHEMA_MEMBER_LIMIT,
        });
    }
    let n = y.len();
    Ok(y.member_masks()
        .into_iter()
        .map(|m| format!("{m:0n$b}"))
        .collect())
}

/// Vertices, degrees-of-freedom measure and coarsening arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingDigraph<V> {
    vertices: Vec<V>,
    h: Vec<u64>,
    arcs: BTreeSet<(usize, usize)>,
    out: Vec<Vec<usize>>,
}

impl<V> EncodingDigraph<V> {
    /// Orients the symmetric relation `adjacent` towards non-increasing `h`.
    /// With `sideways`, equal-`h` neighbors are joined in both directions;
    /// without it they are not joined at all.
    pub fn from_adjacency<A>(vertices: Vec<V>, h: Vec<u64>, sideways: bool, adjacent: A) -> Self
    where
        A: Fn(&V, &V) -> bool,
    {
        assert_eq!(vertices.len(), h.len(), "one measure per vertex");
        let mut arcs = BTreeSet::new();
        for u in 0..vertices.len() {
            for v in 0..vertices.len() {
                if u == v || !adjacent(&vertices[u], &vertices[v]) {
                    continue;
                }
                if h[u] > h[v] || (sideways && h[u] == h[v]) {
                    arcs.insert((u, v));
                }
            }
        }
        Self::with_arcs(vertices, h, arcs)
    }

    fn with_arcs(vertices: Vec<V>, h: Vec<u64>, arcs: BTreeSet<(usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); vertices.len()];
        for &(u, v) in &arcs {
            out[u].push(v);
        }
        Self {
            vertices,
            h,
            arcs,
            out,
        }
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn h(&self, v: usize) -> u64 {
        self.h[v]
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.arcs.contains(&(tail, head))
    }

    /// Removes an arc; used to build counterexample digraphs.
    pub fn without_arc(mut self, tail: usize, head: usize) -> Result<Self> {
        if !self.arcs.remove(&(tail, head)) {
            return Err(Error::UnknownArc(tail, head));
        }
        self.out[tail].retain(|&v| v != head);
        Ok(self)
    }

    pub fn index_of(&self, vertex: &V) -> Option<usize>
    where
        V: PartialEq,
    {
        self.vertices.iter().position(|v| v == vertex)
    }

    /// Vertices reachable from `start` along arcs, `start` included.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.out[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// Schema digraph on `{0,1,*}^n` with Hamming-distance-one adjacency and
/// `h = 2^(#wildcards)`, sideways arcs included.
pub fn build_schema_digraph(n: usize) -> Result<EncodingDigraph<Schema>> {
    build_schema_digraph_with(n, true)
}

pub fn build_schema_digraph_with(n: usize, sideways: bool) -> Result<EncodingDigraph<Schema>> {
    if n > SCHEMA_DIGRAPH_LIMIT {
        return Err(Error::SizeLimit {
            what: "schema length",
            size: n,
            limit: SCHEMA_DIGRAPH_LIMIT,
        });
    }
    let symbols = [Symbol::Zero, Symbol::One, Symbol::Wildcard];
    let count = 3usize.pow(n as u32);
    let vertices: Vec<Schema> = (0..count)
        .map(|mut code| {
            let mut word = vec![Symbol::Zero; n];
            for k in (0..n).rev() {
                word[k] = symbols[code % 3];
                code /= 3;
            }
            Schema(word)
        })
        .collect();
    let h = vertices.iter().map(|s| 1u64 << s.wildcards()).collect();
    Ok(EncodingDigraph::from_adjacency(
        vertices,
        h,
        sideways,
        |a, b| a.hamming(b) == 1,
    ))
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

fn check_forest_space(n_sites: usize) -> Result<()> {
    if n_sites > FOREST_SPACE_LIMIT {
        return Err(Error::SizeLimit {
            what: "number of sites",
            size: n_sites,
            limit: FOREST_SPACE_LIMIT,
        });
    }
    Ok(())
}

/// Every forest on `n_sites` sites (edges between any two sites), adjacent
/// when the edge sets differ by exactly one edge; `h = 2^(#components)`.
pub fn build_forest_digraph(n_sites: usize) -> Result<EncodingDigraph<Forest>> {
    check_forest_space(n_sites)?;
    let pairs = all_pairs(n_sites);
    let vertices: Vec<Forest> = (0..(1u64 << pairs.len()))
        .filter_map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| (mask >> k) & 1 == 1)
                .map(|(_, &e)| e);
            Forest::from_edges(n_sites, edges).ok()
        })
        .collect();
    let h = vertices.iter().map(|f| 1u64 << f.n_components()).collect();
    Ok(EncodingDigraph::from_adjacency(
        vertices,
        h,
        true,
        |a, b| {
            let ea: BTreeSet<_> = a.edges().iter().copied().collect();
            let eb: BTreeSet<_> = b.edges().iter().copied().collect();
            ea.symmetric_difference(&eb).count() == 1
        },
    ))
}

/// Forest encodings identified up to equal `φ`, i.e. one vertex per set
/// partition of the sites, represented by the forest that chains each block
/// in ascending order. Two classes are adjacent when forests from them
/// differ by one edge, which happens exactly when one partition merges two
/// blocks of the other.
pub fn build_forest_class_digraph(n_sites: usize) -> Result<EncodingDigraph<Forest>> {
    check_forest_space(n_sites)?;
    let vertices: Vec<Forest> = set_partitions(n_sites)
        .into_iter()
        .map(|blocks| {
            let edges = blocks
                .iter()
                .flat_map(|b| b.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>());
            Forest::from_edges(n_sites, edges).expect("chains are acyclic")
        })
        .collect();
    let h = vertices.iter().map(|f| 1u64 << f.n_components()).collect();
    Ok(EncodingDigraph::from_adjacency(
        vertices,
        h,
        true,
        |a, b| {
            let (pa, pb) = (a.partition(), b.partition());
            let (fine, coarse) = if pa.len() == pb.len() + 1 {
                (pa, pb)
            } else if pb.len() == pa.len() + 1 {
                (pb, pa)
            } else {
                return false;
            };
            // Merging two blocks: every fine block lies inside a coarse block.
            fine.components.iter().all(|block| {
                block
                    .iter()
                    .all(|&i| coarse.component_of[i] == coarse.component_of[block[0]])
            })
        },
    ))
}

/// Set partitions of `0..n` as ascending blocks, blocks ordered by their
/// smallest member.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(
        k: usize,
        n: usize,
        max: usize,
        labels: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if k == n {
            let blocks = labels.iter().copied().max().map_or(0, |m| m + 1);
            let mut parts = vec![Vec::new(); blocks];
            for (i, &l) in labels.iter().enumerate() {
                parts[l].push(i);
            }
            out.push(parts);
            return;
        }
        for l in 0..=max {
            labels[k] = l;
            rec(k + 1, n, max.max(l + 1), labels, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    rec(1, n, 1, &mut labels, &mut out);
    out
}

/// Spin configurations admitted by a forest, as bit masks (site 0 most
/// significant, bit set for spin +1).
pub fn forest_member_masks(y: &Forest) -> BTreeSet<u64> {
    let n = y.n_sites();
    let partition = y.partition();
    (0..(1u64 << partition.len()))
        .map(|z| {
            (0..n).fold(0u64, |acc, i| {
                if (z >> partition.component_of[i]) & 1 == 1 {
                    acc | (1u64 << (n - 1 - i))
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// Sends `tail` to `head` and fixes every other vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollapsingMap {
    pub tail: usize,
    pub head: usize,
}

impl CollapsingMap {
    pub fn apply(&self, v: usize) -> usize {
        if v == self.tail {
            self.head
        } else {
            v
        }
    }
}

/// Elementary collapsing map of an arc of `dg`.
pub fn collapse<V>(dg: &EncodingDigraph<V>, tail: usize, head: usize) -> Result<CollapsingMap> {
    if !dg.has_arc(tail, head) {
        return Err(Error::UnknownArc(tail, head));
    }
    Ok(CollapsingMap { tail, head })
}

/// Vertex map given by its image table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformation(pub Vec<usize>);

impl Transformation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }
}

/// `T = T_{e_k} ∘ … ∘ T_{e_1}` for `maps = [e_1, …, e_k]`: the first map
/// acts first.
pub fn compose(maps: &[CollapsingMap], n_vertices: usize) -> Transformation {
    let mut image = Transformation::identity(n_vertices).0;
    for v in image.iter_mut() {
        for m in maps {
            *v = m.apply(*v);
        }
    }
    Transformation(image)
}

/// Ordered pair `(y, y')` with `φ(y') ⊆ φ(y)` but no arc path from `y` to `y'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub from: usize,
    pub to: usize,
}

/// Checks the reachability condition: whenever `φ(y') ⊆ φ(y)` for distinct
/// vertices, a directed path `y → y'` must exist.
pub fn check_condition_r<V, M>(dg: &EncodingDigraph<V>, membership: M) -> Vec<Violation>
where
    M: Fn(&V) -> BTreeSet<u64>,
{
    let members: Vec<BTreeSet<u64>> = dg.vertices().iter().map(membership).collect();
    let mut violations = Vec::new();
    for from in 0..dg.len() {
        let reach = dg.reachable_from(from);
        for to in 0..dg.len() {
            if from != to && !reach[to] && members[to].is_subset(&members[from]) {
                violations.push(Violation { from, to });
            }
        }
    }
    violations
}
