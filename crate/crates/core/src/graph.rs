//! Multi-layer graph model: vertices, vertex pairs, layers, instances and
//! solutions, together with cluster-graph recognition and solution checking.
//!
//! Vertices are dense 1-based ids. Each layer stores one adjacency bitset per
//! vertex, so pair lookups are constant time and the induced-`P_3` scan costs
//! one word-parallel difference per (center, neighbor) pair.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A vertex of an instance, numbered from 1.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    /// Panics on 0; use [`VertexId::try_new`] for untrusted input.
    pub fn new(id: u32) -> Self {
        Self::try_new(id).expect("vertex ids start at 1")
    }

    pub fn try_new(id: u32) -> Option<Self> {
        (id >= 1).then_some(VertexId(id))
    }

    pub fn from_index(index: usize) -> Self {
        VertexId(index as u32 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position, used for bitset storage.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unordered pair of distinct vertices, stored with `u < v`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexPair {
    u: VertexId,
    v: VertexId,
}

impl VertexPair {
    pub fn new(a: VertexId, b: VertexId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(VertexPair { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(VertexPair { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a.get())),
        }
    }

    /// Convenience constructor from raw ids; panics on invalid input.
    pub fn of(a: u32, b: u32) -> Self {
        Self::new(VertexId::new(a), VertexId::new(b)).expect("distinct endpoints")
    }

    pub(crate) fn from_indices(a: usize, b: usize) -> Self {
        debug_assert_ne!(a, b);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        VertexPair {
            u: VertexId::from_index(a),
            v: VertexId::from_index(b),
        }
    }

    pub fn u(self) -> VertexId {
        self.u
    }

    pub fn v(self) -> VertexId {
        self.v
    }

    pub fn contains(self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// True if at least one endpoint lies in `set`.
    pub fn touches(self, set: &VertexSet) -> bool {
        set.contains(&self.u) || set.contains(&self.v)
    }

    pub fn max_vertex(self) -> VertexId {
        self.v
    }
}

impl fmt::Display for VertexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

/// A set of vertex pairs to toggle, i.e. an edge modification set.
pub type EditSet = BTreeSet<VertexPair>;

pub fn vertex_set<I: IntoIterator<Item = u32>>(ids: I) -> VertexSet {
    ids.into_iter().map(VertexId::new).collect()
}

pub fn edit_set<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> EditSet {
    pairs
        .into_iter()
        .map(|(a, b)| VertexPair::of(a, b))
        .collect()
}

/// `a ⊕ b` for edit sets, in place.
pub fn toggle_all(target: &mut EditSet, pairs: &EditSet) {
    for p in pairs {
        if !target.remove(p) {
            target.insert(*p);
        }
    }
}

pub fn toggle_pair(target: &mut EditSet, p: VertexPair) {
    if !target.remove(&p) {
        target.insert(p);
    }
}

/// An induced path `a - b - c` with `b` as center and `{a, c}` absent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct P3Witness {
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
}

impl P3Witness {
    /// The three vertex pairs of the triple, in lexicographic order.
    pub fn pairs(&self) -> [VertexPair; 3] {
        let mut ps = [
            VertexPair::new(self.a, self.b).unwrap(),
            VertexPair::new(self.b, self.c).unwrap(),
            VertexPair::new(self.a, self.c).unwrap(),
        ];
        ps.sort();
        ps
    }

    pub fn vertices(&self) -> [VertexId; 3] {
        [self.a, self.b, self.c]
    }
}

impl fmt::Display for P3Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// One layer `G_i = (V, E_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LayerGraph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

impl LayerGraph {
    pub fn empty(n: usize) -> Self {
        LayerGraph {
            n,
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            g.adj[i].insert_range(..);
            g.adj[i].set(i, false);
        }
        g
    }

    /// Builds a layer from an edge list; repeated edges collapse.
    pub fn from_edges<I: IntoIterator<Item = VertexPair>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::empty(n);
        for p in edges {
            g.check_pair(p)?;
            g.set_edge(p, true);
        }
        Ok(g)
    }

    /// Test helper: edges as raw `(u, v)` tuples.
    pub fn from_pairs(n: usize, edges: &[(u32, u32)]) -> Self {
        Self::from_edges(n, edges.iter().map(|&(a, b)| VertexPair::of(a, b)))
            .expect("edges within range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.index() < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v.get(),
                n: self.n,
            })
        }
    }

    pub fn check_pair(&self, p: VertexPair) -> Result<()> {
        self.check_vertex(p.v)
    }

    pub fn has_edge(&self, p: VertexPair) -> bool {
        p.v.index() < self.n && self.adj[p.u.index()].contains(p.v.index())
    }

    pub(crate) fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn set_edge(&mut self, p: VertexPair, present: bool) {
        let (a, b) = (p.u.index(), p.v.index());
        self.adj[a].set(b, present);
        self.adj[b].set(a, present);
    }

    pub fn toggle(&mut self, p: VertexPair) {
        let present = self.has_edge(p);
        self.set_edge(p, !present);
    }

    /// Subgraph induced by the vertex indices in `keep`, renumbered in that order.
    pub(crate) fn induced(&self, keep: &[usize]) -> LayerGraph {
        let mut g = LayerGraph::empty(keep.len());
        for (a, &x) in keep.iter().enumerate() {
            for (b, &y) in keep.iter().enumerate().skip(a + 1) {
                if self.adj[x][y] {
                    g.adj[a].insert(b);
                    g.adj[b].insert(a);
                }
            }
        }
        g
    }

    pub fn edges(&self) -> impl Iterator<Item = VertexPair> + '_ {
        (0..self.n).flat_map(move |i| {
            self.adj[i]
                .ones()
                .filter(move |&j| j > i)
                .map(move |j| VertexPair::from_indices(i, j))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v.index()].ones().map(VertexId::from_index)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.index()].count_ones(..)
    }

    /// `(V, E ⊕ m)`.
    pub fn apply_edits(&self, m: &EditSet) -> Result<LayerGraph> {
        let mut g = self.clone();
        for &p in m {
            g.check_pair(p)?;
            g.toggle(p);
        }
        Ok(g)
    }

    /// Pairs on which the two layers differ.
    pub fn difference(&self, other: &LayerGraph) -> EditSet {
        let mut out = EditSet::new();
        for i in 0..self.n.min(other.n) {
            let mut row = self.adj[i].clone();
            row.symmetric_difference_with(&other.adj[i]);
            for j in row.ones().filter(|&j| j > i) {
                out.insert(VertexPair::from_indices(i, j));
            }
        }
        out
    }

    pub(crate) fn mask_of(&self, set: &VertexSet) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.n);
        for v in set {
            if v.index() < self.n {
                m.insert(v.index());
            }
        }
        m
    }

    pub(crate) fn full_mask(&self) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.n);
        m.insert_range(..);
        m
    }

    /// Finds an induced `P_3` inside `g[restrict]`.
    ///
    /// Centers are scanned in increasing order, then their neighbors in
    /// increasing order; the first neighbor `a` with a non-adjacent fellow
    /// neighbor `c` yields `(a, b, c)`, and `a < c` always holds.
    pub fn find_p3(&self, restrict: &VertexSet) -> Option<P3Witness> {
        self.find_p3_masked(&self.mask_of(restrict))
    }

    pub fn find_p3_all(&self) -> Option<P3Witness> {
        self.find_p3_masked(&self.full_mask())
    }

    pub(crate) fn find_p3_masked(&self, mask: &FixedBitSet) -> Option<P3Witness> {
        for b in mask.ones() {
            let mut nb = self.adj[b].clone();
            nb.intersect_with(mask);
            for a in nb.ones() {
                let found = nb
                    .as_slice()
                    .iter()
                    .zip(self.adj[a].as_slice())
                    .enumerate()
                    .find_map(|(w, (&x, &y))| {
                        let mut bits = x & !y;
                        if w == a / usize::BITS as usize {
                            bits &= !(1usize << (a % usize::BITS as usize));
                        }
                        (bits != 0)
                            .then(|| w * usize::BITS as usize + bits.trailing_zeros() as usize)
                    });
                if let Some(c) = found {
                    return Some(P3Witness {
                        a: VertexId::from_index(a),
                        b: VertexId::from_index(b),
                        c: VertexId::from_index(c),
                    });
                }
            }
        }
        None
    }

    pub fn is_cluster_graph(&self, restrict: &VertexSet) -> bool {
        self.find_p3(restrict).is_none()
    }

    pub fn is_cluster(&self) -> bool {
        self.find_p3_all().is_none()
    }

    /// Number of `w` for which `{u, v, w}` induces a `P_3`.
    pub fn count_p3_through_pair(&self, p: VertexPair) -> usize {
        let (u, v) = (p.u.index(), p.v.index());
        let (ru, rv) = (&self.adj[u], &self.adj[v]);
        if ru.contains(v) {
            ru.symmetric_difference_count(rv) - 2
        } else {
            ru.intersection_count(rv)
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        self.components_within(&self.full_mask())
    }

    pub(crate) fn components_within(&self, mask: &FixedBitSet) -> Vec<Vec<VertexId>> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut out = Vec::new();
        for s in mask.ones() {
            if seen.contains(s) {
                continue;
            }
            seen.insert(s);
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for y in self.adj[x].ones() {
                    if mask.contains(y) && !seen.contains(y) {
                        seen.insert(y);
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp.into_iter().map(VertexId::from_index).collect());
        }
        out
    }
}

/// True iff the two layers have the same edges among vertices outside `removed`.
pub fn consistent_after_removal(g1: &LayerGraph, g2: &LayerGraph, removed: &VertexSet) -> bool {
    first_disagreement(g1, g2, removed).is_none()
}

/// Lexicographically first pair outside `removed` present in exactly one layer.
pub fn first_disagreement(
    g1: &LayerGraph,
    g2: &LayerGraph,
    removed: &VertexSet,
) -> Option<VertexPair> {
    debug_assert_eq!(g1.n, g2.n);
    let keep = {
        let mut m = g1.full_mask();
        for v in removed {
            if v.index() < g1.n {
                m.set(v.index(), false);
            }
        }
        m
    };
    for i in keep.ones() {
        let mut row = g1.adj[i].clone();
        row.symmetric_difference_with(&g2.adj[i]);
        row.intersect_with(&keep);
        if let Some(j) = row.ones().find(|&j| j > i) {
            return Some(VertexPair::from_indices(i, j));
        }
    }
    None
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Multi-layer: one marked set, all layers pairwise consistent.
    Mlce,
    /// Temporal: one marked set per gap, consecutive layers consistent.
    Tce,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Mlce => "mlce",
            Mode::Tce => "tce",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mlce" => Ok(Mode::Mlce),
            "tce" => Ok(Mode::Tce),
            other => Err(Error::input(format!("unknown mode `{other}`"))),
        }
    }
}

/// A multi-layer (or temporal) graph with budgets `k` (edits per layer) and
/// `d` (marked vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    mode: Mode,
    n: usize,
    layers: Vec<LayerGraph>,
    k: usize,
    d: usize,
}

impl Instance {
    pub fn new(mode: Mode, layers: Vec<LayerGraph>, k: usize, d: usize) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::input("an instance needs at least one layer"));
        };
        let n = first.n();
        if let Some(bad) = layers.iter().position(|g| g.n() != n) {
            return Err(Error::input(format!(
                "layer {} has {} vertices, expected {n}",
                bad + 1,
                layers[bad].n()
            )));
        }
        Ok(Instance {
            mode,
            n,
            layers,
            k,
            d,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.layers.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn layers(&self) -> &[LayerGraph] {
        &self.layers
    }

    /// Zero-based layer access.
    pub fn layer(&self, i: usize) -> &LayerGraph {
        &self.layers[i]
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_budgets(mut self, k: usize, d: usize) -> Self {
        self.k = k;
        self.d = d;
        self
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n).map(VertexId::from_index)
    }

    pub(crate) fn expect_mode(&self, expected: Mode) -> Result<()> {
        if self.mode == expected {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                expected,
                found: self.mode,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Marks {
    /// A single set `D` shared by all layers.
    Total(VertexSet),
    /// Sets `D_1 .. D_{ℓ-1}`, one per consecutive pair of layers.
    Temporal(Vec<VertexSet>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// One edit set per layer.
    pub edits: Vec<EditSet>,
    pub marks: Marks,
}

impl Solution {
    /// The do-nothing solution shaped for `inst`.
    pub fn empty_for(inst: &Instance) -> Self {
        let marks = match inst.mode() {
            Mode::Mlce => Marks::Total(VertexSet::new()),
            Mode::Tce => Marks::Temporal(vec![VertexSet::new(); inst.ell().saturating_sub(1)]),
        };
        Solution {
            edits: vec![EditSet::new(); inst.ell()],
            marks,
        }
    }

    pub fn edited_layers(&self, inst: &Instance) -> Result<Vec<LayerGraph>> {
        inst.layers()
            .iter()
            .zip(&self.edits)
            .map(|(g, m)| g.apply_edits(m))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EditBudget {
        layer: usize,
        size: usize,
        k: usize,
    },
    MarkBudget {
        /// `None` for the single MLCE set, otherwise the 1-based gap index.
        gap: Option<usize>,
        size: usize,
        d: usize,
    },
    NotCluster {
        layer: usize,
        witness: P3Witness,
    },
    Inconsistent {
        first: usize,
        second: usize,
        pair: VertexPair,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EditBudget { layer, size, k } => {
                write!(f, "layer {layer}: {size} edits exceed budget k={k}")
            }
            Violation::MarkBudget { gap: None, size, d } => {
                write!(f, "{size} marked vertices exceed budget d={d}")
            }
            Violation::MarkBudget {
                gap: Some(i),
                size,
                d,
            } => write!(f, "gap {i}: {size} marked vertices exceed budget d={d}"),
            Violation::NotCluster { layer, witness } => {
                write!(
                    f,
                    "layer {layer}: not a cluster graph, induced P3 {witness}"
                )
            }
            Violation::Inconsistent {
                first,
                second,
                pair,
            } => write!(
                f,
                "layers {first} and {second} disagree on unmarked pair {pair}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks budgets, per-layer cluster structure and consistency of `sol`.
///
/// Layer and gap numbers in the report are 1-based.
pub fn verify(inst: &Instance, sol: &Solution) -> Result<VerifyReport> {
    let ell = inst.ell();
    if sol.edits.len() != ell {
        return Err(Error::input(format!(
            "solution has {} edit sets for {ell} layers",
            sol.edits.len()
        )));
    }
    match (&sol.marks, inst.mode()) {
        (Marks::Total(_), Mode::Mlce) => {}
        (Marks::Temporal(gaps), Mode::Tce) if gaps.len() == ell - 1 => {}
        (Marks::Temporal(gaps), Mode::Tce) => {
            return Err(Error::input(format!(
                "solution has {} marked sets for {} gaps",
                gaps.len(),
                ell - 1
            )))
        }
        (Marks::Total(_), Mode::Tce) => {
            return Err(Error::input(
                "single marked set given for a temporal instance",
            ))
        }
        (Marks::Temporal(_), Mode::Mlce) => {
            return Err(Error::input(
                "per-gap marked sets given for a multi-layer instance",
            ))
        }
    }
    let probe = LayerGraph::empty(inst.n());
    let mark_sets: Vec<&VertexSet> = match &sol.marks {
        Marks::Total(d) => vec![d],
        Marks::Temporal(ds) => ds.iter().collect(),
    };
    for v in mark_sets.iter().flat_map(|s| s.iter()) {
        probe.check_vertex(*v)?;
    }

    let mut report = VerifyReport::default();
    let edited = sol.edited_layers(inst)?;
    for (i, m) in sol.edits.iter().enumerate() {
        if m.len() > inst.k() {
            report.violations.push(Violation::EditBudget {
                layer: i + 1,
                size: m.len(),
                k: inst.k(),
            });
        }
    }
    match &sol.marks {
        Marks::Total(d) if d.len() > inst.d() => report.violations.push(Violation::MarkBudget {
            gap: None,
            size: d.len(),
            d: inst.d(),
        }),
        Marks::Temporal(ds) => {
            for (i, d) in ds.iter().enumerate() {
                if d.len() > inst.d() {
                    report.violations.push(Violation::MarkBudget {
                        gap: Some(i + 1),
                        size: d.len(),
                        d: inst.d(),
                    });
                }
            }
        }
        _ => {}
    }
    for (i, g) in edited.iter().enumerate() {
        if let Some(witness) = g.find_p3_all() {
            report.violations.push(Violation::NotCluster {
                layer: i + 1,
                witness,
            });
        }
    }
    match &sol.marks {
        Marks::Total(d) => {
            for i in 0..ell {
                for j in i + 1..ell {
                    if let Some(pair) = first_disagreement(&edited[i], &edited[j], d) {
                        report.violations.push(Violation::Inconsistent {
                            first: i + 1,
                            second: j + 1,
                            pair,
                        });
                    }
                }
            }
        }
        Marks::Temporal(ds) => {
            for (i, d) in ds.iter().enumerate() {
                if let Some(pair) = first_disagreement(&edited[i], &edited[i + 1], d) {
                    report.violations.push(Violation::Inconsistent {
                        first: i + 1,
                        second: i + 2,
                        pair,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use proptest::prelude::*;

    fn all_vertices(n: u32) -> VertexSet {
        vertex_set(1..=n)
    }

    /// Reference check: does any triple of `restrict` induce exactly two edges?
    fn brute_force_has_p3(g: &LayerGraph, restrict: &VertexSet) -> bool {
        let vs: Vec<_> = restrict.iter().copied().collect();
        for (x, &a) in vs.iter().enumerate() {
            for (y, &b) in vs.iter().enumerate().skip(x + 1) {
                for &c in vs.iter().skip(y + 1) {
                    let e = [(a, b), (b, c), (a, c)]
                        .iter()
                        .filter(|&&(p, q)| g.has_edge(VertexPair::new(p, q).unwrap()))
                        .count();
                    if e == 2 {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn is_induced_p3(g: &LayerGraph, w: &P3Witness) -> bool {
        g.has_edge(VertexPair::new(w.a, w.b).unwrap())
            && g.has_edge(VertexPair::new(w.b, w.c).unwrap())
            && !g.has_edge(VertexPair::new(w.a, w.c).unwrap())
    }

    #[test]
    fn pair_is_canonical() {
        let p = VertexPair::new(VertexId::new(5), VertexId::new(2)).unwrap();
        assert_eq!((p.u().get(), p.v().get()), (2, 5));
        assert!(VertexPair::new(VertexId::new(3), VertexId::new(3)).is_err());
    }

    #[test]
    fn apply_edits_identity_and_sample_layer3() {
        let g = sample_layer(3);
        assert_eq!(g.apply_edits(&EditSet::new()).unwrap(), g);
        let m = edit_set([(4, 5)]);
        let edited = g.apply_edits(&m).unwrap();
        let mut expected =
            LayerGraph::from_pairs(5, &[(2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)]);
        assert_eq!(edited, expected);
        assert_eq!(edited.apply_edits(&m).unwrap(), g);
        expected.toggle(VertexPair::of(1, 2));
        assert_ne!(edited, expected);
    }

    #[test]
    fn apply_edits_rejects_out_of_range() {
        let g = LayerGraph::empty(3);
        assert_eq!(
            g.apply_edits(&edit_set([(1, 4)])),
            Err(Error::VertexOutOfRange { vertex: 4, n: 3 })
        );
    }

    #[test]
    fn find_p3_examples() {
        assert_eq!(LayerGraph::complete(4).find_p3_all(), None);
        let w = sample_layer(3).find_p3_all().unwrap();
        assert_eq!((w.a.get(), w.b.get(), w.c.get()), (4, 2, 5));
        let w = sample_layer(1).find_p3_all().unwrap();
        assert_eq!((w.a.get(), w.b.get(), w.c.get()), (1, 4, 5));
    }

    #[test]
    fn is_cluster_graph_examples() {
        assert!(LayerGraph::empty(4).is_cluster());
        let l2 = sample_layer(2);
        assert!(!l2.is_cluster());
        assert_eq!(
            l2.find_p3_all().map(|w| (w.a.get(), w.b.get(), w.c.get())),
            Some((2, 4, 5))
        );
        assert!(l2.is_cluster_graph(&vertex_set([2, 3, 4])));
    }

    #[test]
    fn consistency_examples() {
        let g = sample_layer(1);
        assert!(consistent_after_removal(&g, &g, &VertexSet::new()));
        assert!(!consistent_after_removal(
            &sample_layer(1),
            &sample_layer(2),
            &VertexSet::new()
        ));
        let sol = sample_tce_solution();
        let edited = sol.edited_layers(&sample(Mode::Tce, 1, 1)).unwrap();
        assert!(consistent_after_removal(
            &edited[0],
            &edited[1],
            &vertex_set([1])
        ));
    }

    #[test]
    fn count_p3_examples() {
        let tri = LayerGraph::complete(3);
        for p in [(1, 2), (1, 3), (2, 3)] {
            assert_eq!(tri.count_p3_through_pair(VertexPair::of(p.0, p.1)), 0);
        }
        assert_eq!(
            sample_layer(1).count_p3_through_pair(VertexPair::of(4, 5)),
            3
        );
        let path = LayerGraph::from_pairs(3, &[(1, 2), (2, 3)]);
        assert_eq!(path.count_p3_through_pair(VertexPair::of(1, 3)), 1);
    }

    #[test]
    fn verify_sample_solutions() {
        let inst = sample(Mode::Tce, 1, 1);
        assert!(verify(&inst, &sample_tce_solution()).unwrap().is_valid());
        let inst = sample(Mode::Mlce, 1, 2);
        assert!(verify(&inst, &sample_mlce_k1_d2_solution())
            .unwrap()
            .is_valid());
        let inst = sample(Mode::Mlce, 3, 1);
        assert!(verify(&inst, &sample_mlce_k3_d1_solution())
            .unwrap()
            .is_valid());
    }

    #[test]
    fn verify_reports_empty_solution_failures() {
        let inst = sample(Mode::Mlce, 1, 2);
        let report = verify(&inst, &Solution::empty_for(&inst)).unwrap();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotCluster { layer: 3, .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Inconsistent { .. })));
    }

    #[test]
    fn verify_rejects_shape_mismatch() {
        let inst = sample(Mode::Mlce, 1, 2);
        assert!(verify(&inst, &sample_tce_solution()).is_err());
        let mut sol = sample_mlce_k1_d2_solution();
        sol.edits.pop();
        assert!(verify(&inst, &sol).is_err());
    }

    #[test]
    fn verify_reports_budget_overflow() {
        let inst = sample(Mode::Mlce, 0, 1);
        let report = verify(&inst, &sample_mlce_k1_d2_solution()).unwrap();
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::EditBudget {
                layer: 1,
                size: 1,
                k: 0
            }
        )));
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::MarkBudget {
                gap: None,
                size: 2,
                d: 1
            }
        )));
    }

    fn arb_layer(n: usize) -> impl Strategy<Value = LayerGraph> {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = LayerGraph::empty(n);
            let mut it = bits.into_iter();
            for a in 0..n {
                for b in a + 1..n {
                    if it.next().unwrap() {
                        g.set_edge(VertexPair::from_indices(a, b), true);
                    }
                }
            }
            g
        })
    }

    fn arb_subset(n: usize) -> impl Strategy<Value = VertexSet> {
        proptest::collection::vec(any::<bool>(), n).prop_map(|bits| {
            bits.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| VertexId::from_index(i))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn apply_edits_is_involutive(g in arb_layer(7), m in arb_layer(7)) {
            let edits: EditSet = m.edges().collect();
            let once = g.apply_edits(&edits).unwrap();
            prop_assert_eq!(once.apply_edits(&edits).unwrap(), g);
        }

        #[test]
        fn p3_scan_matches_triple_enumeration(g in arb_layer(8), r in arb_subset(8)) {
            let found = g.find_p3(&r);
            prop_assert_eq!(found.is_some(), brute_force_has_p3(&g, &r));
            if let Some(w) = found {
                prop_assert!(is_induced_p3(&g, &w));
                prop_assert!(w.a < w.c);
                prop_assert!(w.vertices().iter().all(|v| r.contains(v)));
            }
            prop_assert_eq!(g.is_cluster_graph(&all_vertices(8)), !brute_force_has_p3(&g, &all_vertices(8)));
        }

        #[test]
        fn consistency_is_symmetric_and_monotone(
            g1 in arb_layer(6), g2 in arb_layer(6), r in arb_subset(6), extra in 1u32..=6
        ) {
            let a = consistent_after_removal(&g1, &g2, &r);
            prop_assert_eq!(a, consistent_after_removal(&g2, &g1, &r));
            let mut bigger = r.clone();
            bigger.insert(VertexId::new(extra));
            if a {
                prop_assert!(consistent_after_removal(&g1, &g2, &bigger));
            }
        }

        #[test]
        fn p3_count_matches_enumeration(g in arb_layer(7), a in 1u32..=7, b in 1u32..=7) {
            prop_assume!(a != b);
            let p = VertexPair::of(a, b);
            let expected = (1..=7u32)
                .filter(|&w| w != a && w != b)
                .filter(|&w| brute_force_has_p3(&g, &vertex_set([a, b, w])))
                .count();
            prop_assert_eq!(g.count_p3_through_pair(p), expected);
        }

        #[test]
        fn verify_matches_independent_recheck(
            layers in proptest::collection::vec(arb_layer(5), 1..4),
            edits in proptest::collection::vec(arb_layer(5), 3),
            marks in arb_subset(5),
            k in 0usize..4,
            d in 0usize..3,
        ) {
            let ell = layers.len();
            let inst = Instance::new(Mode::Mlce, layers, k, d).unwrap();
            let sol = Solution {
                edits: edits.iter().take(ell).map(|m| m.edges().take(3).collect()).collect(),
                marks: Marks::Total(marks.clone()),
            };
            let report = verify(&inst, &sol).unwrap();
            // Recheck the three conditions from scratch on raw edge sets.
            let mut ok = marks.len() <= d;
            let mut finals = Vec::new();
            for (g, m) in inst.layers().iter().zip(&sol.edits) {
                ok &= m.len() <= k;
                let mut e: BTreeSet<(u32, u32)> = g.edges().map(|p| (p.u().get(), p.v().get())).collect();
                for p in m {
                    let key = (p.u().get(), p.v().get());
                    if !e.remove(&key) { e.insert(key); }
                }
                let h = LayerGraph::from_pairs(5, &e.iter().copied().collect::<Vec<_>>());
                ok &= !brute_force_has_p3(&h, &all_vertices(5));
                finals.push(e);
            }
            for x in &finals {
                for y in &finals {
                    let rx: BTreeSet<_> = x.iter().filter(|(a, b)| !marks.contains(&VertexId::new(*a)) && !marks.contains(&VertexId::new(*b))).collect();
                    let ry: BTreeSet<_> = y.iter().filter(|(a, b)| !marks.contains(&VertexId::new(*a)) && !marks.contains(&VertexId::new(*b))).collect();
                    ok &= rx == ry;
                }
            }
            prop_assert_eq!(report.is_valid(), ok);
        }
    }
}
