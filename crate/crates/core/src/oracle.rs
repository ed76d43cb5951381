//! Brute-force reference solvers used as ground truth.
//!
//! [`oracle_mlce`] and [`oracle_tce`] enumerate every per-layer edit set within
//! budget and search for a compatible choice directly from the problem
//! definitions. [`structured_mlce`] instead guesses the marked set and the
//! common clustering of the unmarked vertices. Instances past the size guards
//! are refused with [`Error::Capability`], never truncated.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{
    consistent_after_removal, EditSet, Instance, LayerGraph, Marks, Mode, Solution, VertexId,
    VertexPair, VertexSet,
};
use crate::two_layer::solve_two_layer_zero_edit;

pub const MAX_VERTICES: usize = 32;
pub const MAX_EDITS: usize = 4;
pub const MAX_LAYERS: usize = 4;
pub const STRUCTURED_MAX_VERTICES: usize = 8;
/// Upper limit on estimated elementary steps.
pub const WORK_LIMIT: f64 = 2e8;

/// How the temporal oracle finds the marked set of a gap.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum GapMethod {
    /// Enumerate candidate sets by increasing size.
    #[default]
    Subsets,
    /// Use the matching-based two-layer solver.
    Matching,
}

/// Edge set over at most [`MAX_VERTICES`] vertices, one bit per pair.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
struct PairMask([u64; 8]);

impl PairMask {
    fn index(a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        b * (b - 1) / 2 + a
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn xor(&self, o: &PairMask) -> PairMask {
        let mut r = *self;
        r.0.iter_mut().zip(o.0).for_each(|(x, y)| *x ^= y);
        r
    }

    fn and(&self, o: &PairMask) -> PairMask {
        let mut r = *self;
        r.0.iter_mut().zip(o.0).for_each(|(x, y)| *x &= y);
        r
    }

    fn or_assign(&mut self, o: &PairMask) {
        self.0.iter_mut().zip(o.0).for_each(|(x, y)| *x |= y);
    }

    fn of_graph(g: &LayerGraph) -> PairMask {
        let mut m = PairMask::default();
        for p in g.edges() {
            m.set(Self::index(p.u().index(), p.v().index()));
        }
        m
    }

    /// Pairs with both endpoints outside `removed`.
    fn keep(n: usize, removed: &[bool]) -> PairMask {
        let mut m = PairMask::default();
        for b in 0..n {
            for a in 0..b {
                if !removed[a] && !removed[b] {
                    m.set(Self::index(a, b));
                }
            }
        }
        m
    }
}

/// A cluster editing set of one layer together with the edited edge mask.
#[derive(Clone, Debug)]
struct Candidate {
    edits: Vec<VertexPair>,
    edited: PairMask,
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn subsets_up_to(n: usize, k: usize) -> f64 {
    (0..=k).map(|j| binomial(n, j)).sum()
}

fn check_guard(inst: &Instance, budgets: &[i64]) -> Result<()> {
    if budgets.len() != inst.ell() {
        return Err(Error::input(format!(
            "{} budgets for {} layers",
            budgets.len(),
            inst.ell()
        )));
    }
    let max_k = budgets.iter().copied().max().unwrap_or(0).max(0) as usize;
    if inst.n() > MAX_VERTICES || max_k > MAX_EDITS || inst.ell() > MAX_LAYERS {
        return Err(Error::Capability(format!(
            "n={} (max {MAX_VERTICES}), k={max_k} (max {MAX_EDITS}), ell={} (max {MAX_LAYERS})",
            inst.n(),
            inst.ell()
        )));
    }
    let pairs = inst.n() * inst.n().saturating_sub(1) / 2;
    let work: f64 = budgets
        .iter()
        .map(|&k| subsets_up_to(pairs, k.max(0) as usize))
        .sum();
    if work > WORK_LIMIT {
        return Err(Error::Capability(format!(
            "about {work:.0} candidate edit sets"
        )));
    }
    Ok(())
}

/// Every edit set of size at most `k` turning `g` into a cluster graph.
fn candidates(g: &LayerGraph, k: usize) -> Vec<Candidate> {
    let n = g.n();
    let pairs: Vec<VertexPair> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| VertexPair::from_indices(a, b)))
        .collect();
    let base = PairMask::of_graph(g);
    let mut work = g.clone();
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    fn go(
        start: usize,
        k: usize,
        pairs: &[VertexPair],
        work: &mut LayerGraph,
        chosen: &mut Vec<VertexPair>,
        base: &PairMask,
        out: &mut Vec<Candidate>,
    ) {
        if work.is_cluster() {
            let mut flips = PairMask::default();
            for p in chosen.iter() {
                flips.set(PairMask::index(p.u().index(), p.v().index()));
            }
            out.push(Candidate {
                edits: chosen.clone(),
                edited: base.xor(&flips),
            });
        }
        if chosen.len() == k {
            return;
        }
        for i in start..pairs.len() {
            work.toggle(pairs[i]);
            chosen.push(pairs[i]);
            go(i + 1, k, pairs, work, chosen, base, out);
            chosen.pop();
            work.toggle(pairs[i]);
        }
    }
    go(0, k, &pairs, &mut work, &mut chosen, &base, &mut out);
    out
}

fn layer_candidates(inst: &Instance, budgets: &[i64]) -> Option<Vec<Vec<Candidate>>> {
    if budgets.iter().any(|&k| k < 0) {
        return None;
    }
    let all: Vec<_> = inst
        .layers()
        .iter()
        .zip(budgets)
        .map(|(g, &k)| candidates(g, k as usize))
        .collect();
    if all.iter().any(|c| c.is_empty()) {
        None
    } else {
        Some(all)
    }
}

fn to_edit_set(c: &Candidate) -> EditSet {
    c.edits.iter().copied().collect()
}

/// Subsets of `items` with at most `limit` elements, by increasing size.
fn for_each_small_subset(
    items: &[usize],
    limit: usize,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> bool {
    fn go(
        items: &[usize],
        start: usize,
        size: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == size {
            return visit(cur);
        }
        for i in start..items.len() {
            cur.push(items[i]);
            if go(items, i + 1, size, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    (0..=limit.min(items.len())).any(|size| go(items, 0, size, &mut cur, &mut visit))
}

fn index_set(indices: &[usize]) -> VertexSet {
    indices.iter().map(|&i| VertexId::from_index(i)).collect()
}

/// Exact search for a vertex cover of size at most `limit`.
fn cover_at_most(edges: &[(usize, usize)], limit: usize) -> Option<Vec<usize>> {
    fn go(edges: &[(usize, usize)], taken: &mut Vec<usize>, limit: usize) -> bool {
        let Some(&(u, v)) = edges
            .iter()
            .find(|(a, b)| !taken.contains(a) && !taken.contains(b))
        else {
            return true;
        };
        if taken.len() == limit {
            return false;
        }
        for x in [u, v] {
            taken.push(x);
            if go(edges, taken, limit) {
                return true;
            }
            taken.pop();
        }
        false
    }
    let mut taken = Vec::new();
    go(edges, &mut taken, limit).then_some(taken)
}

fn mask_pairs(m: &PairMask, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for b in 0..n {
        for a in 0..b {
            let i = PairMask::index(a, b);
            if m.0[i / 64] >> (i % 64) & 1 == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Exact MLCE decision and witness.
pub fn oracle_mlce(inst: &Instance) -> Result<Option<Solution>> {
    oracle_mlce_with_budgets(inst, &vec![inst.k() as i64; inst.ell()])
}

/// MLCE with an individual edit budget per layer; a negative budget is a no.
pub fn oracle_mlce_with_budgets(inst: &Instance, budgets: &[i64]) -> Result<Option<Solution>> {
    inst.expect_mode(Mode::Mlce)?;
    check_guard(inst, budgets)?;
    let Some(cands) = layer_candidates(inst, budgets) else {
        return Ok(None);
    };
    let n = inst.n();
    let d = inst.d().min(n);
    let total: f64 = cands.iter().map(|c| c.len() as f64).sum();
    let d_first = subsets_up_to(n, d) * total;
    let tuple_first: f64 = cands.iter().map(|c| c.len() as f64).product();
    if d_first.min(tuple_first) > WORK_LIMIT {
        return Err(Error::Capability(format!(
            "about {:.0} combinations",
            d_first.min(tuple_first)
        )));
    }
    Ok(if d_first <= tuple_first {
        mlce_marks_first(n, d, &cands)
    } else {
        mlce_tuples_first(n, d, &cands)
    })
}

fn mlce_marks_first(n: usize, d: usize, cands: &[Vec<Candidate>]) -> Option<Solution> {
    let vertices: Vec<usize> = (0..n).collect();
    let mut found = None;
    for_each_small_subset(&vertices, d, |dset| {
        let mut removed = vec![false; n];
        dset.iter().for_each(|&v| removed[v] = true);
        let keep = PairMask::keep(n, &removed);
        let mut common: HashMap<PairMask, Vec<usize>> = HashMap::new();
        for (j, c) in cands[0].iter().enumerate() {
            common.entry(c.edited.and(&keep)).or_insert_with(|| vec![j]);
        }
        for layer in &cands[1..] {
            let mut next: HashMap<PairMask, Vec<usize>> = HashMap::new();
            for (j, c) in layer.iter().enumerate() {
                let key = c.edited.and(&keep);
                if let Some(prefix) = common.get(&key) {
                    next.entry(key).or_insert_with(|| {
                        let mut p = prefix.clone();
                        p.push(j);
                        p
                    });
                }
            }
            common = next;
            if common.is_empty() {
                return false;
            }
        }
        let choice = common.values().min().expect("nonempty").clone();
        found = Some(Solution {
            edits: choice
                .iter()
                .zip(cands)
                .map(|(&j, c)| to_edit_set(&c[j]))
                .collect(),
            marks: Marks::Total(index_set(dset)),
        });
        true
    });
    found
}

fn mlce_tuples_first(n: usize, d: usize, cands: &[Vec<Candidate>]) -> Option<Solution> {
    fn go(
        layer: usize,
        n: usize,
        d: usize,
        cands: &[Vec<Candidate>],
        chosen: &mut Vec<usize>,
        disagreement: PairMask,
    ) -> Option<Vec<usize>> {
        let cover = cover_at_most(&mask_pairs(&disagreement, n), d)?;
        if layer == cands.len() {
            return Some(cover);
        }
        let first = chosen.first().map(|&j| cands[0][j].edited);
        for (j, c) in cands[layer].iter().enumerate() {
            let mut next = disagreement;
            if let Some(f) = first {
                next.or_assign(&f.xor(&c.edited));
            }
            chosen.push(j);
            if let Some(cover) = go(layer + 1, n, d, cands, chosen, next) {
                return Some(cover);
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::new();
    let cover = go(0, n, d, cands, &mut chosen, PairMask::default())?;
    Some(Solution {
        edits: chosen
            .iter()
            .zip(cands)
            .map(|(&j, c)| to_edit_set(&c[j]))
            .collect(),
        marks: Marks::Total(index_set(&cover)),
    })
}

/// Exact TCE decision and witness, marked sets found by subset enumeration.
pub fn oracle_tce(inst: &Instance) -> Result<Option<Solution>> {
    oracle_tce_with(inst, &vec![inst.k() as i64; inst.ell()], GapMethod::Subsets)
}

pub fn oracle_tce_with_budgets(inst: &Instance, budgets: &[i64]) -> Result<Option<Solution>> {
    oracle_tce_with(inst, budgets, GapMethod::Subsets)
}

pub fn oracle_tce_with(
    inst: &Instance,
    budgets: &[i64],
    method: GapMethod,
) -> Result<Option<Solution>> {
    inst.expect_mode(Mode::Tce)?;
    check_guard(inst, budgets)?;
    let Some(cands) = layer_candidates(inst, budgets) else {
        return Ok(None);
    };
    let n = inst.n();
    let d = inst.d();
    let steps: f64 = cands
        .windows(2)
        .map(|w| (w[0].len() * w[1].len()) as f64)
        .sum::<f64>()
        * match method {
            GapMethod::Subsets => subsets_up_to(n, d.min(n)),
            GapMethod::Matching => (n * n * n).max(1) as f64,
        };
    if steps > WORK_LIMIT {
        return Err(Error::Capability(format!("about {steps:.0} gap checks")));
    }
    let edited = |layer: usize, j: usize| -> Result<LayerGraph> {
        inst.layer(layer)
            .apply_edits(&to_edit_set(&cands[layer][j]))
    };
    let gap = |i: usize, a: usize, b: usize| -> Result<Option<VertexSet>> {
        let (g1, g2) = (edited(i, a)?, edited(i + 1, b)?);
        Ok(match method {
            GapMethod::Subsets => gap_by_subsets(&g1, &g2, d),
            GapMethod::Matching => solve_two_layer_zero_edit(&g1, &g2, d)?,
        })
    };

    // pred[i][j]: reachable predecessor of candidate j in layer i.
    let mut pred: Vec<Vec<Option<usize>>> = vec![vec![Some(usize::MAX); cands[0].len()]];
    for i in 0..inst.ell() - 1 {
        let reachable: Vec<usize> = (0..cands[i].len())
            .filter(|&j| pred[i][j].is_some())
            .collect();
        let mut next = vec![None; cands[i + 1].len()];
        for (b, slot) in next.iter_mut().enumerate() {
            for &a in &reachable {
                if gap(i, a, b)?.is_some() {
                    *slot = Some(a);
                    break;
                }
            }
        }
        if next.iter().all(Option::is_none) {
            return Ok(None);
        }
        pred.push(next);
    }
    let last = inst.ell() - 1;
    let mut j = pred[last]
        .iter()
        .position(Option::is_some)
        .expect("nonempty");
    let mut chosen = vec![0; inst.ell()];
    for i in (0..=last).rev() {
        chosen[i] = j;
        if i > 0 {
            j = pred[i][j].expect("reachable");
        }
    }
    let mut marks = Vec::new();
    for i in 0..last {
        marks.push(gap(i, chosen[i], chosen[i + 1])?.expect("edge witnessed"));
    }
    Ok(Some(Solution {
        edits: chosen
            .iter()
            .zip(&cands)
            .map(|(&j, c)| to_edit_set(&c[j]))
            .collect(),
        marks: Marks::Temporal(marks),
    }))
}

/// Smallest marked set found by trying every subset of the vertices touched
/// by a disagreement, by increasing size.
fn gap_by_subsets(g1: &LayerGraph, g2: &LayerGraph, d: usize) -> Option<VertexSet> {
    let diff = g1.difference(g2);
    let mut touched: Vec<usize> = diff
        .iter()
        .flat_map(|p| [p.u().index(), p.v().index()])
        .collect();
    touched.sort_unstable();
    touched.dedup();
    let mut found = None;
    for_each_small_subset(&touched, d, |dset| {
        let set = index_set(dset);
        if consistent_after_removal(g1, g2, &set) {
            found = Some(set);
            true
        } else {
            false
        }
    });
    found
}

/// Dispatches to the oracle matching the instance mode.
pub fn oracle(inst: &Instance) -> Result<Option<Solution>> {
    match inst.mode() {
        Mode::Mlce => oracle_mlce(inst),
        Mode::Tce => oracle_tce(inst),
    }
}

pub fn oracle_with_budgets(inst: &Instance, budgets: &[i64]) -> Result<Option<Solution>> {
    match inst.mode() {
        Mode::Mlce => oracle_mlce_with_budgets(inst, budgets),
        Mode::Tce => oracle_tce_with_budgets(inst, budgets),
    }
}

/// MLCE by guessing the marked set `D`, the common clustering of `V \ D`, and
/// per layer the clusters joined by each marked vertex.
pub fn structured_mlce(inst: &Instance) -> Result<Option<Solution>> {
    inst.expect_mode(Mode::Mlce)?;
    let n = inst.n();
    if n > STRUCTURED_MAX_VERTICES {
        return Err(Error::Capability(format!(
            "n={n} (max {STRUCTURED_MAX_VERTICES})"
        )));
    }
    let vertices: Vec<usize> = (0..n).collect();
    let mut found = None;
    for_each_small_subset(&vertices, inst.d(), |dset| {
        let marked: Vec<usize> = dset.to_vec();
        let unmarked: Vec<usize> = (0..n).filter(|v| !dset.contains(v)).collect();
        let mut labels = vec![usize::MAX; n];
        found = partitions(&unmarked, &mut labels, 0, 0, &mut |labels, clusters| {
            let mut per_layer = Vec::new();
            for g in inst.layers() {
                let (cost, best) = best_marked_assignment(g, labels, clusters, &marked);
                if cost > inst.k() {
                    return None;
                }
                per_layer.push(best);
            }
            Some(Solution {
                edits: inst
                    .layers()
                    .iter()
                    .zip(&per_layer)
                    .map(|(g, lab)| partition_edits(g, lab))
                    .collect(),
                marks: Marks::Total(index_set(&marked)),
            })
        });
        found.is_some()
    });
    Ok(found)
}

/// Restricted-growth enumeration of set partitions of `items`.
fn partitions<T>(
    items: &[usize],
    labels: &mut Vec<usize>,
    pos: usize,
    clusters: usize,
    visit: &mut dyn FnMut(&[usize], usize) -> Option<T>,
) -> Option<T> {
    if pos == items.len() {
        return visit(labels, clusters);
    }
    for c in 0..=clusters {
        labels[items[pos]] = c;
        let next = clusters.max(c + 1);
        if let Some(t) = partitions(items, labels, pos + 1, next, visit) {
            return Some(t);
        }
    }
    labels[items[pos]] = usize::MAX;
    None
}

/// Cheapest way to place the marked vertices into existing or new clusters.
fn best_marked_assignment(
    g: &LayerGraph,
    base: &[usize],
    clusters: usize,
    marked: &[usize],
) -> (usize, Vec<usize>) {
    let mut labels = base.to_vec();
    let mut best = (usize::MAX, labels.clone());
    fn go(
        g: &LayerGraph,
        labels: &mut Vec<usize>,
        marked: &[usize],
        pos: usize,
        clusters: usize,
        best: &mut (usize, Vec<usize>),
    ) {
        if pos == marked.len() {
            let cost = partition_cost(g, labels);
            if cost < best.0 {
                *best = (cost, labels.clone());
            }
            return;
        }
        for c in 0..=clusters {
            labels[marked[pos]] = c;
            go(g, labels, marked, pos + 1, clusters.max(c + 1), best);
        }
    }
    go(g, &mut labels, marked, 0, clusters, &mut best);
    best
}

/// Pairs whose inside/between status under `labels` differs from `g`.
fn partition_cost(g: &LayerGraph, labels: &[usize]) -> usize {
    let n = g.n();
    let mut cost = 0;
    for a in 0..n {
        for b in a + 1..n {
            if (labels[a] == labels[b]) != g.adjacent(a, b) {
                cost += 1;
            }
        }
    }
    cost
}

fn partition_edits(g: &LayerGraph, labels: &[usize]) -> EditSet {
    let n = g.n();
    let mut out = EditSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if (labels[a] == labels[b]) != g.adjacent(a, b) {
                out.insert(VertexPair::from_indices(a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::graph::verify;

    fn decide(inst: &Instance) -> bool {
        let sol = oracle(inst).unwrap();
        if let Some(s) = &sol {
            assert!(
                verify(inst, s).unwrap().is_valid(),
                "oracle witness must verify"
            );
        }
        sol.is_some()
    }

    #[test]
    fn sample_decisions() {
        for (mode, k, d, expected) in SAMPLE_EXPECTED {
            assert_eq!(decide(&sample(mode, k, d)), expected, "{mode} k={k} d={d}");
        }
    }

    #[test]
    fn sample_structured() {
        for (mode, k, d, expected) in SAMPLE_EXPECTED {
            if mode == Mode::Mlce {
                let inst = sample(mode, k, d);
                let sol = structured_mlce(&inst).unwrap();
                assert_eq!(sol.is_some(), expected, "k={k} d={d}");
                if let Some(s) = sol {
                    assert!(verify(&inst, &s).unwrap().is_valid());
                }
            }
        }
    }

    #[test]
    fn trivial_instances() {
        let single = Instance::new(Mode::Mlce, vec![LayerGraph::empty(3)], 0, 0).unwrap();
        let sol = oracle_mlce(&single).unwrap().unwrap();
        assert!(sol.edits.iter().all(|m| m.is_empty()));

        let p3 = Instance::new(
            Mode::Tce,
            vec![LayerGraph::from_pairs(3, &[(1, 2), (2, 3)])],
            1,
            0,
        )
        .unwrap();
        assert!(decide(&p3));

        let equal = Instance::new(
            Mode::Mlce,
            vec![LayerGraph::from_pairs(4, &[(1, 2), (3, 4)]); 3],
            0,
            0,
        )
        .unwrap();
        assert!(structured_mlce(&equal).unwrap().is_some());
    }

    #[test]
    fn gap_methods_agree_on_sample() {
        for (mode, k, d, _) in SAMPLE_EXPECTED {
            if mode == Mode::Tce {
                let inst = sample(mode, k, d);
                let budgets = vec![k as i64; 3];
                let a = oracle_tce_with(&inst, &budgets, GapMethod::Subsets).unwrap();
                let b = oracle_tce_with(&inst, &budgets, GapMethod::Matching).unwrap();
                assert_eq!(a.is_some(), b.is_some());
            }
        }
    }

    #[test]
    fn guards_are_errors() {
        let big = Instance::new(Mode::Mlce, vec![LayerGraph::empty(40)], 0, 0).unwrap();
        assert!(matches!(oracle_mlce(&big), Err(Error::Capability(_))));
        let nine = Instance::new(Mode::Mlce, vec![LayerGraph::empty(9)], 0, 0).unwrap();
        assert!(matches!(structured_mlce(&nine), Err(Error::Capability(_))));
        assert!(matches!(
            oracle_mlce(&sample(Mode::Mlce, 5, 0)),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn mode_is_checked() {
        assert!(matches!(
            oracle_mlce(&sample(Mode::Tce, 1, 1)),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn negative_budget_is_no() {
        let inst = sample(Mode::Mlce, 3, 1);
        assert_eq!(oracle_mlce_with_budgets(&inst, &[3, -1, 3]).unwrap(), None);
    }

    #[test]
    fn both_mlce_strategies_agree() {
        // A single layer forces the tuple search; three layers favour the mark search.
        for (mode, k, d, expected) in SAMPLE_EXPECTED {
            if mode == Mode::Mlce {
                let inst = sample(mode, k, d);
                let cands = layer_candidates(&inst, &[k as i64; 3]);
                let got_marks = cands.as_ref().and_then(|c| mlce_marks_first(5, d, c));
                let got_tuples = cands.as_ref().and_then(|c| mlce_tuples_first(5, d, c));
                assert_eq!(got_marks.is_some(), expected);
                assert_eq!(got_tuples.is_some(), expected);
            }
        }
    }

    #[test]
    fn cover_search_examples() {
        assert_eq!(cover_at_most(&[], 0), Some(vec![]));
        let triangle = [(0, 1), (1, 2), (0, 2)];
        assert_eq!(cover_at_most(&triangle, 1), None);
        assert_eq!(cover_at_most(&triangle, 2).map(|c| c.len()), Some(2));
    }
}
