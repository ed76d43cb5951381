//! Exact solver for two cluster-graph layers with no edit budget.
//!
//! Agreement after deleting `D` means every surviving vertex keeps the same
//! cluster-mates in both layers, so the survivors are covered by pairwise
//! intersections `X ∩ Y` of clusters matched one-to-one. A maximum-weight
//! matching on the clique-intersection graph therefore yields a minimum `D`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{LayerGraph, VertexId, VertexSet};

/// Bipartite graph between the clusters of two layers, weighted by overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedBipartiteGraph {
    /// Clusters of the first layer, ordered by smallest vertex.
    pub left: Vec<Vec<VertexId>>,
    /// Clusters of the second layer, ordered by smallest vertex.
    pub right: Vec<Vec<VertexId>>,
    /// `|X ∩ Y|` for every pair of clusters that overlap.
    pub weights: BTreeMap<(usize, usize), usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    /// `(left, right)` index pairs in increasing order.
    pub pairs: Vec<(usize, usize)>,
    pub weight: usize,
}

pub fn build_clique_intersection_graph(
    g1: &LayerGraph,
    g2: &LayerGraph,
) -> Result<WeightedBipartiteGraph> {
    check_sizes(g1, g2)?;
    for (i, g) in [g1, g2].into_iter().enumerate() {
        if let Some(w) = g.find_p3_all() {
            return Err(Error::Precondition(format!(
                "layer {} is not a cluster graph (induced P3 {w})",
                i + 1
            )));
        }
    }
    Ok(intersection_graph(g1, g2))
}

fn check_sizes(g1: &LayerGraph, g2: &LayerGraph) -> Result<()> {
    if g1.n() == g2.n() {
        Ok(())
    } else {
        Err(Error::input(format!(
            "layers have {} and {} vertices",
            g1.n(),
            g2.n()
        )))
    }
}

fn intersection_graph(g1: &LayerGraph, g2: &LayerGraph) -> WeightedBipartiteGraph {
    let left = g1.components();
    let right = g2.components();
    let mut cluster_of = vec![0usize; g2.n()];
    for (j, y) in right.iter().enumerate() {
        for v in y {
            cluster_of[v.index()] = j;
        }
    }
    let mut weights = BTreeMap::new();
    for (i, x) in left.iter().enumerate() {
        for v in x {
            *weights.entry((i, cluster_of[v.index()])).or_insert(0) += 1;
        }
    }
    WeightedBipartiteGraph {
        left,
        right,
        weights,
    }
}

/// Maximum-weight matching; among all optimal matchings the lexicographically
/// smallest sequence of `(left, right)` pairs is returned.
pub fn max_weight_matching(h: &WeightedBipartiteGraph) -> Matching {
    let edges: Vec<((usize, usize), usize)> = h.weights.iter().map(|(&e, &w)| (e, w)).collect();
    let (rows, cols) = (h.left.len(), h.right.len());
    let best = restricted_optimum(rows, cols, &edges, |_| true);

    let mut used_l = vec![false; rows];
    let mut used_r = vec![false; cols];
    let mut out = Matching::default();
    let mut start = 0;
    while out.weight < best {
        let next = (start..edges.len()).find(|&idx| {
            let ((l, r), w) = edges[idx];
            if used_l[l] || used_r[r] {
                return false;
            }
            let rest = restricted_optimum(rows, cols, &edges, |j| {
                let ((a, b), _) = edges[j];
                j > idx && !used_l[a] && !used_r[b] && a != l && b != r
            });
            out.weight + w + rest == best
        });
        let idx = next.expect("an optimal extension always exists");
        let ((l, r), w) = edges[idx];
        used_l[l] = true;
        used_r[r] = true;
        out.pairs.push((l, r));
        out.weight += w;
        start = idx + 1;
    }
    out
}

fn restricted_optimum(
    rows: usize,
    cols: usize,
    edges: &[((usize, usize), usize)],
    keep: impl Fn(usize) -> bool,
) -> usize {
    let size = rows.max(cols);
    if size == 0 {
        return 0;
    }
    let mut profit = vec![vec![0i64; size]; size];
    for (j, &((l, r), w)) in edges.iter().enumerate() {
        if keep(j) {
            profit[l][r] = w as i64;
        }
    }
    hungarian_max(&profit) as usize
}

/// Value of a maximum-profit perfect assignment on a square matrix.
fn hungarian_max(profit: &[Vec<i64>]) -> i64 {
    let n = profit.len();
    let cost = |i: usize, j: usize| -profit[i - 1][j - 1];
    // Potentials and column assignment, 1-based with column 0 as a sentinel.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| profit[p[j] - 1][j - 1]).sum()
}

/// Vertices outside the matched intersections.
pub fn marking_set(h: &WeightedBipartiteGraph, m: &Matching, n: usize) -> VertexSet {
    let mut kept = vec![false; n];
    for &(l, r) in &m.pairs {
        let right: VertexSet = h.right[r].iter().copied().collect();
        for v in &h.left[l] {
            if right.contains(v) {
                kept[v.index()] = true;
            }
        }
    }
    (0..n)
        .filter(|&i| !kept[i])
        .map(VertexId::from_index)
        .collect()
}

/// Smallest `D` (deterministic) such that the layers agree on `V \ D`, or
/// `None` when a layer is not a cluster graph.
pub fn min_marking_set(g1: &LayerGraph, g2: &LayerGraph) -> Result<Option<VertexSet>> {
    check_sizes(g1, g2)?;
    if !g1.is_cluster() || !g2.is_cluster() {
        return Ok(None);
    }
    let h = intersection_graph(g1, g2);
    let m = max_weight_matching(&h);
    Ok(Some(marking_set(&h, &m, g1.n())))
}

/// Decides whether two layers can be made to agree by marking at most `d`
/// vertices and no edits; returns the marking set on success.
pub fn solve_two_layer_zero_edit(
    g1: &LayerGraph,
    g2: &LayerGraph,
    d: usize,
) -> Result<Option<VertexSet>> {
    check_sizes(g1, g2)?;
    if !g1.is_cluster() || !g2.is_cluster() {
        return Ok(None);
    }
    let h = intersection_graph(g1, g2);
    // The optimum alone decides; the tie-broken matching is only built for yes.
    let edges: Vec<_> = h.weights.iter().map(|(&e, &w)| (e, w)).collect();
    let best = restricted_optimum(h.left.len(), h.right.len(), &edges, |_| true);
    if best + d < g1.n() {
        return Ok(None);
    }
    let m = max_weight_matching(&h);
    Ok(Some(marking_set(&h, &m, g1.n())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{consistent_after_removal, vertex_set};
    use proptest::prelude::*;

    fn clusters_12_3() -> LayerGraph {
        LayerGraph::from_pairs(3, &[(1, 2)])
    }

    fn clusters_1_23() -> LayerGraph {
        LayerGraph::from_pairs(3, &[(2, 3)])
    }

    /// Every matching by enumeration over subsets of the edge list.
    fn brute_force_best(h: &WeightedBipartiteGraph) -> usize {
        let edges: Vec<_> = h.weights.iter().collect();
        let mut best = 0;
        for mask in 0u32..(1 << edges.len()) {
            let chosen: Vec<_> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).collect();
            let mut ls: Vec<_> = chosen.iter().map(|&i| edges[i].0 .0).collect();
            let mut rs: Vec<_> = chosen.iter().map(|&i| edges[i].0 .1).collect();
            ls.sort();
            ls.dedup();
            rs.sort();
            rs.dedup();
            if ls.len() == chosen.len() && rs.len() == chosen.len() {
                best = best.max(chosen.iter().map(|&i| *edges[i].1).sum());
            }
        }
        best
    }

    fn brute_force_min_d(g1: &LayerGraph, g2: &LayerGraph) -> usize {
        let n = g1.n();
        (0u32..(1 << n))
            .filter(|mask| {
                let d = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(VertexId::from_index)
                    .collect();
                consistent_after_removal(g1, g2, &d)
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn intersection_graph_examples() {
        let h = build_clique_intersection_graph(&LayerGraph::complete(4), &LayerGraph::complete(4))
            .unwrap();
        assert_eq!(h.weights, BTreeMap::from([((0, 0), 4)]));

        let h = build_clique_intersection_graph(&clusters_12_3(), &clusters_1_23()).unwrap();
        assert_eq!(
            h.weights,
            BTreeMap::from([((0, 0), 1), ((0, 1), 1), ((1, 1), 1)])
        );

        let h =
            build_clique_intersection_graph(&LayerGraph::empty(4), &LayerGraph::empty(4)).unwrap();
        assert_eq!(h.weights.len(), 4);
        assert!(h.weights.values().all(|&w| w == 1));
    }

    #[test]
    fn intersection_graph_rejects_non_cluster() {
        let p3 = LayerGraph::from_pairs(3, &[(1, 2), (2, 3)]);
        assert!(matches!(
            build_clique_intersection_graph(&p3, &p3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn matching_examples() {
        let empty = WeightedBipartiteGraph {
            left: vec![],
            right: vec![],
            weights: BTreeMap::new(),
        };
        assert_eq!(max_weight_matching(&empty), Matching::default());

        let h = build_clique_intersection_graph(&clusters_12_3(), &clusters_1_23()).unwrap();
        let m = max_weight_matching(&h);
        assert_eq!(m.weight, 2);
        assert_eq!(m.pairs, vec![(0, 0), (1, 1)]);

        let h = build_clique_intersection_graph(&LayerGraph::complete(5), &LayerGraph::complete(5))
            .unwrap();
        assert_eq!(max_weight_matching(&h).weight, 5);
    }

    #[test]
    fn zero_edit_examples() {
        let g = clusters_12_3();
        assert_eq!(
            solve_two_layer_zero_edit(&g, &g, 0).unwrap(),
            Some(VertexSet::new())
        );
        assert_eq!(
            solve_two_layer_zero_edit(&clusters_12_3(), &clusters_1_23(), 1).unwrap(),
            Some(vertex_set([2]))
        );
        assert_eq!(
            solve_two_layer_zero_edit(&clusters_12_3(), &clusters_1_23(), 0).unwrap(),
            None
        );
    }

    #[test]
    fn zero_edit_handles_non_cluster_and_size_mismatch() {
        let p3 = LayerGraph::from_pairs(3, &[(1, 2), (2, 3)]);
        assert_eq!(solve_two_layer_zero_edit(&p3, &p3, 3).unwrap(), None);
        assert!(solve_two_layer_zero_edit(&p3, &LayerGraph::empty(4), 3).is_err());
    }

    /// Random cluster graph on `n` vertices from a cluster label per vertex.
    pub(crate) fn arb_cluster_layer(n: usize) -> impl Strategy<Value = LayerGraph> {
        proptest::collection::vec(0..n, n).prop_map(move |labels| {
            let mut g = LayerGraph::empty(n);
            for a in 0..n {
                for b in a + 1..n {
                    if labels[a] == labels[b] {
                        g.set_edge(crate::graph::VertexPair::from_indices(a, b), true);
                    }
                }
            }
            g
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn matching_is_optimal(g1 in arb_cluster_layer(6), g2 in arb_cluster_layer(6)) {
            let h = build_clique_intersection_graph(&g1, &g2).unwrap();
            let m = max_weight_matching(&h);
            prop_assert_eq!(m.weight, brute_force_best(&h));
            let sum: usize = m.pairs.iter().map(|p| h.weights[p]).sum();
            prop_assert_eq!(sum, m.weight);
        }

        #[test]
        fn marking_set_is_minimum(g1 in arb_cluster_layer(6), g2 in arb_cluster_layer(6), d in 0usize..7) {
            let best = brute_force_min_d(&g1, &g2);
            let got = solve_two_layer_zero_edit(&g1, &g2, d).unwrap();
            prop_assert_eq!(got.is_some(), best <= d);
            if let Some(dset) = got {
                prop_assert_eq!(dset.len(), best);
                prop_assert!(consistent_after_removal(&g1, &g2, &dset));
            }
        }
    }
}
