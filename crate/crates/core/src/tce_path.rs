//! Layered path search for temporal cluster editing.
//!
//! Every layer contributes one node per cluster editing set of size at most
//! `k`, including non-minimal ones: a layer may need to split or merge clusters
//! it could have left alone to agree with its neighbours. Consecutive nodes
//! are compatible when the two edited layers agree after marking at most `d`
//! vertices, and a solution is a path through all layers.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{EditSet, Instance, LayerGraph, Marks, Mode, Solution, VertexPair};
use crate::limits::Clock;
use crate::two_layer::solve_two_layer_zero_edit;

/// Every `M` with `|M| ≤ k` such that `g ⊕ M` is a cluster graph, in
/// lexicographic order of the sorted pair lists.
pub fn enumerate_cluster_editing_sets(g: &LayerGraph, k: usize) -> Vec<EditSet> {
    enumerate_with_clock(g, k, &mut Clock::default()).expect("no deadline set")
}

fn enumerate_with_clock(g: &LayerGraph, k: usize, clock: &mut Clock) -> Result<Vec<EditSet>> {
    let n = g.n();
    let pairs: Vec<VertexPair> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| VertexPair::from_indices(a, b)))
        .collect();
    let mut work = g.clone();
    let mut chosen = Vec::with_capacity(k);
    let mut out = Vec::new();
    enumerate_from(0, k, &pairs, &mut work, &mut chosen, &mut out, clock)?;
    Ok(out)
}

/// Preorder over subsets, so the output is already lexicographically sorted.
fn enumerate_from(
    start: usize,
    k: usize,
    pairs: &[VertexPair],
    work: &mut LayerGraph,
    chosen: &mut Vec<VertexPair>,
    out: &mut Vec<EditSet>,
    clock: &mut Clock,
) -> Result<()> {
    clock.tick()?;
    if work.is_cluster() {
        out.push(chosen.iter().copied().collect());
    }
    if chosen.len() == k {
        return Ok(());
    }
    for i in start..pairs.len() {
        work.toggle(pairs[i]);
        chosen.push(pairs[i]);
        let r = enumerate_from(i + 1, k, pairs, work, chosen, out, clock);
        chosen.pop();
        work.toggle(pairs[i]);
        r?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerNode {
    /// 1-based layer number.
    pub layer: usize,
    pub edits: EditSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompatibilityGraph {
    pub parts: Vec<Vec<LayerNode>>,
    /// `gaps[i]` lists compatible `(node in part i, node in part i+1)`.
    pub gaps: Vec<Vec<(usize, usize)>>,
}

impl CompatibilityGraph {
    /// True if some path visits every part.
    pub fn has_spanning_path(&self) -> bool {
        let Some(first) = self.parts.first() else {
            return false;
        };
        let mut reach = vec![true; first.len()];
        for (i, gap) in self.gaps.iter().enumerate() {
            let mut next = vec![false; self.parts[i + 1].len()];
            for &(a, b) in gap {
                if reach[a] {
                    next[b] = true;
                }
            }
            reach = next;
        }
        reach.iter().any(|&r| r)
    }
}

/// Materializes the full layered graph. Intended for inspection on small
/// inputs; [`solve_tce_xp`] keeps only the reachable frontier.
pub fn build_compatibility_graph(inst: &Instance) -> Result<CompatibilityGraph> {
    inst.expect_mode(Mode::Tce)?;
    let parts: Vec<Vec<LayerNode>> = inst
        .layers()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            enumerate_cluster_editing_sets(g, inst.k())
                .into_iter()
                .map(|edits| LayerNode {
                    layer: i + 1,
                    edits,
                })
                .collect()
        })
        .collect();
    let mut gaps = Vec::new();
    for i in 0..parts.len().saturating_sub(1) {
        let left = edited_all(inst.layer(i), &parts[i])?;
        let right = edited_all(inst.layer(i + 1), &parts[i + 1])?;
        let mut edges = Vec::new();
        for (a, ga) in left.iter().enumerate() {
            for (b, gb) in right.iter().enumerate() {
                if solve_two_layer_zero_edit(ga, gb, inst.d())?.is_some() {
                    edges.push((a, b));
                }
            }
        }
        gaps.push(edges);
    }
    Ok(CompatibilityGraph { parts, gaps })
}

fn edited_all(g: &LayerGraph, nodes: &[LayerNode]) -> Result<Vec<LayerGraph>> {
    nodes.iter().map(|n| g.apply_edits(&n.edits)).collect()
}

#[derive(Clone, Debug, Default)]
pub struct XpOptions {
    /// Individual edit budgets per layer; defaults to the instance's `k`.
    pub budgets: Option<Vec<usize>>,
    pub deadline: Option<Instant>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct XpStats {
    /// Layer nodes enumerated over all parts.
    pub nodes: u64,
    /// Two-layer compatibility tests performed.
    pub checks: u64,
}

pub fn solve_tce_xp(inst: &Instance) -> Result<Option<Solution>> {
    solve_tce_xp_with(inst, &XpOptions::default()).map(|(sol, _)| sol)
}

/// Forward reachability over the parts, one predecessor per reached node;
/// candidates are tried in enumeration order so ties go to the earliest.
pub fn solve_tce_xp_with(inst: &Instance, opts: &XpOptions) -> Result<(Option<Solution>, XpStats)> {
    inst.expect_mode(Mode::Tce)?;
    let budgets = match &opts.budgets {
        Some(b) if b.len() != inst.ell() => {
            return Err(Error::input(format!(
                "{} budgets for {} layers",
                b.len(),
                inst.ell()
            )))
        }
        Some(b) => b.clone(),
        None => vec![inst.k(); inst.ell()],
    };
    let mut clock = Clock::new(opts.deadline);
    let mut stats = XpStats::default();
    let d = inst.d();

    // Per layer: reached edit sets, their edited graphs, and predecessor index.
    let mut reached: Vec<Vec<(EditSet, usize)>> = Vec::new();
    let mut frontier: Vec<LayerGraph> = Vec::new();
    for (i, g) in inst.layers().iter().enumerate() {
        let sets = enumerate_with_clock(g, budgets[i], &mut clock)?;
        stats.nodes += sets.len() as u64;
        let mut layer = Vec::new();
        let mut graphs = Vec::new();
        for m in sets {
            let h = g.apply_edits(&m)?;
            let pred = if i == 0 {
                Some(usize::MAX)
            } else {
                let mut found = None;
                for (a, prev) in frontier.iter().enumerate() {
                    clock.tick()?;
                    stats.checks += 1;
                    if solve_two_layer_zero_edit(prev, &h, d)?.is_some() {
                        found = Some(a);
                        break;
                    }
                }
                found
            };
            if let Some(p) = pred {
                layer.push((m, p));
                graphs.push(h);
            }
        }
        if layer.is_empty() {
            return Ok((None, stats));
        }
        reached.push(layer);
        frontier = graphs;
    }

    let ell = inst.ell();
    let mut chosen = vec![0usize; ell];
    for i in (1..ell).rev() {
        chosen[i - 1] = reached[i][chosen[i]].1;
    }
    let edits: Vec<EditSet> = (0..ell).map(|i| reached[i][chosen[i]].0.clone()).collect();
    let edited: Vec<LayerGraph> = inst
        .layers()
        .iter()
        .zip(&edits)
        .map(|(g, m)| g.apply_edits(m))
        .collect::<Result<_>>()?;
    let mut marks = Vec::with_capacity(ell - 1);
    for w in edited.windows(2) {
        marks.push(solve_two_layer_zero_edit(&w[0], &w[1], d)?.expect("edge was witnessed"));
    }
    Ok((
        Some(Solution {
            edits,
            marks: Marks::Temporal(marks),
        }),
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::graph::{edit_set, verify};

    /// All subsets of at most `k` pairs, filtered by the cluster property.
    fn brute_force_sets(g: &LayerGraph, k: usize) -> Vec<EditSet> {
        let n = g.n();
        let pairs: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| VertexPair::from_indices(a, b)))
            .collect();
        let mut out: Vec<EditSet> = (0u64..(1 << pairs.len()))
            .filter(|m| m.count_ones() as usize <= k)
            .map(|m| {
                (0..pairs.len())
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| pairs[i])
                    .collect::<EditSet>()
            })
            .filter(|m| g.apply_edits(m).unwrap().is_cluster())
            .collect();
        out.sort_by(|a, b| a.iter().cmp(b.iter()));
        out
    }

    #[test]
    fn enumeration_examples() {
        let clusters = LayerGraph::from_pairs(3, &[(1, 2)]);
        assert_eq!(
            enumerate_cluster_editing_sets(&clusters, 0),
            vec![EditSet::new()]
        );
        let p3 = LayerGraph::from_pairs(3, &[(1, 2), (2, 3)]);
        assert_eq!(
            enumerate_cluster_editing_sets(&p3, 1),
            vec![edit_set([(1, 2)]), edit_set([(1, 3)]), edit_set([(2, 3)])]
        );
        assert_eq!(
            enumerate_cluster_editing_sets(&LayerGraph::complete(3), 1),
            vec![EditSet::new()]
        );
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let layers = [
            sample_layer(1),
            sample_layer(2),
            sample_layer(3),
            LayerGraph::from_pairs(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]),
            LayerGraph::from_pairs(4, &[(1, 2), (3, 4)]),
        ];
        for g in &layers {
            for k in 0..=2 {
                let got = enumerate_cluster_editing_sets(g, k);
                assert_eq!(got, brute_force_sets(g, k));
                let pairs = g.n() * (g.n() - 1) / 2;
                let bound: usize = (0..=k).map(|j| binom(pairs, j)).sum();
                assert!(got.len() <= bound);
            }
        }
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn enumeration_keeps_non_minimal_merges() {
        // Two disjoint edges; merging them into one clique takes four additions.
        let g = LayerGraph::from_pairs(4, &[(1, 2), (3, 4)]);
        let merge = edit_set([(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert!(enumerate_cluster_editing_sets(&g, 4).contains(&merge));
    }

    #[test]
    fn compatibility_graph_examples() {
        let single = Instance::new(Mode::Tce, vec![sample_layer(1)], 1, 0).unwrap();
        let cg = build_compatibility_graph(&single).unwrap();
        assert_eq!(cg.parts.len(), 1);
        assert!(cg.gaps.is_empty());
        assert!(cg.has_spanning_path());

        let g = LayerGraph::from_pairs(4, &[(1, 2), (3, 4)]);
        let twin = Instance::new(Mode::Tce, vec![g.clone(), g], 0, 0).unwrap();
        let cg = build_compatibility_graph(&twin).unwrap();
        assert_eq!(
            cg.parts.iter().map(Vec::len).collect::<Vec<_>>(),
            vec![1, 1]
        );
        assert_eq!(cg.gaps, vec![vec![(0, 0)]]);

        assert!(build_compatibility_graph(&sample(Mode::Tce, 1, 1))
            .unwrap()
            .has_spanning_path());
    }

    #[test]
    fn sample_decisions() {
        for (mode, k, d, expected) in SAMPLE_EXPECTED {
            if mode != Mode::Tce {
                continue;
            }
            let inst = sample(mode, k, d);
            let sol = solve_tce_xp(&inst).unwrap();
            assert_eq!(sol.is_some(), expected, "k={k} d={d}");
            if let Some(s) = sol {
                assert!(verify(&inst, &s).unwrap().is_valid());
            }
        }
        for d in 0..=5 {
            assert_eq!(solve_tce_xp(&sample(Mode::Tce, 0, d)).unwrap(), None);
        }
    }

    #[test]
    fn individual_budgets() {
        let inst = sample(Mode::Tce, 1, 1);
        let opts = XpOptions {
            budgets: Some(vec![1, 1, 0]),
            deadline: None,
        };
        assert_eq!(solve_tce_xp_with(&inst, &opts).unwrap().0, None);
    }

    #[test]
    fn rejects_mlce_instances() {
        assert!(matches!(
            solve_tce_xp(&sample(Mode::Mlce, 1, 1)),
            Err(Error::ModeMismatch { .. })
        ));
    }
}
