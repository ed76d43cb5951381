//! Small reference instances shared by tests, benchmarks and the CLI demo.

use crate::graph::{edit_set, vertex_set, Instance, LayerGraph, Marks, Mode, Solution};

const SAMPLE_LAYERS: [&[(u32, u32)]; 3] = [
    &[(1, 2), (1, 3), (2, 3), (3, 4), (1, 4), (2, 4), (4, 5)],
    &[(2, 3), (3, 4), (2, 4), (4, 5)],
    &[(2, 3), (3, 4), (2, 4), (2, 5), (3, 5)],
];

/// One layer (1-based) of the five-vertex, three-layer example.
pub fn sample_layer(i: usize) -> LayerGraph {
    LayerGraph::from_pairs(5, SAMPLE_LAYERS[i - 1])
}

pub fn sample(mode: Mode, k: usize, d: usize) -> Instance {
    Instance::new(mode, (1..=3).map(sample_layer).collect(), k, d).expect("well-formed fixture")
}

/// Temporal solution at k=1, d=1: `D_1 = {1}`, `D_2 = {5}`.
pub fn sample_tce_solution() -> Solution {
    Solution {
        edits: vec![edit_set([(4, 5)]), edit_set([(4, 5)]), edit_set([(4, 5)])],
        marks: Marks::Temporal(vec![vertex_set([1]), vertex_set([5])]),
    }
}

/// Multi-layer solution at k=1, d=2 marking `{1, 5}`.
pub fn sample_mlce_k1_d2_solution() -> Solution {
    Solution {
        edits: vec![edit_set([(4, 5)]), edit_set([(4, 5)]), edit_set([(4, 5)])],
        marks: Marks::Total(vertex_set([1, 5])),
    }
}

/// Multi-layer solution at k=3, d=1 marking `{1}`.
pub fn sample_mlce_k3_d1_solution() -> Solution {
    Solution {
        edits: vec![
            edit_set([(1, 5), (2, 5), (3, 5)]),
            edit_set([(2, 5), (3, 5)]),
            edit_set([(4, 5)]),
        ],
        marks: Marks::Total(vertex_set([1])),
    }
}

/// Expected decisions on the example, as `(mode, k, d, answer)`.
pub const SAMPLE_EXPECTED: [(Mode, usize, usize, bool); 7] = [
    (Mode::Tce, 1, 1, true),
    (Mode::Tce, 0, 3, false),
    (Mode::Tce, 3, 0, false),
    (Mode::Mlce, 3, 1, true),
    (Mode::Mlce, 1, 2, true),
    (Mode::Mlce, 0, 1, false),
    (Mode::Mlce, 2, 0, false),
];
