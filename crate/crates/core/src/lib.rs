//! Exact solvers for multi-layer and temporal cluster editing.
//!
//! A multi-layer graph has `ℓ` layers over one vertex set. The task is to turn
//! every layer into a cluster graph (a disjoint union of cliques) with at most
//! `k` edge edits per layer, such that the edited layers coincide once a few
//! marked vertices are ignored:
//!
//! * [`Mode::Mlce`]: one marked set `D` with `|D| ≤ d`; all layers agree on `V \ D`.
//! * [`Mode::Tce`]: a marked set `D_i` with `|D_i| ≤ d` per consecutive pair of
//!   layers; layers `i` and `i+1` agree on `V \ D_i`.
//!
//! Solvers: [`branch::solve_mlce`] (search tree), [`tce_path::solve_tce_xp`]
//! (layered path search), [`two_layer`] (matching, `k = 0`, two layers), and
//! the brute-force references in [`oracle`]. [`kernelize`] shrinks instances
//! to an equivalent one of size polynomial in `k`, `d` and `ℓ`.

pub mod branch;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod graph;
pub mod io;
pub mod kernelize;
mod limits;
pub mod oracle;
pub mod tce_path;
pub mod two_layer;

pub use error::{Error, Result};
pub use graph::{
    consistent_after_removal, verify, EditSet, Instance, LayerGraph, Marks, Mode, P3Witness,
    Solution, VerifyReport, VertexId, VertexPair, VertexSet, Violation,
};
