//! Polynomial kernelization over instances with separate per-layer budgets.
//!
//! The rules are tried in order 1 through 8; after any rule changes the
//! instance the scan restarts at rule 1. Temporal instances run the same
//! rules with the marking budget `d` replaced by `d * ell`.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Instance, LayerGraph, Mode, VertexId, VertexPair};

/// An instance whose layers carry individual edit budgets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparateBudgetInstance {
    pub mode: Mode,
    pub layers: Vec<LayerGraph>,
    pub budgets: Vec<i64>,
    /// Marking budget of the source instance.
    pub d: usize,
    /// Marking budget the rules reason with.
    pub d_eff: usize,
    /// Original id of every current vertex, by current index.
    pub origin: Vec<VertexId>,
}

impl SeparateBudgetInstance {
    pub fn n(&self) -> usize {
        self.origin.len()
    }

    pub fn ell(&self) -> usize {
        self.layers.len()
    }

    /// Largest per-layer budget.
    pub fn k(&self) -> i64 {
        self.budgets.iter().copied().max().unwrap_or(0)
    }

    /// Vertex bound checked by rule 8.
    pub fn vertex_bound(&self) -> i64 {
        let (k, d) = (self.k(), self.d_eff as i64);
        self.ell() as i64 * (k * k + 2 * k + d * (k + 2 * d + 2) + 2 * k)
    }

    fn remove_vertices(&mut self, drop: &[usize]) {
        let keep: Vec<usize> = (0..self.n()).filter(|i| !drop.contains(i)).collect();
        for g in &mut self.layers {
            *g = g.induced(&keep);
        }
        self.origin = keep.iter().map(|&i| self.origin[i]).collect();
    }

    /// `R`: vertices lying on an induced `P_3` in some layer.
    fn dirty(&self) -> Vec<bool> {
        let mut r = vec![false; self.n()];
        for g in &self.layers {
            for (v, flag) in dirty_in(g).into_iter().enumerate() {
                r[v] |= flag;
            }
        }
        r
    }

    fn intersection_graph(&self) -> LayerGraph {
        let mut edges: Vec<VertexPair> = self.layers[0].edges().collect();
        edges.retain(|&p| self.layers.iter().all(|g| g.has_edge(p)));
        LayerGraph::from_edges(self.n(), edges).expect("edges come from a layer")
    }

    fn union_graph(&self) -> LayerGraph {
        let mut g = LayerGraph::empty(self.n());
        for layer in &self.layers {
            for p in layer.edges() {
                g.set_edge(p, true);
            }
        }
        g
    }
}

/// Vertices of `g` lying on an induced `P_3`. A vertex does so exactly when
/// its component is not a clique.
fn dirty_in(g: &LayerGraph) -> Vec<bool> {
    let mut r = vec![false; g.n()];
    for comp in g.components() {
        let size = comp.len();
        let clique = comp.iter().all(|&v| g.degree(v) == size - 1);
        if !clique {
            for v in comp {
                r[v.index()] = true;
            }
        }
    }
    r
}

pub fn to_separate_budgets(inst: &Instance) -> SeparateBudgetInstance {
    let d_eff = match inst.mode() {
        Mode::Mlce => inst.d(),
        Mode::Tce => inst.d() * inst.ell(),
    };
    SeparateBudgetInstance {
        mode: inst.mode(),
        layers: inst.layers().to_vec(),
        budgets: vec![inst.k() as i64; inst.ell()],
        d: inst.d(),
        d_eff,
        origin: inst.vertices().collect(),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReductionRule {
    /// Some budget is negative.
    NegativeBudget = 1,
    /// An edge on more than `k_i` induced `P_3`s is deleted.
    HeavyEdge = 2,
    /// A non-edge on more than `k_i` induced `P_3`s is added.
    HeavyNonEdge = 3,
    /// Too many vertices on induced `P_3`s in one layer.
    Dirty = 4,
    /// A clean component shared by all layers is removed.
    SameComponent = 5,
    /// One vertex of a large clean shared clique is removed.
    LargeCore = 6,
    /// A layer component with too many clean vertices.
    BigComponent = 7,
    /// Too many vertices overall.
    ManyVertices = 8,
}

impl ReductionRule {
    pub const ALL: [ReductionRule; 8] = [
        ReductionRule::NegativeBudget,
        ReductionRule::HeavyEdge,
        ReductionRule::HeavyNonEdge,
        ReductionRule::Dirty,
        ReductionRule::SameComponent,
        ReductionRule::LargeCore,
        ReductionRule::BigComponent,
        ReductionRule::ManyVertices,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(usize::from(id).checked_sub(1)?).copied()
    }
}

impl fmt::Display for ReductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RR{}", self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOutcome {
    NotApplicable,
    Applied(SeparateBudgetInstance, RuleRecord),
    TrivialNo,
}

/// One rule application, with vertices named by their original ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleRecord {
    pub rule: ReductionRule,
    pub detail: String,
}

impl fmt::Display for RuleRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rule, self.detail)
    }
}

/// Applies `rule` once, requiring every earlier rule to be inapplicable.
pub fn apply_rule(sb: &SeparateBudgetInstance, rule: ReductionRule) -> Result<RuleOutcome> {
    if sb.budgets.len() != sb.ell() || sb.layers.iter().any(|g| g.n() != sb.n()) {
        return Err(Error::Precondition(
            "malformed separate-budget instance".into(),
        ));
    }
    for &earlier in ReductionRule::ALL.iter().take_while(|&&r| r < rule) {
        if step(sb, earlier) != RuleOutcome::NotApplicable {
            return Err(Error::Precondition(format!(
                "{rule} requires {earlier} to be inapplicable"
            )));
        }
    }
    Ok(step(sb, rule))
}

fn step(sb: &SeparateBudgetInstance, rule: ReductionRule) -> RuleOutcome {
    use ReductionRule::*;
    let record = |detail: String| RuleRecord { rule, detail };
    match rule {
        NegativeBudget => {
            if sb.budgets.iter().any(|&k| k < 0) {
                RuleOutcome::TrivialNo
            } else {
                RuleOutcome::NotApplicable
            }
        }
        HeavyEdge | HeavyNonEdge => {
            let want_edge = rule == HeavyEdge;
            for (i, g) in sb.layers.iter().enumerate() {
                for a in 0..sb.n() {
                    for b in a + 1..sb.n() {
                        let p = VertexPair::from_indices(a, b);
                        if g.has_edge(p) != want_edge
                            || (g.count_p3_through_pair(p) as i64) < sb.budgets[i] + 1
                        {
                            continue;
                        }
                        let mut next = sb.clone();
                        next.layers[i].toggle(p);
                        next.budgets[i] -= 1;
                        let op = if want_edge { "delete" } else { "add" };
                        let named =
                            VertexPair::new(sb.origin[a], sb.origin[b]).expect("distinct vertices");
                        return RuleOutcome::Applied(
                            next,
                            record(format!("layer {} {op} {named}", i + 1)),
                        );
                    }
                }
            }
            RuleOutcome::NotApplicable
        }
        Dirty => {
            let hit = sb.layers.iter().zip(&sb.budgets).any(|(g, &k)| {
                dirty_in(g).into_iter().filter(|&x| x).count() as i64 > k * k + 2 * k
            });
            if hit {
                RuleOutcome::TrivialNo
            } else {
                RuleOutcome::NotApplicable
            }
        }
        SameComponent => {
            let r = sb.dirty();
            let inter = sb.intersection_graph().components();
            let union = sb.union_graph().components();
            let found = union
                .into_iter()
                .find(|c| c.iter().all(|v| !r[v.index()]) && inter.binary_search(c).is_ok());
            match found {
                Some(c) => {
                    let drop: Vec<usize> = c.iter().map(|v| v.index()).collect();
                    let mut next = sb.clone();
                    next.remove_vertices(&drop);
                    let names: Vec<String> =
                        drop.iter().map(|&i| sb.origin[i].to_string()).collect();
                    RuleOutcome::Applied(next, record(format!("remove {{{}}}", names.join(","))))
                }
                None => RuleOutcome::NotApplicable,
            }
        }
        LargeCore => {
            let r = sb.dirty();
            let mut clean = fixedbitset::FixedBitSet::with_capacity(sb.n());
            clean.extend((0..sb.n()).filter(|&v| !r[v]));
            let need = sb.k() + sb.d_eff as i64 + 3;
            let found = sb
                .intersection_graph()
                .components_within(&clean)
                .into_iter()
                .find(|c| c.len() as i64 >= need);
            match found {
                Some(c) => {
                    let v = c.last().expect("components are non-empty").index();
                    let mut next = sb.clone();
                    next.remove_vertices(&[v]);
                    RuleOutcome::Applied(next, record(format!("remove {}", sb.origin[v])))
                }
                None => RuleOutcome::NotApplicable,
            }
        }
        BigComponent => {
            let r = sb.dirty();
            let limit = sb.k() + 2 * sb.d_eff as i64 + 3;
            let hit = sb.layers.iter().any(|g| {
                g.components()
                    .iter()
                    .any(|c| c.iter().filter(|v| !r[v.index()]).count() as i64 >= limit)
            });
            if hit {
                RuleOutcome::TrivialNo
            } else {
                RuleOutcome::NotApplicable
            }
        }
        ManyVertices => {
            if sb.n() as i64 > sb.vertex_bound() {
                RuleOutcome::TrivialNo
            } else {
                RuleOutcome::NotApplicable
            }
        }
    }
}

/// Applies the rules until none fires.
pub fn reduce(
    mut sb: SeparateBudgetInstance,
) -> std::result::Result<(SeparateBudgetInstance, Vec<RuleRecord>), ReductionRule> {
    let mut log = Vec::new();
    'restart: loop {
        for rule in ReductionRule::ALL {
            match step(&sb, rule) {
                RuleOutcome::NotApplicable => {}
                RuleOutcome::TrivialNo => return Err(rule),
                RuleOutcome::Applied(next, rec) => {
                    sb = next;
                    log.push(rec);
                    continue 'restart;
                }
            }
        }
        return Ok((sb, log));
    }
}

/// Restores a single budget `k = max k_i` by appending a `(2k+2)`-clique to
/// every layer and deleting its first `k - k_i` edges in layer `i`.
pub fn back_transform(sb: &SeparateBudgetInstance) -> Result<Instance> {
    if let Some(k) = sb.budgets.iter().find(|&&k| k < 0) {
        return Err(Error::Precondition(format!("negative budget {k}")));
    }
    let k = sb.k();
    let n = sb.n();
    let size = 2 * k as usize + 2;
    let clique: Vec<VertexPair> = (0..size)
        .flat_map(|a| (a + 1..size).map(move |b| VertexPair::from_indices(n + a, n + b)))
        .collect();
    let layers = sb
        .layers
        .iter()
        .zip(&sb.budgets)
        .map(|(g, &ki)| {
            let mut out = LayerGraph::empty(n + size);
            for p in g
                .edges()
                .chain(clique.iter().skip((k - ki) as usize).copied())
            {
                out.set_edge(p, true);
            }
            out
        })
        .collect();
    Instance::new(sb.mode, layers, k as usize, sb.d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelResult {
    TrivialNo(ReductionRule),
    Reduced {
        instance: Instance,
        /// New id of every original vertex, by original index; `None` if removed.
        id_map: Vec<Option<VertexId>>,
        rule_log: Vec<RuleRecord>,
    },
}

pub fn kernelize(inst: &Instance) -> KernelResult {
    match reduce(to_separate_budgets(inst)) {
        Err(rule) => KernelResult::TrivialNo(rule),
        Ok((sb, rule_log)) => {
            let mut id_map = vec![None; inst.n()];
            for (i, v) in sb.origin.iter().enumerate() {
                id_map[v.index()] = Some(VertexId::from_index(i));
            }
            let instance = back_transform(&sb).expect("reduced budgets are non-negative");
            KernelResult::Reduced {
                instance,
                id_map,
                rule_log,
            }
        }
    }
}
