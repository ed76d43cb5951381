//! Search-tree algorithm for MLCE in time `k^O(k+d) · n³ · ℓ`.
//!
//! The search starts from a majority vote over all layers, which makes every
//! layer agree everywhere, and then repairs that guess. A node of the search
//! tree is a [`Constraint`] `(D, (M_i), B)`: marked vertices, per-layer edit
//! sets and permanent pairs whose status may no longer change. Each node
//! applies the first applicable of
//!
//! 1. Rule 0: reject if `|D| > d` or some `|M_i ∩ B| > k`;
//! 2. clean-up: drop edits touching a marked vertex;
//! 3. rule 1: destroy an induced `P_3` among unmarked vertices;
//! 4. rule 2: undo or mark around an over-budget layer;
//! 5. rule 3: repair a layer that cannot be finished by editing only pairs
//!    with a marked endpoint, guided by the kernel routine [`kernel_k`].
//!
//! When nothing applies, each layer is completed by [`min_marked_completion`].

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{
    consistent_after_removal, toggle_all, toggle_pair, EditSet, Instance, LayerGraph, Marks, Mode,
    Solution, VertexId, VertexPair, VertexSet,
};
use crate::limits::Clock;

/// Search state `(D, (M_i), B)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Constraint {
    pub marked: VertexSet,
    pub edits: Vec<EditSet>,
    pub permanent: BTreeSet<VertexPair>,
}

impl Constraint {
    /// True if `x` lies in some permanent pair and thus may not be marked.
    fn attached(&self, x: VertexId) -> bool {
        self.permanent.iter().any(|p| p.contains(x))
    }

    fn with_mark(&self, x: VertexId) -> Constraint {
        let mut c = self.clone();
        c.marked.insert(x);
        c
    }

    fn with_mark_dropping(&self, x: VertexId, p: VertexPair) -> Constraint {
        let mut c = self.with_mark(x);
        for m in &mut c.edits {
            m.remove(&p);
        }
        c
    }

    fn with_toggle(&self, p: VertexPair) -> Constraint {
        let mut c = self.clone();
        for m in &mut c.edits {
            toggle_pair(m, p);
        }
        c.permanent.insert(p);
        c
    }

    fn is_clean(&self) -> bool {
        self.edits
            .iter()
            .all(|m| m.iter().all(|p| !p.touches(&self.marked)))
    }
}

/// Majority vote: a pair present in at least half the layers is added where
/// missing, any other pair is deleted where present.
pub fn greedy_initial_constraint(inst: &Instance) -> Result<Constraint> {
    inst.expect_mode(Mode::Mlce)?;
    let ell = inst.ell();
    let mut edits = vec![EditSet::new(); ell];
    let n = inst.n();
    for a in 0..n {
        for b in a + 1..n {
            let present: Vec<bool> = inst.layers().iter().map(|g| g.adjacent(a, b)).collect();
            let keep = 2 * present.iter().filter(|&&x| x).count() >= ell;
            for (m, &has) in edits.iter_mut().zip(&present) {
                if has != keep {
                    m.insert(VertexPair::from_indices(a, b));
                }
            }
        }
    }
    Ok(Constraint {
        edits,
        ..Constraint::default()
    })
}

pub fn rule0_rejects(c: &Constraint, k: usize, d: usize) -> bool {
    c.marked.len() > d
        || c.edits
            .iter()
            .any(|m| m.iter().filter(|p| c.permanent.contains(p)).count() > k)
}

pub fn cleanup(c: &Constraint) -> Constraint {
    let mut out = c.clone();
    for m in &mut out.edits {
        m.retain(|p| !p.touches(&c.marked));
    }
    out
}

pub fn constraint_quality(c: &Constraint) -> usize {
    c.marked.len() + c.permanent.len()
}

/// Layers after applying the constraint's edit sets.
pub fn edited_layers(inst: &Instance, c: &Constraint) -> Result<Vec<LayerGraph>> {
    inst.layers()
        .iter()
        .zip(&c.edits)
        .map(|(g, m)| g.apply_edits(m))
        .collect()
}

/// All edited layers coincide on the unmarked vertices.
pub fn is_aligning(inst: &Instance, c: &Constraint) -> Result<bool> {
    let layers = edited_layers(inst, c)?;
    Ok(layers
        .windows(2)
        .all(|w| consistent_after_removal(&w[0], &w[1], &c.marked)))
}

/// `D ⊆ D'`, `B ⊆ B'`, and every `M'_j` agrees with `M_j` on `B`.
pub fn extends(child: &Constraint, parent: &Constraint) -> bool {
    child.marked.is_superset(&parent.marked)
        && child.permanent.is_superset(&parent.permanent)
        && child.edits.iter().zip(&parent.edits).all(|(mc, mp)| {
            parent
                .permanent
                .iter()
                .all(|p| mc.contains(p) == mp.contains(p))
        })
}

fn check_rule_preconditions(inst: &Instance, c: &Constraint) -> Result<()> {
    if c.edits.len() != inst.ell() {
        return Err(Error::Precondition(format!(
            "constraint has {} edit sets for {} layers",
            c.edits.len(),
            inst.ell()
        )));
    }
    if !c.is_clean() {
        return Err(Error::Precondition("constraint is not cleaned up".into()));
    }
    if rule0_rejects(c, inst.k(), inst.d()) {
        return Err(Error::Precondition("rule 0 rejects the constraint".into()));
    }
    Ok(())
}

fn unmarked_mask(n: usize, marked: &VertexSet) -> VertexSet {
    (0..n)
        .map(VertexId::from_index)
        .filter(|v| !marked.contains(v))
        .collect()
}

fn rule1_on(
    inst: &Instance,
    c: &Constraint,
    layers: &[LayerGraph],
) -> Option<(usize, Vec<Constraint>)> {
    let free = unmarked_mask(inst.n(), &c.marked);
    let (i, w) = layers
        .iter()
        .enumerate()
        .find_map(|(i, g)| g.find_p3(&free).map(|w| (i, w)))?;
    let mut children = Vec::new();
    let (uv, vw, uw) = (
        VertexPair::new(w.a, w.b).unwrap(),
        VertexPair::new(w.b, w.c).unwrap(),
        VertexPair::new(w.a, w.c).unwrap(),
    );
    for p in [uv, vw, uw] {
        if !c.permanent.contains(&p) {
            children.push(c.with_toggle(p));
        }
    }
    for x in [w.a, w.b, w.c] {
        if !c.attached(x) {
            children.push(c.with_mark(x));
        }
    }
    Some((i, children))
}

/// Rule 1. `None` if no edited layer has an induced `P_3` among unmarked
/// vertices; an empty list means the branch is rejected.
pub fn branching_rule_1(inst: &Instance, c: &Constraint) -> Result<Option<Vec<Constraint>>> {
    check_rule_preconditions(inst, c)?;
    let layers = edited_layers(inst, c)?;
    Ok(rule1_on(inst, c, &layers).map(|(_, ch)| ch))
}

fn rule2_on(inst: &Instance, c: &Constraint) -> Option<(usize, Vec<Constraint>)> {
    let k = inst.k();
    let i = c.edits.iter().position(|m| m.len() > k)?;
    let m = &c.edits[i];
    let fixed = m.iter().filter(|p| c.permanent.contains(p)).count();
    let chosen: Vec<VertexPair> = m
        .iter()
        .filter(|p| !c.permanent.contains(p))
        .take(k + 1 - fixed)
        .copied()
        .collect();
    let mut children: Vec<Constraint> = chosen.iter().map(|&p| c.with_toggle(p)).collect();
    for &p in &chosen {
        for x in [p.u(), p.v()] {
            if !c.attached(x) {
                children.push(c.with_mark_dropping(x, p));
            }
        }
    }
    Some((i, children))
}

/// Rule 2, for the lowest layer with `|M_i| > k`.
pub fn branching_rule_2(inst: &Instance, c: &Constraint) -> Result<Option<Vec<Constraint>>> {
    check_rule_preconditions(inst, c)?;
    Ok(rule2_on(inst, c).map(|(_, ch)| ch))
}

/// Input `(G, s, D, O)` of [`kernel_k`].
#[derive(Clone, Debug)]
pub struct KernelKInput {
    pub graph: LayerGraph,
    /// Remaining edit budget.
    pub s: i64,
    pub marked: VertexSet,
    /// Pairs that may not be modified.
    pub obligatory: BTreeSet<VertexPair>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelKOutput {
    Failure,
    Kernel {
        /// Unmarked pairs modified by the reduction.
        r: EditSet,
        /// Unmarked, non-obligatory pairs of the reduced graph.
        c: BTreeSet<VertexPair>,
    },
}

/// Budget-driven cluster editing reduction with obligatory pairs.
///
/// Repeats the first applicable of K1 (fail on negative budget or an induced
/// `P_3` made of obligatory pairs only), K2 (a pair in at least `s + 1`
/// induced `P_3`s must be modified) and K3 (drop an isolated clique), then
/// fails if more than `s² + 2s` vertices remain.
pub fn kernel_k(input: &KernelKInput) -> KernelKOutput {
    let mut g = input.graph.clone();
    let n = g.n();
    let mut s = input.s;
    let mut obligatory = input.obligatory.clone();
    let mut alive = g.full_mask();
    let mut r = EditSet::new();
    loop {
        if s < 0 || obligatory_p3(&g, &obligatory, &alive) {
            return KernelKOutput::Failure;
        }
        if let Some(p) = heavy_pair(&g, &alive, s) {
            if obligatory.contains(&p) {
                return KernelKOutput::Failure;
            }
            g.toggle(p);
            obligatory.insert(p);
            s -= 1;
            if !p.touches(&input.marked) {
                r.insert(p);
            }
            continue;
        }
        if let Some(clique) = g
            .components_within(&alive)
            .into_iter()
            .find(|comp| is_clique(&g, comp))
        {
            for v in clique {
                alive.set(v.index(), false);
            }
            continue;
        }
        break;
    }
    let left = alive.count_ones(..) as i64;
    if left > s * s + 2 * s {
        return KernelKOutput::Failure;
    }
    let mut c = BTreeSet::new();
    for a in alive.ones() {
        for b in alive.ones().filter(|&b| b > a) {
            let p = VertexPair::from_indices(a, b);
            if !p.touches(&input.marked) && !obligatory.contains(&p) {
                c.insert(p);
            }
        }
    }
    debug_assert!(c.iter().all(|p| p.v().index() < n));
    KernelKOutput::Kernel { r, c }
}

fn obligatory_p3(
    g: &LayerGraph,
    obligatory: &BTreeSet<VertexPair>,
    alive: &fixedbitset::FixedBitSet,
) -> bool {
    obligatory.iter().any(|p| {
        let (a, b) = (p.u().index(), p.v().index());
        alive.contains(a)
            && alive.contains(b)
            && alive.ones().any(|c| {
                if c == a || c == b {
                    return false;
                }
                let pc = [
                    VertexPair::from_indices(a, c),
                    VertexPair::from_indices(b, c),
                ];
                let edges =
                    g.adjacent(a, b) as u8 + g.adjacent(a, c) as u8 + g.adjacent(b, c) as u8;
                edges == 2 && pc.iter().all(|q| obligatory.contains(q))
            })
    })
}

/// Lexicographically first pair lying in at least `s + 1` induced `P_3`s.
fn heavy_pair(g: &LayerGraph, alive: &fixedbitset::FixedBitSet, s: i64) -> Option<VertexPair> {
    let need = (s + 1) as usize;
    for a in alive.ones() {
        for b in alive.ones().filter(|&b| b > a) {
            let p = VertexPair::from_indices(a, b);
            if g.count_p3_through_pair(p) >= need {
                return Some(p);
            }
        }
    }
    None
}

fn is_clique(g: &LayerGraph, comp: &[VertexId]) -> bool {
    comp.iter().all(|v| g.degree(*v) == comp.len() - 1)
}

/// Minimum edit set whose pairs all touch `marked` and which turns `g` into a
/// cluster graph, provided its size is at most `budget`.
///
/// Iterative deepening over the branching on the marked pairs of a `P_3`.
pub fn min_marked_completion(
    g: &LayerGraph,
    marked: &VertexSet,
    budget: usize,
) -> Result<Option<EditSet>> {
    let free = unmarked_mask(g.n(), marked);
    if let Some(w) = g.find_p3(&free) {
        return Err(Error::Precondition(format!(
            "unmarked vertices induce P3 {w}"
        )));
    }
    let mut work = g.clone();
    let mut chosen = EditSet::new();
    for b in 0..=budget {
        if complete_within(&mut work, marked, &mut chosen, b) {
            return Ok(Some(chosen));
        }
    }
    Ok(None)
}

fn complete_within(
    g: &mut LayerGraph,
    marked: &VertexSet,
    chosen: &mut EditSet,
    budget: usize,
) -> bool {
    let Some(w) = g.find_p3_all() else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    for p in w.pairs() {
        if !p.touches(marked) || chosen.contains(&p) {
            continue;
        }
        g.toggle(p);
        chosen.insert(p);
        if complete_within(g, marked, chosen, budget - 1) {
            return true;
        }
        chosen.remove(&p);
        g.toggle(p);
    }
    false
}

/// Result of [`kernel_k`] as seen by rule 3, for tracing.
enum Rule3Probe {
    Failure,
    Kernel { r: usize, c: usize },
}

fn rule3_on(
    inst: &Instance,
    c: &Constraint,
    layers: &[LayerGraph],
) -> Result<Option<(usize, Rule3Probe, Vec<Constraint>)>> {
    let k = inst.k();
    let mut offending = None;
    for (i, g) in layers.iter().enumerate() {
        let s = k - c.edits[i].len();
        if min_marked_completion(g, &c.marked, s)?.is_none() {
            offending = Some(i);
            break;
        }
    }
    let Some(i) = offending else {
        return Ok(None);
    };
    let m_i = &c.edits[i];
    let mut obligatory: BTreeSet<VertexPair> = m_i.iter().copied().collect();
    obligatory.extend(c.permanent.iter().copied());
    let out = kernel_k(&KernelKInput {
        graph: layers[i].clone(),
        s: (k - m_i.len()) as i64,
        marked: c.marked.clone(),
        obligatory,
    });
    let rollback: Vec<VertexPair> = m_i
        .iter()
        .filter(|p| !c.permanent.contains(p))
        .copied()
        .collect();
    let mut children = Vec::new();
    if out == KernelKOutput::Failure && rollback.is_empty() {
        return Ok(Some((i, Rule3Probe::Failure, children)));
    }
    let mark_or_toggle = |children: &mut Vec<Constraint>, p: VertexPair, drop: bool| {
        for x in [p.u(), p.v()] {
            if !c.attached(x) {
                children.push(if drop {
                    c.with_mark_dropping(x, p)
                } else {
                    c.with_mark(x)
                });
            }
        }
        children.push(c.with_toggle(p));
    };
    for &p in &rollback {
        mark_or_toggle(&mut children, p, true);
    }
    let probe = match out {
        KernelKOutput::Failure => Rule3Probe::Failure,
        KernelKOutput::Kernel { r, c: free } => {
            for &p in &r {
                for x in [p.u(), p.v()] {
                    if !c.marked.contains(&x) && !c.attached(x) {
                        children.push(c.with_mark_dropping(x, p));
                    }
                }
            }
            if !r.is_empty() {
                let mut child = c.clone();
                child.permanent.extend(m_i.iter().copied());
                child.permanent.extend(r.iter().copied());
                for m in &mut child.edits {
                    toggle_all(m, &r);
                }
                children.push(child);
            }
            for &p in &free {
                mark_or_toggle(&mut children, p, false);
            }
            Rule3Probe::Kernel {
                r: r.len(),
                c: free.len(),
            }
        }
    };
    Ok(Some((i, probe, children)))
}

/// Rule 3, for the lowest layer that cannot be completed within its budget
/// using edits at marked vertices only.
pub fn branching_rule_3(inst: &Instance, c: &Constraint) -> Result<Option<Vec<Constraint>>> {
    check_rule_preconditions(inst, c)?;
    let layers = edited_layers(inst, c)?;
    if rule1_on(inst, c, &layers).is_some() || rule2_on(inst, c).is_some() {
        return Err(Error::Precondition(
            "rules 1 and 2 must be inapplicable".into(),
        ));
    }
    Ok(rule3_on(inst, c, &layers)?.map(|(_, _, ch)| ch))
}

/// Instrumentation and limits for [`solve_mlce_with`].
#[derive(Default)]
pub struct BranchConfig<'a> {
    /// Check structural invariants at every node and record violations.
    pub check_invariants: bool,
    /// Receives one `TRACE <depth> <rule> <detail>` line per rule application.
    pub trace: Option<&'a mut dyn Write>,
    pub deadline: Option<Instant>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchStats {
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// Deepest node visited; the root has depth 0.
    pub max_depth: usize,
    /// Human-readable invariant violations (empty unless something is wrong).
    pub violations: Vec<String>,
}

pub fn solve_mlce(inst: &Instance) -> Result<Option<Solution>> {
    solve_mlce_with(inst, &mut BranchConfig::default()).map(|(s, _)| s)
}

pub fn solve_mlce_with(
    inst: &Instance,
    config: &mut BranchConfig<'_>,
) -> Result<(Option<Solution>, BranchStats)> {
    let root = greedy_initial_constraint(inst)?;
    let mut search = Search {
        inst,
        clock: Clock::new(config.deadline),
        check: config.check_invariants,
        trace: config.trace.as_deref_mut(),
        stats: BranchStats::default(),
    };
    search.emit(0, "GREEDY", || {
        let sizes: Vec<String> = root.edits.iter().map(|m| m.len().to_string()).collect();
        format!("edits=[{}]", sizes.join(","))
    })?;
    let sol = search.node(root, 0)?;
    Ok((sol, search.stats))
}

struct Search<'i, 'w, 'a> {
    inst: &'i Instance,
    clock: Clock,
    check: bool,
    trace: Option<&'w mut (dyn Write + 'a)>,
    stats: BranchStats,
}

impl Search<'_, '_, '_> {
    fn emit(&mut self, depth: usize, rule: &str, detail: impl FnOnce() -> String) -> Result<()> {
        if let Some(w) = self.trace.as_deref_mut() {
            writeln!(w, "TRACE {depth} {rule} {}", detail())
                .map_err(|e| Error::input(format!("trace output: {e}")))?;
        }
        Ok(())
    }

    fn violation(&mut self, depth: usize, what: String) {
        self.stats.violations.push(format!("depth {depth}: {what}"));
    }

    fn node(&mut self, c: Constraint, depth: usize) -> Result<Option<Solution>> {
        self.clock.tick()?;
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let inst = self.inst;
        if rule0_rejects(&c, inst.k(), inst.d()) {
            self.emit(depth, "R0", || format!("reject marked={}", c.marked.len()))?;
            return Ok(None);
        }
        let before = c.edits.iter().map(EditSet::len).sum::<usize>();
        let c = cleanup(&c);
        let after = c.edits.iter().map(EditSet::len).sum::<usize>();
        if after < before {
            self.emit(depth, "CLEANUP", || format!("dropped={}", before - after))?;
        }
        if self.check {
            self.check_node(&c, depth)?;
        }

        let layers = edited_layers(inst, &c)?;
        let (rule, layer, children) = if let Some((i, ch)) = rule1_on(inst, &c, &layers) {
            ("BR1", i, ch)
        } else if let Some((i, ch)) = rule2_on(inst, &c) {
            ("BR2", i, ch)
        } else if let Some((i, probe, ch)) = rule3_on(inst, &c, &layers)? {
            let kernel = match probe {
                Rule3Probe::Failure => "kernel=fail".to_string(),
                Rule3Probe::Kernel { r, c } => format!("kernel=R{r},C{c}"),
            };
            self.emit(depth, "K", || format!("layer={} {kernel}", i + 1))?;
            ("BR3", i, ch)
        } else {
            self.emit(depth, "ACCEPT", || {
                let d: Vec<String> = c.marked.iter().map(|v| v.to_string()).collect();
                format!("marked={{{}}}", d.join(","))
            })?;
            return self.extract(&c, &layers).map(Some);
        };
        self.emit(depth, rule, || {
            format!("layer={} children={}", layer + 1, children.len())
        })?;
        if self.check {
            let mut problems = String::new();
            for (j, child) in children.iter().enumerate() {
                if !extends(child, &c) {
                    let _ = write!(problems, " child {j} does not extend;");
                }
                if constraint_quality(child) <= constraint_quality(&c) {
                    let _ = write!(problems, " child {j} does not raise quality;");
                }
                if !is_aligning(inst, child)? {
                    let _ = write!(problems, " child {j} not aligning;");
                }
            }
            if !problems.is_empty() {
                self.violation(depth, format!("{rule}:{problems}"));
            }
        }
        if children.is_empty() {
            self.emit(depth, rule, || "reject".to_string())?;
        }
        for child in children {
            if let Some(sol) = self.node(child, depth + 1)? {
                return Ok(Some(sol));
            }
        }
        Ok(None)
    }

    fn check_node(&mut self, c: &Constraint, depth: usize) -> Result<()> {
        let inst = self.inst;
        if !is_aligning(inst, c)? {
            self.violation(depth, "constraint not aligning".into());
        }
        if c.permanent.iter().any(|p| p.touches(&c.marked)) {
            self.violation(depth, "permanent pair touches a marked vertex".into());
        }
        let limit = inst.ell();
        for m in &c.edits {
            for p in m.iter().filter(|p| !c.permanent.contains(p)) {
                let count = c.edits.iter().filter(|mj| mj.contains(p)).count();
                if 2 * count > limit {
                    self.violation(
                        depth,
                        format!("greedy pair {p} edited in {count} of {limit} layers"),
                    );
                }
            }
        }
        Ok(())
    }

    fn extract(&mut self, c: &Constraint, layers: &[LayerGraph]) -> Result<Solution> {
        let k = self.inst.k();
        let mut edits = Vec::with_capacity(layers.len());
        for (g, m) in layers.iter().zip(&c.edits) {
            let extra =
                min_marked_completion(g, &c.marked, k - m.len())?.expect("rule 3 is inapplicable");
            let mut all = m.clone();
            all.extend(extra);
            edits.push(all);
        }
        Ok(Solution {
            edits,
            marks: Marks::Total(c.marked.clone()),
        })
    }
}
