//! Instance generators: planted yes-instances, uniform random layers, and the
//! hardness construction from (2,2)-3-SAT.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`, so output
//! is reproducible for a fixed seed within this implementation.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Instance, LayerGraph, Mode, VertexPair};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedParams {
    pub n: usize,
    pub ell: usize,
    pub clusters: usize,
    /// Vertices moved to another cluster between consecutive layers.
    pub drift: usize,
    /// Random pair flips per layer.
    pub noise: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Planted {
    pub instance: Instance,
    /// Ground truth, one line per entry, suitable for `#` comments.
    pub notes: Vec<String>,
}

/// Builds layers from a drifting ground-truth clustering plus noise flips.
///
/// Budgets are set so the planted solution fits: `k = noise`, and `d = drift`
/// for TCE or `drift · (ℓ - 1)` for MLCE.
pub fn generate_planted(p: &PlantedParams, mode: Mode) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.n;
    let ell = p.ell.max(1);
    let clusters = p.clusters.clamp(1, n.max(1));
    let pairs = n * n.saturating_sub(1) / 2;
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..clusters)).collect();
    let mut notes = vec![format!(
        "planted n={n} ell={ell} clusters={clusters} drift={} noise={} seed={}",
        p.drift, p.noise, p.seed
    )];
    let mut layers = Vec::with_capacity(ell);
    for i in 0..ell {
        if i > 0 && clusters > 1 {
            let moved = sample(&mut rng, n, p.drift.min(n)).into_vec();
            let mut line = format!("drift {}->{}:", i, i + 1);
            for v in moved {
                let shift = rng.random_range(1..clusters);
                labels[v] = (labels[v] + shift) % clusters;
                line.push_str(&format!(" {}", v + 1));
            }
            notes.push(line);
        }
        notes.push(format!("truth {}: {}", i + 1, describe_clusters(&labels)));
        let mut g = cluster_graph(&labels);
        let flips = sample(&mut rng, pairs, p.noise.min(pairs)).into_vec();
        let mut line = format!("noise {}:", i + 1);
        for f in flips {
            let q = pair_at(f);
            g.toggle(q);
            line.push_str(&format!(" {}-{}", q.u(), q.v()));
        }
        notes.push(line);
        layers.push(g);
    }
    let d = match mode {
        Mode::Tce => p.drift,
        Mode::Mlce => p.drift * (ell - 1),
    }
    .min(n);
    let instance = Instance::new(mode, layers, p.noise, d).expect("layers share n");
    Planted { instance, notes }
}

fn cluster_graph(labels: &[usize]) -> LayerGraph {
    let n = labels.len();
    let mut g = LayerGraph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if labels[a] == labels[b] {
                g.set_edge(VertexPair::from_indices(a, b), true);
            }
        }
    }
    g
}

fn describe_clusters(labels: &[usize]) -> String {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); k];
    for (v, &l) in labels.iter().enumerate() {
        groups[l].push((v + 1).to_string());
    }
    groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| format!("{{{}}}", g.join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The `i`-th pair in the order `{1,2}, {1,3}, {2,3}, {1,4}, ...`.
fn pair_at(i: usize) -> VertexPair {
    let mut b = 1;
    while b * (b + 1) / 2 <= i {
        b += 1;
    }
    let a = i - b * (b - 1) / 2;
    VertexPair::from_indices(a, b)
}

/// Independent `G(n, density)` layers.
pub fn generate_uniform(
    n: usize,
    ell: usize,
    density: f64,
    k: usize,
    d: usize,
    mode: Mode,
    seed: u64,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = (0..ell.max(1))
        .map(|_| {
            let mut g = LayerGraph::empty(n);
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random_bool(density.clamp(0.0, 1.0)) {
                        g.set_edge(VertexPair::from_indices(a, b), true);
                    }
                }
            }
            g
        })
        .collect();
    Instance::new(mode, layers, k, d).expect("layers share n")
}

/// CNF formula in which every literal occurs exactly twice and every clause
/// has two or three literals. Literal `+i` is `x_i`, `-i` its negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula223 {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Formula223 {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        let f = Formula223 { n_vars, clauses };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let mut pos = vec![0usize; self.n_vars];
        let mut neg = vec![0usize; self.n_vars];
        for (j, c) in self.clauses.iter().enumerate() {
            if !(2..=3).contains(&c.len()) {
                return Err(Error::input(format!(
                    "clause {} has {} literals, expected 2 or 3",
                    j + 1,
                    c.len()
                )));
            }
            for &lit in c {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > self.n_vars {
                    return Err(Error::input(format!(
                        "clause {}: literal {lit} outside 1..={}",
                        j + 1,
                        self.n_vars
                    )));
                }
                if lit > 0 {
                    pos[var - 1] += 1;
                } else {
                    neg[var - 1] += 1;
                }
            }
        }
        for i in 0..self.n_vars {
            if pos[i] != 2 || neg[i] != 2 {
                return Err(Error::input(format!(
                    "variable {} occurs {} times positively and {} times negatively, expected 2 and 2",
                    i + 1,
                    pos[i],
                    neg[i]
                )));
            }
        }
        Ok(())
    }

    /// Brute force over all assignments.
    pub fn is_satisfiable(&self) -> bool {
        (0u64..1 << self.n_vars).any(|a| {
            self.clauses.iter().all(|c| {
                c.iter().any(|&lit| {
                    let value = a >> (lit.unsigned_abs() - 1) & 1 == 1;
                    value == (lit > 0)
                })
            })
        })
    }

    /// One clause per line as signed integers; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n_vars = 0;
        let mut clauses = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut clause = Vec::new();
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno + 1, format!("bad literal `{tok}`")))?;
                n_vars = n_vars.max(lit.unsigned_abs() as usize);
                clause.push(lit);
            }
            clauses.push(clause);
        }
        Formula223::new(n_vars, clauses)
    }
}

/// Four clauses over three variables used as the running hardness example.
pub fn sat_example_formula() -> Formula223 {
    Formula223::new(
        3,
        vec![
            vec![1, -2, 3],
            vec![-1, -2, -3],
            vec![1, 2, -3],
            vec![-1, 2, 3],
        ],
    )
    .expect("valid formula")
}

/// Three-layer MLCE instance with `k = 0` that is a yes-instance exactly when
/// the formula is satisfiable.
///
/// Variable `i` owns vertices `4i-3 .. 4i` (`x¹, y¹, x², y²`); clause vertices
/// follow in clause order. Occurrences of a literal are numbered in clause
/// order, and the `z`-th occurrence is wired to `x^z` (or `y^z` if negated).
pub fn generate_sat_reduction(f: &Formula223) -> Result<Instance> {
    f.validate()?;
    let nv = 4 * f.n_vars;
    let n = nv + f.clauses.iter().map(Vec::len).sum::<usize>();
    let x = |i: usize, z: usize| 4 * i + 2 * z; // 0-based index of x^{z+1}_{i+1}
    let y = |i: usize, z: usize| 4 * i + 2 * z + 1;
    let mut g1 = LayerGraph::empty(n);
    let mut g2 = LayerGraph::empty(n);
    let mut g3 = LayerGraph::empty(n);
    let edge =
        |g: &mut LayerGraph, a: usize, b: usize| g.set_edge(VertexPair::from_indices(a, b), true);
    for i in 0..f.n_vars {
        edge(&mut g1, x(i, 0), y(i, 0));
        edge(&mut g1, x(i, 1), y(i, 1));
        edge(&mut g2, x(i, 0), y(i, 1));
        edge(&mut g2, x(i, 1), y(i, 0));
    }
    let mut seen_pos = vec![0usize; f.n_vars];
    let mut seen_neg = vec![0usize; f.n_vars];
    let mut next = nv;
    for c in &f.clauses {
        let first = next;
        for &lit in c {
            let i = lit.unsigned_abs() as usize - 1;
            let target = if lit > 0 {
                seen_pos[i] += 1;
                x(i, seen_pos[i] - 1)
            } else {
                seen_neg[i] += 1;
                y(i, seen_neg[i] - 1)
            };
            edge(&mut g3, next, target);
            next += 1;
        }
        for a in first..next {
            for b in a + 1..next {
                edge(&mut g1, a, b);
            }
        }
    }
    let d = 2 * f.n_vars + f.clauses.iter().map(|c| c.len() - 1).sum::<usize>();
    Instance::new(Mode::Mlce, vec![g1, g2, g3], 0, d)
}
