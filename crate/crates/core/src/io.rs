//! Text formats for instances and solutions.
//!
//! Both formats are line based: `#` starts a comment and tokens are separated
//! by whitespace. Instance files look like
//!
//! ```text
//! mlg 1
//! mode mlce
//! n 5
//! ell 3
//! k 1
//! d 2
//! layer 1
//! 1 2
//! layer 2
//! layer 3
//! end
//! ```
//!
//! and solution files like
//!
//! ```text
//! sol 1
//! answer yes
//! mark 1
//! edit 1 del 4 5
//! end
//! ```
//!
//! where TCE solutions use `markat <gap> <vertex>` instead of `mark`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{
    EditSet, Instance, LayerGraph, Marks, Mode, Solution, VertexId, VertexPair, VertexSet,
};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-empty line as `(line number, tokens)`.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let body = line.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
        None
    }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<VertexId> {
    let v: u32 = number(line, tok, "a vertex id")?;
    match VertexId::try_new(v) {
        Some(id) if id.index() < n => Ok(id),
        _ => Err(Error::parse(line, format!("vertex {v} is outside 1..={n}"))),
    }
}

fn pair(line: usize, a: &str, b: &str, n: usize) -> Result<VertexPair> {
    let (a, b) = (vertex(line, a, n)?, vertex(line, b, n)?);
    VertexPair::new(a, b).map_err(|_| Error::parse(line, format!("self-loop at vertex {a}")))
}

fn expect_len(line: usize, toks: &[&str], len: usize, shape: &str) -> Result<()> {
    if toks.len() == len {
        Ok(())
    } else {
        Err(Error::parse(line, format!("expected `{shape}`")))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    match lines.next_tokens() {
        Some((_, t)) if t == ["mlg", "1"] => {}
        Some((l, _)) => return Err(Error::parse(l, "expected header `mlg 1`")),
        None => return Err(Error::parse(1, "empty input, expected header `mlg 1`")),
    }
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut pending = None;
    while let Some((l, t)) = lines.next_tokens() {
        if t[0] == "layer" || t[0] == "end" {
            pending = Some((l, t));
            break;
        }
        let key = t[0];
        if !["mode", "n", "ell", "k", "d"].contains(&key) {
            return Err(Error::parse(l, format!("unknown header field `{key}`")));
        }
        expect_len(l, &t, 2, &format!("{key} <value>"))?;
        if fields.insert(key, (l, t[1])).is_some() {
            return Err(Error::parse(l, format!("duplicate header field `{key}`")));
        }
    }
    let here = pending.as_ref().map_or(lines.last, |(l, _)| *l);
    let field = |key: &str| {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| Error::parse(here, format!("missing header field `{key}`")))
    };
    let (l, m) = field("mode")?;
    let mode: Mode = m
        .parse()
        .map_err(|_| Error::parse(l, format!("unknown mode `{m}`")))?;
    let (l, v) = field("n")?;
    let n: usize = number(l, v, "a vertex count")?;
    let (l, v) = field("ell")?;
    let ell: usize = number(l, v, "a layer count")?;
    if ell == 0 {
        return Err(Error::parse(l, "an instance needs at least one layer"));
    }
    let (l, v) = field("k")?;
    let k: usize = number(l, v, "an edit budget")?;
    let (l, v) = field("d")?;
    let d: usize = number(l, v, "a marking budget")?;

    let mut layers: Vec<LayerGraph> = Vec::with_capacity(ell);
    let mut current = pending;
    loop {
        let Some((l, t)) = current.take() else {
            return Err(Error::parse(lines.last, "missing `end`"));
        };
        match t[0] {
            "end" => {
                expect_len(l, &t, 1, "end")?;
                if layers.len() != ell {
                    return Err(Error::parse(
                        l,
                        format!("found {} layers, expected {ell}", layers.len()),
                    ));
                }
                break;
            }
            "layer" => {
                expect_len(l, &t, 2, "layer <index>")?;
                let idx: usize = number(l, t[1], "a layer index")?;
                if idx != layers.len() + 1 || idx > ell {
                    return Err(Error::parse(
                        l,
                        format!(
                            "unexpected `layer {idx}`, expected layer {} of {ell}",
                            layers.len() + 1
                        ),
                    ));
                }
                layers.push(LayerGraph::empty(n));
            }
            _ => {
                let Some(g) = layers.last_mut() else {
                    return Err(Error::parse(l, "edge before the first `layer` line"));
                };
                expect_len(l, &t, 2, "<u> <v>")?;
                let p = pair(l, t[0], t[1], n)?;
                if g.has_edge(p) {
                    return Err(Error::parse(l, format!("duplicate edge {p}")));
                }
                g.set_edge(p, true);
            }
        }
        current = lines.next_tokens();
    }
    if let Some((l, _)) = lines.next_tokens() {
        return Err(Error::parse(l, "content after `end`"));
    }
    Instance::new(mode, layers, k, d)
}

pub fn serialize_instance(inst: &Instance) -> String {
    serialize_instance_with_comments(inst, &[])
}

/// Canonical form preceded by one `# ` line per comment.
pub fn serialize_instance_with_comments(inst: &Instance, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "mlg 1");
    let _ = writeln!(out, "mode {}", inst.mode());
    let _ = writeln!(out, "n {}", inst.n());
    let _ = writeln!(out, "ell {}", inst.ell());
    let _ = writeln!(out, "k {}", inst.k());
    let _ = writeln!(out, "d {}", inst.d());
    for (i, g) in inst.layers().iter().enumerate() {
        let _ = writeln!(out, "layer {}", i + 1);
        for p in g.edges() {
            let _ = writeln!(out, "{} {}", p.u(), p.v());
        }
    }
    out.push_str("end\n");
    out
}

/// Parses a solution file; `Ok(None)` for `answer no`.
pub fn parse_solution(text: &str, inst: &Instance) -> Result<Option<Solution>> {
    let mut lines = Lines::new(text);
    match lines.next_tokens() {
        Some((_, t)) if t == ["sol", "1"] => {}
        Some((l, _)) => return Err(Error::parse(l, "expected header `sol 1`")),
        None => return Err(Error::parse(1, "empty input, expected header `sol 1`")),
    }
    let yes = match lines.next_tokens() {
        Some((_, t)) if t == ["answer", "yes"] => true,
        Some((_, t)) if t == ["answer", "no"] => false,
        Some((l, _)) => return Err(Error::parse(l, "expected `answer yes` or `answer no`")),
        None => return Err(Error::parse(lines.last, "missing `answer` line")),
    };
    let n = inst.n();
    let ell = inst.ell();
    let mut sol = Solution::empty_for(inst);
    let mut ended = false;
    while let Some((l, t)) = lines.next_tokens() {
        if ended {
            return Err(Error::parse(l, "content after `end`"));
        }
        if !yes && t[0] != "end" {
            return Err(Error::parse(
                l,
                "an `answer no` file carries no solution lines",
            ));
        }
        match t[0] {
            "end" => {
                expect_len(l, &t, 1, "end")?;
                ended = true;
            }
            "mark" => {
                expect_len(l, &t, 2, "mark <v>")?;
                let Marks::Total(d) = &mut sol.marks else {
                    return Err(Error::parse(
                        l,
                        "`mark` in a tce solution, use `markat <gap> <v>`",
                    ));
                };
                let v = vertex(l, t[1], n)?;
                if !d.insert(v) {
                    return Err(Error::parse(l, format!("vertex {v} marked twice")));
                }
            }
            "markat" => {
                expect_len(l, &t, 3, "markat <gap> <v>")?;
                let Marks::Temporal(ds) = &mut sol.marks else {
                    return Err(Error::parse(
                        l,
                        "`markat` in an mlce solution, use `mark <v>`",
                    ));
                };
                let gap: usize = number(l, t[1], "a gap index")?;
                if gap == 0 || gap >= ell {
                    return Err(Error::parse(
                        l,
                        format!("gap {gap} is outside 1..={}", ell - 1),
                    ));
                }
                let v = vertex(l, t[2], n)?;
                if !ds[gap - 1].insert(v) {
                    return Err(Error::parse(
                        l,
                        format!("vertex {v} marked twice in gap {gap}"),
                    ));
                }
            }
            "edit" => {
                expect_len(l, &t, 5, "edit <layer> add|del <u> <v>")?;
                let layer: usize = number(l, t[1], "a layer index")?;
                if layer == 0 || layer > ell {
                    return Err(Error::parse(
                        l,
                        format!("layer {layer} is outside 1..={ell}"),
                    ));
                }
                let p = pair(l, t[3], t[4], n)?;
                let present = inst.layer(layer - 1).has_edge(p);
                match (t[2], present) {
                    ("add", false) | ("del", true) => {}
                    ("add", true) => {
                        return Err(Error::parse(l, format!("cannot add {p}: already an edge")))
                    }
                    ("del", false) => {
                        return Err(Error::parse(l, format!("cannot delete {p}: not an edge")))
                    }
                    (op, _) => {
                        return Err(Error::parse(
                            l,
                            format!("expected `add` or `del`, found `{op}`"),
                        ))
                    }
                }
                if !sol.edits[layer - 1].insert(p) {
                    return Err(Error::parse(
                        l,
                        format!("pair {p} edited twice in layer {layer}"),
                    ));
                }
            }
            other => return Err(Error::parse(l, format!("unknown directive `{other}`"))),
        }
    }
    if !ended {
        return Err(Error::parse(lines.last, "missing `end`"));
    }
    Ok(yes.then_some(sol))
}

/// Canonical solution text; `None` yields `answer no`.
pub fn serialize_solution(inst: &Instance, sol: Option<&Solution>) -> String {
    let mut out = String::from("sol 1\n");
    let Some(sol) = sol else {
        out.push_str("answer no\nend\n");
        return out;
    };
    out.push_str("answer yes\n");
    match &sol.marks {
        Marks::Total(d) => {
            for v in d {
                let _ = writeln!(out, "mark {v}");
            }
        }
        Marks::Temporal(ds) => {
            for (i, d) in ds.iter().enumerate() {
                for v in d {
                    let _ = writeln!(out, "markat {} {v}", i + 1);
                }
            }
        }
    }
    for (i, m) in sol.edits.iter().enumerate() {
        for p in m {
            let op = if inst.layer(i).has_edge(*p) {
                "del"
            } else {
                "add"
            };
            let _ = writeln!(out, "edit {} {op} {} {}", i + 1, p.u(), p.v());
        }
    }
    out.push_str("end\n");
    out
}

/// Comment lines describing a vertex renaming, one `old -> new` per vertex
/// and `old -> -` for removed ones.
pub fn idmap_comments(map: &[Option<VertexId>]) -> Vec<String> {
    let mut out = vec!["idmap old->new".to_string()];
    for (i, m) in map.iter().enumerate() {
        match m {
            Some(v) => out.push(format!("{} -> {v}", i + 1)),
            None => out.push(format!("{} -> -", i + 1)),
        }
    }
    out
}

/// Marked sets of a solution, flattened for display.
pub fn marked_vertices(sol: &Solution) -> VertexSet {
    match &sol.marks {
        Marks::Total(d) => d.clone(),
        Marks::Temporal(ds) => ds.iter().flatten().copied().collect(),
    }
}

/// Total number of edits in a solution.
pub fn edit_count(sol: &Solution) -> usize {
    sol.edits.iter().map(EditSet::len).sum()
}
