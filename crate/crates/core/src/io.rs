//! Plain-text artifact formats.
//!
//! Blank lines and lines starting with `#` are ignored by every parser.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow_routing::SinkFlow;
use crate::graph::{EdgeMultiset, TwoWeightDigraph, VertexId, WeightClass};
use crate::held_karp::FractionalCirculation;
use crate::local::{LcSolution, Partition};
use crate::split::{LowerBound, SplitCirculation, SplitGraph, LBS_SCALE};
use crate::tol;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

fn no_trailing(line: usize, mut toks: std::str::SplitWhitespace<'_>) -> Result<()> {
    match toks.next() {
        Some(t) => Err(Error::parse(line, format!("unexpected token `{t}`"))),
        None => Ok(()),
    }
}

fn edge_id(graph: &TwoWeightDigraph, line: usize, tok: Option<&str>) -> Result<usize> {
    let e: usize = field(line, tok, "edge id")?;
    if e >= graph.edge_count() {
        return Err(Error::parse(line, format!("edge id {e} out of range")));
    }
    Ok(e)
}

pub fn parse_graph(text: &str) -> Result<TwoWeightDigraph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty graph file"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(hl, toks.next(), "n")?;
    let m: usize = field(hl, toks.next(), "m")?;
    let w0: f64 = field(hl, toks.next(), "w0")?;
    let w1: f64 = field(hl, toks.next(), "w1")?;
    no_trailing(hl, toks)?;
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in lines {
        let mut toks = l.split_whitespace();
        let tail: usize = field(ln, toks.next(), "tail")?;
        let head: usize = field(ln, toks.next(), "head")?;
        let code: u8 = field(ln, toks.next(), "class")?;
        no_trailing(ln, toks)?;
        let class = WeightClass::from_code(code)
            .ok_or_else(|| Error::parse(ln, format!("class must be 0 or 1, got {code}")))?;
        if tail >= n || head >= n {
            return Err(Error::parse(ln, format!("vertex out of range in `{l}`")));
        }
        edges.push((tail, head, class));
    }
    if edges.len() != m {
        return Err(Error::parse(
            hl,
            format!("header says {m} edges, found {}", edges.len()),
        ));
    }
    TwoWeightDigraph::new(n, w0, w1, edges)
}

pub fn write_graph(graph: &TwoWeightDigraph) -> String {
    let mut out = format!(
        "{} {} {} {}\n",
        graph.vertex_count(),
        graph.edge_count(),
        graph.w0(),
        graph.w1()
    );
    for edge in graph.edges() {
        let _ = writeln!(out, "{} {} {}", edge.tail, edge.head, edge.class.code());
    }
    out
}

/// Missing edges default to zero; the objective line is checked against the values.
pub fn parse_lp_solution(graph: &TwoWeightDigraph, text: &str) -> Result<FractionalCirculation> {
    let mut values = vec![0.0; graph.edge_count()];
    let mut stated = None;
    for (ln, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        if l.starts_with("objective") {
            toks.next();
            stated = Some((ln, field::<f64>(ln, toks.next(), "objective")?));
        } else {
            let e = edge_id(graph, ln, toks.next())?;
            values[e] = field(ln, toks.next(), "value")?;
        }
        no_trailing(ln, toks)?;
    }
    let x = FractionalCirculation::from_values(graph, values)?;
    if let Some((ln, obj)) = stated {
        if (obj - x.objective).abs() > tol::OBJ * obj.abs().max(1.0) {
            return Err(Error::parse(
                ln,
                format!(
                    "objective {obj} disagrees with the values ({})",
                    x.objective
                ),
            ));
        }
    }
    Ok(x)
}

pub fn write_lp_solution(x: &FractionalCirculation) -> String {
    let mut out = String::new();
    for (e, v) in x.values.iter().enumerate() {
        let _ = writeln!(out, "{e} {v}");
    }
    let _ = writeln!(out, "objective {}", x.objective);
    out
}

pub fn write_sink_flow(sink: &SinkFlow) -> String {
    let mut out = String::from("T");
    for t in &sink.terminals {
        let _ = write!(out, " {t}");
    }
    out.push('\n');
    for (e, v) in sink.f.iter().enumerate() {
        if *v > 0.0 {
            let _ = writeln!(out, "f {e} {v}");
        }
    }
    out
}

/// Inflows are recomputed from the `f` lines.
pub fn parse_sink_flow(graph: &TwoWeightDigraph, text: &str) -> Result<SinkFlow> {
    let mut f = vec![0.0; graph.edge_count()];
    let mut terminals = None;
    for (ln, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("T") => {
                let mut ts = Vec::new();
                for tok in toks.by_ref() {
                    let t: usize = field(ln, Some(tok), "terminal")?;
                    if t >= graph.vertex_count() {
                        return Err(Error::parse(ln, format!("terminal {t} out of range")));
                    }
                    ts.push(t);
                }
                ts.sort_unstable();
                ts.dedup();
                terminals = Some(ts);
            }
            Some("f") => {
                let e = edge_id(graph, ln, toks.next())?;
                f[e] = field(ln, toks.next(), "flow")?;
            }
            other => return Err(Error::parse(ln, format!("unexpected line start {other:?}"))),
        }
        no_trailing(ln, toks)?;
    }
    let terminals = terminals.ok_or_else(|| Error::parse(1, "missing `T` line"))?;
    let indeg = graph.in_degrees(&f);
    let inflow = terminals.iter().map(|&t| indeg[t]).collect();
    Ok(SinkFlow {
        f,
        terminals,
        inflow,
    })
}

pub fn write_split(split: &SplitGraph, xsp: &SplitCirculation, lower: &LowerBound) -> String {
    let mut out = String::from("# arc id tail head kind origin weight x_sp\n");
    for (i, (a, v)) in split.arcs.iter().zip(&xsp.values).enumerate() {
        let _ = writeln!(
            out,
            "arc {i} {} {} {} {} {} {v}",
            a.tail,
            a.head,
            a.kind.name(),
            a.origin,
            split.weight(i)
        );
    }
    out.push_str(&write_lower_bound(lower));
    out
}

pub fn write_lower_bound(lower: &LowerBound) -> String {
    let mut out = String::from("# vertex lbs lb\n");
    for (v, (lbs, lb)) in lower.lbs.iter().zip(&lower.lb).enumerate() {
        let _ = writeln!(out, "{v} {lbs} {lb}");
    }
    out
}

/// Reads the `vertex lbs lb` table; `arc` lines are skipped.
pub fn parse_lower_bound(n: usize, text: &str) -> Result<LowerBound> {
    let mut lbs = vec![None; n];
    let mut lb = vec![0.0; n];
    for (ln, l) in content_lines(text) {
        if l.starts_with("arc ") {
            continue;
        }
        let mut toks = l.split_whitespace();
        let v: usize = field(ln, toks.next(), "vertex")?;
        if v >= n {
            return Err(Error::parse(ln, format!("vertex {v} out of range")));
        }
        let s: f64 = field(ln, toks.next(), "lbs")?;
        let b: f64 = field(ln, toks.next(), "lb")?;
        no_trailing(ln, toks)?;
        if (s - LBS_SCALE * b).abs() > tol::OBJ * s.abs().max(1.0) {
            return Err(Error::parse(
                ln,
                format!("lbs {s} is not {LBS_SCALE} * lb {b}"),
            ));
        }
        lbs[v] = Some(s);
        lb[v] = b;
    }
    let lbs = lbs
        .into_iter()
        .enumerate()
        .map(|(v, s)| s.ok_or_else(|| Error::parse(0, format!("no lower bound for vertex {v}"))))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LowerBound { lbs, lb })
}

pub fn parse_partition(n: usize, text: &str) -> Result<Partition> {
    let mut classes: Vec<(usize, Vec<VertexId>)> = Vec::new();
    for (ln, l) in content_lines(text) {
        let (label, rest) = l
            .split_once(':')
            .ok_or_else(|| Error::parse(ln, "expected `i: v1 v2 ...`"))?;
        let i: usize = field(ln, Some(label.trim()), "class index")?;
        let members = rest
            .split_whitespace()
            .map(|t| field(ln, Some(t), "vertex"))
            .collect::<Result<Vec<usize>>>()?;
        classes.push((i, members));
    }
    classes.sort_by_key(|(i, _)| *i);
    for (pos, (i, _)) in classes.iter().enumerate() {
        if *i != pos {
            return Err(Error::InvalidPartition(format!(
                "class indices must be 0..k, found {i}"
            )));
        }
    }
    Partition::new(n, classes.into_iter().map(|(_, c)| c).collect())
}

pub fn write_partition(partition: &Partition) -> String {
    let mut out = String::new();
    for (i, class) in partition.classes.iter().enumerate() {
        let _ = write!(out, "{i}:");
        for v in class {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_multiset(f: &EdgeMultiset) -> String {
    let mut out = String::new();
    for (e, m) in f.support() {
        let _ = writeln!(out, "{e} {m}");
    }
    out
}

#[derive(Serialize)]
struct SolutionSummary<'a> {
    branch: crate::local::Branch,
    vacuous_crossing: bool,
    #[serde(flatten)]
    certificate: &'a crate::verify::Certificate,
    walks: &'a [crate::local::PatchWalk],
}

/// `edge_id multiplicity` lines and a final `certificate <json>` line.
pub fn write_solution(sol: &LcSolution) -> Result<String> {
    let mut out = write_multiset(&sol.f);
    let summary = SolutionSummary {
        branch: sol.branch,
        vacuous_crossing: sol.vacuous_crossing,
        certificate: &sol.certificate,
        walks: &sol.walks,
    };
    let _ = writeln!(out, "certificate {}", serde_json::to_string(&summary)?);
    Ok(out)
}

/// Reads `edge_id multiplicity` lines; `certificate` and `ratio` lines are skipped.
pub fn parse_solution(graph: &TwoWeightDigraph, text: &str) -> Result<EdgeMultiset> {
    let mut f = EdgeMultiset::empty(graph.edge_count());
    for (ln, l) in content_lines(text) {
        if l.starts_with("certificate") || l.starts_with("ratio") {
            continue;
        }
        let mut toks = l.split_whitespace();
        let e = edge_id(graph, ln, toks.next())?;
        let m: u64 = field(ln, toks.next(), "multiplicity")?;
        no_trailing(ln, toks)?;
        f.add(e, m);
    }
    Ok(f)
}
