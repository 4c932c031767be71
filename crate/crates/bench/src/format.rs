// SPDX-License-Identifier: MIT
//! Text and CSV formats.
//!
//! Graphs and systems use a line-oriented text format:
//!
//! ```text
//! p 4
//! role 3 M
//! governs 3 1
//! edge 0 1 t a
//! edge 1 2 c a
//! ```
//!
//! `p <n>` comes first. `role <v> <O|L|S|M>` lines are optional and default
//! to `O`. `governs <m> <o>` says indicator `m` governs observed vertex `o`.
//! `edge <i> <j> <mark_i> <mark_j>` uses marks `t` (tail), `a` (arrowhead)
//! and `c` (circle). Blank lines and lines starting with `#` are ignored.
//! Writers emit roles, then governs lines, then edges, each sorted, so
//! parse-then-write reproduces a written file byte for byte.

use std::fmt::Write as _;
use std::io::{Read, Write};

use mnarfci_core::{CIDecision, CausalSystem, Dag, Dataset, EndpointMark, MixedGraph, Role, Strategy};

use crate::error::{BenchError, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> BenchError {
    BenchError::Parse { line, msg: msg.into() }
}

/// Graph plus optional role and indicator annotations, as read from text.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: MixedGraph,
    pub roles: Vec<Role>,
    /// `(indicator, observed)` pairs.
    pub governs: Vec<(usize, usize)>,
}

impl GraphFile {
    pub fn plain(graph: MixedGraph) -> Self {
        let n = graph.vertex_count();
        GraphFile { graph, roles: vec![Role::Observed; n], governs: Vec::new() }
    }

    pub fn from_system(sys: &CausalSystem) -> Self {
        let mut governs = Vec::new();
        for &o in sys.observed() {
            governs.extend(sys.missingness_indicators(o).iter().map(|&m| (m, o)));
        }
        governs.sort_unstable();
        GraphFile { graph: sys.dag().graph().clone(), roles: sys.roles().to_vec(), governs }
    }

    /// Requires every edge to be directed and acyclic.
    pub fn into_system(self) -> Result<CausalSystem> {
        let n = self.graph.vertex_count();
        let mut edges = Vec::new();
        for e in self.graph.edges() {
            match (e.mark_first, e.mark_second) {
                (EndpointMark::Tail, EndpointMark::Arrow) => edges.push((e.first, e.second)),
                (EndpointMark::Arrow, EndpointMark::Tail) => edges.push((e.second, e.first)),
                _ => {
                    return Err(BenchError::Format(format!(
                        "system edge {}-{} is not directed",
                        e.first, e.second
                    )))
                }
            }
        }
        let dag = Dag::from_edges(n, &edges)?;
        let mut indicators = vec![Vec::new(); n];
        for &(m, o) in &self.governs {
            indicators[o].push(m);
        }
        Ok(CausalSystem::new(dag, self.roles, indicators)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p {}", self.graph.vertex_count());
        for (v, r) in self.roles.iter().enumerate() {
            if *r != Role::Observed {
                let _ = writeln!(out, "role {v} {}", r.code());
            }
        }
        for (m, o) in &self.governs {
            let _ = writeln!(out, "governs {m} {o}");
        }
        for e in self.graph.edges() {
            let _ = writeln!(out, "edge {} {} {} {}", e.first, e.second, e.mark_first.code(), e.mark_second.code());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, header) = lines.next().ok_or_else(|| parse_err(0, "empty graph file"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["p", n] => n.parse::<usize>().map_err(|_| parse_err(first, "bad vertex count"))?,
            _ => return Err(parse_err(first, "expected `p <n>` header")),
        };
        let vertex = |line: usize, s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v < n => Ok(v),
                _ => Err(parse_err(line, format!("bad vertex `{s}`"))),
            }
        };
        let single = |line: usize, s: &str| -> Result<char> {
            let mut cs = s.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(parse_err(line, format!("bad code `{s}`"))),
            }
        };
        let mut file = GraphFile::plain(MixedGraph::new(n));
        for (line, l) in lines {
            match l.split_whitespace().collect::<Vec<_>>()[..] {
                ["role", v, r] => {
                    let role = Role::from_code(single(line, r)?).ok_or_else(|| parse_err(line, "unknown role"))?;
                    file.roles[vertex(line, v)?] = role;
                }
                ["governs", m, o] => file.governs.push((vertex(line, m)?, vertex(line, o)?)),
                ["edge", i, j, mi, mj] => {
                    let (i, j) = (vertex(line, i)?, vertex(line, j)?);
                    let mark = |s| {
                        single(line, s).and_then(|c| {
                            EndpointMark::from_code(c).ok_or_else(|| parse_err(line, "unknown mark"))
                        })
                    };
                    if file.graph.is_adjacent(i, j) {
                        return Err(parse_err(line, "duplicate edge"));
                    }
                    file.graph.add_edge(i, j, mark(mi)?, mark(mj)?).map_err(|e| parse_err(line, e.to_string()))?;
                }
                _ => return Err(parse_err(line, format!("unrecognized line `{l}`"))),
            }
        }
        file.governs.sort_unstable();
        file.governs.dedup();
        Ok(file)
    }
}

pub fn graph_to_text(g: &MixedGraph) -> String {
    GraphFile::plain(g.clone()).to_text()
}

pub fn parse_graph(text: &str) -> Result<MixedGraph> {
    Ok(GraphFile::parse(text)?.graph)
}

pub fn system_to_text(sys: &CausalSystem) -> String {
    GraphFile::from_system(sys).to_text()
}

pub fn parse_system(text: &str) -> Result<CausalSystem> {
    GraphFile::parse(text)?.into_system()
}

/// Writes a dataset as CSV: a header of column names, then one row per
/// sample with empty cells for missing values.
pub fn write_dataset<W: Write>(data: &Dataset, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(data.names())?;
    for r in 0..data.n_rows() {
        out.write_record((0..data.n_cols()).map(|c| data.get(r, c).map(|x| x.to_string()).unwrap_or_default()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(r: R) -> Result<Dataset> {
    let mut input = csv::Reader::from_reader(r);
    let names: Vec<String> = input.headers()?.iter().map(str::to_owned).collect();
    let p = names.len();
    let (mut values, mut mask) = (Vec::new(), Vec::new());
    for (k, rec) in input.records().enumerate() {
        let rec = rec?;
        if rec.len() != p {
            return Err(parse_err(k + 2, format!("expected {p} fields, found {}", rec.len())));
        }
        for field in rec.iter() {
            let field = field.trim();
            if field.is_empty() || field.eq_ignore_ascii_case("na") || field.eq_ignore_ascii_case("nan") {
                values.push(f64::NAN);
                mask.push(false);
            } else {
                let x: f64 = field.parse().map_err(|_| parse_err(k + 2, format!("bad number `{field}`")))?;
                values.push(x);
                mask.push(true);
            }
        }
    }
    let n = mask.len() / p.max(1);
    Ok(Dataset::new(n, p, values, mask, names)?)
}

/// Column set of the decision-log CSV.
pub const DECISION_HEADER: [&str; 8] =
    ["strategy", "i", "j", "W", "effective_n", "p_value", "independent", "degenerate"];

/// Decision log as CSV; `W` is a space-separated index list, absent
/// sample fields are empty.
pub fn write_decisions<W: Write>(log: &[CIDecision], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(DECISION_HEADER)?;
    for d in log {
        let cond: Vec<String> = d.conditioning.iter().map(usize::to_string).collect();
        out.write_record([
            d.strategy.name().to_owned(),
            d.i.to_string(),
            d.j.to_string(),
            cond.join(" "),
            d.effective_n.map(|n| n.to_string()).unwrap_or_default(),
            d.p_value.map(|p| p.to_string()).unwrap_or_default(),
            d.independent.to_string(),
            d.degenerate.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_decisions<R: Read>(r: R) -> Result<Vec<CIDecision>> {
    let mut input = csv::Reader::from_reader(r);
    let mut log = Vec::new();
    for (k, rec) in input.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let field = |c: usize| rec.get(c).ok_or_else(|| parse_err(line, "missing field"));
        let num = |c: usize| -> Result<usize> {
            field(c)?.parse().map_err(|_| parse_err(line, format!("bad integer in column {c}")))
        };
        let flag = |c: usize| -> Result<bool> {
            field(c)?.parse().map_err(|_| parse_err(line, format!("bad boolean in column {c}")))
        };
        let optional = |c: usize| field(c).map(|s| (!s.is_empty()).then_some(s));
        let strategy = Strategy::from_name(field(0)?).ok_or_else(|| parse_err(line, "unknown strategy"))?;
        let conditioning = field(3)?
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| parse_err(line, "bad conditioning set")))
            .collect::<Result<Vec<usize>>>()?;
        let effective_n = optional(4)?
            .map(|s| s.parse().map_err(|_| parse_err(line, "bad effective_n")))
            .transpose()?;
        let p_value = optional(5)?.map(|s| s.parse().map_err(|_| parse_err(line, "bad p_value"))).transpose()?;
        log.push(CIDecision {
            i: num(1)?,
            j: num(2)?,
            conditioning,
            strategy,
            effective_n,
            p_value,
            independent: flag(6)?,
            degenerate: flag(7)?,
        });
    }
    Ok(log)
}
