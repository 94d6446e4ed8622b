//! File formats: graph and POIPG JSON, the line-oriented CI format, discrete
//! CSV with arity declarations, and DOT emission.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ci::{CiSet, CiStatement};
use crate::error::{Error, Result};
use crate::graph::{Dag, DagBuilder, EndpointMark, MixedGraph, Poipg, Role, VertexSet};
use crate::oracle::Dataset;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    variables: Vec<GraphVariable>,
    edges: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphVariable {
    name: String,
    role: String,
}

fn parse_role(s: &str) -> Result<Role> {
    match s {
        "observed" => Ok(Role::Observed),
        "latent" => Ok(Role::Latent),
        "selection" => Ok(Role::Selection),
        other => Err(Error::Parse {
            line: 0,
            message: format!("unknown role `{other}` (expected observed, latent or selection)"),
        }),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        message: format!("column {}: {e}", e.column()),
    }
}

pub fn parse_graph(bytes: &[u8]) -> Result<Dag> {
    let file: GraphFile = serde_json::from_slice(bytes).map_err(json_error)?;
    let mut b = DagBuilder::new();
    for v in &file.variables {
        b.add_vertex(&v.name, parse_role(&v.role)?)?;
    }
    for (p, c) in &file.edges {
        b.add_edge_by_name(p, c)?;
    }
    b.build()
}

fn graph_file(g: &Dag) -> GraphFile {
    GraphFile {
        variables: g
            .variables()
            .iter()
            .map(|v| GraphVariable {
                name: v.name().to_string(),
                role: v.role().as_str().to_string(),
            })
            .collect(),
        edges: g
            .edges()
            .into_iter()
            .map(|(p, c)| (g.name(p).to_string(), g.name(c).to_string()))
            .collect(),
    }
}

/// Pretty-printed graph JSON with a trailing newline.
pub fn emit_graph(g: &Dag) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&graph_file(g)).expect("graph file serializes");
    out.push(b'\n');
    out
}

/// Single-line graph JSON.
pub fn emit_graph_compact(g: &Dag) -> String {
    serde_json::to_string(&graph_file(g)).expect("graph file serializes")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoipgFile {
    variables: Vec<String>,
    edges: Vec<PoipgEdge>,
    noncolliders: Vec<(String, String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoipgEdge {
    a: String,
    b: String,
    mark_a: String,
    mark_b: String,
}

pub fn parse_poipg(bytes: &[u8]) -> Result<Poipg> {
    let file: PoipgFile = serde_json::from_slice(bytes).map_err(json_error)?;
    let idx: BTreeMap<&str, usize> = file
        .variables
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let id = |name: &str| {
        idx.get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    };
    let mark = |s: &str| {
        EndpointMark::parse(s).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unknown endpoint mark `{s}` (expected tail, arrow or circle)"),
        })
    };
    let mut g = MixedGraph::empty(file.variables.len());
    for e in &file.edges {
        let (a, b) = (id(&e.a)?, id(&e.b)?);
        if a == b {
            return Err(Error::SelfLoop(e.a.clone()));
        }
        if g.is_adjacent(a, b) {
            return Err(Error::DuplicateEdge(e.a.clone(), e.b.clone()));
        }
        g.add_edge(a, b, mark(&e.mark_a)?, mark(&e.mark_b)?);
    }
    let mut nc = Vec::new();
    for (x, y, z) in &file.noncolliders {
        nc.push((id(x)?, id(y)?, id(z)?));
    }
    Poipg::new(file.variables, g, nc)
}

pub fn emit_poipg(p: &Poipg) -> Vec<u8> {
    let file = PoipgFile {
        variables: p.names().to_vec(),
        edges: p
            .edges()
            .into_iter()
            .map(|(a, b, ma, mb)| PoipgEdge {
                a: p.name(a).to_string(),
                b: p.name(b).to_string(),
                mark_a: ma.as_str().to_string(),
                mark_b: mb.as_str().to_string(),
            })
            .collect(),
        noncolliders: p
            .noncolliders()
            .iter()
            .map(|&(x, y, z)| {
                (
                    p.name(x).to_string(),
                    p.name(y).to_string(),
                    p.name(z).to_string(),
                )
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("poipg file serializes");
    out.push(b'\n');
    out
}

fn split_names(field: &str) -> Vec<String> {
    field
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// An `indep` line as written: line number and the three name lists.
type RawStatement = (usize, Vec<String>, Vec<String>, Vec<String>);

/// Parses `indep X ; Z ; Y` lines with `#` comments and `-` for an empty
/// conditioning set. An optional `vars A,B,...` line fixes the universe and
/// its order; otherwise the universe is every mentioned name, sorted.
pub fn parse_ci(bytes: &[u8]) -> Result<CiSet> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut declared: Option<(usize, Vec<String>)> = None;
    let mut raw: Vec<RawStatement> = Vec::new();
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let bad = |m: String| Error::Parse { line, message: m };
        let (kw, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match kw {
            "vars" => {
                if declared.is_some() {
                    return Err(bad("repeated `vars` line".into()));
                }
                let names = split_names(rest);
                if names.is_empty() {
                    return Err(bad("`vars` needs at least one name".into()));
                }
                declared = Some((line, names));
            }
            "indep" => {
                let parts: Vec<&str> = rest.split(';').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(bad(format!(
                        "expected `indep X ; Z ; Y`, found {} field(s)",
                        parts.len()
                    )));
                }
                let x = split_names(parts[0]);
                let z = split_names(parts[1]);
                let y = if parts[2] == "-" {
                    Vec::new()
                } else {
                    split_names(parts[2])
                };
                if x.is_empty() || z.is_empty() {
                    return Err(bad("independence sides must be nonempty".into()));
                }
                if parts[2].is_empty() {
                    return Err(bad("empty conditioning set must be written `-`".into()));
                }
                for n in x.iter().chain(&z).chain(&y) {
                    if n.contains(char::is_whitespace) || n == "-" {
                        return Err(bad(format!("malformed variable name `{n}`")));
                    }
                }
                raw.push((line, x, z, y));
            }
            other => return Err(bad(format!("unknown directive `{other}`"))),
        }
    }
    let universe = match &declared {
        Some((_, names)) => names.clone(),
        None => {
            let all: BTreeSet<&String> = raw
                .iter()
                .flat_map(|(_, x, z, y)| x.iter().chain(z).chain(y))
                .collect();
            all.into_iter().cloned().collect()
        }
    };
    let mut set = CiSet::new(universe).map_err(|e| Error::Parse {
        line: declared.as_ref().map_or(0, |d| d.0),
        message: e.to_string(),
    })?;
    for (line, x, z, y) in raw {
        let at = |e: Error| Error::Parse {
            line,
            message: e.to_string(),
        };
        let ids =
            |v: &[String]| -> Result<Vec<usize>> { v.iter().map(|n| set.index_of(n).map_err(at)).collect() };
        let (xi, zi, yi) = (ids(&x)?, ids(&z)?, ids(&y)?);
        let s = CiStatement::independence(&xi, &zi, &yi).map_err(at)?;
        set.insert(s).map_err(at)?;
    }
    Ok(set)
}

/// Canonical CI text: a `vars` line, then one `indep` line per statement.
pub fn emit_ci(c: &CiSet) -> Vec<u8> {
    let u = c.universe();
    let show = |s: &VertexSet| s.iter().map(|&v| u[v].as_str()).collect::<Vec<_>>().join(",");
    let mut out = format!("vars {}\n", u.join(","));
    for s in c.statements() {
        let y = if s.y().is_empty() {
            "-".to_string()
        } else {
            show(s.y())
        };
        let _ = writeln!(out, "indep {} ; {} ; {}", show(s.x()), show(s.z()), y);
    }
    out.into_bytes()
}

/// Discrete CSV: a header row of names, integer cells in `0..arity`.
///
/// Arities come from `#arity name=k` comment lines (any number per line)
/// and from `arities`; every column needs exactly one consistent value.
pub fn parse_csv(bytes: &[u8], arities: &BTreeMap<String, u32>) -> Result<Dataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut declared = arities.clone();
    for (i, l) in text.lines().enumerate() {
        let Some(rest) = l.trim().strip_prefix("#arity") else {
            continue;
        };
        for tok in rest.split_whitespace() {
            let bad = || Error::Parse {
                line: i + 1,
                message: format!("malformed arity declaration `{tok}`"),
            };
            let (name, k) = tok.split_once('=').ok_or_else(bad)?;
            let k: u32 = k.parse().map_err(|_| bad())?;
            if let Some(&prev) = declared.get(name) {
                if prev != k {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("conflicting arities {prev} and {k} for `{name}`"),
                    });
                }
            }
            declared.insert(name.to_string(), k);
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut columns = Vec::with_capacity(header.len());
    for name in &header {
        let k = declared.get(name).copied().ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("no arity declared for column `{name}`"),
        })?;
        columns.push((name.clone(), k));
    }
    let mut data: Vec<Vec<u32>> = vec![Vec::new(); header.len()];
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("{} fields, expected {}", rec.len(), header.len()),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: u32 = cell.parse().map_err(|_| Error::Parse {
                line,
                message: format!("field `{}`: `{cell}` is not a nonnegative integer", header[j]),
            })?;
            if v >= columns[j].1 {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "field `{}`: value {v} outside declared arity {}",
                        header[j], columns[j].1
                    ),
                });
            }
            data[j].push(v);
        }
    }
    Dataset::from_columns(columns, data)
}

/// CSV with `#arity` declarations, readable by [`parse_csv`].
pub fn emit_csv(d: &Dataset) -> Vec<u8> {
    let mut out = String::from("#arity");
    for (j, name) in d.names().iter().enumerate() {
        let _ = write!(out, " {name}={}", d.arity(j));
    }
    out.push('\n');
    out.push_str(&d.names().join(","));
    out.push('\n');
    for i in 0..d.n() {
        let row: Vec<String> = (0..d.names().len()).map(|j| d.column(j)[i].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot_arrow(m: EndpointMark) -> &'static str {
    match m {
        EndpointMark::Arrow => "normal",
        EndpointMark::Tail => "none",
        EndpointMark::Circle => "odot",
    }
}

/// Graphviz rendering; each edge draws both endpoint marks.
pub fn emit_dot(p: &Poipg) -> Vec<u8> {
    let mut out = String::from("digraph poipg {\n");
    for name in p.names() {
        let _ = writeln!(out, "  {};", dot_id(name));
    }
    for (a, b, ma, mb) in p.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [dir=both, arrowtail={}, arrowhead={}];",
            dot_id(p.name(a)),
            dot_id(p.name(b)),
            dot_arrow(ma),
            dot_arrow(mb)
        );
    }
    out.push_str("}\n");
    out.into_bytes()
}
