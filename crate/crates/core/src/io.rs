//! Line-oriented graph files and command-line literals.
//!
//! ```text
//! # comment
//! vertex v
//! edge e v v
//! ```

use crate::error::{Error, Result};
use crate::graph::{validate, Graph, GraphDescription};
use crate::monoid::MonoidElement;
use crate::vset::VertexSet;

fn is_id(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_description(text: &str) -> Result<GraphDescription> {
    let mut desc = GraphDescription::default();
    let mut declared = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        if let Some(bad) = words[1..].iter().find(|w| !is_id(w)) {
            return Err(parse_err(line, format!("invalid identifier `{bad}`")));
        }
        match words[0] {
            "vertex" => {
                if words.len() != 2 {
                    return Err(parse_err(line, "expected `vertex <id>`"));
                }
                if !declared.insert(words[1]) {
                    return Err(parse_err(line, format!("duplicate identifier `{}`", words[1])));
                }
                desc.vertices.push(words[1].to_string());
            }
            "edge" => {
                if words.len() != 4 {
                    return Err(parse_err(line, "expected `edge <id> <src> <rng>`"));
                }
                for v in &words[2..] {
                    if !desc.vertices.iter().any(|x| x == v) {
                        return Err(parse_err(line, format!("vertex `{v}` used before declaration")));
                    }
                }
                if !declared.insert(words[1]) {
                    return Err(parse_err(line, format!("duplicate identifier `{}`", words[1])));
                }
                desc.edges
                    .push((words[1].to_string(), words[2].to_string(), words[3].to_string()));
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok(desc)
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    validate(&parse_description(text)?)
}

/// Vertices first, then edges, both in index order.
pub fn serialize_graph(g: &Graph) -> String {
    let d = g.description();
    let mut out = String::new();
    for v in &d.vertices {
        out.push_str(&format!("vertex {v}\n"));
    }
    for (e, s, r) in &d.edges {
        out.push_str(&format!("edge {e} {s} {r}\n"));
    }
    out
}

/// `v1:2,v3:1`; a bare `v` means coefficient one, `0` or the empty string
/// mean zero. Repeated vertices add up.
pub fn parse_monoid_literal(g: &Graph, s: &str) -> Result<MonoidElement> {
    let mut m = MonoidElement::zero(g.vertex_count());
    let s = s.trim();
    if s.is_empty() || s == "0" {
        return Ok(m);
    }
    for part in s.split(',') {
        let (v, c) = match part.split_once(':') {
            Some((v, c)) => (v.trim(), c.trim()),
            None => (part.trim(), "1"),
        };
        let c: u64 = c
            .parse()
            .map_err(|_| parse_err(0, format!("invalid coefficient `{c}` in `{part}`")))?;
        let v = g
            .vertex_index(v)
            .map_err(|_| parse_err(0, format!("unknown vertex `{v}` in monoid literal")))?;
        m.coeffs[v] += c;
    }
    Ok(m)
}

pub fn format_monoid_literal(g: &Graph, m: &MonoidElement) -> String {
    let parts: Vec<String> = m
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(v, c)| format!("{}:{c}", g.vertex_id(v)))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(",")
    }
}

/// Comma-separated vertex ids.
pub fn parse_vertex_set(g: &Graph, s: &str) -> Result<VertexSet> {
    let names: Vec<&str> = s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    g.set_from_names(&names)
        .map_err(|e| parse_err(0, format!("vertex set `{s}`: {e}")))
}

/// Comma-separated non-negative integers.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| parse_err(0, format!("invalid number `{x}`"))))
        .collect()
}

/// Dimension table `v:2/1,w:4/2`: per vertex, one rank per block separated
/// by `/`. Unlisted vertices get rank zero.
pub fn parse_dims(g: &Graph, blocks: usize, s: &str) -> Result<Vec<Vec<usize>>> {
    let mut dims = vec![vec![0; blocks]; g.vertex_count()];
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (v, ranks) = part
            .split_once(':')
            .ok_or_else(|| parse_err(0, format!("expected `vertex:ranks` in `{part}`")))?;
        let v = g
            .vertex_index(v.trim())
            .map_err(|_| parse_err(0, format!("unknown vertex `{v}` in dimension table")))?;
        let ranks: Vec<usize> = ranks
            .split('/')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| parse_err(0, format!("invalid rank `{x}`")))
            })
            .collect::<Result<_>>()?;
        if ranks.len() != blocks {
            return Err(parse_err(
                0,
                format!("`{part}` lists {} ranks for {blocks} blocks", ranks.len()),
            ));
        }
        dims[v] = ranks;
    }
    Ok(dims)
}
