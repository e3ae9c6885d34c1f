//! Text formats: edge lists for graphs and hosts, and height-one posets.

use crate::graph::Graph;
use crate::hardness::HeightOnePoset;
use crate::host::Host;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
}

fn tokenize(text: &str) -> Vec<Tokens<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let trimmed = raw.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                return None;
            }
            let mut items = Vec::new();
            let mut start = None;
            for (pos, ch) in raw.char_indices().chain(std::iter::once((raw.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        items.push((s + 1, &raw[s..pos]));
                        start = None;
                    }
                    _ => {}
                }
            }
            Some(Tokens { line: i + 1, items })
        })
        .collect()
}

fn number(line: usize, (column, tok): (usize, &str)) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, column, format!("expected a non-negative integer, found `{tok}`")))
}

/// Parses `n m` then `m` lines `u v`; repeated pairs are kept.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>), ParseError> {
    let lines = tokenize(text);
    let Some(head) = lines.first() else {
        return Err(syntax(1, 1, "missing header `n m`"));
    };
    if head.items.len() != 2 {
        return Err(syntax(head.line, 1, "header must be `n m`"));
    }
    let n = number(head.line, head.items[0])?;
    let m = number(head.line, head.items[1])?;
    let mut edges = Vec::with_capacity(m);
    for l in &lines[1..] {
        if l.items.len() != 2 {
            return Err(syntax(l.line, 1, "edge line must be `u v`"));
        }
        let u = number(l.line, l.items[0])?;
        let v = number(l.line, l.items[1])?;
        for (value, item) in [(u, l.items[0]), (v, l.items[1])] {
            if value >= n {
                return Err(syntax(l.line, item.0, format!("vertex {value} out of range 0..{n}")));
            }
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        let line = lines.last().map_or(1, |l| l.line);
        return Err(syntax(
            line,
            1,
            format!("header announced {m} edges, found {}", edges.len()),
        ));
    }
    Ok((n, edges))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let (n, edges) = parse_edge_list(text)?;
    let lines = tokenize(text);
    for (l, &(u, v)) in lines[1..].iter().zip(&edges) {
        if u == v {
            return Err(syntax(l.line, l.items[1].0, "self-loop"));
        }
    }
    Ok(Graph::from_edges(n, &edges))
}

pub fn parse_host(text: &str) -> Result<Host, ParseError> {
    let (n, edges) = parse_edge_list(text)?;
    Host::new(n, edges).map_err(|e| syntax(1, 1, e.to_string()))
}

pub fn write_edge_list(n: usize, edges: &[(usize, usize)]) -> String {
    let mut out = format!("{n} {}\n", edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses `min: a b`, `max: c d`, and `rel: a c` lines.
pub fn parse_poset(text: &str) -> Result<HeightOnePoset, ParseError> {
    let mut mins: Vec<String> = Vec::new();
    let mut maxs: Vec<String> = Vec::new();
    let mut rels: Vec<(usize, String, String, usize)> = Vec::new();
    for l in tokenize(text) {
        let (col, key) = l.items[0];
        let rest: Vec<&str> = l.items[1..].iter().map(|&(_, t)| t).collect();
        match key {
            "min:" => mins.extend(rest.iter().map(|s| s.to_string())),
            "max:" => maxs.extend(rest.iter().map(|s| s.to_string())),
            "rel:" => {
                if rest.len() != 2 {
                    return Err(syntax(l.line, col, "relation line must be `rel: a b`"));
                }
                rels.push((l.line, rest[0].to_string(), rest[1].to_string(), l.items[1].0));
            }
            other => return Err(syntax(l.line, col, format!("unknown key `{other}`"))),
        }
    }
    let index: HashMap<&str, usize> = mins
        .iter()
        .chain(&maxs)
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    if index.len() != mins.len() + maxs.len() {
        return Err(syntax(1, 1, "element names must be distinct"));
    }
    let mut relation = Vec::new();
    for (line, a, b, col) in &rels {
        let (Some(&x), Some(&y)) = (index.get(a.as_str()), index.get(b.as_str())) else {
            return Err(syntax(*line, *col, "unknown element"));
        };
        if x >= mins.len() || y < mins.len() {
            return Err(syntax(
                *line,
                *col,
                "relation must go from a minimal to a maximal element",
            ));
        }
        relation.push((x, y - mins.len()));
    }
    Ok(HeightOnePoset::new(mins, maxs, relation))
}
