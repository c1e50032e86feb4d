//! Edge-list ingestion.
//!
//! Format: whitespace-separated node pairs, one per line. Lines starting
//! with `#` are comments, except a node-count header (`# nodes N`, or the
//! SNAP form `# Nodes: N Edges: M`) which preserves trailing isolated nodes.
//! Tokens after the first two on a line (weights, timestamps) are ignored,
//! and edge direction is dropped.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use super::Graph;
use crate::error::{Error, Result};

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    load_edge_list(text.as_bytes())
}

pub fn load_edge_list<R: Read>(reader: R) -> Result<Graph> {
    let mut declared = None;
    let mut max_id = None;
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let Some((a, b)) = split_pair(&line, lineno, &mut declared)? else {
            continue;
        };
        let u = parse_id(a, lineno)?;
        let v = parse_id(b, lineno)?;
        if u == v {
            return Err(Error::SelfLoop { line: lineno, node: u });
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        pairs.push((u, v));
    }
    let n = match (declared, max_id) {
        (Some(d), Some(m)) if m >= d => {
            return Err(Error::Parse {
                line: 0,
                message: format!("node id {m} exceeds declared node count {d}"),
            })
        }
        (Some(d), _) => d,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    Graph::from_edges(n, pairs)
}

/// Maps external string labels to dense ids in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdTable {
    labels: Vec<String>,
}

impl IdTable {
    pub fn label(&self, id: usize) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// One `id label` line per node.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (id, label) in self.labels.iter().enumerate() {
            writeln!(out, "{id} {label}")?;
        }
        Ok(())
    }
}

/// Like [`load_edge_list`] but accepts arbitrary tokens as node labels.
pub fn load_labeled_edge_list<R: Read>(reader: R) -> Result<(Graph, IdTable)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut table = IdTable::default();
    let mut pairs = Vec::new();
    let mut declared = None;
    let mut intern = |label: &str, table: &mut IdTable| -> usize {
        *index.entry(label.to_string()).or_insert_with(|| {
            table.labels.push(label.to_string());
            table.labels.len() - 1
        })
    };
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let Some((a, b)) = split_pair(&line, lineno, &mut declared)? else {
            continue;
        };
        if a == b {
            let node = intern(a, &mut table);
            return Err(Error::SelfLoop { line: lineno, node });
        }
        let u = intern(a, &mut table);
        let v = intern(b, &mut table);
        pairs.push((u, v));
    }
    let graph = Graph::from_edges(table.len(), pairs)?;
    Ok((graph, table))
}

fn split_pair<'a>(
    line: &'a str,
    lineno: usize,
    declared: &mut Option<usize>,
) -> Result<Option<(&'a str, &'a str)>> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    if let Some(comment) = trimmed.strip_prefix('#') {
        if let Some(n) = node_count_header(comment) {
            *declared = Some(n);
        }
        return Ok(None);
    }
    let mut tokens = trimmed.split_whitespace();
    match (tokens.next(), tokens.next()) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        _ => Err(Error::Parse {
            line: lineno,
            message: format!("expected two node ids, found {trimmed:?}"),
        }),
    }
}

fn node_count_header(comment: &str) -> Option<usize> {
    let mut tokens = comment.split_whitespace();
    let key = tokens.next()?.trim_end_matches(':');
    if !key.eq_ignore_ascii_case("nodes") {
        return None;
    }
    tokens.next()?.trim_end_matches(',').parse().ok()
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("malformed node id {token:?}"),
    })
}
