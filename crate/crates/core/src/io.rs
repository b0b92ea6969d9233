//! Line-oriented text formats for graphs and colourings.
//!
//! ```text
//! # comment
//! p graph <n> <m>
//! e <u> <v>          (exactly m lines, 1 <= u,v <= n, u != v)
//! ```
//!
//! ```text
//! p colouring <n> <t>
//! c <v> <colour>     (exactly n lines, one per vertex)
//! ```
//!
//! Parsing is strict: counts must match, ids must be in range and tokens
//! must be plain decimal integers. Only `#` comment lines and blank lines are
//! skipped.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::colouring::{Colour, VertexColouring};
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexId};

pub(crate) struct Lines<'a> {
    name: &'a str,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(name: &'a str, text: &'a str) -> Self {
        Lines {
            name,
            inner: text.lines().enumerate(),
        }
    }

    pub(crate) fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            source_name: self.name.to_string(),
            line,
            msg: msg.into(),
        }
    }

    /// Next significant line as (1-based line number, tokens).
    pub(crate) fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((i + 1, trimmed.split_whitespace().collect()));
        }
        None
    }

    pub(crate) fn number(&self, line: usize, tok: &str, what: &str) -> Result<u32> {
        if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.err(line, format!("expected {what} as a decimal integer, found `{tok}`")));
        }
        tok.parse()
            .map_err(|_| self.err(line, format!("{what} `{tok}` is out of range")))
    }

    pub(crate) fn header(&mut self, kind: &str, fields: usize) -> Result<(usize, Vec<u32>)> {
        let Some((line, toks)) = self.next_tokens() else {
            return Err(self.err(0, format!("missing header `p {kind} ...`")));
        };
        if toks.len() != 2 + fields || toks[0] != "p" || toks[1] != kind {
            return Err(self.err(line, format!("expected header `p {kind}` with {fields} numbers")));
        }
        let nums = toks[2..]
            .iter()
            .map(|t| self.number(line, t, "header field"))
            .collect::<Result<_>>()?;
        Ok((line, nums))
    }

    pub(crate) fn expect_end(&mut self) -> Result<()> {
        match self.next_tokens() {
            None => Ok(()),
            Some((line, _)) => Err(self.err(line, "unexpected content after the declared number of lines")),
        }
    }
}

pub fn parse_graph(name: &str, text: &str) -> Result<MultiGraph> {
    let mut lines = Lines::new(name, text);
    let (_, hdr) = lines.header("graph", 2)?;
    let (n, m) = (hdr[0], hdr[1]);
    let mut g = MultiGraph::empty(n);
    for k in 0..m {
        let Some((line, toks)) = lines.next_tokens() else {
            return Err(lines.err(0, format!("expected {m} edge lines, found {k}")));
        };
        if toks.len() != 3 || toks[0] != "e" {
            return Err(lines.err(line, "expected `e <u> <v>`"));
        }
        let u = lines.number(line, toks[1], "vertex")?;
        let v = lines.number(line, toks[2], "vertex")?;
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(lines.err(line, format!("vertex {x} outside 1..={n}")));
            }
        }
        if u == v {
            return Err(lines.err(line, format!("loop at vertex {u}")));
        }
        g.add_edge(VertexId(u), VertexId(v))?;
    }
    lines.expect_end()?;
    Ok(g)
}

/// True when vertex ids are exactly `1..=n` and edge ids exactly `1..=m`.
pub fn is_compact(g: &MultiGraph) -> bool {
    g.vertices().enumerate().all(|(i, v)| v.0 == i as u32 + 1)
        && g.edge_ids().enumerate().all(|(i, e)| e.0 == i as u32 + 1)
}

/// Renumbers vertices to `1..=n` and edges to `1..=m`, preserving order.
pub fn compact(g: &MultiGraph) -> (MultiGraph, BTreeMap<VertexId, VertexId>) {
    let map: BTreeMap<VertexId, VertexId> = g
        .vertices()
        .enumerate()
        .map(|(i, v)| (v, VertexId(i as u32 + 1)))
        .collect();
    let mut h = MultiGraph::empty(map.len() as u32);
    for (_, (u, v)) in g.edges() {
        h.add_edge(map[&u], map[&v]).expect("valid edge");
    }
    (h, map)
}

/// Serializes a compact graph (see [`is_compact`]); edge lines follow edge ids.
pub fn write_graph(g: &MultiGraph) -> Result<String> {
    if !is_compact(g) {
        return Err(Error::Precondition(
            "graph ids are not 1..=n / 1..=m; compact it first".into(),
        ));
    }
    let mut s = String::new();
    writeln!(s, "p graph {} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (_, (u, v)) in g.edges() {
        writeln!(s, "e {} {}", u.0, v.0).unwrap();
    }
    Ok(s)
}

pub fn parse_colouring(name: &str, text: &str) -> Result<VertexColouring> {
    let mut lines = Lines::new(name, text);
    let (_, hdr) = lines.header("colouring", 2)?;
    let (n, t) = (hdr[0], hdr[1]);
    let mut f = VertexColouring::new(t);
    for k in 0..n {
        let Some((line, toks)) = lines.next_tokens() else {
            return Err(lines.err(0, format!("expected {n} colour lines, found {k}")));
        };
        if toks.len() != 3 || toks[0] != "c" {
            return Err(lines.err(line, "expected `c <v> <colour>`"));
        }
        let v = lines.number(line, toks[1], "vertex")?;
        let c = lines.number(line, toks[2], "colour")?;
        if v == 0 || v > n {
            return Err(lines.err(line, format!("vertex {v} outside 1..={n}")));
        }
        if c == 0 || c > t {
            return Err(lines.err(line, format!("colour {c} outside 1..={t}")));
        }
        if f.colour(VertexId(v)).is_some() {
            return Err(lines.err(line, format!("vertex {v} coloured twice")));
        }
        f.set(VertexId(v), Colour(c))?;
    }
    lines.expect_end()?;
    Ok(f)
}

/// Serializes a colouring of vertices `1..=n`.
pub fn write_colouring(f: &VertexColouring) -> Result<String> {
    if !f.iter().enumerate().all(|(i, (v, _))| v.0 == i as u32 + 1) {
        return Err(Error::Precondition("coloured vertices are not 1..=n".into()));
    }
    let mut s = String::new();
    writeln!(s, "p colouring {} {}", f.len(), f.colours()).unwrap();
    for (v, c) in f.iter() {
        writeln!(s, "c {} {}", v.0, c.0).unwrap();
    }
    Ok(s)
}
