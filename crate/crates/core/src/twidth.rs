//! Tree decompositions and exact treewidth for small graphs.
//!
//! Decomposition file format (bags and vertices are 1-based):
//!
//! ```text
//! s td <#bags> <width+1> <n>
//! b <bag> <v> <v> ...      (one line per bag)
//! e <bag> <bag>            (tree edges)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::colouring::VertexColouring;
use crate::error::{Budget, Error, Result};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::io::Lines;
use crate::oddmorph::check_oddomorphism;

/// Largest vertex count [`exact_treewidth`] accepts.
pub const TREEWIDTH_CAP: usize = 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// The decomposition tree; its vertices are bag ids.
    pub tree: MultiGraph,
    pub bags: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum TdFailure {
    NotATree,
    BagMismatch { bag: VertexId },
    UnknownVertex { vertex: VertexId },
    VertexNotCovered { vertex: VertexId },
    EdgeNotCovered { edge: EdgeId },
    Disconnected { vertex: VertexId },
}

impl fmt::Display for TdFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdFailure::NotATree => write!(f, "not-a-tree"),
            TdFailure::BagMismatch { bag } => write!(f, "bag-mismatch bag {}", bag.0),
            TdFailure::UnknownVertex { vertex } => write!(f, "unknown-vertex {vertex}"),
            TdFailure::VertexNotCovered { vertex } => write!(f, "vertex-not-covered {vertex}"),
            TdFailure::EdgeNotCovered { edge } => write!(f, "edge-not-covered edge {}", edge.0),
            TdFailure::Disconnected { vertex } => write!(f, "disconnected-occurrences {vertex}"),
        }
    }
}

impl TreeDecomposition {
    /// A single bag holding every vertex.
    pub fn trivial(g: &MultiGraph) -> Self {
        let mut tree = MultiGraph::new();
        let b = tree.add_vertex();
        TreeDecomposition {
            tree,
            bags: [(b, g.vertices().collect())].into(),
        }
    }

    /// Largest bag size minus one (0 for a decomposition with only empty bags).
    pub fn width(&self) -> usize {
        self.bags
            .values()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }
}

/// Checks the three decomposition conditions; returns the width.
pub fn check_tree_decomposition(g: &MultiGraph, td: &TreeDecomposition) -> std::result::Result<usize, TdFailure> {
    let t = &td.tree;
    if t.vertex_count() == 0 || t.edge_count() + 1 != t.vertex_count() || !t.is_forest() {
        return Err(TdFailure::NotATree);
    }
    for b in t.vertices() {
        if !td.bags.contains_key(&b) {
            return Err(TdFailure::BagMismatch { bag: b });
        }
    }
    if let Some(&b) = td.bags.keys().find(|b| !t.has_vertex(**b)) {
        return Err(TdFailure::BagMismatch { bag: b });
    }
    let mut occurs: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (&b, bag) in &td.bags {
        for &v in bag {
            if !g.has_vertex(v) {
                return Err(TdFailure::UnknownVertex { vertex: v });
            }
            occurs.entry(v).or_default().push(b);
        }
    }
    if let Some(v) = g.vertices().find(|v| !occurs.contains_key(v)) {
        return Err(TdFailure::VertexNotCovered { vertex: v });
    }
    for (e, (u, v)) in g.edges() {
        if !td.bags.values().any(|bag| bag.contains(&u) && bag.contains(&v)) {
            return Err(TdFailure::EdgeNotCovered { edge: e });
        }
    }
    for (&v, bags) in &occurs {
        // occurrence set is connected iff it spans a subtree: |edges inside| = |bags| - 1
        let set: BTreeSet<VertexId> = bags.iter().copied().collect();
        let inside = t
            .edges()
            .filter(|(_, (a, b))| set.contains(a) && set.contains(b))
            .count();
        if inside + 1 != set.len() {
            return Err(TdFailure::Disconnected { vertex: v });
        }
    }
    Ok(td.width())
}

pub fn verify_tree_decomposition(g: &MultiGraph, td: &TreeDecomposition) -> bool {
    check_tree_decomposition(g, td).is_ok()
}

/// Vertices outside `s` and other than `v` reachable from `v` through `s`.
fn q_set(adj: &[u32], s: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut out = 0u32;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[x] & !seen;
        seen |= fresh;
        out |= fresh & !s;
        frontier |= fresh & s;
    }
    out
}

/// Exact treewidth by dynamic programming over vertex subsets, with an
/// optimal decomposition built from the elimination ordering it finds.
///
/// `TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|)`, where
/// `Q(S, v)` is the set of vertices outside `S + v` reachable from `v`
/// through `S`. Ties go to the lowest vertex, so the output is deterministic.
/// Parallel edges are ignored. The empty graph gets width 0.
pub fn exact_treewidth(g: &MultiGraph, budget: &mut Budget) -> Result<(usize, TreeDecomposition)> {
    let n = g.vertex_count();
    if n > TREEWIDTH_CAP {
        return Err(Error::TooLarge(format!(
            "exact treewidth is limited to {TREEWIDTH_CAP} vertices, graph has {n}"
        )));
    }
    if n == 0 {
        return Ok((0, TreeDecomposition::trivial(g)));
    }
    let dense = g.dense();
    let adj: Vec<u32> = dense
        .adj
        .iter()
        .map(|list| list.iter().fold(0u32, |m, &y| m | (1 << y)))
        .collect();
    let full = (1u32 << n) - 1;
    // tw[S] stores TW(S) + 1 so the empty set can hold "-1"
    let mut tw = vec![u8::MAX; 1usize << n];
    tw[0] = 0;
    for s in 1..=full {
        budget.charge(n as u64)?;
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let q = q_set(&adj, without, v).count_ones() as u8 + 1;
            best = best.min(tw[without as usize].max(q));
        }
        tw[s as usize] = best;
    }
    let width = tw[full as usize] as usize - 1;

    // recover an ordering: the chosen vertex of S is eliminated after S - v
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let mut rest = s;
        loop {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let q = q_set(&adj, without, v).count_ones() as u8 + 1;
            if tw[without as usize].max(q) == tw[s as usize] {
                order.push(v);
                s = without;
                break;
            }
        }
    }
    order.reverse();
    let td = decomposition_from_ordering(&adj, &order, &dense.ids);
    debug_assert_eq!(td.width(), width);
    Ok((width, td))
}

/// Bags `{v} + later neighbours of v in the fill-in graph`; bag `v` hangs
/// below the bag of its earliest later neighbour.
fn decomposition_from_ordering(adj: &[u32], order: &[usize], ids: &[VertexId]) -> TreeDecomposition {
    let n = order.len();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut fill: Vec<u32> = adj.to_vec();
    let mut higher = vec![0u32; n];
    for &v in order {
        let mut later = 0u32;
        let mut m = fill[v];
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            if pos[w] > pos[v] {
                later |= 1 << w;
            }
        }
        higher[v] = later;
        let mut m = later;
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            fill[w] |= later & !(1 << w);
        }
    }
    // bag ids follow the elimination order: vertex order[i] owns bag i+1
    let mut tree = MultiGraph::empty(n as u32);
    let bag_id = |v: usize| VertexId(pos[v] as u32 + 1);
    let mut bags = BTreeMap::new();
    // each component has one bag without a parent; chain those together
    let mut last_root: Option<VertexId> = None;
    for &v in order {
        let mut bag: BTreeSet<VertexId> = [ids[v]].into();
        let mut m = higher[v];
        let mut parent: Option<usize> = None;
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            bag.insert(ids[w]);
            if parent.is_none_or(|p| pos[w] < pos[p]) {
                parent = Some(w);
            }
        }
        bags.insert(bag_id(v), bag);
        match parent {
            Some(p) => {
                tree.add_edge(bag_id(v), bag_id(p)).expect("distinct bags");
            }
            None => {
                if let Some(r) = last_root {
                    tree.add_edge(r, bag_id(v)).expect("distinct bags");
                }
                last_root = Some(bag_id(v));
            }
        }
    }
    TreeDecomposition { tree, bags }
}

/// Result of checking `tw(G) >= t - 1` for a `t`-oddomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwBoundCheck {
    pub t: u32,
    pub treewidth: usize,
    pub holds: bool,
}

/// Computes the exact treewidth of `g` and compares it with `t - 1`, where
/// `f` must be a verified `t`-oddomorphism.
pub fn check_oddomorphism_treewidth_bound(
    g: &MultiGraph,
    f: &VertexColouring,
    budget: &mut Budget,
) -> Result<TwBoundCheck> {
    if let Err(fail) = check_oddomorphism(g, f) {
        return Err(Error::Precondition(format!("not an oddomorphism: {fail}")));
    }
    let (treewidth, _) = exact_treewidth(g, budget)?;
    let t = f.colours();
    Ok(TwBoundCheck {
        t,
        treewidth,
        holds: treewidth + 1 >= t as usize,
    })
}

/// Writes a decomposition of a graph with vertices `1..=n`; bags must be numbered `1..=k`.
pub fn write_td(td: &TreeDecomposition, n: usize) -> Result<String> {
    if !td.bags.keys().enumerate().all(|(i, b)| b.0 == i as u32 + 1) {
        return Err(Error::Precondition("bag ids are not 1..=k".into()));
    }
    let mut s = String::new();
    let max_bag = td.bags.values().map(BTreeSet::len).max().unwrap_or(0);
    writeln!(s, "s td {} {} {}", td.bags.len(), max_bag, n).unwrap();
    for (b, bag) in &td.bags {
        write!(s, "b {}", b.0).unwrap();
        for v in bag {
            write!(s, " {}", v.0).unwrap();
        }
        s.push('\n');
    }
    for (_, (a, b)) in td.tree.edges() {
        writeln!(s, "e {} {}", a.0, b.0).unwrap();
    }
    Ok(s)
}

/// Parses a decomposition file. The grammar is checked strictly, including
/// that the declared `width+1` equals the largest bag; whether the result is
/// a valid decomposition is left to [`check_tree_decomposition`].
pub fn parse_td(name: &str, text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut lines = Lines::new(name, text);
    let Some((hline, toks)) = lines.next_tokens() else {
        return Err(lines.err(0, "missing header `s td <bags> <width+1> <n>`"));
    };
    if toks.len() != 5 || toks[0] != "s" || toks[1] != "td" {
        return Err(lines.err(hline, "expected header `s td <bags> <width+1> <n>`"));
    }
    let k = lines.number(hline, toks[2], "bag count")?;
    let declared = lines.number(hline, toks[3], "width+1")? as usize;
    let n = lines.number(hline, toks[4], "vertex count")?;
    let mut bags = BTreeMap::new();
    for i in 0..k {
        let Some((line, toks)) = lines.next_tokens() else {
            return Err(lines.err(0, format!("expected {k} bag lines, found {i}")));
        };
        if toks.len() < 2 || toks[0] != "b" {
            return Err(lines.err(line, "expected `b <bag> <vertices...>`"));
        }
        let b = lines.number(line, toks[1], "bag id")?;
        if b == 0 || b > k {
            return Err(lines.err(line, format!("bag id {b} outside 1..={k}")));
        }
        let mut bag = BTreeSet::new();
        for tok in &toks[2..] {
            let v = lines.number(line, tok, "vertex")?;
            if v == 0 || v > n {
                return Err(lines.err(line, format!("vertex {v} outside 1..={n}")));
            }
            if !bag.insert(VertexId(v)) {
                return Err(lines.err(line, format!("vertex {v} repeated in bag {b}")));
            }
        }
        if bags.insert(VertexId(b), bag).is_some() {
            return Err(lines.err(line, format!("bag {b} declared twice")));
        }
    }
    let max_bag = bags.values().map(BTreeSet::len).max().unwrap_or(0);
    if max_bag != declared {
        return Err(lines.err(
            hline,
            format!("header declares width+1 = {declared}, largest bag has {max_bag}"),
        ));
    }
    let mut tree = MultiGraph::empty(k);
    while let Some((line, toks)) = lines.next_tokens() {
        if toks.len() != 3 || toks[0] != "e" {
            return Err(lines.err(line, "expected `e <bag> <bag>`"));
        }
        let a = lines.number(line, toks[1], "bag id")?;
        let b = lines.number(line, toks[2], "bag id")?;
        for x in [a, b] {
            if x == 0 || x > k {
                return Err(lines.err(line, format!("bag id {x} outside 1..={k}")));
            }
        }
        if a == b {
            return Err(lines.err(line, format!("tree edge joins bag {a} to itself")));
        }
        tree.add_edge(VertexId(a), VertexId(b))?;
    }
    Ok((TreeDecomposition { tree, bags }, n as usize))
}
