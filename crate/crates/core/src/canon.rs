//! Canonical forms and isomorph-free enumeration of small simple graphs.
//!
//! A connected graph's code is the largest upper-triangle adjacency string
//! over the labellings reached by colour refinement plus individualization;
//! interchangeable twins are individualized only once. A graph's form is its
//! vertex count followed by the sorted codes of its components. Parallel
//! edges are ignored throughout.

use std::collections::BTreeSet;

use crate::graph::{MultiGraph, VertexId};

/// Vertex limit for canonical forms (adjacency rows are 64-bit masks).
pub const CANON_CAP: usize = 64;

/// Isomorphism-invariant code; equal forms iff isomorphic underlying simple graphs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub vertices: usize,
    /// Per component: vertex count, edge count, adjacency bits; sorted.
    pub components: Vec<(usize, usize, Vec<u64>)>,
}

fn masks(g: &MultiGraph) -> (Vec<u64>, Vec<VertexId>) {
    let dense = g.dense();
    assert!(
        dense.len() <= CANON_CAP,
        "canonical forms need at most {CANON_CAP} vertices"
    );
    let adj = dense
        .adj
        .iter()
        .map(|list| list.iter().fold(0u64, |m, &y| m | (1 << y)))
        .collect();
    (adj, dense.ids)
}

fn components(adj: &[u64]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = 0u64;
    let mut out = Vec::new();
    for s in 0..n {
        if seen >> s & 1 == 1 {
            continue;
        }
        let mut comp = 1u64 << s;
        let mut frontier = comp;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[x] & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        seen |= comp;
        out.push((0..n).filter(|&v| comp >> v & 1 == 1).collect());
    }
    out
}

/// Splits cells by neighbour counts into every cell until stable. Cell order
/// depends only on the input partition and the graph, never on labels.
fn refine(adj: &[u64], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let masks: Vec<u64> = cells
            .iter()
            .map(|c| c.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect();
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| (masks.iter().map(|m| (adj[v] & m).count_ones()).collect(), v))
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn code_of(adj: &[u64], order: &[usize]) -> Vec<u64> {
    let n = order.len();
    let mut code = vec![0u64; (n * n.saturating_sub(1) / 2).div_ceil(64)];
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if adj[order[i]] >> order[j] & 1 == 1 {
                code[bit / 64] |= 1 << (63 - bit % 64);
            }
            bit += 1;
        }
    }
    code
}

fn search(adj: &[u64], cells: Vec<Vec<usize>>, best: &mut Option<(Vec<u64>, Vec<usize>)>) {
    let cells = refine(adj, cells);
    let Some(target) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let code = code_of(adj, &order);
        if best.as_ref().is_none_or(|(b, _)| code > *b) {
            *best = Some((code, order));
        }
        return;
    };
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cells[target] {
        // a twin of a tried vertex gives an isomorphic subtree
        let twin = tried.iter().any(|&w| {
            let (a, b) = (adj[v] & !(1 << w), adj[w] & !(1 << v));
            a == b
        });
        if twin {
            continue;
        }
        tried.push(v);
        let mut next = Vec::with_capacity(cells.len() + 1);
        next.extend(cells[..target].iter().cloned());
        next.push(vec![v]);
        next.push(cells[target].iter().copied().filter(|&w| w != v).collect());
        next.extend(cells[target + 1..].iter().cloned());
        search(adj, next, best);
    }
}

/// Canonical code and vertex order of one component (a set of vertices).
fn component_canon(adj: &[u64], comp: &[usize]) -> (Vec<u64>, Vec<usize>) {
    let mut best = None;
    search(adj, vec![comp.to_vec()], &mut best);
    best.expect("a non-empty component has a leaf")
}

/// Canonical form together with a canonical vertex order.
fn canon_with_order(g: &MultiGraph) -> (CanonicalForm, Vec<VertexId>) {
    let (adj, ids) = masks(g);
    type Part = ((usize, usize, Vec<u64>), Vec<usize>);
    let mut parts: Vec<Part> = components(&adj)
        .into_iter()
        .map(|comp| {
            let edges = comp.iter().map(|&v| adj[v].count_ones() as usize).sum::<usize>() / 2;
            let (code, order) = component_canon(&adj, &comp);
            ((comp.len(), edges, code), order)
        })
        .collect();
    parts.sort();
    let order = parts.iter().flat_map(|(_, o)| o.iter().map(|&i| ids[i])).collect();
    let form = CanonicalForm {
        vertices: adj.len(),
        components: parts.into_iter().map(|(c, _)| c).collect(),
    };
    (form, order)
}

pub fn canonical_form(g: &MultiGraph) -> CanonicalForm {
    canon_with_order(g).0
}

/// The underlying simple graph relabelled canonically onto `1..=n`.
pub fn canonical_graph(g: &MultiGraph) -> MultiGraph {
    let (_, order) = canon_with_order(g);
    relabel(g, &order)
}

fn relabel(g: &MultiGraph, order: &[VertexId]) -> MultiGraph {
    let pos: std::collections::BTreeMap<VertexId, u32> =
        order.iter().enumerate().map(|(i, &v)| (v, i as u32 + 1)).collect();
    let mut pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (_, (u, v)) in g.edges() {
        let (a, b) = (pos[&u], pos[&v]);
        pairs.insert((a.min(b), a.max(b)));
    }
    let edges: Vec<(u32, u32)> = pairs.into_iter().collect();
    MultiGraph::from_edges(order.len() as u32, &edges).expect("relabelled simple graph")
}

pub fn are_isomorphic(g: &MultiGraph, h: &MultiGraph) -> bool {
    g.vertex_count() == h.vertex_count() && canonical_form(g) == canonical_form(h)
}

/// Sorts by vertex count, then canonical form, dropping isomorphic repeats.
pub fn dedup_sorted(graphs: impl IntoIterator<Item = MultiGraph>) -> Vec<MultiGraph> {
    let mut keyed: Vec<(CanonicalForm, MultiGraph)> = graphs
        .into_iter()
        .map(|g| {
            let (form, order) = canon_with_order(&g);
            (form, relabel(&g, &order))
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, g)| g).collect()
}

/// Adds one vertex joined to exactly the vertices in `mask` (bit i = vertex i+1).
fn extend_by_vertex(g: &MultiGraph, mask: u64) -> MultiGraph {
    let n = g.vertex_count() as u32;
    let mut edges: Vec<(u32, u32)> = g.edges().map(|(_, (u, v))| (u.0, v.0)).collect();
    edges.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1, n + 1)));
    MultiGraph::from_edges(n + 1, &edges).expect("extension")
}

/// All simple graphs on exactly `n` vertices up to isomorphism, one list per
/// vertex count `0..=n`, each in canonical order.
pub fn all_graphs_by_order(n: usize) -> Vec<Vec<MultiGraph>> {
    let mut levels = vec![vec![MultiGraph::new()]];
    for k in 1..=n {
        let prev = &levels[k - 1];
        let next = dedup_sorted(
            prev.iter()
                .flat_map(|g| (0..1u64 << (k - 1)).map(move |mask| extend_by_vertex(g, mask))),
        );
        levels.push(next);
    }
    levels
}

pub fn is_connected(g: &MultiGraph) -> bool {
    let (adj, _) = masks(g);
    components(&adj).len() <= 1
}

/// Every simple graph with at most `max_edges` edges and no isolated
/// vertex, up to isomorphism, in canonical order (the empty graph first).
pub fn graphs_by_edges(max_edges: usize) -> Vec<MultiGraph> {
    let mut all = vec![MultiGraph::new()];
    let mut layer = vec![MultiGraph::new()];
    for _ in 0..max_edges {
        let mut next = Vec::new();
        for g in &layer {
            let n = g.vertex_count() as u32;
            let base: Vec<(u32, u32)> = g.edges().map(|(_, (u, v))| (u.0, v.0)).collect();
            let mut add = |extra: u32, e: (u32, u32)| {
                let mut edges = base.clone();
                edges.push(e);
                next.push(MultiGraph::from_edges(n + extra, &edges).expect("extension"));
            };
            for a in 1..=n {
                for b in a + 1..=n {
                    if g.multiplicity(VertexId(a), VertexId(b)) == 0 {
                        add(0, (a, b));
                    }
                }
                add(1, (a, n + 1));
            }
            add(2, (n + 1, n + 2));
        }
        layer = dedup_sorted(next);
        all.extend(layer.iter().cloned());
    }
    all
}
