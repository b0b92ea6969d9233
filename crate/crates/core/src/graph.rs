//! Loop-free multigraphs with stable edge identifiers.
//!
//! Every edge keeps the [`EdgeId`] it was created with for as long as it
//! exists, and ids are never handed out twice by the same graph (or by any
//! clone descended from it). Edge-disjointness of paths is therefore a plain
//! set-disjointness check on ids, and surgeries can be recorded and undone
//! by id.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::colouring::{Colour, VertexColouring};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

/// An edge id with its endpoints.
pub type EdgeEntry = (EdgeId, (VertexId, VertexId));

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Undirected multigraph without loops.
///
/// Endpoints are stored with the smaller vertex id first. Vertex and edge
/// counters only move forward, so an id removed from a graph is never
/// reissued by it.
#[derive(Clone, Debug, Default)]
pub struct MultiGraph {
    incidence: BTreeMap<VertexId, BTreeSet<EdgeId>>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    next_vertex: u32,
    next_edge: u32,
}

impl PartialEq for MultiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges && self.incidence.keys().eq(other.incidence.keys())
    }
}

impl Eq for MultiGraph {}

/// Record of one split-off: edges `e1 = {u,v}` and `e2 = {v,w}` were replaced
/// by the fresh edge `new = {u,w}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub e1: EdgeId,
    pub e2: EdgeId,
    pub new: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub w: VertexId,
}

/// One vertex pair whose parallel edges were collapsed by [`MultiGraph::simplify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplifyRecord {
    pub pair: (VertexId, VertexId),
    pub kept: EdgeId,
    pub dropped: Vec<EdgeId>,
}

impl MultiGraph {
    pub fn new() -> Self {
        MultiGraph {
            incidence: BTreeMap::new(),
            edges: BTreeMap::new(),
            next_vertex: 1,
            next_edge: 1,
        }
    }

    /// Graph on vertices `1..=n` and no edges.
    pub fn empty(n: u32) -> Self {
        let mut g = MultiGraph::new();
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    /// Builds a graph on vertices `1..=n`; edge ids follow the order of `edges`.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = MultiGraph::empty(n);
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    pub fn complete(n: u32) -> Self {
        let mut g = MultiGraph::empty(n);
        for u in 1..=n {
            for v in u + 1..=n {
                g.add_edge(VertexId(u), VertexId(v)).expect("distinct vertices");
            }
        }
        g
    }

    /// Path on `n` vertices (so `n - 1` edges).
    pub fn path(n: u32) -> Self {
        let mut g = MultiGraph::empty(n);
        for u in 1..n {
            g.add_edge(VertexId(u), VertexId(u + 1)).expect("distinct vertices");
        }
        g
    }

    /// Cycle on `n` vertices. `n = 2` gives a double edge.
    pub fn cycle(n: u32) -> Self {
        assert!(n >= 2, "a cycle needs at least two vertices");
        let mut g = MultiGraph::path(n);
        g.add_edge(VertexId(n), VertexId(1)).expect("distinct vertices");
        g
    }

    /// `K_{a,b}` with sides `1..=a` and `a+1..=a+b`.
    pub fn complete_bipartite(a: u32, b: u32) -> Self {
        let mut g = MultiGraph::empty(a + b);
        for u in 1..=a {
            for v in a + 1..=a + b {
                g.add_edge(VertexId(u), VertexId(v)).expect("distinct vertices");
            }
        }
        g
    }

    /// `K_{1,k}` with centre `1`.
    pub fn star(k: u32) -> Self {
        MultiGraph::complete_bipartite(1, k)
    }

    /// Disjoint union; the vertices and edges of `other` are renumbered after ours.
    pub fn disjoint_union(&self, other: &MultiGraph) -> MultiGraph {
        let mut g = self.clone();
        let mut map = BTreeMap::new();
        for v in other.vertices() {
            map.insert(v, g.add_vertex());
        }
        for (_, (u, v)) in other.edges() {
            g.add_edge(map[&u], map[&v]).expect("endpoints exist");
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.incidence.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.incidence.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, (VertexId, VertexId))> + '_ {
        self.edges.iter().map(|(&e, &p)| (e, p))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.incidence.contains_key(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId)> {
        self.edges.get(&e).copied().ok_or(Error::UnknownEdge(e))
    }

    /// The endpoint of `e` that is not `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> Result<VertexId> {
        let (a, b) = self.endpoints(e)?;
        if a == v {
            Ok(b)
        } else if b == v {
            Ok(a)
        } else {
            Err(Error::InvalidPath(format!("{e} is not incident to vertex {v}")))
        }
    }

    pub fn incident(&self, v: VertexId) -> Result<&BTreeSet<EdgeId>> {
        self.incidence.get(&v).ok_or(Error::UnknownVertex(v))
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, v: VertexId) -> Result<usize> {
        Ok(self.incident(v)?.len())
    }

    /// Distinct neighbours.
    pub fn neighbours(&self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        let inc = self.incident(v)?;
        Ok(inc
            .iter()
            .map(|&e| self.opposite(e, v).expect("incidence is consistent"))
            .collect())
    }

    /// Ids of all edges joining `u` and `v`, ascending.
    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        let Some(inc) = self.incidence.get(&u) else {
            return Vec::new();
        };
        inc.iter()
            .copied()
            .filter(|&e| self.opposite(e, u).ok() == Some(v))
            .collect()
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        self.edges_between(u, v).len()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.values().all(|&p| seen.insert(p))
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.incidence.values().map(BTreeSet::len).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.incidence.values().map(BTreeSet::len).max()
    }

    /// Id the next call to [`add_vertex`](Self::add_vertex) will return.
    pub fn peek_vertex_id(&self) -> VertexId {
        VertexId(self.next_vertex)
    }

    pub fn peek_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.incidence.insert(v, BTreeSet::new());
        v
    }

    /// Inserts a vertex with a caller-chosen id. Later fresh ids are larger.
    pub fn insert_vertex(&mut self, v: VertexId) -> Result<()> {
        if v.0 == 0 {
            return Err(Error::Precondition("vertex ids are 1-based".into()));
        }
        if self.incidence.contains_key(&v) {
            return Err(Error::DuplicateVertex(v));
        }
        self.incidence.insert(v, BTreeSet::new());
        self.next_vertex = self.next_vertex.max(v.0 + 1);
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        let e = EdgeId(self.next_edge);
        self.insert_edge(e, u, v)?;
        Ok(e)
    }

    /// Inserts an edge with a caller-chosen id. Later fresh ids are larger.
    pub fn insert_edge(&mut self, e: EdgeId, u: VertexId, v: VertexId) -> Result<()> {
        if u == v {
            return Err(Error::Loop(u));
        }
        if e.0 == 0 {
            return Err(Error::Precondition("edge ids are 1-based".into()));
        }
        if self.edges.contains_key(&e) {
            return Err(Error::DuplicateEdge(e));
        }
        for x in [u, v] {
            if !self.incidence.contains_key(&x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        self.edges.insert(e, (u.min(v), u.max(v)));
        self.incidence.get_mut(&u).unwrap().insert(e);
        self.incidence.get_mut(&v).unwrap().insert(e);
        self.next_edge = self.next_edge.max(e.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Result<(VertexId, VertexId)> {
        let (u, v) = self.edges.remove(&e).ok_or(Error::UnknownEdge(e))?;
        self.incidence.get_mut(&u).unwrap().remove(&e);
        self.incidence.get_mut(&v).unwrap().remove(&e);
        Ok((u, v))
    }

    /// Moves one end of `e` from `from` to `to`, keeping the id.
    pub(crate) fn reattach_edge(&mut self, e: EdgeId, from: VertexId, to: VertexId) -> Result<()> {
        let other = self.opposite(e, from)?;
        if other == to {
            return Err(Error::Loop(to));
        }
        if !self.has_vertex(to) {
            return Err(Error::UnknownVertex(to));
        }
        self.incidence.get_mut(&from).unwrap().remove(&e);
        self.incidence.get_mut(&to).unwrap().insert(e);
        self.edges.insert(e, (other.min(to), other.max(to)));
        Ok(())
    }

    /// Removes an isolated vertex.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<()> {
        match self.incidence.get(&v) {
            None => Err(Error::UnknownVertex(v)),
            Some(inc) if !inc.is_empty() => Err(Error::NotIsolated(v)),
            Some(_) => {
                self.incidence.remove(&v);
                Ok(())
            }
        }
    }

    pub fn isolated_vertices(&self) -> Vec<VertexId> {
        self.incidence
            .iter()
            .filter(|(_, inc)| inc.is_empty())
            .map(|(&v, _)| v)
            .collect()
    }

    /// Removes every isolated vertex and returns them in ascending order.
    pub fn remove_isolated_vertices(&mut self) -> Vec<VertexId> {
        let iso = self.isolated_vertices();
        for &v in &iso {
            self.incidence.remove(&v);
        }
        iso
    }

    /// Sub-multigraph on `vertices` keeping exactly the listed edges (ids preserved).
    pub fn subgraph(&self, vertices: &BTreeSet<VertexId>, edges: &BTreeSet<EdgeId>) -> Result<MultiGraph> {
        let mut g = MultiGraph::new();
        for &v in vertices {
            if !self.has_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
            g.insert_vertex(v)?;
        }
        for &e in edges {
            let (u, v) = self.endpoints(e)?;
            if !vertices.contains(&u) || !vertices.contains(&v) {
                return Err(Error::Precondition(format!(
                    "edge {e} has an endpoint outside the vertex set"
                )));
            }
            g.insert_edge(e, u, v)?;
        }
        g.next_vertex = g.next_vertex.max(self.next_vertex);
        g.next_edge = g.next_edge.max(self.next_edge);
        Ok(g)
    }

    /// Replaces `e1 = {u,v}` and `e2 = {v,w}` by a fresh edge `{u,w}`.
    pub fn split_off(&mut self, e1: EdgeId, e2: EdgeId) -> Result<SplitRecord> {
        let (a, b) = self.endpoints(e1)?;
        let (c, d) = self.endpoints(e2)?;
        if e1 == e2 {
            return Err(Error::NotSplittable(e1, e2));
        }
        let shared: Vec<VertexId> = [a, b].into_iter().filter(|x| *x == c || *x == d).collect();
        if shared.len() != 1 {
            return Err(Error::NotSplittable(e1, e2));
        }
        let v = shared[0];
        let u = if a == v { b } else { a };
        let w = if c == v { d } else { c };
        debug_assert_ne!(u, w);
        self.remove_edge(e1)?;
        self.remove_edge(e2)?;
        let new = self.add_edge(u, w)?;
        Ok(SplitRecord { e1, e2, new, u, v, w })
    }

    /// Splits the whole path into a single edge between its ends.
    ///
    /// Returns the individual split-offs in the order they were applied; a
    /// path with one edge leaves the graph unchanged and returns nothing.
    pub fn split_path(&mut self, path: &EdgePath) -> Result<Vec<SplitRecord>> {
        path.trace(self)?;
        if path.edges.is_empty() {
            return Err(Error::InvalidPath("cannot split an empty path".into()));
        }
        let mut records = Vec::with_capacity(path.edges.len() - 1);
        let mut current = path.edges[0];
        for &next in &path.edges[1..] {
            let rec = self.split_off(current, next)?;
            current = rec.new;
            records.push(rec);
        }
        Ok(records)
    }

    /// Keeps one edge (the smallest id) per adjacent vertex pair.
    pub fn simplify(&mut self) -> Vec<SimplifyRecord> {
        let mut by_pair: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
        for (&e, &p) in &self.edges {
            by_pair.entry(p).or_default().push(e);
        }
        let mut records = Vec::new();
        for (pair, ids) in by_pair {
            if ids.len() > 1 {
                for &e in &ids[1..] {
                    self.remove_edge(e).expect("edge present");
                }
                records.push(SimplifyRecord {
                    pair,
                    kept: ids[0],
                    dropped: ids[1..].to_vec(),
                });
            }
        }
        records
    }

    /// `G[C_i, C_j]`: the vertices coloured `i` or `j` and every edge with one
    /// end of each colour. Edge ids are preserved.
    pub fn bipartite_subgraph(&self, f: &VertexColouring, i: Colour, j: Colour) -> Result<MultiGraph> {
        if i == j {
            return Err(Error::Precondition(format!(
                "colour classes must differ, got {i} twice"
            )));
        }
        f.check_covers(self)?;
        let vertices: BTreeSet<VertexId> = self
            .vertices()
            .filter(|&v| {
                let c = f.colour(v).expect("covered");
                c == i || c == j
            })
            .collect();
        let edges: BTreeSet<EdgeId> = self
            .edges()
            .filter(|&(_, (u, v))| {
                let (cu, cv) = (f.colour(u).unwrap(), f.colour(v).unwrap());
                (cu == i && cv == j) || (cu == j && cv == i)
            })
            .map(|(e, _)| e)
            .collect();
        self.subgraph(&vertices, &edges)
    }

    /// Returns the first edge (in id order) that closes a cycle, if any.
    pub fn find_cycle_edge(&self) -> Option<EdgeId> {
        let mut dsu = Dsu::new(self.vertices());
        self.edges().find_map(|(e, (u, v))| (!dsu.union(u, v)).then_some(e))
    }

    pub fn is_forest(&self) -> bool {
        self.find_cycle_edge().is_none()
    }

    /// Partitions the edges of a forest into paths whose ends are exactly
    /// the odd-degree vertices, one path end per odd vertex.
    ///
    /// Components are handled from their lowest vertex, children in id order;
    /// at each vertex the path arriving from the lowest child continues
    /// upward and the remaining arrivals are joined pairwise.
    pub fn forest_path_decomposition(&self) -> Result<Vec<EdgePath>> {
        if let Some(e) = self.find_cycle_edge() {
            return Err(Error::NotAForest(e));
        }
        let mut out = Vec::new();
        let mut visited: BTreeSet<VertexId> = BTreeSet::new();
        for root in self.vertices() {
            if visited.contains(&root) {
                continue;
            }
            // iterative DFS; `order` is a preorder, parents come before children
            let mut order = Vec::new();
            let mut parent_edge: BTreeMap<VertexId, Option<EdgeId>> = BTreeMap::new();
            let mut stack = vec![(root, None)];
            while let Some((v, pe)) = stack.pop() {
                if !visited.insert(v) {
                    continue;
                }
                parent_edge.insert(v, pe);
                order.push(v);
                let mut next: Vec<(VertexId, EdgeId)> = self.incidence[&v]
                    .iter()
                    .filter(|&&e| Some(e) != pe)
                    .map(|&e| (self.opposite(e, v).unwrap(), e))
                    .collect();
                next.sort();
                for (w, e) in next.into_iter().rev() {
                    if !visited.contains(&w) {
                        stack.push((w, Some(e)));
                    }
                }
            }
            // open paths waiting at each vertex, ordered by the child they came from
            let mut arriving: BTreeMap<VertexId, Vec<(VertexId, EdgePath)>> = BTreeMap::new();
            for &v in order.iter().rev() {
                let mut items: Vec<EdgePath> = arriving
                    .remove(&v)
                    .unwrap_or_default()
                    .into_iter()
                    .map(|(_, p)| p)
                    .collect();
                if self.incidence[&v].len() % 2 == 1 {
                    items.insert(0, EdgePath::new(v, Vec::new()));
                }
                let mut rest = items.into_iter();
                if let Some(pe) = parent_edge[&v] {
                    let mut up = rest.next().expect("a path must continue to the parent");
                    up.edges.push(pe);
                    let parent = self.opposite(pe, v).unwrap();
                    arriving.entry(parent).or_default().push((v, up));
                }
                let rest: Vec<EdgePath> = rest.collect();
                debug_assert!(rest.len().is_multiple_of(2));
                for pair in rest.chunks(2) {
                    let (a, b) = (&pair[0], &pair[1]);
                    let mut edges = a.edges.clone();
                    edges.extend(b.edges.iter().rev());
                    out.push(EdgePath::new(a.start, edges));
                }
            }
            for v in arriving.values() {
                debug_assert!(v.is_empty());
            }
        }
        Ok(out)
    }

    /// Compact dense view of the underlying simple graph.
    pub fn dense(&self) -> DenseGraph {
        DenseGraph::from_multigraph(self)
    }
}

/// Sequence of edges traversed from `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgePath {
    pub start: VertexId,
    pub edges: Vec<EdgeId>,
}

impl EdgePath {
    pub fn new(start: VertexId, edges: Vec<EdgeId>) -> Self {
        EdgePath { start, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Follows the edges from `start`; rejects repeated edges but not repeated vertices.
    pub fn walk(&self, g: &MultiGraph) -> Result<Vec<VertexId>> {
        if !g.has_vertex(self.start) {
            return Err(Error::UnknownVertex(self.start));
        }
        let mut seen = BTreeSet::new();
        let mut at = self.start;
        let mut verts = Vec::with_capacity(self.edges.len() + 1);
        verts.push(at);
        for &e in &self.edges {
            if !seen.insert(e) {
                return Err(Error::InvalidPath(format!("edge {e} repeats")));
            }
            at = g
                .opposite(e, at)
                .map_err(|_| Error::InvalidPath(format!("edge {e} does not continue from vertex {at}")))?;
            verts.push(at);
        }
        Ok(verts)
    }

    /// Vertex sequence of a simple path (no vertex repeats).
    pub fn trace(&self, g: &MultiGraph) -> Result<Vec<VertexId>> {
        let verts = self.walk(g)?;
        let mut seen = BTreeSet::new();
        for &v in &verts {
            if !seen.insert(v) {
                return Err(Error::InvalidPath(format!("vertex {v} repeats")));
            }
        }
        Ok(verts)
    }

    /// Vertex sequence of a cycle: length at least two, closes at `start`,
    /// no other vertex repeats. The closing vertex is not repeated in the output.
    pub fn trace_cycle(&self, g: &MultiGraph) -> Result<Vec<VertexId>> {
        let mut verts = self.walk(g)?;
        if self.edges.len() < 2 || verts.last() != Some(&self.start) {
            return Err(Error::InvalidPath("not a closed walk of length at least 2".into()));
        }
        verts.pop();
        let mut seen = BTreeSet::new();
        for &v in &verts {
            if !seen.insert(v) {
                return Err(Error::InvalidPath(format!("vertex {v} repeats inside the cycle")));
            }
        }
        Ok(verts)
    }

    pub fn end(&self, g: &MultiGraph) -> Result<VertexId> {
        Ok(*self.walk(g)?.last().unwrap())
    }

    pub fn reversed(&self, g: &MultiGraph) -> Result<EdgePath> {
        let end = self.end(g)?;
        Ok(EdgePath::new(end, self.edges.iter().rev().copied().collect()))
    }
}

/// Underlying simple graph on indices `0..n`, with the original ids kept alongside.
#[derive(Clone, Debug)]
pub struct DenseGraph {
    pub ids: Vec<VertexId>,
    pub adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

impl DenseGraph {
    pub fn from_multigraph(g: &MultiGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let pos: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let mut matrix = vec![false; n * n];
        for (_, (u, v)) in g.edges() {
            let (a, b) = (pos[&u], pos[&v]);
            matrix[a * n + b] = true;
            matrix[b * n + a] = true;
        }
        let adj = (0..n)
            .map(|a| (0..n).filter(|&b| matrix[a * n + b]).collect())
            .collect();
        DenseGraph { ids, adj, matrix }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.matrix[a * self.ids.len() + b]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Union-find over vertex ids.
pub(crate) struct Dsu {
    parent: BTreeMap<VertexId, VertexId>,
}

impl Dsu {
    pub(crate) fn new(vertices: impl Iterator<Item = VertexId>) -> Self {
        Dsu {
            parent: vertices.map(|v| (v, v)).collect(),
        }
    }

    pub(crate) fn find(&mut self, v: VertexId) -> VertexId {
        let p = self.parent[&v];
        if p == v {
            return v;
        }
        let r = self.find(p);
        self.parent.insert(v, r);
        r
    }

    /// Returns false when `u` and `v` were already connected.
    pub(crate) fn union(&mut self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        self.parent.insert(a.max(b), a.min(b));
        true
    }
}
