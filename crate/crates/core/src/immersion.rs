//! Immersion witnesses, exact small-scale immersion search, and lifting
//! witnesses back through recorded surgeries.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::colouring::VertexColouring;
use crate::error::{Budget, Error, Result};
use crate::graph::{EdgeEntry, EdgeId, EdgePath, MultiGraph, SimplifyRecord, SplitRecord, VertexId};
use crate::oddmorph::{self, MergerRecord};

/// `pattern` immersed in some host: an injective branch map and one route
/// per pattern edge. The route for a pattern edge `{a, b}` (`a < b`) starts
/// at `branch[a]` and ends at `branch[b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImmersionWitness {
    pub pattern: MultiGraph,
    pub branch: BTreeMap<VertexId, VertexId>,
    pub routes: BTreeMap<EdgeId, EdgePath>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum ImmersionFailure {
    MissingBranch { vertex: VertexId },
    UnknownHostVertex { vertex: VertexId },
    NotInjective { image: VertexId },
    MissingRoute { edge: EdgeId },
    UnexpectedRoute { edge: EdgeId },
    BadRoute { edge: EdgeId, detail: String },
    WrongEndpoints { edge: EdgeId },
    EdgeReuse { host_edge: EdgeId },
}

impl fmt::Display for ImmersionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImmersionFailure::MissingBranch { vertex } => write!(f, "missing-branch pattern vertex {vertex}"),
            ImmersionFailure::UnknownHostVertex { vertex } => write!(f, "unknown-host-vertex {vertex}"),
            ImmersionFailure::NotInjective { image } => write!(f, "not-injective host vertex {image}"),
            ImmersionFailure::MissingRoute { edge } => write!(f, "missing-route pattern edge {}", edge.0),
            ImmersionFailure::UnexpectedRoute { edge } => write!(f, "unexpected-route pattern edge {}", edge.0),
            ImmersionFailure::BadRoute { edge, detail } => write!(f, "bad-route pattern edge {}: {detail}", edge.0),
            ImmersionFailure::WrongEndpoints { edge } => write!(f, "wrong-endpoints pattern edge {}", edge.0),
            ImmersionFailure::EdgeReuse { host_edge } => write!(f, "edge-reuse host edge {}", host_edge.0),
        }
    }
}

impl ImmersionFailure {
    pub fn tag(&self) -> &'static str {
        match self {
            ImmersionFailure::MissingBranch { .. } => "missing-branch",
            ImmersionFailure::UnknownHostVertex { .. } => "unknown-host-vertex",
            ImmersionFailure::NotInjective { .. } => "not-injective",
            ImmersionFailure::MissingRoute { .. } => "missing-route",
            ImmersionFailure::UnexpectedRoute { .. } => "unexpected-route",
            ImmersionFailure::BadRoute { .. } => "bad-route",
            ImmersionFailure::WrongEndpoints { .. } => "wrong-endpoints",
            ImmersionFailure::EdgeReuse { .. } => "edge-reuse",
        }
    }
}

/// Checks every witness invariant against `host`.
pub fn check_immersion(host: &MultiGraph, w: &ImmersionWitness) -> std::result::Result<(), ImmersionFailure> {
    let mut images = BTreeSet::new();
    for a in w.pattern.vertices() {
        let Some(&x) = w.branch.get(&a) else {
            return Err(ImmersionFailure::MissingBranch { vertex: a });
        };
        if !host.has_vertex(x) {
            return Err(ImmersionFailure::UnknownHostVertex { vertex: x });
        }
        if !images.insert(x) {
            return Err(ImmersionFailure::NotInjective { image: x });
        }
    }
    if let Some(&a) = w.branch.keys().find(|a| !w.pattern.has_vertex(**a)) {
        return Err(ImmersionFailure::MissingBranch { vertex: a });
    }
    for e in w.pattern.edge_ids() {
        if !w.routes.contains_key(&e) {
            return Err(ImmersionFailure::MissingRoute { edge: e });
        }
    }
    let mut used = BTreeSet::new();
    for (&e, route) in &w.routes {
        let Ok((a, b)) = w.pattern.endpoints(e) else {
            return Err(ImmersionFailure::UnexpectedRoute { edge: e });
        };
        if route.start != w.branch[&a] {
            return Err(ImmersionFailure::WrongEndpoints { edge: e });
        }
        let verts = route.trace(host).map_err(|err| ImmersionFailure::BadRoute {
            edge: e,
            detail: err.to_string(),
        })?;
        if *verts.last().unwrap() != w.branch[&b] {
            return Err(ImmersionFailure::WrongEndpoints { edge: e });
        }
        for &h in &route.edges {
            if !used.insert(h) {
                return Err(ImmersionFailure::EdgeReuse { host_edge: h });
            }
        }
    }
    Ok(())
}

pub fn verify_immersion(host: &MultiGraph, w: &ImmersionWitness) -> bool {
    check_immersion(host, w).is_ok()
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<u32>,
    edges: BTreeMap<u32, [u32; 2]>,
}

#[derive(Serialize, Deserialize)]
struct WitnessDoc {
    pattern: GraphDoc,
    branch: BTreeMap<u32, u32>,
    routes: BTreeMap<u32, Vec<u32>>,
}

impl ImmersionWitness {
    /// Witness of `g` immersed in itself: identity branch map, one-edge routes.
    pub fn identity(g: &MultiGraph) -> Self {
        ImmersionWitness {
            pattern: g.clone(),
            branch: g.vertices().map(|v| (v, v)).collect(),
            routes: g.edges().map(|(e, (u, _))| (e, EdgePath::new(u, vec![e]))).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = WitnessDoc {
            pattern: GraphDoc {
                vertices: self.pattern.vertices().map(|v| v.0).collect(),
                edges: self.pattern.edges().map(|(e, (u, v))| (e.0, [u.0, v.0])).collect(),
            },
            branch: self.branch.iter().map(|(a, x)| (a.0, x.0)).collect(),
            routes: self
                .routes
                .iter()
                .map(|(e, p)| (e.0, p.edges.iter().map(|h| h.0).collect()))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("plain data");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WitnessDoc = serde_json::from_str(text)?;
        let mut pattern = MultiGraph::new();
        for &v in &doc.pattern.vertices {
            pattern.insert_vertex(VertexId(v))?;
        }
        for (&e, &[u, v]) in &doc.pattern.edges {
            pattern.insert_edge(EdgeId(e), VertexId(u), VertexId(v))?;
        }
        let branch: BTreeMap<VertexId, VertexId> =
            doc.branch.iter().map(|(&a, &x)| (VertexId(a), VertexId(x))).collect();
        let mut routes = BTreeMap::new();
        for (&e, ids) in &doc.routes {
            let (a, _) = pattern.endpoints(EdgeId(e))?;
            let start = *branch
                .get(&a)
                .ok_or_else(|| Error::Precondition(format!("no branch vertex for pattern vertex {a}")))?;
            routes.insert(
                EdgeId(e),
                EdgePath::new(start, ids.iter().map(|&h| EdgeId(h)).collect()),
            );
        }
        Ok(ImmersionWitness {
            pattern,
            branch,
            routes,
        })
    }
}

/// Exact immersion test for small hosts.
///
/// Tries, in order: a clique subgraph when the pattern is complete, a greedy
/// shortest-path routing over high-degree branch vertices, and finally an
/// exhaustive search over branch maps (restricted to vertices of large
/// enough degree) with backtracking route packing, pattern edges in
/// decreasing-degree order and candidate routes shortest first. `Ok(None)`
/// is only returned after the exhaustive phase has finished.
pub fn find_immersion(
    host: &MultiGraph,
    pattern: &MultiGraph,
    budget: &mut Budget,
) -> Result<Option<ImmersionWitness>> {
    let k = pattern.vertex_count();
    if k > host.vertex_count() {
        return Ok(None);
    }
    if pattern.edge_count() > host.edge_count() {
        return Ok(None);
    }
    if k == 0 {
        return Ok(Some(ImmersionWitness {
            pattern: pattern.clone(),
            branch: BTreeMap::new(),
            routes: BTreeMap::new(),
        }));
    }
    let complete = is_complete_simple(pattern);
    if complete {
        if let Some(w) = clique_witness(host, pattern, budget)? {
            return Ok(Some(w));
        }
    }
    if let Some(w) = greedy_witness(host, pattern, budget)? {
        return Ok(Some(w));
    }
    exhaustive_witness(host, pattern, complete, budget)
}

fn is_complete_simple(g: &MultiGraph) -> bool {
    let n = g.vertex_count();
    g.is_simple() && g.edge_count() == n * n.saturating_sub(1) / 2
}

fn assemble(
    pattern: &MultiGraph,
    branch: BTreeMap<VertexId, VertexId>,
    routes: BTreeMap<EdgeId, EdgePath>,
) -> ImmersionWitness {
    ImmersionWitness {
        pattern: pattern.clone(),
        branch,
        routes,
    }
}

fn clique_witness(host: &MultiGraph, pattern: &MultiGraph, budget: &mut Budget) -> Result<Option<ImmersionWitness>> {
    let dense = host.dense();
    let k = pattern.vertex_count();
    // vertices with too small a degree can never be in a k-clique
    let candidates: Vec<usize> = (0..dense.len()).filter(|&x| dense.adj[x].len() + 1 >= k).collect();

    fn extend(
        dense: &crate::graph::DenseGraph,
        chosen: &mut Vec<usize>,
        cands: &[usize],
        k: usize,
        budget: &mut Budget,
    ) -> Result<bool> {
        budget.tick()?;
        if chosen.len() == k {
            return Ok(true);
        }
        for (i, &x) in cands.iter().enumerate() {
            if cands.len() - i < k - chosen.len() {
                break;
            }
            let next: Vec<usize> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&y| dense.adjacent(x, y))
                .collect();
            chosen.push(x);
            if extend(dense, chosen, &next, k, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    let mut chosen = Vec::new();
    if !extend(&dense, &mut chosen, &candidates, k, budget)? {
        return Ok(None);
    }
    let branch: BTreeMap<VertexId, VertexId> = pattern.vertices().zip(chosen.iter().map(|&x| dense.ids[x])).collect();
    let routes = pattern
        .edges()
        .map(|(e, (a, b))| {
            let (x, y) = (branch[&a], branch[&b]);
            (e, EdgePath::new(x, vec![host.edges_between(x, y)[0]]))
        })
        .collect();
    Ok(Some(assemble(pattern, branch, routes)))
}

/// Shortest route from `s` to `t` avoiding `used`, by breadth-first search.
fn shortest_route(host: &MultiGraph, s: VertexId, t: VertexId, used: &BTreeSet<EdgeId>) -> Option<Vec<EdgeId>> {
    let mut prev: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        if x == t {
            let mut edges = Vec::new();
            let mut at = t;
            while at != s {
                let (p, e) = prev[&at];
                edges.push(e);
                at = p;
            }
            edges.reverse();
            return Some(edges);
        }
        for &e in host.incident(x).ok()? {
            if used.contains(&e) {
                continue;
            }
            let y = host.opposite(e, x).ok()?;
            if seen.insert(y) {
                prev.insert(y, (x, e));
                queue.push_back(y);
            }
        }
    }
    None
}

fn pattern_edge_order(pattern: &MultiGraph) -> Vec<EdgeEntry> {
    let mut edges: Vec<_> = pattern.edges().collect();
    let deg = |v: VertexId| pattern.degree(v).unwrap();
    edges.sort_by_key(|&(e, (a, b))| (std::cmp::Reverse(deg(a) + deg(b)), e));
    edges
}

fn greedy_witness(host: &MultiGraph, pattern: &MultiGraph, budget: &mut Budget) -> Result<Option<ImmersionWitness>> {
    let mut by_degree: Vec<VertexId> = host.vertices().collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(host.degree(v).unwrap()), v));
    let mut pverts: Vec<VertexId> = pattern.vertices().collect();
    pverts.sort_by_key(|&v| (std::cmp::Reverse(pattern.degree(v).unwrap()), v));
    let k = pverts.len();
    let order = pattern_edge_order(pattern);
    for offset in 0..=by_degree.len().saturating_sub(k).min(4) {
        budget.charge(host.edge_count() as u64 + 1)?;
        let branch: BTreeMap<VertexId, VertexId> = pverts
            .iter()
            .copied()
            .zip(by_degree[offset..offset + k].iter().copied())
            .collect();
        let mut used = BTreeSet::new();
        let mut routes = BTreeMap::new();
        let mut ok = true;
        for &(e, (a, b)) in &order {
            match shortest_route(host, branch[&a], branch[&b], &used) {
                Some(edges) => {
                    used.extend(edges.iter().copied());
                    routes.insert(e, EdgePath::new(branch[&a], edges));
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(Some(assemble(pattern, branch, routes)));
        }
    }
    Ok(None)
}

/// All simple paths of exactly `len` edges from `s` to `t` avoiding `used`.
fn paths_of_length(
    host: &MultiGraph,
    s: VertexId,
    t: VertexId,
    len: usize,
    used: &BTreeSet<EdgeId>,
    budget: &mut Budget,
) -> Result<Vec<Vec<EdgeId>>> {
    #[allow(clippy::too_many_arguments)]
    fn go(
        host: &MultiGraph,
        at: VertexId,
        t: VertexId,
        left: usize,
        used: &BTreeSet<EdgeId>,
        on_path: &mut BTreeSet<VertexId>,
        edges: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.tick()?;
        if left == 0 {
            if at == t {
                out.push(edges.clone());
            }
            return Ok(());
        }
        if at == t {
            return Ok(());
        }
        for &e in host.incident(at)? {
            if used.contains(&e) {
                continue;
            }
            let y = host.opposite(e, at)?;
            if on_path.contains(&y) || (y == t && left != 1) {
                continue;
            }
            on_path.insert(y);
            edges.push(e);
            go(host, y, t, left - 1, used, on_path, edges, out, budget)?;
            edges.pop();
            on_path.remove(&y);
        }
        Ok(())
    }
    let mut out = Vec::new();
    let mut on_path = BTreeSet::from([s]);
    go(host, s, t, len, used, &mut on_path, &mut Vec::new(), &mut out, budget)?;
    Ok(out)
}

fn exhaustive_witness(
    host: &MultiGraph,
    pattern: &MultiGraph,
    complete: bool,
    budget: &mut Budget,
) -> Result<Option<ImmersionWitness>> {
    let mut pverts: Vec<VertexId> = pattern.vertices().collect();
    pverts.sort_by_key(|&v| (std::cmp::Reverse(pattern.degree(v).unwrap()), v));
    let hverts: Vec<VertexId> = host.vertices().collect();
    let order = pattern_edge_order(pattern);
    let max_len = host.vertex_count().saturating_sub(1);

    // component labels: adjacent pattern vertices must land in one component
    let mut comp: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &v in &hverts {
        if comp.contains_key(&v) {
            continue;
        }
        let label = comp.len();
        let mut queue = VecDeque::from([v]);
        comp.insert(v, label);
        while let Some(x) = queue.pop_front() {
            for y in host.neighbours(x)? {
                if let std::collections::btree_map::Entry::Vacant(slot) = comp.entry(y) {
                    slot.insert(label);
                    queue.push_back(y);
                }
            }
        }
    }

    struct Ctx<'c> {
        host: &'c MultiGraph,
        pattern: &'c MultiGraph,
        pverts: Vec<VertexId>,
        hverts: Vec<VertexId>,
        order: Vec<EdgeEntry>,
        comp: BTreeMap<VertexId, usize>,
        complete: bool,
        max_len: usize,
    }

    fn pack(
        cx: &Ctx<'_>,
        idx: usize,
        branch: &BTreeMap<VertexId, VertexId>,
        used: &mut BTreeSet<EdgeId>,
        routes: &mut BTreeMap<EdgeId, EdgePath>,
        budget: &mut Budget,
    ) -> Result<bool> {
        budget.tick()?;
        if idx == cx.order.len() {
            return Ok(true);
        }
        let (e, (a, b)) = cx.order[idx];
        let (s, t) = (branch[&a], branch[&b]);
        for len in 1..=cx.max_len {
            for path in paths_of_length(cx.host, s, t, len, used, budget)? {
                used.extend(path.iter().copied());
                routes.insert(e, EdgePath::new(s, path.clone()));
                if pack(cx, idx + 1, branch, used, routes, budget)? {
                    return Ok(true);
                }
                routes.remove(&e);
                for h in &path {
                    used.remove(h);
                }
            }
        }
        Ok(false)
    }

    fn assign(
        cx: &Ctx<'_>,
        idx: usize,
        branch: &mut BTreeMap<VertexId, VertexId>,
        taken: &mut BTreeSet<VertexId>,
        budget: &mut Budget,
    ) -> Result<Option<BTreeMap<EdgeId, EdgePath>>> {
        budget.tick()?;
        if idx == cx.pverts.len() {
            let mut routes = BTreeMap::new();
            return Ok(pack(cx, 0, branch, &mut BTreeSet::new(), &mut routes, budget)?.then_some(routes));
        }
        let a = cx.pverts[idx];
        let need = cx.pattern.degree(a)?;
        let prev_image = if cx.complete && idx > 0 {
            Some(branch[&cx.pverts[idx - 1]])
        } else {
            None
        };
        for &x in &cx.hverts {
            if taken.contains(&x) || cx.host.degree(x)? < need {
                continue;
            }
            // all vertices of a complete pattern are interchangeable
            if prev_image.is_some_and(|p| x <= p) {
                continue;
            }
            let same_component = cx
                .pattern
                .neighbours(a)?
                .iter()
                .filter_map(|b| branch.get(b))
                .all(|y| cx.comp[y] == cx.comp[&x]);
            if !same_component {
                continue;
            }
            branch.insert(a, x);
            taken.insert(x);
            if let Some(routes) = assign(cx, idx + 1, branch, taken, budget)? {
                return Ok(Some(routes));
            }
            branch.remove(&a);
            taken.remove(&x);
        }
        Ok(None)
    }

    let cx = Ctx {
        host,
        pattern,
        pverts,
        hverts,
        order,
        comp,
        complete,
        max_len,
    };
    let mut branch = BTreeMap::new();
    match assign(&cx, 0, &mut branch, &mut BTreeSet::new(), budget)? {
        Some(routes) => Ok(Some(assemble(pattern, branch, routes))),
        None => Ok(None),
    }
}

/// One recorded surgery.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum LogEntry {
    SplitOff(SplitRecord),
    CycleDeleted { edges: Vec<EdgeEntry> },
    Merger(MergerRecord),
    VertexRemoved { vertex: VertexId },
    EdgeRemoved { edge: EdgeId, ends: (VertexId, VertexId) },
    SimplifyKept(SimplifyRecord),
}

/// Ordered trace of surgeries applied to a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationLog {
    pub entries: Vec<LogEntry>,
}

impl OperationLog {
    pub fn new() -> Self {
        OperationLog::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: LogEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: OperationLog) {
        self.entries.extend(other.entries);
    }

    pub fn mergers(&self) -> impl Iterator<Item = &MergerRecord> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Merger(m) => Some(m),
            _ => None,
        })
    }

    /// Re-applies every entry to a copy of `original`, checking that each
    /// surgery produces exactly the recorded ids.
    pub fn replay(&self, original: &MultiGraph) -> Result<MultiGraph> {
        let mut g = original.clone();
        for (i, entry) in self.entries.iter().enumerate() {
            let mismatch = |what: &str| Error::audit("log replay", format!("entry {i}: {what}"));
            match entry {
                LogEntry::SplitOff(rec) => {
                    if g.split_off(rec.e1, rec.e2)? != *rec {
                        return Err(mismatch("split-off produced a different edge"));
                    }
                }
                LogEntry::CycleDeleted { edges } => {
                    for &(e, ends) in edges {
                        if g.remove_edge(e)? != ends {
                            return Err(mismatch("deleted cycle edge has other endpoints"));
                        }
                    }
                }
                LogEntry::Merger(rec) => {
                    let (merged, reattached, cancelled) = oddmorph::merge_vertices(&mut g, rec.u1, rec.u2, &rec.paths)?;
                    if merged != rec.merged || reattached != rec.reattached || cancelled != rec.cancelled {
                        return Err(mismatch("merger differs from the record"));
                    }
                }
                LogEntry::VertexRemoved { vertex } => g.remove_vertex(*vertex)?,
                LogEntry::EdgeRemoved { edge, ends } => {
                    if g.remove_edge(*edge)? != *ends {
                        return Err(mismatch("removed edge has other endpoints"));
                    }
                }
                LogEntry::SimplifyKept(rec) => {
                    if g.endpoints(rec.kept)? != rec.pair {
                        return Err(mismatch("kept edge has other endpoints"));
                    }
                    for &e in &rec.dropped {
                        if g.remove_edge(e)? != rec.pair {
                            return Err(mismatch("dropped edge is not parallel to the kept one"));
                        }
                    }
                }
            }
        }
        Ok(g)
    }
}

/// A graph together with the log of every surgery applied to it.
#[derive(Clone, Debug)]
pub struct TracedGraph {
    pub graph: MultiGraph,
    pub log: OperationLog,
}

impl TracedGraph {
    pub fn new(graph: MultiGraph) -> Self {
        TracedGraph {
            graph,
            log: OperationLog::new(),
        }
    }

    pub fn split_off(&mut self, e1: EdgeId, e2: EdgeId) -> Result<SplitRecord> {
        let rec = self.graph.split_off(e1, e2)?;
        self.log.push(LogEntry::SplitOff(rec));
        Ok(rec)
    }

    /// Splits a path; returns the id of the resulting edge.
    pub fn split_path(&mut self, path: &EdgePath) -> Result<EdgeId> {
        let recs = self.graph.split_path(path)?;
        let last = recs.last().map(|r| r.new).unwrap_or(path.edges[0]);
        self.log.entries.extend(recs.into_iter().map(LogEntry::SplitOff));
        Ok(last)
    }

    pub fn split_odd_path(&mut self, f: &VertexColouring, path: &EdgePath) -> Result<EdgeId> {
        oddmorph::check_odd_path(&self.graph, f, path)?;
        self.split_path(path)
    }

    pub fn delete_bicoloured_cycle(&mut self, f: &VertexColouring, cycle: &EdgePath) -> Result<()> {
        let edges = oddmorph::apply_delete_bicoloured_cycle(&mut self.graph, f, cycle)?;
        self.log.push(LogEntry::CycleDeleted { edges });
        Ok(())
    }

    pub fn merger(
        &mut self,
        f: &mut VertexColouring,
        u1: VertexId,
        u2: VertexId,
        paths: &[EdgePath],
    ) -> Result<VertexId> {
        let rec = oddmorph::apply_merger(&mut self.graph, f, u1, u2, paths)?;
        let merged = rec.merged;
        self.log.push(LogEntry::Merger(rec));
        Ok(merged)
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Result<()> {
        let ends = self.graph.remove_edge(e)?;
        self.log.push(LogEntry::EdgeRemoved { edge: e, ends });
        Ok(())
    }

    pub fn remove_isolated_vertices(&mut self) -> Vec<VertexId> {
        let removed = self.graph.remove_isolated_vertices();
        self.log
            .entries
            .extend(removed.iter().map(|&vertex| LogEntry::VertexRemoved { vertex }));
        removed
    }

    pub fn simplify(&mut self) {
        let recs = self.graph.simplify();
        self.log.entries.extend(recs.into_iter().map(LogEntry::SimplifyKept));
    }
}

/// A route as parallel vertex and edge sequences.
#[derive(Clone, Debug)]
struct Route {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Route {
    /// Cuts closed sub-walks until no vertex repeats; the edge set only shrinks.
    fn shortcut(&mut self) {
        let mut verts: Vec<VertexId> = vec![self.vertices[0]];
        let mut edges: Vec<EdgeId> = Vec::new();
        let mut index: BTreeMap<VertexId, usize> = BTreeMap::from([(self.vertices[0], 0)]);
        for (i, &e) in self.edges.iter().enumerate() {
            let y = self.vertices[i + 1];
            if let Some(&j) = index.get(&y) {
                for v in verts.drain(j + 1..) {
                    index.remove(&v);
                }
                edges.truncate(j);
            } else {
                index.insert(y, verts.len());
                verts.push(y);
                edges.push(e);
            }
        }
        self.vertices = verts;
        self.edges = edges;
    }

    fn splice(&mut self, at: usize, path_vertices: &[VertexId], path_edges: &[EdgeId]) {
        // vertices[at] is replaced by the whole path
        self.vertices.splice(at..=at, path_vertices.iter().copied());
        self.edges.splice(at..at, path_edges.iter().copied());
    }
}

/// Carries a witness on the graph at the end of `log` back to the graph the
/// log started from.
///
/// Entries are undone newest first. A split-off edge used by a route is
/// replaced by the two edges it came from. A route through a merged vertex
/// goes straight through the original vertex when both of its edges there
/// came from the same side; otherwise an unused deleted path of that merger
/// is spliced in to cross from one side to the other. A merged branch vertex
/// is placed on whichever original vertex most of its route ends came from.
/// Deletions need no work. Walks created by substitution are shortcut back
/// to paths, which only drops edges.
pub fn lift_witness(w: &ImmersionWitness, derived: &MultiGraph, log: &OperationLog) -> Result<ImmersionWitness> {
    if let Err(fail) = check_immersion(derived, w) {
        return Err(Error::Precondition(format!(
            "witness does not verify on the derived graph: {fail}"
        )));
    }
    let mut branch = w.branch.clone();
    let mut routes: BTreeMap<EdgeId, Route> = w
        .routes
        .iter()
        .map(|(&e, p)| {
            let vertices = p.trace(derived).expect("verified");
            (
                e,
                Route {
                    vertices,
                    edges: p.edges.clone(),
                },
            )
        })
        .collect();

    for entry in log.entries.iter().rev() {
        match entry {
            LogEntry::SplitOff(rec) => {
                for route in routes.values_mut() {
                    if let Some(i) = route.edges.iter().position(|&e| e == rec.new) {
                        let (first, second) = if route.vertices[i] == rec.u {
                            (rec.e1, rec.e2)
                        } else {
                            (rec.e2, rec.e1)
                        };
                        route.edges.splice(i..=i, [first, second]);
                        route.vertices.insert(i + 1, rec.v);
                        route.shortcut();
                        break;
                    }
                }
            }
            LogEntry::Merger(rec) => lift_merger(rec, &mut branch, &mut routes)?,
            LogEntry::CycleDeleted { .. }
            | LogEntry::VertexRemoved { .. }
            | LogEntry::EdgeRemoved { .. }
            | LogEntry::SimplifyKept(_) => {}
        }
    }
    let routes = routes
        .into_iter()
        .map(|(e, r)| (e, EdgePath::new(r.vertices[0], r.edges)))
        .collect();
    Ok(ImmersionWitness {
        pattern: w.pattern.clone(),
        branch,
        routes,
    })
}

fn lift_merger(
    rec: &MergerRecord,
    branch: &mut BTreeMap<VertexId, VertexId>,
    routes: &mut BTreeMap<EdgeId, Route>,
) -> Result<()> {
    let origin: BTreeMap<EdgeId, VertexId> = rec.reattached.iter().map(|r| (r.edge, r.from)).collect();
    let side = |e: &EdgeId| -> Result<VertexId> {
        origin.get(e).copied().ok_or_else(|| {
            Error::audit(
                "lift",
                format!("edge {e} at merged vertex {} has no origin", rec.merged),
            )
        })
    };
    let mut pool = rec.paths.iter();

    // where to put a merged branch vertex: the side most of its route ends came from
    let anchor = if branch.values().any(|&x| x == rec.merged) {
        let mut from_u1 = 0usize;
        let mut from_u2 = 0usize;
        for r in routes.values() {
            let ends = [
                (r.vertices[0] == rec.merged).then(|| r.edges[0]),
                (*r.vertices.last().unwrap() == rec.merged).then(|| *r.edges.last().unwrap()),
            ];
            for e in ends.into_iter().flatten() {
                if side(&e)? == rec.u1 {
                    from_u1 += 1;
                } else {
                    from_u2 += 1;
                }
            }
        }
        let anchor = if from_u2 > from_u1 { rec.u2 } else { rec.u1 };
        for x in branch.values_mut() {
            if *x == rec.merged {
                *x = anchor;
            }
        }
        Some(anchor)
    } else {
        None
    };

    for route in routes.values_mut() {
        let Some(k) = route.vertices.iter().position(|&x| x == rec.merged) else {
            continue;
        };
        if route.vertices[k + 1..].contains(&rec.merged) {
            return Err(Error::audit("lift", "route visits the merged vertex twice"));
        }
        let last = route.vertices.len() - 1;
        // sides on which the route enters and leaves the merged vertex
        let (enter, leave) = if k == 0 {
            (anchor.expect("route starts at a branch vertex"), side(&route.edges[0])?)
        } else if k == last {
            (
                side(&route.edges[k - 1])?,
                anchor.expect("route ends at a branch vertex"),
            )
        } else {
            (side(&route.edges[k - 1])?, side(&route.edges[k])?)
        };
        if enter == leave {
            route.vertices[k] = enter;
        } else {
            let path = pool.next().ok_or(Error::PoolExhausted(rec.merged))?;
            let (mut verts, mut edges) = (path.vertices.clone(), path.edges.clone());
            if enter == rec.u2 {
                verts.reverse();
                edges.reverse();
            }
            route.splice(k, &verts, &edges);
        }
        route.shortcut();
    }
    Ok(())
}
