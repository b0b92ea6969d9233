//! Clique-immersion extraction from a large oddomorphism.
//!
//! The reduction runs as a loop over a single [`TracedGraph`]: normalize,
//! split every 2-coloured forest into paths between odd vertices on a copy,
//! and either hand the simplified result to [`find_immersion`] or merge two
//! same-coloured vertices joined by a large parallel bundle and go round
//! again. The witness found at the bottom is lifted through the whole log,
//! and checked against the input graph before it is returned.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::colouring::{Colour, VertexColouring};
use crate::error::{Budget, Error, Result};
use crate::graph::{EdgeId, EdgePath, MultiGraph, VertexId};
use crate::immersion::{check_immersion, find_immersion, lift_witness, ImmersionWitness, OperationLog, TracedGraph};
use crate::oddmorph::{check_oddomorphism, OddReport, ParityClass};

/// Number of colours `C(t,2)·(7t+7)` that guarantees a `K_t` immersion.
pub fn required_colours(t: u32) -> u64 {
    let t = t as u64;
    t * t.saturating_sub(1) / 2 * (7 * t + 7)
}

/// Counters collected while extracting; every audit that ran is counted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExtractReport {
    /// Mergers applied, which is also the recursion depth reached.
    pub mergers: usize,
    pub base_case_hits: usize,
    pub normalize_steps: usize,
    pub cycles_deleted: usize,
    pub paths_split: usize,
    pub audits: usize,
    /// Minimum degree of the simplified graph at each level, top first.
    pub level_min_degrees: Vec<usize>,
    pub log_entries: usize,
}

/// Result of a successful extraction.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub witness: ImmersionWitness,
    pub report: ExtractReport,
    /// Every surgery from the input graph to the graph the base case ran on.
    pub log: OperationLog,
}

fn audit_odd(g: &MultiGraph, f: &VertexColouring, stage: &str, report: &mut ExtractReport) -> Result<OddReport> {
    report.audits += 1;
    check_oddomorphism(g, f).map_err(|fail| {
        Error::audit(
            stage,
            format!(
                "oddomorphism lost: {fail} ({} vertices, {} edges)",
                g.vertex_count(),
                g.edge_count()
            ),
        )
    })
}

/// Edges grouped by the unordered pair of colours at their ends.
fn colour_pair_groups(g: &MultiGraph, f: &VertexColouring) -> BTreeMap<(Colour, Colour), Vec<EdgeId>> {
    let mut groups: BTreeMap<(Colour, Colour), Vec<EdgeId>> = BTreeMap::new();
    for (e, (u, v)) in g.edges() {
        let (a, b) = (f.colour(u).expect("covered"), f.colour(v).expect("covered"));
        groups.entry((a.min(b), a.max(b))).or_default().push(e);
    }
    groups
}

fn group_graph(g: &MultiGraph, edges: &[EdgeId]) -> MultiGraph {
    let mut vertices = BTreeSet::new();
    for &e in edges {
        let (u, v) = g.endpoints(e).expect("live edge");
        vertices.insert(u);
        vertices.insert(v);
    }
    g.subgraph(&vertices, &edges.iter().copied().collect())
        .expect("edges of g")
}

/// Breadth-first tree from `s` inside `h`: parent edge of every reached vertex.
fn bfs_tree(h: &MultiGraph, s: VertexId, skip: Option<EdgeId>) -> BTreeMap<VertexId, Option<(VertexId, EdgeId)>> {
    let mut prev = BTreeMap::from([(s, None)]);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &e in h.incident(x).expect("vertex of h") {
            if Some(e) == skip {
                continue;
            }
            let y = h.opposite(e, x).expect("incident");
            if let std::collections::btree_map::Entry::Vacant(slot) = prev.entry(y) {
                slot.insert(Some((x, e)));
                queue.push_back(y);
            }
        }
    }
    prev
}

fn tree_path(prev: &BTreeMap<VertexId, Option<(VertexId, EdgeId)>>, s: VertexId, t: VertexId) -> EdgePath {
    let mut edges = Vec::new();
    let mut at = t;
    while let Some((p, e)) = prev[&at] {
        edges.push(e);
        at = p;
    }
    debug_assert_eq!(at, s);
    edges.reverse();
    EdgePath::new(s, edges)
}

/// First 2-coloured cycle: colour pairs in order, closed by the lowest edge id.
fn find_bicoloured_cycle(g: &MultiGraph, groups: &BTreeMap<(Colour, Colour), Vec<EdgeId>>) -> Option<EdgePath> {
    for edges in groups.values() {
        let h = group_graph(g, edges);
        if let Some(e) = h.find_cycle_edge() {
            let (u, v) = h.endpoints(e).unwrap();
            let prev = bfs_tree(&h, v, Some(e));
            let mut cycle = tree_path(&prev, v, u);
            cycle.edges.insert(0, e);
            cycle.start = u;
            return Some(cycle);
        }
    }
    None
}

/// First path of length at least 2 inside one `G[C_i, C_j]` joining odd
/// vertices of different colours: colour pairs in order, then the lowest
/// starting vertex, then the lowest end.
fn find_odd_path(
    g: &MultiGraph,
    f: &VertexColouring,
    classes: &BTreeMap<VertexId, ParityClass>,
    groups: &BTreeMap<(Colour, Colour), Vec<EdgeId>>,
) -> Option<EdgePath> {
    let odd = |v: &VertexId| classes[v] == ParityClass::Odd;
    for edges in groups.values() {
        let h = group_graph(g, edges);
        for x in h.vertices().filter(odd) {
            let prev = bfs_tree(&h, x, None);
            let cx = f.colour(x);
            let far = prev
                .iter()
                .filter(|(y, p)| odd(y) && f.colour(**y) != cx && p.is_some_and(|(q, _)| q != x))
                .map(|(&y, _)| y)
                .next();
            if let Some(y) = far {
                return Some(tree_path(&prev, x, y));
            }
        }
    }
    None
}

/// Deletes 2-coloured cycles and splits 2-coloured paths between odd
/// vertices of different colours until neither exists, auditing the
/// oddomorphism after every step. Returns the final parity classes.
pub fn normalize(tg: &mut TracedGraph, f: &VertexColouring, report: &mut ExtractReport) -> Result<OddReport> {
    let mut classes = audit_odd(&tg.graph, f, "normalize (input)", report)?;
    loop {
        let before = tg.graph.edge_count();
        let groups = colour_pair_groups(&tg.graph, f);
        if let Some(cycle) = find_bicoloured_cycle(&tg.graph, &groups) {
            tg.delete_bicoloured_cycle(f, &cycle)?;
            report.cycles_deleted += 1;
        } else if let Some(path) = find_odd_path(&tg.graph, f, &classes.classes, &groups) {
            tg.split_odd_path(f, &path)?;
            report.paths_split += 1;
        } else {
            return Ok(classes);
        }
        report.normalize_steps += 1;
        if tg.graph.edge_count() >= before {
            return Err(Error::audit("normalize", "step did not reduce the edge count"));
        }
        classes = audit_odd(&tg.graph, f, "normalize", report)?;
    }
}

/// Outcome of the split phase on a normalized graph.
struct SplitPhase {
    traced: TracedGraph,
    /// For each edge of the split graph, the 2-coloured path it replaced.
    origin: BTreeMap<EdgeId, EdgePath>,
}

fn split_phase(
    normalized: &MultiGraph,
    f: &VertexColouring,
    classes: &BTreeMap<VertexId, ParityClass>,
    required: u64,
    report: &mut ExtractReport,
) -> Result<SplitPhase> {
    let mut traced = TracedGraph::new(normalized.clone());
    let mut origin = BTreeMap::new();
    for edges in colour_pair_groups(normalized, f).values() {
        let forest = group_graph(normalized, edges);
        for piece in forest.forest_path_decomposition()? {
            let verts = piece.trace(normalized)?;
            for end in [verts[0], *verts.last().unwrap()] {
                if classes[&end] != ParityClass::Odd {
                    return Err(Error::audit(
                        "split phase",
                        format!("path piece ends at non-odd vertex {end}"),
                    ));
                }
            }
            let e = traced.split_path(&piece)?;
            origin.insert(e, piece);
        }
    }
    for v in traced.remove_isolated_vertices() {
        if classes[&v] != ParityClass::Even {
            return Err(Error::audit("split phase", format!("removed vertex {v} is not even")));
        }
    }
    report.audits += 1;
    for v in traced.graph.vertices() {
        if classes[&v] != ParityClass::Odd {
            return Err(Error::audit("split phase", format!("even vertex {v} kept an edge")));
        }
        if (traced.graph.degree(v)? as u64) + 1 < required {
            return Err(Error::audit(
                "degree bound",
                format!(
                    "odd vertex {v} has degree {} < {}",
                    traced.graph.degree(v)?,
                    required - 1
                ),
            ));
        }
    }
    report.audits += 1;
    Ok(SplitPhase { traced, origin })
}

/// Lexicographically least pair with at least `k` parallel edges.
fn parallel_bundle(g: &MultiGraph, k: usize) -> Option<(VertexId, VertexId)> {
    let mut mult: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for (_, pair) in g.edges() {
        *mult.entry(pair).or_insert(0) += 1;
    }
    mult.into_iter().find(|&(_, m)| m >= k).map(|(pair, _)| pair)
}

fn trivial_witness(g: &MultiGraph, t: u32) -> Result<ImmersionWitness> {
    let pattern = MultiGraph::complete(t);
    match t {
        0 => Ok(ImmersionWitness {
            pattern,
            branch: BTreeMap::new(),
            routes: BTreeMap::new(),
        }),
        1 => {
            let v = g
                .vertices()
                .next()
                .ok_or_else(|| Error::Precondition("graph has no vertex".into()))?;
            Ok(ImmersionWitness {
                pattern,
                branch: [(VertexId(1), v)].into(),
                routes: BTreeMap::new(),
            })
        }
        _ => {
            let (e, (u, v)) = g
                .edges()
                .next()
                .ok_or_else(|| Error::Precondition("graph has no edge".into()))?;
            Ok(ImmersionWitness {
                pattern,
                branch: [(VertexId(1), u), (VertexId(2), v)].into(),
                routes: [(EdgeId(1), EdgePath::new(u, vec![e]))].into(),
            })
        }
    }
}

/// Finds a `K_t` immersion in `g` from an oddomorphism `f` with at least
/// [`required_colours`]`(t)` colours.
pub fn extract_clique_immersion(
    g: &MultiGraph,
    f: &VertexColouring,
    t: u32,
    budget: &mut Budget,
) -> Result<Extraction> {
    let required = required_colours(t);
    if (f.colours() as u64) < required {
        return Err(Error::Precondition(format!(
            "need at least {required} colours for t = {t}, colouring has {}",
            f.colours()
        )));
    }
    if !g.is_simple() {
        return Err(Error::Precondition("input graph must be simple".into()));
    }
    if let Err(fail) = check_oddomorphism(g, f) {
        return Err(Error::Precondition(format!("not an oddomorphism: {fail}")));
    }
    let mut report = ExtractReport {
        audits: 1,
        ..ExtractReport::default()
    };

    if t <= 2 {
        let witness = trivial_witness(g, t)?;
        report.base_case_hits = 1;
        return Ok(Extraction {
            witness,
            report,
            log: OperationLog::new(),
        });
    }

    let bundle = (t * (t - 1) / 2) as usize;
    let base_degree = (7 * t + 7) as usize;
    let mut tg = TracedGraph::new(g.clone());
    let mut f = f.clone();
    loop {
        budget.charge(tg.graph.edge_count() as u64 + 1)?;
        let classes = normalize(&mut tg, &f, &mut report)?;
        let split = split_phase(&tg.graph, &f, &classes.classes, required, &mut report)?;
        let mut simple = split.traced.clone();
        simple.simplify();
        let min_degree = simple.graph.min_degree().unwrap_or(0);
        report.level_min_degrees.push(min_degree);

        if min_degree >= base_degree {
            report.base_case_hits += 1;
            let pattern = MultiGraph::complete(t);
            let found = find_immersion(&simple.graph, &pattern, budget)?.ok_or_else(|| {
                Error::audit(
                    "base case",
                    format!(
                        "no K_{t} immersion in a graph of minimum degree {min_degree} ({} vertices)",
                        simple.graph.vertex_count()
                    ),
                )
            })?;
            let mut log = tg.log;
            log.extend(simple.log);
            report.log_entries = log.len();
            let witness = lift_witness(&found, &simple.graph, &log)?;
            report.audits += 1;
            if let Err(fail) = check_immersion(g, &witness) {
                return Err(Error::audit(
                    "final lift",
                    format!("witness does not verify on the input: {fail}"),
                ));
            }
            return Ok(Extraction { witness, report, log });
        }

        let (x, y) = parallel_bundle(&split.traced.graph, bundle).ok_or_else(|| {
            Error::audit(
                "merger case",
                format!("minimum degree {min_degree} < {base_degree} but no pair has {bundle} parallel edges"),
            )
        })?;
        if f.colour(x) != f.colour(y) {
            return Err(Error::audit(
                "merger case",
                format!("bundle ends {x} and {y} have different colours"),
            ));
        }
        // the bundle's edges stand for paths of the normalized graph, which is `tg.graph`
        let paths: Vec<EdgePath> = split.traced.graph.edges_between(x, y)[..bundle]
            .iter()
            .map(|e| split.origin[e].clone())
            .collect();
        let before = tg.graph.vertex_count();
        tg.merger(&mut f, x, y, &paths)?;
        report.mergers += 1;
        if tg.graph.vertex_count() >= before || report.mergers > g.vertex_count() {
            return Err(Error::audit("merger case", "merger did not make progress"));
        }
        audit_odd(&tg.graph, &f, "merger", &mut report)?;
    }
}

/// Graphs with large oddomorphisms built to exercise specific pipeline paths.
pub mod fixtures {
    use super::*;

    /// An 84-colour oddomorphism on 169 vertices whose split graph has a
    /// vertex of degree 2, so extraction with `t = 3` must merge.
    ///
    /// Vertices `x = 1`, `y = 2`, `w = 3` get colour 1 and `o_k = k + 2`
    /// gets colour `k` for `k` in `2..=84`; the `o_k` form a clique. For `k`
    /// in `A = 2..=41` there is an edge `x o_k` and an even vertex of colour
    /// `k` adjacent to `y` and `w`; for `k` in `42..=84` there is an edge
    /// `w o_k` and an even vertex of colour `k` adjacent to `x` and `y`.
    /// Each of `x, y, w` thus sees every other colour exactly once.
    ///
    /// Splitting the 2-coloured paths leaves 43 parallel `xy` edges and 40
    /// parallel `yw` edges, so `y` has only two neighbours after
    /// simplification and `x, y` are merged. Once merged, the new vertex is
    /// even and normalization splits each `o_k`–merged–`z`–`w` path, so the
    /// base case runs on a clique through `w` whose edges cross the merged
    /// vertex and need the merger's deleted paths when lifted.
    pub fn merger_case() -> (MultiGraph, VertexColouring) {
        let (x, y, w) = (1u32, 2u32, 3u32);
        let o = |k: u32| k + 2;
        let mut edges = Vec::new();
        for j in 2..=84 {
            for k in j + 1..=84 {
                edges.push((o(j), o(k)));
            }
        }
        let mut colours = vec![1, 1, 1];
        colours.extend(2..=84);
        let mut next = 87;
        for k in 2..=84u32 {
            let z = next;
            next += 1;
            colours.push(k);
            if k <= 41 {
                edges.extend([(x, o(k)), (y, z), (w, z)]);
            } else {
                edges.extend([(w, o(k)), (x, z), (y, z)]);
            }
        }
        let g = MultiGraph::from_edges(next - 1, &edges).expect("valid fixture");
        let f = VertexColouring::from_slice(84, &colours).expect("valid colours");
        (g, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oddmorph::verify_oddomorphism;

    #[test]
    fn required_colour_counts() {
        assert_eq!(required_colours(1), 0);
        assert_eq!(required_colours(2), 21);
        assert_eq!(required_colours(3), 84);
        assert_eq!(required_colours(4), 210);
    }

    #[test]
    fn normalize_p4() {
        let g = MultiGraph::path(4);
        let f = VertexColouring::from_slice(2, &[1, 2, 1, 2]).unwrap();
        let mut tg = TracedGraph::new(g.clone());
        let mut report = ExtractReport::default();
        normalize(&mut tg, &f, &mut report).unwrap();
        assert_eq!(tg.graph.edge_count(), 1);
        assert_eq!(tg.graph.edges_between(VertexId(1), VertexId(4)).len(), 1);
        assert_eq!(tg.graph.isolated_vertices(), vec![VertexId(2), VertexId(3)]);
        assert_eq!(report.paths_split, 1);
        assert_eq!(tg.log.replay(&g).unwrap(), tg.graph);
    }

    #[test]
    fn normalize_k33_leaves_forest() {
        let g = MultiGraph::complete_bipartite(3, 3);
        let f = VertexColouring::from_slice(2, &[1, 1, 1, 2, 2, 2]).unwrap();
        assert!(verify_oddomorphism(&g, &f));
        let mut tg = TracedGraph::new(g.clone());
        let mut report = ExtractReport::default();
        let classes = normalize(&mut tg, &f, &mut report).unwrap();
        assert!(tg.graph.is_forest());
        assert!(report.cycles_deleted >= 1);
        assert!(classes.classes.values().all(|&c| c == ParityClass::Odd));
        assert!(verify_oddomorphism(&tg.graph, &f));
        // normalized: no two odd vertices of different colours at distance 2 or more
        let mut extra = ExtractReport::default();
        let before = tg.log.len();
        normalize(&mut tg, &f, &mut extra).unwrap();
        assert_eq!(tg.log.len(), before);
    }

    #[test]
    fn small_t_is_direct() {
        let g = MultiGraph::complete(21);
        let f = VertexColouring::identity(&g);
        let x = extract_clique_immersion(&g, &f, 2, &mut Budget::default()).unwrap();
        assert!(check_immersion(&g, &x.witness).is_ok());
        let x = extract_clique_immersion(&g, &f, 1, &mut Budget::default()).unwrap();
        assert!(check_immersion(&g, &x.witness).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let g = MultiGraph::complete(20);
        let f = VertexColouring::identity(&g);
        assert!(matches!(
            extract_clique_immersion(&g, &f, 2, &mut Budget::default()),
            Err(Error::Precondition(_))
        ));
        let g = MultiGraph::path(30);
        let f = VertexColouring::identity(&g);
        assert!(extract_clique_immersion(&g, &f, 2, &mut Budget::default()).is_err());
    }

    #[test]
    fn merger_fixture_is_oddomorphic() {
        let (g, f) = fixtures::merger_case();
        assert_eq!(g.vertex_count(), 169);
        assert!(g.is_simple());
        assert!(verify_oddomorphism(&g, &f));
    }

    #[test]
    fn k84_reaches_base_case() {
        let g = MultiGraph::complete(84);
        let f = VertexColouring::identity(&g);
        let x = extract_clique_immersion(&g, &f, 3, &mut Budget::default()).unwrap();
        assert_eq!(x.report.base_case_hits, 1);
        assert_eq!(x.report.mergers, 0);
        assert_eq!(x.report.level_min_degrees, vec![83]);
        assert!(check_immersion(&g, &x.witness).is_ok());
    }

    #[test]
    fn merger_fixture_forces_a_merger() {
        let (g, f) = fixtures::merger_case();
        let x = extract_clique_immersion(&g, &f, 3, &mut Budget::default()).unwrap();
        assert_eq!(x.report.mergers, 1);
        assert_eq!(x.report.level_min_degrees[0], 2);
        assert!(check_immersion(&g, &x.witness).is_ok());
        // the lifted routes cross from one side of the merger to the other
        assert!(x.witness.routes.values().any(|p| p.len() > 3));
    }
}
