//! Parity classification, oddomorphism verification and search, and the
//! surgeries that preserve oddomorphisms.
//!
//! Parity counts use edge multiplicity: a vertex `v` is odd (even) when, for
//! every colour `c` other than its own, the number of edges from `v` into
//! the class `C_c` is odd (even). On simple graphs this is the neighbour
//! count. A vertex with no other colour to look at (the one-colour case, or a
//! homomorphism onto an isolated target vertex) is classified as odd.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::colouring::{Colour, VertexColouring};
use crate::error::{Budget, Error, Result};
use crate::graph::{EdgeEntry, EdgeId, EdgePath, MultiGraph, SplitRecord, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityClass {
    Odd,
    Even,
    Neither,
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityClass::Odd => "odd",
            ParityClass::Even => "even",
            ParityClass::Neither => "neither",
        })
    }
}

/// Why a colouring or homomorphism failed to be an oddomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum OddFailure {
    Uncoloured { vertex: VertexId },
    ColourOutOfRange { vertex: VertexId, colour: u32 },
    Improper { edge: EdgeId },
    NotHomomorphism { edge: EdgeId },
    NeitherVertex { vertex: VertexId },
    EvenOddCount { class: u32, odd_count: usize },
}

impl OddFailure {
    /// Short machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            OddFailure::Uncoloured { .. } => "uncoloured",
            OddFailure::ColourOutOfRange { .. } => "colour-out-of-range",
            OddFailure::Improper { .. } => "improper",
            OddFailure::NotHomomorphism { .. } => "not-homomorphism",
            OddFailure::NeitherVertex { .. } => "neither-vertex",
            OddFailure::EvenOddCount { .. } => "even-odd-count",
        }
    }
}

impl fmt::Display for OddFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OddFailure::Uncoloured { vertex } => write!(f, "uncoloured vertex {vertex}"),
            OddFailure::ColourOutOfRange { vertex, colour } => {
                write!(f, "colour-out-of-range vertex {vertex} colour {colour}")
            }
            OddFailure::Improper { edge } => write!(f, "improper {edge}"),
            OddFailure::NotHomomorphism { edge } => write!(f, "not-homomorphism {edge}"),
            OddFailure::NeitherVertex { vertex } => write!(f, "neither-vertex {vertex}"),
            OddFailure::EvenOddCount { class, odd_count } => {
                write!(f, "even-odd-count class {class} has {odd_count} odd vertices")
            }
        }
    }
}

/// Parity classes of a verified oddomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OddReport {
    pub classes: BTreeMap<VertexId, ParityClass>,
    /// Number of odd vertices per colour class (or per target vertex).
    pub odd_counts: BTreeMap<u32, usize>,
}

impl OddReport {
    pub fn odd_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.classes
            .iter()
            .filter(|(_, &c)| c == ParityClass::Odd)
            .map(|(&v, _)| v)
    }
}

fn classify_parities(parities: impl Iterator<Item = bool>) -> ParityClass {
    let mut any_odd = false;
    let mut any_even = false;
    for odd in parities {
        if odd {
            any_odd = true;
        } else {
            any_even = true;
        }
    }
    match (any_odd, any_even) {
        (_, false) => ParityClass::Odd,
        (false, true) => ParityClass::Even,
        (true, true) => ParityClass::Neither,
    }
}

/// Edges from `v` into each colour class, counted with multiplicity.
pub fn colour_counts(g: &MultiGraph, f: &VertexColouring, v: VertexId) -> Result<BTreeMap<Colour, usize>> {
    let mut counts = BTreeMap::new();
    for &e in g.incident(v)? {
        let w = g.opposite(e, v)?;
        let c = f.colour(w).ok_or(Error::Uncoloured(w))?;
        *counts.entry(c).or_insert(0) += 1;
    }
    Ok(counts)
}

fn classify_unchecked(g: &MultiGraph, f: &VertexColouring, v: VertexId) -> Result<ParityClass> {
    let own = f.colour(v).ok_or(Error::Uncoloured(v))?;
    let counts = colour_counts(g, f, v)?;
    Ok(classify_parities(
        f.palette()
            .filter(|&c| c != own)
            .map(|c| counts.get(&c).copied().unwrap_or(0) % 2 == 1),
    ))
}

/// Parity class of `v` under the proper colouring `f`.
pub fn classify_vertex(g: &MultiGraph, f: &VertexColouring, v: VertexId) -> Result<ParityClass> {
    if !g.has_vertex(v) {
        return Err(Error::UnknownVertex(v));
    }
    f.check_proper(g)?;
    classify_unchecked(g, f, v)
}

/// Full check that `f` is a `t`-oddomorphism of `g`, `t = f.colours()`.
pub fn check_oddomorphism(g: &MultiGraph, f: &VertexColouring) -> std::result::Result<OddReport, OddFailure> {
    let t = f.colours();
    for v in g.vertices() {
        match f.colour(v) {
            None => return Err(OddFailure::Uncoloured { vertex: v }),
            Some(c) if c.0 == 0 || c.0 > t => return Err(OddFailure::ColourOutOfRange { vertex: v, colour: c.0 }),
            Some(_) => {}
        }
    }
    if let Some(edge) = f.monochromatic_edge(g) {
        return Err(OddFailure::Improper { edge });
    }
    let mut classes = BTreeMap::new();
    let mut odd_counts: BTreeMap<u32, usize> = (1..=t).map(|c| (c, 0)).collect();
    for v in g.vertices() {
        let class = classify_unchecked(g, f, v).expect("colouring covers the graph");
        if class == ParityClass::Neither {
            return Err(OddFailure::NeitherVertex { vertex: v });
        }
        if class == ParityClass::Odd {
            *odd_counts.get_mut(&f.colour(v).unwrap().0).unwrap() += 1;
        }
        classes.insert(v, class);
    }
    if let Some((&class, &odd_count)) = odd_counts.iter().find(|(_, &n)| n % 2 == 0) {
        return Err(OddFailure::EvenOddCount { class, odd_count });
    }
    Ok(OddReport { classes, odd_counts })
}

pub fn verify_oddomorphism(g: &MultiGraph, f: &VertexColouring) -> bool {
    check_oddomorphism(g, f).is_ok()
}

/// A vertex map from `source` to `target`; validity is checked on use.
#[derive(Clone, Debug)]
pub struct Homomorphism<'a> {
    pub source: &'a MultiGraph,
    pub target: &'a MultiGraph,
    pub map: BTreeMap<VertexId, VertexId>,
}

impl<'a> Homomorphism<'a> {
    pub fn new(source: &'a MultiGraph, target: &'a MultiGraph, map: BTreeMap<VertexId, VertexId>) -> Self {
        Homomorphism { source, target, map }
    }

    pub fn identity(g: &'a MultiGraph) -> Self {
        Homomorphism::new(g, g, g.vertices().map(|v| (v, v)).collect())
    }

    /// The homomorphism onto `K_t` (vertices `1..=t`) induced by a colouring.
    pub fn from_colouring(g: &'a MultiGraph, kt: &'a MultiGraph, f: &VertexColouring) -> Self {
        Homomorphism::new(g, kt, f.iter().map(|(v, c)| (v, VertexId(c.0))).collect())
    }

    pub fn check(&self) -> std::result::Result<(), OddFailure> {
        for v in self.source.vertices() {
            match self.map.get(&v) {
                Some(x) if self.target.has_vertex(*x) => {}
                _ => return Err(OddFailure::Uncoloured { vertex: v }),
            }
        }
        for (e, (u, v)) in self.source.edges() {
            if self.target.multiplicity(self.map[&u], self.map[&v]) == 0 {
                return Err(OddFailure::NotHomomorphism { edge: e });
            }
        }
        Ok(())
    }

    fn classify_unchecked(&self, v: VertexId) -> ParityClass {
        let image = self.map[&v];
        let mut counts: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &e in self.source.incident(v).expect("source vertex") {
            let w = self.source.opposite(e, v).unwrap();
            *counts.entry(self.map[&w]).or_insert(0) += 1;
        }
        let targets = self.target.neighbours(image).expect("target vertex");
        classify_parities(targets.iter().map(|x| counts.get(x).copied().unwrap_or(0) % 2 == 1))
    }
}

/// Parity class of `v` with respect to the fibres over the target neighbours of its image.
pub fn classify_vertex_general(hom: &Homomorphism<'_>, v: VertexId) -> Result<ParityClass> {
    if !hom.source.has_vertex(v) {
        return Err(Error::UnknownVertex(v));
    }
    hom.check()
        .map_err(|e| Error::Precondition(format!("not a valid homomorphism: {e}")))?;
    Ok(hom.classify_unchecked(v))
}

pub fn check_oddomorphism_general(hom: &Homomorphism<'_>) -> std::result::Result<OddReport, OddFailure> {
    hom.check()?;
    let mut classes = BTreeMap::new();
    let mut odd_counts: BTreeMap<u32, usize> = hom.target.vertices().map(|x| (x.0, 0)).collect();
    for v in hom.source.vertices() {
        let class = hom.classify_unchecked(v);
        if class == ParityClass::Neither {
            return Err(OddFailure::NeitherVertex { vertex: v });
        }
        if class == ParityClass::Odd {
            *odd_counts.get_mut(&hom.map[&v].0).unwrap() += 1;
        }
        classes.insert(v, class);
    }
    if let Some((&class, &odd_count)) = odd_counts.iter().find(|(_, &n)| n % 2 == 0) {
        return Err(OddFailure::EvenOddCount { class, odd_count });
    }
    Ok(OddReport { classes, odd_counts })
}

pub fn verify_oddomorphism_general(hom: &Homomorphism<'_>) -> bool {
    check_oddomorphism_general(hom).is_ok()
}

/// Vertex and edge selection describing a (not necessarily induced) subgraph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubgraphSelection {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl SubgraphSelection {
    pub fn whole(g: &MultiGraph) -> Self {
        SubgraphSelection {
            vertices: g.vertices().collect(),
            edges: g.edge_ids().collect(),
        }
    }
}

/// Checks whether `hom` restricted to the selected subgraph is an oddomorphism.
///
/// The outer `Result` reports a malformed selection; the inner one is the verdict.
pub fn check_weak_oddomorphism(
    hom: &Homomorphism<'_>,
    sub: &SubgraphSelection,
) -> Result<std::result::Result<OddReport, OddFailure>> {
    if let Err(e) = hom.check() {
        return Ok(Err(e));
    }
    let part = hom.source.subgraph(&sub.vertices, &sub.edges)?;
    let map = sub.vertices.iter().map(|&v| (v, hom.map[&v])).collect();
    let restricted = Homomorphism::new(&part, hom.target, map);
    Ok(check_oddomorphism_general(&restricted))
}

pub fn verify_weak_oddomorphism(hom: &Homomorphism<'_>, sub: &SubgraphSelection) -> Result<bool> {
    Ok(check_weak_oddomorphism(hom, sub)?.is_ok())
}

/// Exhaustive search for a `t`-oddomorphism of the simple graph `g`.
///
/// Vertices are coloured in breadth-first order; colours are introduced in
/// first-use order (so the first vertex always gets colour 1), each vertex
/// is classified as soon as its whole neighbourhood is coloured, and branches
/// that cannot use every colour any more are cut. `Ok(None)` means no
/// oddomorphism exists.
pub fn search_oddomorphism(g: &MultiGraph, t: u32, budget: &mut Budget) -> Result<Option<VertexColouring>> {
    if t == 0 {
        return Err(Error::Precondition("t must be positive".into()));
    }
    if !g.is_simple() {
        return Err(Error::Precondition("search_oddomorphism expects a simple graph".into()));
    }
    let dense = g.dense();
    let n = dense.len();
    if (n as u64) < u64::from(t) {
        return Ok(None);
    }

    // breadth-first order per component, components by lowest id
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &dense.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut pos = vec![0; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    // vertices whose closed neighbourhood is fully coloured after step i
    let mut closes_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        let last = dense.adj[x].iter().map(|&y| pos[y]).chain([pos[x]]).max().unwrap();
        closes_at[last].push(x);
    }

    struct Search<'s> {
        dense: &'s crate::graph::DenseGraph,
        order: Vec<usize>,
        closes_at: Vec<Vec<usize>>,
        colour: Vec<u32>,
        class: Vec<ParityClass>,
        t: u32,
    }

    impl Search<'_> {
        fn classify(&self, x: usize) -> ParityClass {
            let mut counts = vec![0u32; self.t as usize + 1];
            for &y in &self.dense.adj[x] {
                counts[self.colour[y] as usize] += 1;
            }
            classify_parities(
                (1..=self.t)
                    .filter(|&c| c != self.colour[x])
                    .map(|c| counts[c as usize] % 2 == 1),
            )
        }

        fn run(&mut self, step: usize, used: u32, budget: &mut Budget) -> Result<bool> {
            budget.tick()?;
            let n = self.order.len();
            if step == n {
                let mut odd = vec![0usize; self.t as usize + 1];
                for x in 0..n {
                    if self.class[x] == ParityClass::Odd {
                        odd[self.colour[x] as usize] += 1;
                    }
                }
                return Ok((1..=self.t as usize).all(|c| odd[c] % 2 == 1));
            }
            if self.t - used > (n - step) as u32 {
                return Ok(false);
            }
            let x = self.order[step];
            let max_colour = self.t.min(used + 1);
            'colours: for c in 1..=max_colour {
                if self.dense.adj[x].iter().any(|&y| self.colour[y] == c) {
                    continue;
                }
                self.colour[x] = c;
                for i in 0..self.closes_at[step].len() {
                    let y = self.closes_at[step][i];
                    let cls = self.classify(y);
                    if cls == ParityClass::Neither {
                        self.colour[x] = 0;
                        continue 'colours;
                    }
                    self.class[y] = cls;
                }
                if self.run(step + 1, used.max(c), budget)? {
                    return Ok(true);
                }
                self.colour[x] = 0;
            }
            Ok(false)
        }
    }

    let mut search = Search {
        dense: &dense,
        order,
        closes_at,
        colour: vec![0; n],
        class: vec![ParityClass::Neither; n],
        t,
    };
    if !search.run(0, 0, budget)? {
        return Ok(None);
    }
    let mut f = VertexColouring::new(t);
    for x in 0..n {
        f.set(dense.ids[x], Colour(search.colour[x]))?;
    }
    debug_assert!(verify_oddomorphism(g, &f));
    Ok(Some(f))
}

/// A path with its vertex sequence, as stored in surgery records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedPath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl RecordedPath {
    pub fn as_edge_path(&self) -> EdgePath {
        EdgePath::new(self.vertices[0], self.edges.clone())
    }
}

/// An edge that survived a merger and now ends at the merged vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReattachedEdge {
    pub edge: EdgeId,
    /// Which of the two merged vertices the edge used to end at.
    pub from: VertexId,
    pub other: VertexId,
}

/// Everything needed to replay or undo one merger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergerRecord {
    pub u1: VertexId,
    pub u2: VertexId,
    pub merged: VertexId,
    /// The deleted 2-coloured paths, each oriented from `u1` to `u2`.
    pub paths: Vec<RecordedPath>,
    pub reattached: Vec<ReattachedEdge>,
    /// Edges removed because they cancelled in the symmetric difference.
    pub cancelled: Vec<EdgeEntry>,
}

/// Colours used along a walk, or an error when it is not 2-coloured with every edge bichromatic.
fn two_colours(f: &VertexColouring, vertices: &[VertexId]) -> Result<(Colour, Colour)> {
    let cols: Vec<Colour> = vertices
        .iter()
        .map(|&v| f.colour(v).ok_or(Error::Uncoloured(v)))
        .collect::<Result<_>>()?;
    let distinct: BTreeSet<Colour> = cols.iter().copied().collect();
    if distinct.len() != 2 || cols.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("path or cycle is not 2-coloured".into()));
    }
    let mut it = distinct.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

/// Identifies `u1` and `u2` into a fresh vertex after deleting the edges of
/// `paths`, in place.
///
/// Each path must be a 2-coloured `(u1,u2)`-path (either orientation is
/// accepted) and the paths must be pairwise edge-disjoint. After deleting
/// the path edges, the remaining edges from `u1` and `u2` to a common vertex
/// `w` cancel in pairs: when their total is odd the lowest-id one survives
/// and is moved to the merged vertex, otherwise all of them are dropped. On
/// simple graphs this is the symmetric difference of the two neighbourhoods.
pub fn apply_merger(
    g: &mut MultiGraph,
    f: &mut VertexColouring,
    u1: VertexId,
    u2: VertexId,
    paths: &[EdgePath],
) -> Result<MergerRecord> {
    if u1 == u2 {
        return Err(Error::Precondition("cannot merge a vertex with itself".into()));
    }
    for v in [u1, u2] {
        if !g.has_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
    }
    let c = f.colour(u1).ok_or(Error::Uncoloured(u1))?;
    if f.colour(u2) != Some(c) {
        return Err(Error::Precondition(format!(
            "merged vertices {u1} and {u2} have different colours"
        )));
    }
    if g.multiplicity(u1, u2) > 0 {
        return Err(Error::Precondition(format!("{u1} and {u2} are adjacent")));
    }
    let mut recorded = Vec::with_capacity(paths.len());
    let mut used = BTreeSet::new();
    for p in paths {
        let mut verts = p.trace(g)?;
        let mut edges = p.edges.clone();
        if verts[0] == u2 {
            verts.reverse();
            edges.reverse();
        }
        if verts[0] != u1 || *verts.last().unwrap() != u2 {
            return Err(Error::InvalidPath(format!("path does not join {u1} and {u2}")));
        }
        two_colours(f, &verts)?;
        for &e in &edges {
            if !used.insert(e) {
                return Err(Error::InvalidPath(format!("paths share edge {e}")));
            }
        }
        recorded.push(RecordedPath { vertices: verts, edges });
    }
    let (merged, reattached, cancelled) = merge_vertices(g, u1, u2, &recorded)?;
    f.remove(u1);
    f.remove(u2);
    f.set(merged, c)?;
    Ok(MergerRecord {
        u1,
        u2,
        merged,
        paths: recorded,
        reattached,
        cancelled,
    })
}

/// Pure form of [`apply_merger`].
pub fn merger(
    g: &MultiGraph,
    f: &VertexColouring,
    u1: VertexId,
    u2: VertexId,
    paths: &[EdgePath],
) -> Result<(MultiGraph, VertexColouring, MergerRecord)> {
    let mut g = g.clone();
    let mut f = f.clone();
    let rec = apply_merger(&mut g, &mut f, u1, u2, paths)?;
    Ok((g, f, rec))
}

/// Graph part of a merger: deletes the path edges, then identifies `u1` and
/// `u2` into a fresh vertex with cancelling edge pairs removed.
pub(crate) fn merge_vertices(
    g: &mut MultiGraph,
    u1: VertexId,
    u2: VertexId,
    paths: &[RecordedPath],
) -> Result<(VertexId, Vec<ReattachedEdge>, Vec<EdgeEntry>)> {
    for p in paths {
        for &e in &p.edges {
            g.remove_edge(e)?;
        }
    }
    let merged = g.add_vertex();
    let mut by_other: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for u in [u1, u2] {
        for &e in g.incident(u)? {
            by_other.entry(g.opposite(e, u)?).or_default().push((e, u));
        }
    }
    let mut reattached = Vec::new();
    let mut cancelled = Vec::new();
    for (other, mut list) in by_other {
        if other == u1 || other == u2 {
            return Err(Error::Precondition(format!("{u1} and {u2} are adjacent")));
        }
        list.sort();
        let keep = list.len() % 2 == 1;
        for (i, &(e, from)) in list.iter().enumerate() {
            if keep && i == 0 {
                g.reattach_edge(e, from, merged)?;
                reattached.push(ReattachedEdge { edge: e, from, other });
            } else {
                let ends = g.remove_edge(e)?;
                cancelled.push((e, ends));
            }
        }
    }
    g.remove_vertex(u1)?;
    g.remove_vertex(u2)?;
    Ok((merged, reattached, cancelled))
}

/// Deletes the edges of a cycle lying inside one bipartite subgraph `G[C_i,C_j]`.
/// Returns the removed edges with their endpoints.
pub fn apply_delete_bicoloured_cycle(
    g: &mut MultiGraph,
    f: &VertexColouring,
    cycle: &EdgePath,
) -> Result<Vec<EdgeEntry>> {
    let mut verts = cycle.trace_cycle(g)?;
    verts.push(cycle.start);
    two_colours(f, &verts)?;
    cycle.edges.iter().map(|&e| Ok((e, g.remove_edge(e)?))).collect()
}

pub fn delete_bicoloured_cycle(g: &MultiGraph, f: &VertexColouring, cycle: &EdgePath) -> Result<MultiGraph> {
    let mut g = g.clone();
    apply_delete_bicoloured_cycle(&mut g, f, cycle)?;
    Ok(g)
}

/// Checks the preconditions for splitting a 2-coloured path between odd
/// vertices of different colours.
pub fn check_odd_path(g: &MultiGraph, f: &VertexColouring, path: &EdgePath) -> Result<()> {
    let verts = path.trace(g)?;
    if path.len() < 2 {
        return Err(Error::Precondition("odd path must have length at least 2".into()));
    }
    two_colours(f, &verts)?;
    let (x, y) = (verts[0], *verts.last().unwrap());
    if f.colour(x) == f.colour(y) {
        return Err(Error::Precondition("odd path endpoints have the same colour".into()));
    }
    f.check_proper(g)?;
    for end in [x, y] {
        if classify_unchecked(g, f, end)? != ParityClass::Odd {
            return Err(Error::Precondition(format!("path endpoint {end} is not odd")));
        }
    }
    Ok(())
}

pub fn apply_split_odd_path(g: &mut MultiGraph, f: &VertexColouring, path: &EdgePath) -> Result<Vec<SplitRecord>> {
    check_odd_path(g, f, path)?;
    g.split_path(path)
}

pub fn split_odd_path(g: &MultiGraph, f: &VertexColouring, path: &EdgePath) -> Result<MultiGraph> {
    let mut g = g.clone();
    apply_split_odd_path(&mut g, f, path)?;
    Ok(g)
}
