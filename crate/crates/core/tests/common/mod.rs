//! Independent oracles and random instance generators shared by the
//! integration tests and the acceptance suite. Nothing here calls the code
//! under test to decide an answer.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigUint;
use oddimm::colouring::{Colour, VertexColouring};
use oddimm::graph::{EdgeEntry, EdgeId, EdgePath, MultiGraph, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(i: u32) -> VertexId {
    VertexId(i)
}

/// Erdős–Rényi graph on vertices `1..=n`.
pub fn random_graph(rng: &mut impl Rng, n: u32, p: f64) -> MultiGraph {
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    MultiGraph::from_edges(n, &edges).unwrap()
}

/// The definition read literally on a simple graph: distinct neighbours per
/// colour class, every vertex odd or even, odd count per class odd.
pub fn literal_is_oddomorphism(g: &MultiGraph, f: &VertexColouring) -> bool {
    let t = f.colours();
    let col = |x: VertexId| f.colour(x).map(|c| c.0);
    if g.vertices().any(|x| col(x).is_none_or(|c| c == 0 || c > t)) {
        return false;
    }
    if g.edges().any(|(_, (a, b))| col(a) == col(b)) {
        return false;
    }
    let mut odd_per_class = vec![0usize; t as usize + 1];
    for x in g.vertices() {
        let nbrs = g.neighbours(x).unwrap();
        let own = col(x).unwrap();
        let parities: Vec<bool> = (1..=t)
            .filter(|&c| c != own)
            .map(|c| nbrs.iter().filter(|&&y| col(y) == Some(c)).count() % 2 == 1)
            .collect();
        let all_odd = parities.iter().all(|&p| p);
        let all_even = parities.iter().all(|&p| !p);
        if all_odd {
            odd_per_class[own as usize] += 1;
        } else if !all_even {
            return false;
        }
    }
    (1..=t as usize).all(|c| odd_per_class[c] % 2 == 1)
}

/// Whether any of the `t^n` colourings is an oddomorphism (literal check).
pub fn brute_force_oddomorphism_exists(g: &MultiGraph, t: u32) -> bool {
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len() as u32;
    let total = (t as u64).pow(n);
    (0..total).any(|mut code| {
        let mut f = VertexColouring::new(t);
        for &x in &verts {
            f.set(x, Colour((code % t as u64) as u32 + 1)).unwrap();
            code /= t as u64;
        }
        literal_is_oddomorphism(g, &f)
    })
}

/// Whether `host` immerses `K_t` (`t` in 2..=3), by exploring every
/// sequence of split-offs on labelled edge multisets. Deletions are never
/// needed: a state containing `K_t` as a subgraph is an immersion, and
/// removing an edge never enables a split-off.
pub fn splitoff_oracle(host: &MultiGraph, t: u32) -> bool {
    assert!((2..=3).contains(&t));
    let start: Vec<(u32, u32)> = {
        let mut e: Vec<(u32, u32)> = host.edges().map(|(_, (a, b))| (a.0, b.0)).collect();
        e.sort();
        e
    };
    fn has_clique(edges: &[(u32, u32)], t: u32) -> bool {
        if t == 2 {
            return !edges.is_empty();
        }
        let set: HashSet<(u32, u32)> = edges.iter().copied().collect();
        let verts: BTreeSet<u32> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        let vs: Vec<u32> = verts.into_iter().collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !set.contains(&(vs[i], vs[j])) {
                    continue;
                }
                for k in j + 1..vs.len() {
                    if set.contains(&(vs[i], vs[k])) && set.contains(&(vs[j], vs[k])) {
                        return true;
                    }
                }
            }
        }
        false
    }
    let mut seen: HashSet<Vec<(u32, u32)>> = HashSet::new();
    let mut stack = vec![start];
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        if has_clique(&state, t) {
            return true;
        }
        for i in 0..state.len() {
            for j in i + 1..state.len() {
                let (a, b) = state[i];
                let (c, d) = state[j];
                // shared endpoint m, outer ends x and y
                for (m, x, y) in [(a, b, if c == a { d } else { c }), (b, a, if c == b { d } else { c })] {
                    if !(c == m || d == m) || x == y {
                        continue;
                    }
                    let mut next: Vec<(u32, u32)> = state
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i && k != j)
                        .map(|(_, &e)| e)
                        .collect();
                    next.push((x.min(y), x.max(y)));
                    next.sort();
                    if !seen.contains(&next) {
                        stack.push(next);
                    }
                }
            }
        }
    }
    false
}

/// Treewidth as the minimum over all `n!` elimination orderings of the
/// largest set of later neighbours in the fill-in graph.
pub fn treewidth_by_orderings(g: &MultiGraph) -> usize {
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    if n == 0 {
        return 0;
    }
    let idx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut adj = vec![vec![false; n]; n];
    for (_, (a, b)) in g.edges() {
        adj[idx[&a]][idx[&b]] = true;
        adj[idx[&b]][idx[&a]] = true;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    loop {
        let mut m = adj.clone();
        let mut eliminated = vec![false; n];
        let mut width = 0;
        for &x in &perm {
            let later: Vec<usize> = (0..n).filter(|&y| !eliminated[y] && y != x && m[x][y]).collect();
            width = width.max(later.len());
            for &a in &later {
                for &b in &later {
                    if a != b {
                        m[a][b] = true;
                    }
                }
            }
            eliminated[x] = true;
        }
        best = best.min(width);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Closed walks of length `k` (the trace of `A^k`), which equals
/// `hom(C_k, g)` for `k >= 3`.
pub fn closed_walks(g: &MultiGraph, k: u32) -> BigUint {
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    let idx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut a = vec![vec![BigUint::from(0u32); n]; n];
    for (_, (x, y)) in g.edges() {
        a[idx[&x]][idx[&y]] = BigUint::from(1u32);
        a[idx[&y]][idx[&x]] = BigUint::from(1u32);
    }
    let mut p: Vec<Vec<BigUint>> = (0..n)
        .map(|i| (0..n).map(|j| BigUint::from((i == j) as u32)).collect())
        .collect();
    for _ in 0..k {
        let mut q = vec![vec![BigUint::from(0u32); n]; n];
        for i in 0..n {
            for l in 0..n {
                if a[l].iter().all(|x| *x == BigUint::from(0u32)) {
                    continue;
                }
                for j in 0..n {
                    if a[l][j] != BigUint::from(0u32) {
                        q[i][j] += &p[i][l];
                    }
                }
            }
        }
        p = q;
    }
    (0..n).map(|i| p[i][i].clone()).sum()
}

/// Literal homomorphism count over all `|V(g)|^|V(f)|` maps.
pub fn hom_count_literal(f: &MultiGraph, g: &MultiGraph) -> u64 {
    let fv: Vec<VertexId> = f.vertices().collect();
    let gv: Vec<VertexId> = g.vertices().collect();
    if fv.is_empty() {
        return 1;
    }
    if gv.is_empty() {
        return 0;
    }
    let pos: BTreeMap<VertexId, usize> = fv.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let fe: Vec<(usize, usize)> = f.edges().map(|(_, (a, b))| (pos[&a], pos[&b])).collect();
    let total = (gv.len() as u64).pow(fv.len() as u32);
    let mut count = 0;
    let mut img = vec![0usize; fv.len()];
    for mut code in 0..total {
        for slot in img.iter_mut() {
            *slot = (code % gv.len() as u64) as usize;
            code /= gv.len() as u64;
        }
        if fe.iter().all(|&(a, b)| g.multiplicity(gv[img[a]], gv[img[b]]) > 0) {
            count += 1;
        }
    }
    count
}

fn colour_of(f: &VertexColouring, x: VertexId) -> Colour {
    f.colour(x).unwrap()
}

/// Random simple path from `s` to `t` inside `G[C_i, C_j]` avoiding `used`.
fn random_two_coloured_path(
    g: &MultiGraph,
    f: &VertexColouring,
    colours: (Colour, Colour),
    s: VertexId,
    t: VertexId,
    used: &BTreeSet<EdgeId>,
    rng: &mut impl Rng,
) -> Option<EdgePath> {
    // randomized DFS, bounded number of restarts
    for _ in 0..8 {
        let mut visited: BTreeSet<VertexId> = [s].into();
        let mut stack: Vec<(VertexId, Vec<EdgeId>)> = vec![(s, Vec::new())];
        while let Some((x, path)) = stack.pop() {
            if x == t {
                return Some(EdgePath::new(s, path));
            }
            let mut inc: Vec<EdgeId> = g.incident(x).unwrap().iter().copied().collect();
            inc.shuffle(rng);
            for e in inc {
                if used.contains(&e) || path.contains(&e) {
                    continue;
                }
                let y = g.opposite(e, x).unwrap();
                let cy = colour_of(f, y);
                if cy != colours.0 && cy != colours.1 {
                    continue;
                }
                if visited.insert(y) {
                    let mut p = path.clone();
                    p.push(e);
                    stack.push((y, p));
                }
            }
        }
    }
    None
}

/// A random eligible merger: two vertices of one colour and a random set of
/// edge-disjoint 2-coloured paths between them.
pub fn random_merger_instance(
    g: &MultiGraph,
    f: &VertexColouring,
    rng: &mut impl Rng,
) -> Option<(VertexId, VertexId, Vec<EdgePath>)> {
    let mut classes: Vec<Vec<VertexId>> = (1..=f.colours())
        .map(|c| {
            f.class(Colour(c))
                .into_iter()
                .filter(|x| g.has_vertex(*x))
                .collect::<Vec<_>>()
        })
        .filter(|c: &Vec<VertexId>| c.len() >= 2)
        .collect();
    if classes.is_empty() {
        return None;
    }
    classes.shuffle(rng);
    let class = &classes[0];
    let mut pick = class.clone();
    pick.shuffle(rng);
    let (u1, u2) = (pick[0], pick[1]);
    let c = colour_of(f, u1);
    let mut used = BTreeSet::new();
    let mut paths = Vec::new();
    let mut others: Vec<u32> = (1..=f.colours()).filter(|&d| d != c.0).collect();
    others.shuffle(rng);
    for d in others {
        let want = rng.gen_range(0..=3);
        for _ in 0..want {
            match random_two_coloured_path(g, f, (c, Colour(d)), u1, u2, &used, rng) {
                Some(p) => {
                    used.extend(p.edges.iter().copied());
                    paths.push(p);
                }
                None => break,
            }
        }
    }
    Some((u1, u2, paths))
}

/// A random 2-coloured cycle, if any colour pair has one.
pub fn random_bicoloured_cycle(g: &MultiGraph, f: &VertexColouring, rng: &mut impl Rng) -> Option<EdgePath> {
    let mut edges: Vec<EdgeEntry> = g.edges().collect();
    edges.shuffle(rng);
    let mut groups: BTreeMap<(Colour, Colour), Vec<EdgeEntry>> = BTreeMap::new();
    for (e, (a, b)) in edges {
        let (ca, cb) = (colour_of(f, a), colour_of(f, b));
        groups.entry((ca.min(cb), ca.max(cb))).or_default().push((e, (a, b)));
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.shuffle(rng);
    for key in keys {
        // union-find in shuffled order; the first closing edge gives a cycle
        let mut forest: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> = BTreeMap::new();
        for &(e, (a, b)) in &groups[&key] {
            if let Some(path) = forest_path(&forest, a, b) {
                let mut edges = vec![e];
                edges.extend(path);
                return Some(EdgePath::new(b, edges));
            }
            forest.entry(a).or_default().push((b, e));
            forest.entry(b).or_default().push((a, e));
        }
    }
    None
}

fn forest_path(forest: &BTreeMap<VertexId, Vec<(VertexId, EdgeId)>>, s: VertexId, t: VertexId) -> Option<Vec<EdgeId>> {
    let mut prev: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
    let mut stack = vec![s];
    let mut seen: BTreeSet<VertexId> = [s].into();
    while let Some(x) = stack.pop() {
        if x == t {
            let mut out = Vec::new();
            let mut at = t;
            while at != s {
                let (p, e) = prev[&at];
                out.push(e);
                at = p;
            }
            out.reverse();
            return Some(out);
        }
        for &(y, e) in forest.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(y) {
                prev.insert(y, (x, e));
                stack.push(y);
            }
        }
    }
    None
}

/// A random 2-coloured path of length at least 2 between odd vertices of
/// different colours, where parity is computed here from scratch.
pub fn random_odd_path(g: &MultiGraph, f: &VertexColouring, rng: &mut impl Rng) -> Option<EdgePath> {
    let t = f.colours();
    let odd: Vec<VertexId> = g
        .vertices()
        .filter(|&x| {
            let own = colour_of(f, x);
            let mut counts = BTreeMap::new();
            for &e in g.incident(x).unwrap() {
                *counts.entry(colour_of(f, g.opposite(e, x).unwrap())).or_insert(0usize) += 1;
            }
            (1..=t)
                .filter(|&c| c != own.0)
                .all(|c| counts.get(&Colour(c)).copied().unwrap_or(0) % 2 == 1)
        })
        .collect();
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    for &a in &odd {
        for &b in &odd {
            if a < b && colour_of(f, a) != colour_of(f, b) {
                pairs.push((a, b));
            }
        }
    }
    pairs.shuffle(rng);
    for (a, b) in pairs.into_iter().take(12) {
        let cols = (colour_of(f, a), colour_of(f, b));
        if let Some(p) = random_two_coloured_path(g, f, cols, a, b, &BTreeSet::new(), rng) {
            if p.len() >= 2 {
                return Some(p);
            }
        }
    }
    None
}

/// A random pair of edges sharing exactly one endpoint, as (e1, e2).
pub fn random_splittable_pair(g: &MultiGraph, rng: &mut impl Rng) -> Option<(EdgeId, EdgeId)> {
    let mut verts: Vec<VertexId> = g.vertices().collect();
    verts.shuffle(rng);
    for x in verts {
        let mut inc: Vec<EdgeId> = g.incident(x).unwrap().iter().copied().collect();
        inc.shuffle(rng);
        for i in 0..inc.len() {
            for j in i + 1..inc.len() {
                let (a, b) = (g.opposite(inc[i], x).unwrap(), g.opposite(inc[j], x).unwrap());
                if a != b {
                    return Some((inc[i], inc[j]));
                }
            }
        }
    }
    None
}

/// A random graph on at most `max_n` vertices together with a
/// `t`-oddomorphism found by search, for `t` in `2..=4`. Retries until one
/// exists; the colouring is re-checked with the literal oracle.
pub fn random_oddomorphic(rng: &mut impl Rng, max_n: u32) -> (MultiGraph, VertexColouring) {
    use oddimm::error::Budget;
    loop {
        let n = rng.gen_range(2..=max_n);
        let t = rng.gen_range(2..=4u32.min(n));
        let p = rng.gen_range(0.2..0.8);
        let g = random_graph(rng, n, p);
        if let Ok(Some(f)) = oddimm::oddmorph::search_oddomorphism(&g, t, &mut Budget::new(2_000_000)) {
            assert!(literal_is_oddomorphism(&g, &f));
            return (g, f);
        }
    }
}

/// A random bipartite graph on at most `max_n` vertices with its
/// bipartition as a 2-oddomorphism: each side holds an odd number of
/// odd-degree vertices. Such instances are rich in 2-coloured cycles.
pub fn random_bipartite_oddomorphic(rng: &mut impl Rng, max_n: u32) -> (MultiGraph, VertexColouring) {
    loop {
        let n = rng.gen_range(4..=max_n);
        let a = rng.gen_range(2..=n - 2);
        let p = rng.gen_range(0.4..0.95);
        let mut edges = Vec::new();
        for x in 1..=a {
            for y in a + 1..=n {
                if rng.gen_bool(p) {
                    edges.push((x, y));
                }
            }
        }
        let g = MultiGraph::from_edges(n, &edges).unwrap();
        let cols: Vec<u32> = (1..=n).map(|x| if x <= a { 1 } else { 2 }).collect();
        let f = VertexColouring::from_slice(2, &cols).unwrap();
        if literal_is_oddomorphism(&g, &f) {
            return (g, f);
        }
    }
}

/// [`random_graph`] with the order drawn from `lo..=hi`.
pub fn random_graph_between(rng: &mut impl Rng, lo: u32, hi: u32, p: f64) -> MultiGraph {
    let n = rng.gen_range(lo..=hi);
    random_graph(rng, n, p)
}
