mod common;

use std::collections::BTreeMap;

use common::*;
use oddimm::colouring::{Colour, VertexColouring};
use oddimm::error::{Budget, Error};
use oddimm::extract::{extract_clique_immersion, fixtures, required_colours};
use oddimm::graph::{MultiGraph, VertexId};
use oddimm::immersion::{check_immersion, lift_witness};
use oddimm::oddmorph::verify_oddomorphism;
use rand::seq::SliceRandom;
use rand::Rng;

/// Same graph and colouring with vertex ids and edge insertion order shuffled.
fn relabel(g: &MultiGraph, f: &VertexColouring, r: &mut impl Rng) -> (MultiGraph, VertexColouring) {
    let verts: Vec<VertexId> = g.vertices().collect();
    let mut ids: Vec<u32> = (1..=verts.len() as u32).collect();
    ids.shuffle(r);
    let map: BTreeMap<VertexId, u32> = verts.iter().copied().zip(ids).collect();
    let mut edges: Vec<(u32, u32)> = g.edges().map(|(_, (a, b))| (map[&a], map[&b])).collect();
    edges.shuffle(r);
    let h = MultiGraph::from_edges(verts.len() as u32, &edges).unwrap();
    let mut f2 = VertexColouring::new(f.colours());
    for (&x, &y) in &map {
        f2.set(VertexId(y), f.colour(x).unwrap()).unwrap();
    }
    (h, f2)
}

/// Hangs 2-coloured cycles of length 4 or 6 on random vertices. Every new
/// vertex is even and old parities are unchanged, so `f` stays an oddomorphism.
fn hang_even_cycles(g: &mut MultiGraph, f: &mut VertexColouring, count: usize, r: &mut impl Rng) {
    let verts: Vec<VertexId> = g.vertices().collect();
    for _ in 0..count {
        let x = *verts.choose(r).unwrap();
        let ci = f.colour(x).unwrap();
        let cj = loop {
            let c = Colour(r.gen_range(1..=f.colours()));
            if c != ci {
                break c;
            }
        };
        let len = if r.gen_bool(0.5) { 4 } else { 6 };
        let mut cycle = vec![x];
        for k in 1..len {
            let y = g.add_vertex();
            f.set(y, if k % 2 == 1 { cj } else { ci }).unwrap();
            cycle.push(y);
        }
        for k in 0..len {
            g.add_edge(cycle[k], cycle[(k + 1) % len]).unwrap();
        }
    }
}

fn run_and_check(g: &MultiGraph, f: &VertexColouring, t: u32) -> oddimm::extract::Extraction {
    assert!(verify_oddomorphism(g, f));
    let x = extract_clique_immersion(g, f, t, &mut Budget::unlimited()).unwrap();
    assert_eq!(check_immersion(g, &x.witness), Ok(()));
    assert_eq!(x.witness.pattern, MultiGraph::complete(t));
    assert!(x.report.audits > 0);
    if t >= 3 {
        assert_eq!(x.report.level_min_degrees.len(), x.report.mergers + 1);
    }
    x
}

#[test]
fn relabelled_cliques() {
    let mut r = rng(51);
    for t in 2..=3u32 {
        let n = required_colours(t) as u32;
        for _ in 0..4 {
            let g = MultiGraph::complete(n);
            let (g, f) = relabel(&g, &VertexColouring::identity(&g), &mut r);
            let x = run_and_check(&g, &f, t);
            assert_eq!(x.report.mergers, 0);
        }
    }
}

#[test]
fn cliques_with_hanging_even_cycles() {
    let mut r = rng(52);
    for _ in 0..6 {
        let mut g = MultiGraph::complete(84);
        let mut f = VertexColouring::identity(&g);
        let k = r.gen_range(1..=12);
        hang_even_cycles(&mut g, &mut f, k, &mut r);
        let (g, f) = relabel(&g, &f, &mut r);
        let x = run_and_check(&g, &f, 3);
        assert!(x.report.cycles_deleted >= k);
    }
}

#[test]
fn relabelled_merger_fixture() {
    let mut r = rng(53);
    let (g0, f0) = fixtures::merger_case();
    for i in 0..6 {
        let (mut g, mut f) = (g0.clone(), f0.clone());
        if i % 2 == 1 {
            hang_even_cycles(&mut g, &mut f, 5, &mut r);
        }
        let (g, f) = relabel(&g, &f, &mut r);
        let x = run_and_check(&g, &f, 3);
        assert!(x.report.mergers >= 1);
        // the witness also lifts from the final graph through the returned log
        let derived = x.log.replay(&g).unwrap();
        let downstairs =
            oddimm::immersion::find_immersion(&derived, &MultiGraph::complete(3), &mut Budget::unlimited())
                .unwrap()
                .unwrap();
        assert!(check_immersion(&g, &lift_witness(&downstairs, &derived, &x.log).unwrap()).is_ok());
    }
}

#[test]
fn preconditions_are_enforced() {
    let g = MultiGraph::complete(83);
    let f = VertexColouring::identity(&g);
    assert!(matches!(
        extract_clique_immersion(&g, &f, 3, &mut Budget::unlimited()),
        Err(Error::Precondition(_))
    ));
    let g = MultiGraph::complete(84);
    let mut f = VertexColouring::identity(&g);
    f.set(VertexId(1), Colour(2)).unwrap();
    assert!(extract_clique_immersion(&g, &f, 3, &mut Budget::unlimited()).is_err());
    let mut g = MultiGraph::complete(21);
    g.add_edge(VertexId(1), VertexId(2)).unwrap();
    let f = VertexColouring::identity(&g);
    assert!(extract_clique_immersion(&g, &f, 2, &mut Budget::unlimited()).is_err());
}

#[test]
fn tiny_budget_is_reported() {
    let (g, f) = fixtures::merger_case();
    assert!(matches!(
        extract_clique_immersion(&g, &f, 3, &mut Budget::new(10)),
        Err(Error::BudgetExhausted(_))
    ));
}
