//! Checking and searching for oddomorphisms.
//!
//! `cargo run --example verify_oddomorphism`

use std::collections::BTreeMap;

use oddimm::colouring::VertexColouring;
use oddimm::error::Budget;
use oddimm::graph::{MultiGraph, VertexId};
use oddimm::oddmorph::{
    check_oddomorphism, classify_vertex, search_oddomorphism, verify_oddomorphism_general, Homomorphism,
};

fn main() -> oddimm::error::Result<()> {
    let k5 = MultiGraph::complete(5);
    let report = check_oddomorphism(&k5, &VertexColouring::identity(&k5)).expect("K5 -> K5");
    println!("K5 identity: odd counts per colour {:?}", report.odd_counts);

    let p4 = MultiGraph::path(4);
    let f = VertexColouring::from_slice(2, &[1, 2, 1, 2])?;
    let classes: Vec<String> = p4
        .vertices()
        .map(|v| format!("{v}:{}", classify_vertex(&p4, &f, v).unwrap()))
        .collect();
    println!("P4 with (1,2,1,2): {}", classes.join(" "));

    // C6 has only two proper 2-colourings and both leave every vertex even
    let mut budget = Budget::default();
    println!(
        "C6, t = 2: {:?}",
        search_oddomorphism(&MultiGraph::cycle(6), 2, &mut budget)?
    );
    if let Some(f) = search_oddomorphism(&MultiGraph::complete_bipartite(3, 3), 2, &mut budget)? {
        println!("K3,3, t = 2: {:?}", f.iter().map(|(_, c)| c.0).collect::<Vec<_>>());
    }

    let k4e = MultiGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)])?;
    let f = VertexColouring::from_slice(3, &[1, 2, 3, 3])?;
    println!("K4 - e, vertex 1: {}", classify_vertex(&k4e, &f, VertexId(1))?);

    // an oddomorphism into a target that is not complete
    let three_k2 = MultiGraph::from_edges(6, &[(1, 2), (3, 4), (5, 6)])?;
    let k2 = MultiGraph::complete(2);
    let map: BTreeMap<_, _> = (1..=6).map(|i| (VertexId(i), VertexId(2 - i % 2))).collect();
    println!(
        "3K2 -> K2: {}",
        verify_oddomorphism_general(&Homomorphism::new(&three_k2, &k2, map))
    );
    Ok(())
}
