//! Isomorph-free enumeration through canonical forms.
//!
//! `cargo run --release --example enumerate_graphs [max_order]`

use oddimm::canon::{all_graphs_by_order, are_isomorphic, canonical_graph, graphs_by_edges, is_connected};
use oddimm::graph::MultiGraph;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    for (order, level) in all_graphs_by_order(n).iter().enumerate() {
        let connected = level.iter().filter(|g| is_connected(g)).count();
        println!("{order} vertices: {} graphs, {connected} connected", level.len());
    }
    println!(
        "graphs with at most 8 edges and no isolated vertex: {}",
        graphs_by_edges(8).len()
    );

    let a = MultiGraph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
    let b = MultiGraph::from_edges(4, &[(3, 1), (1, 4), (4, 2)]).unwrap();
    println!("two labellings of P4 isomorphic: {}", are_isomorphic(&a, &b));
    println!(
        "canonical P4 edges: {:?}",
        canonical_graph(&a).edges().map(|(_, e)| e).collect::<Vec<_>>()
    );
}
