//! Extracting a K3 immersion from the identity 84-colouring of K84.
//!
//! `cargo run --release --example extract_k3`

use oddimm::colouring::VertexColouring;
use oddimm::error::Budget;
use oddimm::extract::{extract_clique_immersion, required_colours};
use oddimm::graph::MultiGraph;
use oddimm::immersion::verify_immersion;

fn main() -> oddimm::error::Result<()> {
    for t in 1..=4 {
        println!("t = {t}: {} colours needed", required_colours(t));
    }
    let g = MultiGraph::complete(84);
    let f = VertexColouring::identity(&g);
    let x = extract_clique_immersion(&g, &f, 3, &mut Budget::default())?;
    println!("report: {}", serde_json::to_string(&x.report)?);
    let branch: Vec<String> = x.witness.branch.values().map(|v| v.to_string()).collect();
    println!("branch vertices: {}", branch.join(" "));
    println!("verifies on K84: {}", verify_immersion(&g, &x.witness));
    Ok(())
}
