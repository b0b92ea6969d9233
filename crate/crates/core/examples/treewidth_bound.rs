//! Exact treewidth with a certificate, and the width bound for oddomorphisms.
//!
//! `cargo run --example treewidth_bound`

use oddimm::colouring::VertexColouring;
use oddimm::error::Budget;
use oddimm::graph::MultiGraph;
use oddimm::twidth::{check_oddomorphism_treewidth_bound, exact_treewidth, verify_tree_decomposition, write_td};

fn main() -> oddimm::error::Result<()> {
    let mut budget = Budget::default();
    let grid = MultiGraph::from_edges(
        9,
        &[
            (1, 2),
            (2, 3),
            (4, 5),
            (5, 6),
            (7, 8),
            (8, 9),
            (1, 4),
            (4, 7),
            (2, 5),
            (5, 8),
            (3, 6),
            (6, 9),
        ],
    )?;
    let (w, td) = exact_treewidth(&grid, &mut budget)?;
    println!(
        "3x3 grid: treewidth {w}, certificate valid: {}",
        verify_tree_decomposition(&grid, &td)
    );
    print!("{}", write_td(&td, grid.vertex_count())?);

    for t in 2..=6 {
        let g = MultiGraph::complete(t);
        let r = check_oddomorphism_treewidth_bound(&g, &VertexColouring::identity(&g), &mut budget)?;
        println!("K{t}: tw {} >= t - 1 = {}: {}", r.treewidth, r.t - 1, r.holds);
    }
    let p4 = MultiGraph::path(4);
    let r = check_oddomorphism_treewidth_bound(&p4, &VertexColouring::from_slice(2, &[1, 2, 1, 2])?, &mut budget)?;
    println!("P4 with (1,2,1,2): tw {} with t = {}", r.treewidth, r.t);
    Ok(())
}
