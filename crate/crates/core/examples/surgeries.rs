//! Split-offs, mergers, cycle deletions and odd-path splits, each followed
//! by re-verification of the colouring.
//!
//! `cargo run --example surgeries`

use oddimm::colouring::VertexColouring;
use oddimm::graph::{EdgePath, MultiGraph, VertexId};
use oddimm::oddmorph::{delete_bicoloured_cycle, merger, split_odd_path, verify_oddomorphism};

fn main() -> oddimm::error::Result<()> {
    let v = VertexId;

    let mut c6 = MultiGraph::cycle(6);
    let ids: Vec<_> = c6.edge_ids().collect();
    c6.split_path(&EdgePath::new(v(1), ids[..3].to_vec()))?;
    c6.remove_isolated_vertices();
    println!(
        "C6 after splitting a 3-edge path: {} vertices, {} edges",
        c6.vertex_count(),
        c6.edge_count()
    );

    // merging two endpoints of 3K2 with no deleted paths gives P3 + K2
    let g = MultiGraph::from_edges(6, &[(1, 2), (3, 4), (5, 6)])?;
    let f = VertexColouring::from_slice(2, &[1, 2, 1, 2, 1, 2])?;
    let (g2, f2, rec) = merger(&g, &f, v(1), v(3), &[])?;
    println!(
        "3K2 merger: merged vertex {} has degree {}, still an oddomorphism: {}",
        rec.merged,
        g2.degree(rec.merged)?,
        verify_oddomorphism(&g2, &f2)
    );

    let k33 = MultiGraph::complete_bipartite(3, 3);
    let f = VertexColouring::from_slice(2, &[1, 1, 1, 2, 2, 2])?;
    let e = |a, b| k33.edges_between(v(a), v(b))[0];
    let c4 = EdgePath::new(v(1), vec![e(1, 4), e(4, 2), e(2, 5), e(5, 1)]);
    let rest = delete_bicoloured_cycle(&k33, &f, &c4)?;
    println!(
        "K3,3 minus a C4: {} edges, oddomorphism: {}",
        rest.edge_count(),
        verify_oddomorphism(&rest, &f)
    );

    let p4 = MultiGraph::path(4);
    let f = VertexColouring::from_slice(2, &[1, 2, 1, 2])?;
    let all: Vec<_> = p4.edge_ids().collect();
    println!(
        "a-b-c is eligible: {}",
        split_odd_path(&p4, &f, &EdgePath::new(v(1), all[..2].to_vec())).is_ok()
    );
    let k2 = split_odd_path(&p4, &f, &EdgePath::new(v(1), all))?;
    println!(
        "a-b-c-d split: {} edge, oddomorphism: {}",
        k2.edge_count(),
        verify_oddomorphism(&k2, &f)
    );
    Ok(())
}
