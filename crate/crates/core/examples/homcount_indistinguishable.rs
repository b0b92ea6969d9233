//! Homomorphism counts from trees cannot tell 2K3 from C6; triangles can.
//!
//! `cargo run --release --example homcount_indistinguishable`

use oddimm::error::Budget;
use oddimm::graph::MultiGraph;
use oddimm::homcount::{distinguish_parallel, generate_family, hom_count_td, FamilySpec};
use oddimm::io::write_graph;

fn main() -> oddimm::error::Result<()> {
    let two_k3 = MultiGraph::complete(3).disjoint_union(&MultiGraph::complete(3));
    let c6 = MultiGraph::cycle(6);
    let mut budget = Budget::default();
    for f in [
        MultiGraph::path(4),
        MultiGraph::star(3),
        MultiGraph::cycle(3),
        MultiGraph::cycle(6),
    ] {
        println!(
            "{} vertices, {} edges: {} vs {}",
            f.vertex_count(),
            f.edge_count(),
            hom_count_td(&f, &two_k3, &mut budget)?,
            hom_count_td(&f, &c6, &mut budget)?
        );
    }
    for fam in [FamilySpec::Trees(9), FamilySpec::Cycles(8), FamilySpec::All(3)] {
        let size = generate_family(&fam)?.len();
        match distinguish_parallel(&two_k3, &c6, &fam, 4, Budget::DEFAULT)? {
            None => println!("{fam} ({size} graphs): indistinguishable"),
            Some(d) => print!(
                "{fam} ({size} graphs): member #{} gives {} vs {}\n{}",
                d.index,
                d.count_g,
                d.count_h,
                write_graph(&d.graph)?
            ),
        }
    }
    Ok(())
}
