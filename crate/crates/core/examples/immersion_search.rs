//! Deciding immersions and checking witnesses.
//!
//! `cargo run --example immersion_search`

use oddimm::error::Budget;
use oddimm::graph::MultiGraph;
use oddimm::immersion::{check_immersion, find_immersion, ImmersionWitness};

fn main() -> oddimm::error::Result<()> {
    let k3 = MultiGraph::complete(3);
    let mut budget = Budget::default();

    let c5 = MultiGraph::cycle(5);
    let w = find_immersion(&c5, &k3, &mut budget)?.expect("the arcs of C5 form a K3");
    println!("K3 in C5: {}", w.to_json());
    println!("check: {:?}", check_immersion(&c5, &w));

    println!(
        "K3 in K1,3: {:?}",
        find_immersion(&MultiGraph::star(3), &k3, &mut budget)?
    );

    // the same witness does not fit a different host
    let back = ImmersionWitness::from_json(&w.to_json())?;
    if let Err(why) = check_immersion(&MultiGraph::path(5), &back) {
        println!("on P5: {why}");
    }

    let petersen = MultiGraph::from_edges(
        10,
        &[
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (1, 5),
            (1, 6),
            (2, 7),
            (3, 8),
            (4, 9),
            (5, 10),
            (6, 8),
            (8, 10),
            (7, 10),
            (7, 9),
            (6, 9),
        ],
    )?;
    for t in 3..=5 {
        let found = find_immersion(&petersen, &MultiGraph::complete(t), &mut budget)?;
        println!("K{t} in Petersen: {}", if found.is_some() { "yes" } else { "no" });
    }
    println!("steps used: {}", budget.used());
    Ok(())
}
