//! A fixture whose split graph has a vertex of degree 2, so extraction must
//! merge two vertices before the minimum-degree case applies. Pass a path to
//! write the surgery log as JSON.
//!
//! `cargo run --release --example merger_case [trace.json]`

use oddimm::error::Budget;
use oddimm::extract::{extract_clique_immersion, fixtures};
use oddimm::immersion::{check_immersion, LogEntry};

fn main() -> oddimm::error::Result<()> {
    let (g, f) = fixtures::merger_case();
    println!(
        "fixture: {} vertices, {} edges, {} colours",
        g.vertex_count(),
        g.edge_count(),
        f.colours()
    );
    let x = extract_clique_immersion(&g, &f, 3, &mut Budget::default())?;
    println!(
        "mergers {}, minimum degree per level {:?}, audits {}",
        x.report.mergers, x.report.level_min_degrees, x.report.audits
    );
    for m in x.log.mergers() {
        println!(
            "merged {} and {} into {} using {} pool paths",
            m.u1,
            m.u2,
            m.merged,
            m.paths.len()
        );
    }
    let splits = x
        .log
        .entries
        .iter()
        .filter(|e| matches!(e, LogEntry::SplitOff(_)))
        .count();
    println!("{} log entries, {splits} split-offs", x.log.len());
    for (e, route) in &x.witness.routes {
        println!("route for pattern edge {e}: {} host edges", route.len());
    }
    println!("check on the fixture: {:?}", check_immersion(&g, &x.witness));
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, serde_json::to_string_pretty(&x.log)?)?;
        println!("log written to {path}");
    }
    Ok(())
}
