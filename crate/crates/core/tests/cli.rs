use std::path::{Path, PathBuf};
use std::process::Command;

use oddimm::graph::MultiGraph;
use oddimm::immersion::{verify_immersion, ImmersionWitness};
use oddimm::io::{parse_colouring, parse_graph, write_colouring, write_graph};
use oddimm::twidth::{parse_td, write_td};
use proptest::prelude::*;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn oddimm(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oddimm"));
    cmd.args(args).env_remove("ODDMORPH_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().unwrap();
    Run {
        code: o.status.code().unwrap(),
        out: String::from_utf8(o.stdout).unwrap(),
        err: String::from_utf8(o.stderr).unwrap(),
    }
}

/// Writes `generate <spec>` output (and optionally the identity colouring) into `dir`.
fn generate(dir: &Path, spec: &str, colouring: bool) -> (PathBuf, PathBuf) {
    let g = dir.join(format!("{spec}.txt"));
    let c = dir.join(format!("{spec}.col"));
    let mut args = vec!["generate", spec];
    let cs = c.to_str().unwrap().to_string();
    if colouring {
        args.extend(["--identity-colouring", &cs]);
    }
    let r = oddimm(&args, &[]);
    assert_eq!(r.code, 0, "{}", r.err);
    std::fs::write(&g, r.out).unwrap();
    (g, c)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_odd_on_k4() {
    let dir = tempfile::tempdir().unwrap();
    let (g, c) = generate(dir.path(), "K4", true);
    let r = oddimm(&["verify-odd", "--graph", s(&g), "--colouring", s(&c)], &[]);
    assert_eq!(r.code, 0);
    assert!(r.out.starts_with("VALID\n"));
    let report: serde_json::Value = serde_json::from_str(r.out.lines().nth(1).unwrap()).unwrap();
    assert_eq!(
        report["odd_counts"],
        serde_json::json!({"1": 1, "2": 1, "3": 1, "4": 1})
    );
}

#[test]
fn verify_odd_reports_the_reason() {
    let dir = tempfile::tempdir().unwrap();
    let (g, _) = generate(dir.path(), "C6", false);
    let c = dir.path().join("bip.col");
    std::fs::write(&c, "p colouring 6 2\nc 1 1\nc 2 2\nc 3 1\nc 4 2\nc 5 1\nc 6 2\n").unwrap();
    let r = oddimm(&["verify-odd", "--graph", s(&g), "--colouring", s(&c)], &[]);
    assert_eq!(r.code, 1);
    assert!(r.out.starts_with("INVALID "), "{}", r.out);
    let reason: serde_json::Value = serde_json::from_str(r.out.lines().nth(1).unwrap()).unwrap();
    assert!(reason.get("reason").is_some(), "{reason}");
}

#[test]
fn search_output_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (g, _) = generate(dir.path(), "P4", false);
    let r = oddimm(&["search-odd", "--graph", s(&g), "-t", "2"], &[]);
    assert_eq!(r.code, 0);
    let c = dir.path().join("found.col");
    std::fs::write(&c, &r.out).unwrap();
    assert_eq!(
        oddimm(&["verify-odd", "--graph", s(&g), "--colouring", s(&c)], &[]).code,
        0
    );
    let (c6, _) = generate(dir.path(), "C6", false);
    let r = oddimm(&["search-odd", "--graph", s(&c6), "-t", "2"], &[]);
    assert_eq!((r.code, r.out.as_str()), (1, "NONE (t=2)\n"));
}

#[test]
fn distinguish_golden_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = generate(dir.path(), "2K3", false);
    let (b, _) = generate(dir.path(), "C6", false);
    let r = oddimm(
        &[
            "distinguish",
            "--g",
            s(&a),
            "--h",
            s(&b),
            "--family",
            "trees",
            "--max-size",
            "8",
        ],
        &[],
    );
    assert_eq!((r.code, r.out.as_str()), (1, "INDISTINGUISHABLE (bound=8)\n"));
    for jobs in ["1", "3"] {
        let r = oddimm(
            &[
                "distinguish",
                "--g",
                s(&a),
                "--h",
                s(&b),
                "--family",
                "all",
                "--max-size",
                "3",
                "--jobs",
                jobs,
            ],
            &[],
        );
        assert_eq!(r.code, 0);
        assert_eq!(
            r.out,
            "# hom(F, g) = 12, hom(F, h) = 0\np graph 3 3\ne 1 2\ne 1 3\ne 2 3\n"
        );
    }
    let list = dir.path().join("fam.lst");
    std::fs::write(&list, "# explicit family\nC6.txt\n2K3.txt\n").unwrap();
    let fam = format!("list:{}", s(&list));
    let r = oddimm(&["distinguish", "--g", s(&a), "--h", s(&b), "--family", &fam], &[]);
    assert_eq!(r.code, 0);
    // C6 ties at 132; 2K3 counts 12^2 into itself and nothing into C6
    assert!(
        r.out.starts_with("# hom(F, g) = 144, hom(F, h) = 0\np graph 6 6\n"),
        "{}",
        r.out
    );
}

#[test]
fn homcount_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (c6, _) = generate(dir.path(), "C6", false);
    let (k3s, _) = generate(dir.path(), "2K3", false);
    for method in ["brute", "td"] {
        let r = oddimm(
            &["homcount", "--source", s(&c6), "--target", s(&k3s), "--method", method],
            &[],
        );
        assert_eq!((r.code, r.out.as_str()), (0, "132\n"));
    }
}

#[test]
fn immersion_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (c5, _) = generate(dir.path(), "C5", false);
    let (k3, _) = generate(dir.path(), "K3", false);
    let (star, _) = generate(dir.path(), "S3", false);
    let w = dir.path().join("w.json");
    let r = oddimm(
        &["find-immersion", "--graph", s(&c5), "--pattern", s(&k3), "--out", s(&w)],
        &[],
    );
    assert_eq!(r.code, 0);
    let r = oddimm(&["verify-immersion", "--graph", s(&c5), "--witness", s(&w)], &[]);
    assert_eq!((r.code, r.out.as_str()), (0, "VALID\n"));
    let r = oddimm(&["verify-immersion", "--graph", s(&star), "--witness", s(&w)], &[]);
    assert_eq!(r.code, 1);
    assert!(r.out.starts_with("INVALID"));
    let r = oddimm(&["find-immersion", "--graph", s(&star), "--pattern", s(&k3)], &[]);
    assert_eq!((r.code, r.out.as_str()), (1, "NONE\n"));
}

#[test]
fn extract_on_k84_verifies_against_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let (g, c) = generate(dir.path(), "K84", true);
    let w = dir.path().join("w.json");
    let trace = dir.path().join("trace.json");
    let r = oddimm(
        &[
            "extract-immersion",
            "--graph",
            s(&g),
            "--colouring",
            s(&c),
            "-t",
            "3",
            "--out",
            s(&w),
            "--trace",
            s(&trace),
        ],
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.err);
    let report: serde_json::Value = serde_json::from_str(r.out.trim()).unwrap();
    assert!(report["base_case_hits"].as_u64().unwrap() >= 1);
    let r = oddimm(&["verify-immersion", "--graph", s(&g), "--witness", s(&w)], &[]);
    assert_eq!(r.code, 0);
    let (k83, c83) = generate(dir.path(), "K83", true);
    let r = oddimm(
        &[
            "extract-immersion",
            "--graph",
            s(&k83),
            "--colouring",
            s(&c83),
            "-t",
            "3",
        ],
        &[],
    );
    assert_eq!(r.code, 2);
    assert!(r.err.contains("84"), "{}", r.err);
}

#[test]
fn treewidth_decomposition_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (g, c) = generate(dir.path(), "K3,3", true);
    let td = dir.path().join("g.td");
    let r = oddimm(&["treewidth", "--graph", s(&g), "--decomposition", s(&td)], &[]);
    assert_eq!((r.code, r.out.as_str()), (0, "treewidth 3\n"));
    let r = oddimm(&["verify-td", "--graph", s(&g), "--decomposition", s(&td)], &[]);
    assert_eq!((r.code, r.out.as_str()), (0, "VALID width 3\n"));
    let (k4, ck4) = generate(dir.path(), "K4", true);
    let r = oddimm(&["check-tw-bound", "--graph", s(&k4), "--colouring", s(&ck4)], &[]);
    assert_eq!((r.code, r.out.as_str()), (0, "HOLDS tw=3 t=4\n"));
    // the identity 6-colouring of K3,3 is not an oddomorphism
    let r = oddimm(&["check-tw-bound", "--graph", s(&g), "--colouring", s(&c)], &[]);
    assert_eq!(r.code, 2);
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.txt");
    std::fs::write(&g, "p graph 3 2\ne 1 2\ne 1 9\n").unwrap();
    let r = oddimm(&["treewidth", "--graph", s(&g)], &[]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains(&format!("{}:3:", s(&g))), "{}", r.err);
    std::fs::write(&g, "p graph 2 1\ne 1 2\ne 1 2\n").unwrap();
    let r = oddimm(&["treewidth", "--graph", s(&g)], &[]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains(":3:"), "{}", r.err);
}

#[test]
fn budget_override() {
    let dir = tempfile::tempdir().unwrap();
    let (g, _) = generate(dir.path(), "K5,5+C7", false);
    let r = oddimm(
        &["search-odd", "--graph", s(&g), "-t", "4"],
        &[("ODDMORPH_BUDGET", "10")],
    );
    assert_eq!(r.code, 3, "{}{}", r.out, r.err);
    let r = oddimm(
        &["search-odd", "--graph", s(&g), "-t", "4"],
        &[("ODDMORPH_BUDGET", "lots")],
    );
    assert_eq!(r.code, 2);
}

fn arb_graph() -> impl Strategy<Value = MultiGraph> {
    (1u32..9).prop_flat_map(|n| {
        proptest::collection::vec((1..=n, 1..=n), 0..20).prop_map(move |pairs| {
            let edges: Vec<(u32, u32)> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            MultiGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn graph_files_round_trip(g in arb_graph()) {
        let text = write_graph(&g).unwrap();
        let back = parse_graph("g", &text).unwrap();
        prop_assert_eq!(write_graph(&back).unwrap(), text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn colourings_round_trip(cols in proptest::collection::vec(1u32..5, 1..10)) {
        let f = oddimm::colouring::VertexColouring::from_slice(4, &cols).unwrap();
        let text = write_colouring(&f).unwrap();
        prop_assert_eq!(parse_colouring("c", &text).unwrap(), f);
    }

    #[test]
    fn decompositions_and_witnesses_round_trip(g in arb_graph()) {
        let mut b = oddimm::error::Budget::unlimited();
        let (_, td) = oddimm::twidth::exact_treewidth(&g, &mut b).unwrap();
        let (back, n) = parse_td("td", &write_td(&td, g.vertex_count()).unwrap()).unwrap();
        prop_assert_eq!(n, g.vertex_count());
        prop_assert_eq!(back, td);
        let w = ImmersionWitness::identity(&g);
        let back = ImmersionWitness::from_json(&w.to_json()).unwrap();
        prop_assert!(verify_immersion(&g, &back));
        prop_assert_eq!(back, w);
    }
}
