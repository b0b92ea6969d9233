//! The `oddimm` command line.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 usage,
//! parse or precondition error, 3 search budget exhausted. The step budget
//! defaults to [`Budget::DEFAULT`] and can be overridden with the
//! `ODDMORPH_BUDGET` environment variable.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::colouring::VertexColouring;
use crate::error::{Budget, Error, Result};
use crate::extract::extract_clique_immersion;
use crate::graph::MultiGraph;
use crate::homcount::{self, CountMethod, FamilySpec};
use crate::immersion::{check_immersion, find_immersion, ImmersionWitness};
use crate::io::{parse_colouring, parse_graph, write_colouring, write_graph};
use crate::oddmorph::{check_oddomorphism, search_oddomorphism};
use crate::twidth::{
    check_oddomorphism_treewidth_bound, check_tree_decomposition, exact_treewidth, parse_td, write_td,
};

pub const BUDGET_ENV: &str = "ODDMORPH_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "oddimm",
    version,
    about = "Oddomorphisms, clique immersions, treewidth and homomorphism counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Brute,
    Td,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a colouring is an oddomorphism.
    VerifyOdd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
    },
    /// Search for a t-oddomorphism of a simple graph.
    SearchOdd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        t: u32,
    },
    /// Check an immersion witness (JSON) against a host graph.
    VerifyImmersion {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Decide whether a pattern graph immerses in a host.
    FindImmersion {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a K_t immersion from a large oddomorphism.
    ExtractImmersion {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        #[arg(short)]
        t: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the surgery log as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exact treewidth, optionally writing an optimal decomposition.
    Treewidth {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// Check a tree decomposition file against a graph.
    VerifyTd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        decomposition: PathBuf,
    },
    /// Count homomorphisms from a source graph to a target graph.
    Homcount {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value = "td")]
        method: Method,
    },
    /// Find the first family member with different homomorphism counts.
    Distinguish {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        /// trees, cycles, paths, all, or list:FILE (one graph path per line)
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check tw(G) >= t - 1 for a t-oddomorphism.
    CheckTwBound {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
    },
    /// Print a named graph: K5, C6, P4, K3,3, S4 (star), sums like 2K3+C4.
    Generate {
        spec: String,
        /// Also write the identity colouring (vertex i gets colour i).
        #[arg(long)]
        identity_colouring: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name), runs one command, and
/// returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let mut budget = match std::env::var(BUDGET_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) => Budget::new(n),
            Err(_) => {
                let _ = writeln!(err, "error: {BUDGET_ENV} must be a non-negative integer, got `{v}`");
                return 2;
            }
        },
        Err(_) => Budget::default(),
    };
    match dispatch(cli.command, &mut budget, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BudgetExhausted(_) => 3,
                _ => 2,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        source_name: path.display().to_string(),
        line: 0,
        msg: format!("cannot read: {e}"),
    })
}

fn load_graph(path: &Path) -> Result<MultiGraph> {
    parse_graph(&path.display().to_string(), &read(path)?)
}

fn load_colouring(path: &Path) -> Result<VertexColouring> {
    parse_colouring(&path.display().to_string(), &read(path)?)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data")
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn emit_or_write(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => emit(out, text)?,
    }
    Ok(())
}

fn parse_family(name: &str, n: usize) -> Result<FamilySpec> {
    Ok(match name {
        "trees" => FamilySpec::Trees(n),
        "cycles" => FamilySpec::Cycles(n),
        "paths" => FamilySpec::Paths(n),
        "all" => FamilySpec::All(n),
        _ => match name.strip_prefix("list:") {
            Some(file) => {
                let list = Path::new(file);
                let base = list.parent().unwrap_or(Path::new("."));
                let mut graphs = Vec::new();
                for line in read(list)?.lines().map(str::trim) {
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let g = load_graph(&base.join(line))?;
                    if g.vertex_count() <= n {
                        graphs.push(g);
                    }
                }
                FamilySpec::List(graphs)
            }
            None => {
                return Err(Error::Precondition(format!(
                    "unknown family `{name}` (trees, cycles, paths, all, list:FILE)"
                )))
            }
        },
    })
}

/// Parses `K5`, `C6`, `P4`, `S3`, `K3,3`, `E4` (edgeless) with an optional
/// multiplier (`2K3`), joined by `+` into a disjoint union.
pub fn named_graph(spec: &str) -> Result<MultiGraph> {
    let bad = || Error::Precondition(format!("cannot parse graph name `{spec}`"));
    let mut g = MultiGraph::new();
    for term in spec.split('+') {
        let split = term.find(|c: char| !c.is_ascii_digit()).ok_or_else(bad)?;
        let times: u32 = if split == 0 {
            1
        } else {
            term[..split].parse().map_err(|_| bad())?
        };
        let (kind, rest) = term[split..].split_at(1);
        let nums: Vec<u32> = rest
            .split(',')
            .map(|s| s.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let one = match (kind, nums.as_slice()) {
            ("K", [n]) => MultiGraph::complete(*n),
            ("K", [a, b]) => MultiGraph::complete_bipartite(*a, *b),
            ("C", [n]) if *n >= 3 => MultiGraph::cycle(*n),
            ("P", [n]) => MultiGraph::path(*n),
            ("S", [k]) => MultiGraph::star(*k),
            ("E", [n]) => MultiGraph::empty(*n),
            _ => return Err(bad()),
        };
        for _ in 0..times {
            g = g.disjoint_union(&one);
        }
    }
    Ok(g)
}

fn dispatch(command: Command, budget: &mut Budget, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::VerifyOdd { graph, colouring } => {
            let g = load_graph(&graph)?;
            let f = load_colouring(&colouring)?;
            match check_oddomorphism(&g, &f) {
                Ok(report) => {
                    emit(out, &format!("VALID\n{}\n", json(&report)))?;
                    Ok(0)
                }
                Err(fail) => {
                    emit(out, &format!("INVALID {fail}\n{}\n", json(&fail)))?;
                    Ok(1)
                }
            }
        }
        Command::SearchOdd { graph, t } => {
            let g = load_graph(&graph)?;
            match search_oddomorphism(&g, t, budget)? {
                Some(f) => {
                    emit(out, &write_colouring(&f)?)?;
                    Ok(0)
                }
                None => {
                    emit(out, &format!("NONE (t={t})\n"))?;
                    Ok(1)
                }
            }
        }
        Command::VerifyImmersion { graph, witness } => {
            let g = load_graph(&graph)?;
            let w = ImmersionWitness::from_json(&read(&witness)?)?;
            match check_immersion(&g, &w) {
                Ok(()) => {
                    emit(out, "VALID\n")?;
                    Ok(0)
                }
                Err(fail) => {
                    emit(out, &format!("INVALID {fail}\n{}\n", json(&fail)))?;
                    Ok(1)
                }
            }
        }
        Command::FindImmersion {
            graph,
            pattern,
            out: path,
        } => {
            let g = load_graph(&graph)?;
            let h = load_graph(&pattern)?;
            match find_immersion(&g, &h, budget)? {
                Some(w) => {
                    emit_or_write(out, path.as_deref(), &w.to_json())?;
                    Ok(0)
                }
                None => {
                    emit(out, "NONE\n")?;
                    Ok(1)
                }
            }
        }
        Command::ExtractImmersion {
            graph,
            colouring,
            t,
            out: path,
            trace,
        } => {
            let g = load_graph(&graph)?;
            let f = load_colouring(&colouring)?;
            let x = extract_clique_immersion(&g, &f, t, budget)?;
            if let Some(trace) = trace {
                std::fs::write(trace, serde_json::to_string_pretty(&x.log)? + "\n")?;
            }
            emit_or_write(out, path.as_deref(), &x.witness.to_json())?;
            if path.is_some() {
                emit(out, &format!("{}\n", json(&x.report)))?;
            }
            Ok(0)
        }
        Command::Treewidth { graph, decomposition } => {
            let g = load_graph(&graph)?;
            let (w, td) = exact_treewidth(&g, budget)?;
            if let Some(p) = decomposition {
                std::fs::write(p, write_td(&td, g.vertex_count())?)?;
            }
            emit(out, &format!("treewidth {w}\n"))?;
            Ok(0)
        }
        Command::VerifyTd { graph, decomposition } => {
            let g = load_graph(&graph)?;
            let (td, n) = parse_td(&decomposition.display().to_string(), &read(&decomposition)?)?;
            if n != g.vertex_count() {
                return Err(Error::Precondition(format!(
                    "decomposition is for {n} vertices, graph has {}",
                    g.vertex_count()
                )));
            }
            match check_tree_decomposition(&g, &td) {
                Ok(width) => {
                    emit(out, &format!("VALID width {width}\n"))?;
                    Ok(0)
                }
                Err(fail) => {
                    emit(out, &format!("INVALID {fail}\n{}\n", json(&fail)))?;
                    Ok(1)
                }
            }
        }
        Command::Homcount { source, target, method } => {
            let f = load_graph(&source)?;
            let g = load_graph(&target)?;
            let method = match method {
                Method::Brute => CountMethod::Brute,
                Method::Td => CountMethod::Td,
            };
            let count = homcount::hom_count(&f, &g, method, budget)?;
            emit(out, &format!("{count}\n"))?;
            Ok(0)
        }
        Command::Distinguish {
            g,
            h,
            family,
            max_size,
            jobs,
        } => {
            let gg = load_graph(&g)?;
            let hh = load_graph(&h)?;
            let fam = parse_family(&family, max_size)?;
            let found = match jobs {
                Some(j) if j > 1 => homcount::distinguish_parallel(&gg, &hh, &fam, j, budget.limit())?,
                _ => homcount::distinguish(&gg, &hh, &fam, budget)?,
            };
            match found {
                Some(d) => {
                    emit(
                        out,
                        &format!(
                            "# hom(F, g) = {}, hom(F, h) = {}\n{}",
                            d.count_g,
                            d.count_h,
                            write_graph(&d.graph)?
                        ),
                    )?;
                    Ok(0)
                }
                None => {
                    emit(out, &format!("INDISTINGUISHABLE (bound={max_size})\n"))?;
                    Ok(1)
                }
            }
        }
        Command::CheckTwBound { graph, colouring } => {
            let g = load_graph(&graph)?;
            let f = load_colouring(&colouring)?;
            let r = check_oddomorphism_treewidth_bound(&g, &f, budget)?;
            if r.holds {
                emit(out, &format!("HOLDS tw={} t={}\n", r.treewidth, r.t))?;
                Ok(0)
            } else {
                // a counterexample: print everything needed to reproduce it
                emit(
                    out,
                    &format!(
                        "VIOLATED tw={} t={}\n{}{}",
                        r.treewidth,
                        r.t,
                        write_graph(&g)?,
                        write_colouring(&f)?
                    ),
                )?;
                Ok(1)
            }
        }
        Command::Generate {
            spec,
            identity_colouring,
        } => {
            let g = named_graph(&spec)?;
            if let Some(p) = identity_colouring {
                std::fs::write(p, write_colouring(&VertexColouring::identity(&g))?)?;
            }
            emit(out, &write_graph(&g)?)?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("oddimm").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn named_graphs() {
        assert_eq!(named_graph("K4").unwrap().edge_count(), 6);
        assert_eq!(named_graph("K3,3").unwrap().edge_count(), 9);
        let g = named_graph("2K3").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 6));
        let g = named_graph("C4+P3+E2").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 6));
        for bad in ["", "X3", "K", "C2", "3", "K3,"] {
            assert!(named_graph(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["verify-odd"]).0, 2);
        assert_eq!(run_str(&["nonsense"]).0, 2);
        let (code, _, err) = run_str(&["verify-odd", "--graph", "/nonexistent.txt", "--colouring", "x"]);
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent.txt"));
        let (code, out, _) = run_str(&["--version"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("oddimm "));
    }

    #[test]
    fn generate_prints_graph_file() {
        let (code, out, _) = run_str(&["generate", "C4"]);
        assert_eq!(code, 0);
        assert_eq!(out, "p graph 4 4\ne 1 2\ne 2 3\ne 3 4\ne 1 4\n");
    }
}
