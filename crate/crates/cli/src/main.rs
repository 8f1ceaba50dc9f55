//! Command line front end. Graphs travel as "n m" / "u v" text, path
//! systems and brambles as JSON. Exit codes: 0 success, 1 verification or
//! runtime failure, 2 usage error, 3 construction gap.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bramble_core::harness::{
    bramble_order, checks, gen_bidirected_grid, gen_cylindrical_grid, gen_grid_path_system,
    verify_bramble,
};
use bramble_core::orchestrator::{compute_params, run_pipeline, Overrides};
use bramble_core::{Bramble, Digraph, Error, PathSystem};

#[derive(Parser)]
#[command(name = "bramble", version, about = "Build and check constant-congestion brambles")]
struct Cli {
    /// Machine-readable JSON on standard output where applicable.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    /// Every undirected grid edge as two opposite arcs.
    Bidirected,
    /// Concentric directed cycles with alternating radial paths.
    Cylindrical,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a g x g grid digraph.
    GenGrid {
        #[arg(long)]
        g: usize,
        #[arg(long, value_enum, default_value = "bidirected")]
        kind: GridKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a validated path system over a bidirected grid.
    GenPs {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        /// Path system JSON.
        #[arg(long)]
        out: PathBuf,
        /// Companion grid; omit if the graph is already on disk.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Run the pipeline and write the bramble it extracts.
    Extract {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        ps: PathBuf,
        /// Target order of the bramble.
        #[arg(long)]
        k: usize,
        /// Scale on the exact parameter schedule, in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Defaults to $BRAMBLE_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Where to put the run report; defaults next to --out.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Desk-scale replacements for single effective parameters. The
        /// exact schedule grows so fast that sigma alone cannot reach
        /// every small regime.
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        d1: Option<usize>,
        #[arg(long)]
        d2: Option<usize>,
        #[arg(long)]
        d3: Option<usize>,
    },
    /// Re-check a bramble against its graph from scratch.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        bramble: PathBuf,
    },
    /// Hitting-set order of a bramble, exact up to --cap elements.
    Order {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        bramble: PathBuf,
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
    /// Run the nine acceptance checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConstructionGap(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Digraph, Error> {
    Digraph::parse(&read(path)?)
}

fn seed_or_env(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("BRAMBLE_SEED").ok()?.parse().ok()).unwrap_or(0)
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.cmd {
        Cmd::GenGrid { g, kind, out } => {
            let (dg, name) = match kind {
                GridKind::Bidirected => (gen_bidirected_grid(*g, *g)?, "bidirected"),
                GridKind::Cylindrical => (gen_cylindrical_grid(*g)?, "cylindrical"),
            };
            write(out, &dg.to_text())?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "kind": name, "g": g, "vertices": dg.n(), "arcs": dg.arc_count(),
                        "path": out.display().to_string(),
                    })
                );
            } else {
                println!(
                    "{name} {g}x{g} grid: {} vertices, {} arcs -> {}",
                    dg.n(),
                    dg.arc_count(),
                    out.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::GenPs { g, a, b, out, graph_out } => {
            let (dg, ps) = gen_grid_path_system(*g, *a, *b)?;
            write(out, &ps.to_json())?;
            if let Some(gp) = graph_out {
                write(gp, &dg.to_text())?;
            }
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "g": g, "a": a, "b": b,
                        "exhaustively_checked": 2 * a * b <= 12,
                        "path": out.display().to_string(),
                    })
                );
            } else {
                println!(
                    "path system on the {g}x{g} grid, {a} paths with {b} marks a side -> {}",
                    out.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Extract { graph, ps, k, sigma, seed, out, report, b, d1, d2, d3 } => {
            let dg = load_graph(graph)?;
            let (system, shape) = PathSystem::from_json(&dg, &read(ps)?)?;
            if !shape.violations.is_empty() {
                eprintln!("path system rejected: {:?}", shape.violations[0]);
                return Ok(ExitCode::from(1));
            }
            let overrides = Overrides { a: None, b: *b, d1: *d1, d2: *d2, d3: *d3 };
            let params =
                compute_params(*k, *sigma, seed_or_env(*seed))?.with_overrides(&overrides);
            let (bramble, run) = run_pipeline(&dg, &system, &params)?;
            let check = verify_bramble(&dg, &bramble);
            if !check.is_valid() {
                eprintln!("pipeline output failed re-verification: {:?}", check.violations[0]);
                return Ok(ExitCode::from(1));
            }
            write(out, &bramble.to_json())?;
            let report_path = report
                .clone()
                .unwrap_or_else(|| out.with_extension("report.json"));
            write(&report_path, &run.to_json())?;
            if cli.json {
                println!("{}", run.to_json());
            } else {
                let route = match run.case {
                    0 => "dense shortcut".to_string(),
                    c => format!("case {c}"),
                };
                println!(
                    "{route}: {} elements, congestion {}{} -> {}",
                    run.bramble_size,
                    run.congestion,
                    if run.size_shortfall { " (below target order)" } else { "" },
                    out.display()
                );
                for gap in &run.gaps {
                    println!("note: {gap}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { graph, bramble } => {
            let dg = load_graph(graph)?;
            let b = match Bramble::from_json(&dg, &read(bramble)?) {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("bramble rejected while loading: {e}");
                    return Ok(ExitCode::from(1));
                }
            };
            let rep = verify_bramble(&dg, &b);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
            } else if rep.is_valid() {
                println!("valid: {} elements, congestion {}", rep.size, rep.congestion);
            } else {
                for v in &rep.violations {
                    println!("violation: {v:?}");
                }
            }
            Ok(if rep.is_valid() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Order { graph, bramble, cap } => {
            let dg = load_graph(graph)?;
            let b = Bramble::from_json(&dg, &read(bramble)?)?;
            let bounds = bramble_order(&dg, &b, *cap);
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "exact": bounds.exact, "lower": bounds.lower, "upper": bounds.upper,
                    })
                );
            } else {
                match bounds.exact {
                    Some(t) => println!("order {t} (bounds {}..={})", bounds.lower, bounds.upper),
                    None => println!(
                        "order within {}..={} ({} elements exceed the cap {cap})",
                        bounds.lower,
                        bounds.upper,
                        b.size()
                    ),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Selftest => {
            let mut failed = 0usize;
            for (n, label, f) in checks() {
                match f() {
                    Ok(note) => println!("criterion {n} ({label}): PASS - {note}"),
                    Err(e) => {
                        failed += 1;
                        println!("criterion {n} ({label}): FAIL - {e}");
                    }
                }
            }
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
