use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use monogamy::classical::{classical_value_with_cap, optimal_assignment_on_graph, DEFAULT_SEARCH_CAP};
use monogamy::game::{extend_over_graph, magic_square};
use monogamy::graph::is_isomorphic;
use monogamy::npa::{self, scan_csv, scan_points, Level, ScanRow, SdpStatus, Verdict};
use monogamy::quantum::magic_square_strategy;
use monogamy::rational::format_rational;
use monogamy::report::{monogamy_report, polygamy_report, ReportOptions, DEFAULT_ADVANTAGE_TOL};
use monogamy::sos::SosIdentity;
use monogamy::{Error, Game, Graph, Result};

#[derive(Parser)]
#[command(name = "monogamy", version, about = "Monogamy of nonlocal games over graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical value of a game, or of its extension over a graph.
    ValueClassical {
        /// Built-in name (chsh, oc3, ms, ...) or a JSON file.
        #[arg(long)]
        game: String,
        /// Built-in name (P4, star-1,2,2, ...) or an edge-list/JSON file.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u64,
    },
    /// NPA upper bound on the quantum value over a graph.
    BoundQuantum {
        #[arg(long)]
        game: String,
        #[arg(long)]
        graph: String,
        /// 1, 1+edge-pairs, 2, 2+local or 3.
        #[arg(long, default_value = "2")]
        level: Level,
        #[arg(long, default_value_t = npa::DEFAULT_TOL)]
        tol: f64,
    },
    /// Classify a game as monogamous or list the graphs with an advantage.
    MonogamyReport {
        #[arg(long)]
        game: String,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        /// Slack between a certified bound and the classical value.
        #[arg(long, default_value_t = DEFAULT_ADVANTAGE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = npa::DEFAULT_TOL)]
        solver_tol: f64,
        /// Comma-separated levels tried in order.
        #[arg(long, value_delimiter = ',', default_values_t = Level::LADDER.to_vec())]
        levels: Vec<Level>,
    },
    /// Exact check of a sum-of-squares identity.
    VerifySos {
        /// p3, p4, p4-weighted, p4-main, or file:<path>.
        #[arg(long)]
        identity: String,
    },
    /// NPA feasibility over the slice B_AB = B_CD = B_EF = x, B_BC = B_DE = y.
    ScanRegion {
        #[arg(long, default_value = "P6")]
        graph: String,
        /// `lo:hi:step` for both axes, or `lo:hi:step,lo:hi:step`.
        #[arg(long, default_value = "0:3:0.1")]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "2")]
        level: Level,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = default_threads())]
        threads: usize,
    },
    /// Two simultaneous magic-square instances on P3 and the OR-bound check.
    PolygamyDemo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        games: usize,
    },
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_axis(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("grid axis {text:?} is not lo:hi:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [v] => Ok(vec![v]),
        [lo, hi, step] if step > 0.0 && hi >= lo => {
            let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            if n > npa::MAX_SCAN_POINTS {
                return Err(Error::Capacity(format!("{n} points on one axis")));
            }
            Ok((0..n).map(|i| lo + step * i as f64).collect())
        }
        _ => Err(bad()),
    }
}

fn parse_grid(text: &str) -> Result<Vec<(f64, f64)>> {
    let (xs, ys) = match text.split_once(',') {
        Some((x, y)) => (parse_axis(x)?, parse_axis(y)?),
        None => (parse_axis(text)?, parse_axis(text)?),
    };
    if xs.len().saturating_mul(ys.len()) > npa::MAX_SCAN_POINTS {
        return Err(Error::Capacity(format!("{}x{} grid exceeds the cap {}", xs.len(), ys.len(), npa::MAX_SCAN_POINTS)));
    }
    Ok(xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect())
}

fn value_classical(game: &Game, graph: Option<&str>, cap: u64) -> Result<Value> {
    let h = graph.map(Graph::load).transpose()?;
    match h {
        Some(h) if !is_isomorphic(&h, &Graph::path(2)) => {
            let opt = optimal_assignment_on_graph(game, &h, cap)?;
            Ok(json!({ "omega_graph": format_rational(&opt.value) }))
        }
        _ => Ok(json!({ "omega_classical": format_rational(&classical_value_with_cap(game, cap)?) })),
    }
}

fn scan_summary(rows: &[ScanRow], out: &std::path::Path) -> Value {
    let count = |v: Verdict| rows.iter().filter(|r| r.npa == v).count();
    // inside both analytic regions yet infeasible: the relaxation is an
    // outer bound, so these are genuine exclusions worth a second look
    let flagged: Vec<Value> = rows
        .iter()
        .filter(|r| r.inside_quadratic && r.inside_linear && r.npa != Verdict::Feasible)
        .map(|r| json!({ "x": r.x, "y": r.y, "npa_feasible": r.npa.as_str() }))
        .collect();
    let outside_feasible = rows
        .iter()
        .filter(|r| !(r.inside_quadratic && r.inside_linear) && r.npa == Verdict::Feasible)
        .count();
    json!({
        "out": out.display().to_string(),
        "points": rows.len(),
        "feasible": count(Verdict::Feasible),
        "infeasible": count(Verdict::Infeasible),
        "inconclusive": count(Verdict::Inconclusive),
        "feasible_outside_regions": outside_feasible,
        "flagged_inside_regions": flagged,
    })
}

fn run(cli: Cli) -> Result<(Value, i32)> {
    match cli.command {
        Command::ValueClassical { game, graph, cap } => {
            Ok((value_classical(&Game::load(&game)?, graph.as_deref(), cap)?, 0))
        }
        Command::BoundQuantum { game, graph, level, tol } => {
            let gg = extend_over_graph(&Game::load(&game)?, &Graph::load(&graph)?)?;
            let r = npa::quantum_upper_bound(&gg, level, tol)?;
            let code = if r.status == SdpStatus::Optimal { 0 } else { 4 };
            Ok((r.to_json(), code))
        }
        Command::MonogamyReport { game, max_k, tol, solver_tol, levels } => {
            let opts = ReportOptions { max_k, levels, tol, solver_tol };
            let r = monogamy_report(&Game::load(&game)?, &opts)?;
            let code = if r.classification == "inconclusive" { 4 } else { 0 };
            Ok((r.to_json(), code))
        }
        Command::VerifySos { identity } => {
            let id = SosIdentity::load(&identity)?;
            let mut out = id.verify().to_json();
            out["identity"] = json!(id.label);
            if id.bell.is_some() {
                if let Ok(b) = id.certified_bound() {
                    out["certified_bound"] = json!(b.to_string());
                    out["certified_bound_f64"] = json!(b.to_f64());
                }
            }
            Ok((out, 0))
        }
        Command::ScanRegion { graph, grid, out, level, tol, threads } => {
            if !is_isomorphic(&Graph::load(&graph)?, &Graph::path(6)) {
                return Err(Error::Invalid(format!("the slice is defined on P6, not {graph:?}")));
            }
            let points = parse_grid(&grid)?;
            log::info!("scanning {} points at level {level} on {threads} threads", points.len());
            let rows = scan_points(&points, level, tol, threads)?;
            std::fs::write(&out, scan_csv(&rows))?;
            let summary = scan_summary(&rows, &out);
            for f in summary["flagged_inside_regions"].as_array().into_iter().flatten() {
                log::warn!("inside both analytic regions but not NPA-feasible: {f}");
            }
            let code = if summary["inconclusive"].as_u64() == Some(0) { 0 } else { 4 };
            Ok((summary, code))
        }
        Command::PolygamyDemo { seed, games } => {
            let r = polygamy_report(&magic_square(), &magic_square_strategy(), seed, games)?;
            if r.classical_flagged {
                log::warn!(
                    "brute-force classical value {} differs from the cited {}",
                    format_rational(&r.base_classical),
                    r.cited_classical.as_deref().unwrap_or("?")
                );
            }
            Ok((r.to_json(), 0))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok((value, code)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json output"));
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
