mod input;

use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use graphon_core::cutmetric::{cut_norm, delta_box_bounds, SearchMode};
use graphon_core::finite::{check_kwpr, k_core, sample_graph, to_edge_list};
use graphon_core::kcore::{brute_force_degeneracy, decompose, kappa_core, BRUTE_FORCE_LIMIT};
use graphon_core::verify::{run_suite, Suite};
use graphon_core::{StepGraphon, ASSERT_TOL};

use input::{load_graph, load_operand, Source};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input; exit code 2.
    Input { field: String, message: String },
    /// A check or oracle comparison failed; exit code 3.
    Check(String),
}

impl CliError {
    pub fn input(field: &str, message: impl Display) -> Self {
        CliError::Input {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input { field, message } => write!(f, "invalid {field}: {message}"),
            CliError::Check(message) => write!(f, "check failed: {message}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "graphon", version, about = "Cores, degeneracy and cut distances of step graphons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Local,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the κ-core iteration and print every stage
    Core {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        kappa: f64,
    },
    /// Degeneracy by greedy peeling
    Degeneracy {
        #[command(flatten)]
        source: Source,
        /// Cross-check against brute force over block subsets
        #[arg(long)]
        oracle: bool,
    },
    /// Shell index of every block and the peeling order
    Shells {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        oracle: bool,
    },
    /// Edge density with the degeneracy bounds δ² ≤ e ≤ δ(2-δ)
    Density {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        oracle: bool,
    },
    /// Exact cut norm of the difference, with a maximizing rectangle
    Cutnorm {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        blocks: Option<usize>,
    },
    /// Lower and upper bounds on the cut distance
    Cutdist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Mode::Local)]
        mode: Mode,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample a W-random graph and print it as an edge list
    Sample {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-core of a finite graph given as an edge list
    GraphCore {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Check the degeneracy/edge-count sandwich for a finite graph
    Kwpr {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a seeded property suite
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Core mass |K_κ| on a uniform κ grid, as CSV
    Curve {
        #[command(flatten)]
        source: Source,
        /// Number of grid points on [0, 1]
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

fn assert_tol() -> Result<f64, CliError> {
    match std::env::var("GRAPHON_TOL") {
        Err(_) => Ok(ASSERT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t >= 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::input("GRAPHON_TOL", format!("{s:?} is not a nonnegative number"))),
        },
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn check_kappa(kappa: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&kappa) {
        Ok(())
    } else {
        Err(CliError::input("--kappa", format!("{kappa} is outside [0, 1]")))
    }
}

fn blocks_of(set: &graphon_core::ActiveSet) -> Vec<usize> {
    set.members().collect()
}

/// Brute-force degeneracy next to the peeled value, failing on mismatch.
fn oracle(g: &StepGraphon, peeled: f64, tol: f64) -> Result<serde_json::Value, CliError> {
    let (brute, witness) = brute_force_degeneracy(g).map_err(|e| {
        CliError::input("--oracle", format!("{e}; brute force is limited to {BRUTE_FORCE_LIMIT} blocks"))
    })?;
    if (brute - peeled).abs() > tol {
        return Err(CliError::Check(format!("peeling gives {peeled} but brute force gives {brute}")));
    }
    Ok(json!({ "brute_force": brute, "witness_blocks": blocks_of(&witness), "agrees": true }))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = assert_tol()?;
    match cli.command {
        Command::Core { source, kappa } => {
            check_kappa(kappa)?;
            let loaded = source.load()?;
            let g = loaded.step();
            let trace = kappa_core(g, kappa).map_err(|e| CliError::input("--kappa", e))?;
            let stages: Vec<_> = trace
                .stages
                .iter()
                .map(|s| json!({ "blocks": blocks_of(s), "mass": s.mass() }))
                .collect();
            let terminal = blocks_of(&trace.terminal);
            let interval = match (terminal.first(), terminal.last()) {
                (Some(&lo), Some(&hi)) if hi - lo + 1 == terminal.len() => {
                    Some([g.boundaries()[lo], g.boundaries()[hi + 1]])
                }
                _ => None,
            };
            print_json(&json!({
                "kappa": kappa,
                "blocks": g.block_count(),
                "stages": stages,
                "terminal_blocks": terminal,
                "mass": trace.terminal.mass(),
                "interval": interval,
            }));
        }
        Command::Degeneracy { source, oracle: check } => {
            let loaded = source.load()?;
            let g = loaded.step();
            let dec = decompose(g);
            let mut out = json!({ "degeneracy": dec.degeneracy, "blocks": g.block_count() });
            if check {
                out["oracle"] = oracle(g, dec.degeneracy, tol)?;
            }
            print_json(&out);
        }
        Command::Shells { source, oracle: check } => {
            let loaded = source.load()?;
            let g = loaded.step();
            let dec = decompose(g);
            let mut out = json!({
                "shells": dec.shells,
                "degeneracy": dec.degeneracy,
                "peel_order": dec.peel_order,
            });
            if check {
                out["oracle"] = oracle(g, dec.degeneracy, tol)?;
            }
            print_json(&out);
        }
        Command::Density { source, oracle: check } => {
            let loaded = source.load()?;
            let g = loaded.step();
            let delta = decompose(g).degeneracy;
            let e = g.edge_density();
            let (lower, upper) = (delta * delta, delta * (2.0 - delta));
            let within = lower - tol <= e && e <= upper + tol;
            let mut out = json!({
                "edge_density": e,
                "degeneracy": delta,
                "lower_bound": lower,
                "upper_bound": upper,
                "within_bounds": within,
            });
            if check {
                out["oracle"] = oracle(g, delta, tol)?;
                if !within {
                    return Err(CliError::Check(format!("e = {e} is outside [{lower}, {upper}]")));
                }
            }
            print_json(&out);
        }
        Command::Cutnorm { a, b, blocks } => {
            let g1 = load_operand(&a, blocks, "--a")?;
            let g2 = load_operand(&b, blocks, "--b")?;
            let w = cut_norm(&g1, &g2).map_err(|e| CliError::input("--a/--b", e))?;
            print_json(&w);
        }
        Command::Cutdist {
            a,
            b,
            blocks,
            grid,
            mode,
            restarts,
            seed,
        } => {
            let g1 = load_operand(&a, blocks, "--a")?;
            let g2 = load_operand(&b, blocks, "--b")?;
            let mode = match mode {
                Mode::Exhaustive => SearchMode::Exhaustive,
                Mode::Local => SearchMode::Local { restarts, seed },
            };
            let est = delta_box_bounds(&g1, &g2, grid, mode).map_err(|e| CliError::input("--grid", e))?;
            print_json(&est);
        }
        Command::Sample { source, n, seed, out } => {
            let loaded = source.load()?;
            let text = to_edge_list(&sample_graph(&loaded, n, seed));
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| CliError::input("--out", format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
        }
        Command::GraphCore { input, k } => {
            let g = load_graph(&input)?;
            let nodes = k_core(&g, k);
            print_json(&json!({ "k": k, "count": nodes.len(), "nodes": nodes }));
        }
        Command::Kwpr { input, json } => {
            let g = load_graph(&input)?;
            let report = check_kwpr(&g);
            if json {
                print_json(&report);
            } else {
                println!("{report}");
            }
            if !report.holds {
                return Err(CliError::Check(report.to_string()));
            }
        }
        Command::Verify { suite, trials, seed } => {
            let suite: Suite = suite.parse().map_err(|e| CliError::input("--suite", e))?;
            let report = run_suite(suite, trials, seed, tol).map_err(|e| CliError::input("--suite", e))?;
            print_json(&report);
            if !report.passed() {
                let seeds: Vec<String> = report.failures.iter().map(|f| f.seed.to_string()).collect();
                return Err(CliError::Check(format!(
                    "{} failure(s) in suite {}; seeds: {}",
                    report.failures.len(),
                    report.suite,
                    seeds.join(", ")
                )));
            }
        }
        Command::Curve { source, grid } => {
            if grid < 2 {
                return Err(CliError::input("--grid", "needs at least 2 points"));
            }
            let loaded = source.load()?;
            let g = loaded.step();
            let shells = decompose(g).shells;
            println!("kappa,mass");
            for i in 0..grid {
                let kappa = i as f64 / (grid - 1) as f64;
                // K_κ = {shell ≥ κ}, the same set the core iteration reaches
                let mass: f64 = (0..g.block_count())
                    .filter(|&b| shells[b] >= kappa - graphon_core::TOL)
                    .fold(0.0, |acc, b| acc + g.mass(b));
                println!("{kappa},{mass}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
