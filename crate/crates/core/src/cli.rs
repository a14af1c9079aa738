//! Command-line front end: `generate`, `solve`, `validate`, `export-lp`,
//! and `experiment`.

use crate::exec::Execution;
use crate::harness::{run_experiment, write_results, ExperimentConfig, Profile, Suite};
use crate::model::lp::{export_lp, solution_from_variables};
use crate::model::{check_solution, PlacementProblem};
use crate::scenario::{generate_scenario, Scenario};
use crate::solver::file::SolutionFile;
use crate::solver::{solve, SolveMode, SolveStatus, SolverOptions, InfeasibilityWitness};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const SEED_ENV: &str = "ORCH_SEED";

#[derive(Debug, Parser)]
#[command(name = "vnfplace", version, about = "Cost-optimal UAV VNF placement planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded scenario file.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = parse_profile)]
        profile: Profile,
        #[arg(long)]
        uavs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a scenario and write a solution file.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        pool: PoolArgs,
        /// Seconds.
        #[arg(long, default_value_t = 60.0, value_parser = parse_seconds)]
        time_limit: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::BranchAndBound)]
        mode: ModeArg,
        /// Search root subtrees on all cores.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a solution file (or a variable → 0/1 JSON map) against every constraint.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Write the placement ILP in LP text format.
    ExportLp {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment suite and write `<suite>.csv` and `summary.csv`.
    Experiment {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        /// Number of seeds, starting at `--seed`.
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "desk", value_parser = parse_profile)]
        profile: Profile,
        /// Fleet size when the suite does not sweep it.
        #[arg(long, default_value_t = 4)]
        uavs: usize,
        /// Comma-separated sweep values replacing the suite default.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long, default_value_t = 60.0, value_parser = parse_seconds)]
        time_limit: f64,
        /// Run cells one at a time.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Args)]
struct PoolArgs {
    /// Candidate paths per (host, access point): an integer or `inf`.
    #[arg(long, default_value = "8", value_parser = parse_k)]
    k_paths: KPaths,
}

#[derive(Debug, Clone, Copy)]
struct KPaths(Option<usize>);

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    BranchAndBound,
    BruteForce,
}

fn parse_k(s: &str) -> Result<KPaths, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(KPaths(None));
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("`{s}` is not a positive integer or `inf`")),
        Ok(k) => Ok(KPaths(Some(k))),
    }
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number of seconds")),
    }
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    Profile::from_str(s)
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::from_str(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Internal(String),
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn seed_override(seed: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(seed),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    Scenario::from_json(&read(path)?).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Generate { seed, profile, uavs, out } => {
            let params = profile.params(seed_override(seed)?, uavs);
            let scenario = generate_scenario(&params).map_err(|e| Failure::Usage(e.to_string()))?;
            write(&out, &scenario.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Solve { scenario, pool, time_limit, mode, parallel, out } => {
            let scenario = load_scenario(&scenario)?;
            let opts = SolverOptions {
                time_limit: Duration::from_secs_f64(time_limit),
                k_paths: pool.k_paths.0,
                mode: match mode {
                    ModeArg::BranchAndBound => SolveMode::BranchAndBound,
                    ModeArg::BruteForce => SolveMode::BruteForce,
                },
                search: if parallel { Execution::Parallel } else { Execution::Sequential },
            };
            let problem =
                PlacementProblem::assemble_lenient(&scenario, opts.k_paths, Execution::Parallel).map_err(internal)?;
            let outcome = solve(&problem, &opts).map_err(internal)?;
            write(&out, &SolutionFile::from_outcome(&outcome).to_json())?;
            match (outcome.status, &outcome.solution) {
                (_, Some(sol)) => {
                    println!("{} objective={} nodes={}", outcome.status.as_str(), sol.objective, outcome.nodes_explored);
                    Ok(EXIT_OK)
                }
                (SolveStatus::Infeasible, None) => {
                    match outcome.witness {
                        Some(InfeasibilityWitness::NoCandidate { uav, access }) => {
                            println!("infeasible: uav {uav} at access {access} has no QoS-feasible host")
                        }
                        _ => println!("infeasible: every candidate combination exceeds a capacity or bandwidth bound"),
                    }
                    Ok(EXIT_INFEASIBLE)
                }
                (_, None) => {
                    println!("time limit reached without a feasible placement");
                    Ok(EXIT_INFEASIBLE)
                }
            }
        }
        Command::Validate { scenario, solution } => {
            let scenario = load_scenario(&scenario)?;
            let problem = PlacementProblem::assemble_lenient(&scenario, Some(1), Execution::Sequential).map_err(internal)?;
            let text = read(&solution)?;
            let candidate = match SolutionFile::from_json(&text) {
                Ok(file) => file.to_solution(&problem).map_err(internal)?,
                Err(file_err) => {
                    let vars: BTreeMap<String, u8> = serde_json::from_str(&text).map_err(|_| internal(file_err))?;
                    solution_from_variables(&problem, &vars).map_err(internal)?
                }
            };
            let report = check_solution(&problem, &candidate);
            if report.is_empty() {
                println!("ok: objective={}", candidate.objective);
                Ok(EXIT_OK)
            } else {
                println!("{report}");
                Ok(EXIT_INFEASIBLE)
            }
        }
        Command::ExportLp { scenario, out } => {
            let scenario = load_scenario(&scenario)?;
            let problem = PlacementProblem::assemble_lenient(&scenario, Some(1), Execution::Sequential).map_err(internal)?;
            write(&out, &export_lp(&problem))?;
            Ok(EXIT_OK)
        }
        Command::Experiment { suite, seeds, out_dir, seed, profile, uavs, sweep, pool, time_limit, sequential } => {
            let base = seed_override(seed)?;
            let mut config = ExperimentConfig::new(suite, (0..seeds).map(|i| base.wrapping_add(i)).collect());
            config.profile = profile;
            config.uavs = uavs;
            if let Some(sweep) = sweep {
                config.sweep = sweep;
            }
            config.solver.k_paths = pool.k_paths.0;
            config.solver.time_limit = Duration::from_secs_f64(time_limit);
            config.exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let result = run_experiment(&config).map_err(internal)?;
            write_results(&result, suite, &out_dir).map_err(internal)?;
            for row in &result.summary {
                println!("{}", row.to_csv());
            }
            Ok(EXIT_OK)
        }
    }
}
