//! Seeded experiment sweeps over generated scenarios, with per-cell metric
//! rows and per-sweep aggregates written as CSV.

use crate::exec::{map_ordered, Execution};
use crate::fleet::UavId;
use crate::model::{check_solution, AssemblyError, HostTier, PlacementProblem, PlacementSolution, ViolationReport};
use crate::numfmt::g12;
use crate::scenario::{generate_scenario, Scenario, ScenarioError};
use crate::solver::{solve_exact, SolveError, SolveStatus, SolverOptions};
use crate::topology::{IntRange, NetworkGraph, NodeId, ScenarioParams};
use statrs::statistics::Statistics;
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    CostVsUavs,
    RuntimeVsUavs,
    ReplicatesVsMissionLength,
    TierVsQos,
}

impl Suite {
    pub const ALL: [Suite; 4] =
        [Suite::CostVsUavs, Suite::RuntimeVsUavs, Suite::ReplicatesVsMissionLength, Suite::TierVsQos];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::CostVsUavs => "cost_vs_uavs",
            Suite::RuntimeVsUavs => "runtime_vs_uavs",
            Suite::ReplicatesVsMissionLength => "replicates_vs_mission_length",
            Suite::TierVsQos => "tier_vs_qos",
        }
    }

    /// Default sweep: UAV counts, stops per mission, or forced L_u in ms.
    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            Suite::CostVsUavs | Suite::RuntimeVsUavs => vec![2.0, 4.0, 6.0, 8.0],
            Suite::ReplicatesVsMissionLength => vec![1.0, 3.0, 5.0, 8.0],
            Suite::TierVsQos => vec![2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Table1,
    Desk,
}

impl Profile {
    pub fn params(self, seed: u64, uavs: usize) -> ScenarioParams {
        match self {
            Profile::Table1 => ScenarioParams::table1(seed, uavs),
            Profile::Desk => ScenarioParams::desk(seed, uavs),
        }
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table1" => Ok(Profile::Table1),
            "desk" => Ok(Profile::Desk),
            _ => Err(format!("unknown profile `{s}` (expected table1 or desk)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seeds: Vec<u64>,
    pub profile: Profile,
    pub sweep: Vec<f64>,
    /// Fleet size for suites that do not sweep it.
    pub uavs: usize,
    pub solver: SolverOptions,
    /// How (seed, sweep) cells are scheduled.
    pub exec: Execution,
}

impl ExperimentConfig {
    pub fn new(suite: Suite, seeds: Vec<u64>) -> Self {
        Self {
            suite,
            seeds,
            profile: Profile::Desk,
            sweep: suite.default_sweep(),
            uavs: 4,
            solver: SolverOptions::default(),
            exec: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("at least one seed is required".into()));
        }
        if self.sweep.is_empty() {
            return Err(HarnessError::Config("sweep values must be non-empty".into()));
        }
        if self.solver.time_limit.is_zero() {
            return Err(HarnessError::Config("time limit must be positive".into()));
        }
        let integral = |v: f64| v >= 1.0 && v.fract() == 0.0;
        match self.suite {
            Suite::CostVsUavs | Suite::RuntimeVsUavs | Suite::ReplicatesVsMissionLength => {
                if let Some(v) = self.sweep.iter().find(|v| !integral(**v)) {
                    return Err(HarnessError::Config(format!("sweep value {v} must be a positive integer")));
                }
            }
            Suite::TierVsQos => {
                if let Some(v) = self.sweep.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return Err(HarnessError::Config(format!("latency tolerance {v} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// The scenario of one (seed, sweep value) cell.
    pub fn scenario(&self, seed: u64, sweep: f64) -> Result<Scenario, ScenarioError> {
        let mut params = self.profile.params(seed, self.uavs);
        match self.suite {
            Suite::CostVsUavs | Suite::RuntimeVsUavs => params.uavs = sweep as usize,
            Suite::ReplicatesVsMissionLength => params.mission_stops = IntRange::fixed(sweep as u64),
            Suite::TierVsQos => {}
        }
        let mut scenario = generate_scenario(&params)?;
        if self.suite == Suite::TierVsQos {
            for uav in &mut scenario.uavs {
                uav.demand.latency_ms = sweep;
            }
        }
        Ok(scenario)
    }
}

/// Per-UAV QoS demand and the farthest tier serving it.
#[derive(Debug, Clone, PartialEq)]
pub struct UavMetrics {
    pub uav: UavId,
    pub latency_ms: f64,
    pub reliability: f64,
    pub replicates: usize,
    pub tier: HostTier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub suite: Suite,
    pub seed: u64,
    pub sweep: f64,
    pub status: SolveStatus,
    pub objective: Option<u64>,
    pub wall_time_s: f64,
    pub nodes_explored: u64,
    pub mean_replicates: Option<f64>,
    pub uavs: Vec<UavMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub suite: Suite,
    pub sweep: f64,
    pub seeds: usize,
    pub optimal: usize,
    pub infeasible: usize,
    /// Seeds that are Optimal at every sweep value; the statistics below
    /// are taken over these.
    pub common: usize,
    pub objective: MeanStd,
    pub wall_time_s: MeanStd,
    pub replicates: MeanStd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: Option<f64>,
    pub std_dev: Option<f64>,
}

impl MeanStd {
    fn of(values: &[f64]) -> Self {
        let mean = (!values.is_empty()).then(|| values.mean());
        let std_dev = (values.len() > 1).then(|| values.std_dev());
        Self { mean, std_dev }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<MetricsRow>,
    pub summary: Vec<SummaryRow>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("seed {seed}, sweep {sweep}: {source}")]
    Scenario { seed: u64, sweep: f64, source: ScenarioError },
    #[error("seed {seed}, sweep {sweep}: {source}")]
    Assembly { seed: u64, sweep: f64, source: AssemblyError },
    #[error("seed {seed}, sweep {sweep}: {source}")]
    Solve { seed: u64, sweep: f64, source: SolveError },
    #[error("seed {seed}, sweep {sweep}: solver returned a solution that fails validation:\n{report}")]
    InvalidSolution { seed: u64, sweep: f64, report: ViolationReport },
    #[error("uav {0} is not served by the solution")]
    UnknownUav(UavId),
    #[error("node {0} is not a host")]
    NotAHost(NodeId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// |X(u)|: distinct hosts serving `u`.
pub fn replicate_count(solution: &PlacementSolution, u: UavId) -> Result<usize, HarnessError> {
    let hosts: BTreeSet<NodeId> = solution.serving.iter().filter(|s| s.uav == u).map(|s| s.host).collect();
    if hosts.is_empty() {
        return Err(HarnessError::UnknownUav(u));
    }
    Ok(hosts.len())
}

pub fn classify_host_tier(graph: &NetworkGraph, h: NodeId) -> Result<HostTier, HarnessError> {
    graph.kind(h).and_then(HostTier::of_kind).ok_or(HarnessError::NotAHost(h))
}

fn run_cell(config: &ExperimentConfig, seed: u64, sweep: f64) -> Result<MetricsRow, HarnessError> {
    let scenario = config.scenario(seed, sweep).map_err(|source| HarnessError::Scenario { seed, sweep, source })?;
    let problem = PlacementProblem::assemble_lenient(&scenario, config.solver.k_paths, Execution::Sequential)
        .map_err(|source| HarnessError::Assembly { seed, sweep, source })?;
    let mut row = MetricsRow {
        suite: config.suite,
        seed,
        sweep,
        status: SolveStatus::Infeasible,
        objective: None,
        wall_time_s: 0.0,
        nodes_explored: 0,
        mean_replicates: None,
        uavs: Vec::new(),
    };
    if !problem.infeasible.is_empty() {
        return Ok(row);
    }
    let opts = SolverOptions { search: Execution::Sequential, ..config.solver.clone() };
    let outcome = solve_exact(&problem, &opts).map_err(|source| HarnessError::Solve { seed, sweep, source })?;
    row.status = outcome.status;
    row.wall_time_s = outcome.wall_time.as_secs_f64();
    row.nodes_explored = outcome.nodes_explored;
    let Some(solution) = &outcome.solution else {
        return Ok(row);
    };
    let report = check_solution(&problem, solution);
    if !report.is_empty() {
        return Err(HarnessError::InvalidSolution { seed, sweep, report });
    }
    row.objective = Some(solution.objective);
    let graph = &scenario.graph;
    for uav in &scenario.uavs {
        let tier = solution
            .serving
            .iter()
            .filter(|s| s.uav == uav.id)
            .map(|s| classify_host_tier(graph, s.host))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .ok_or(HarnessError::UnknownUav(uav.id))?;
        row.uavs.push(UavMetrics {
            uav: uav.id,
            latency_ms: uav.demand.latency_ms,
            reliability: uav.demand.reliability,
            replicates: replicate_count(solution, uav.id)?,
            tier,
        });
    }
    if !row.uavs.is_empty() {
        row.mean_replicates =
            Some(row.uavs.iter().map(|m| m.replicates as f64).sum::<f64>() / row.uavs.len() as f64);
    }
    Ok(row)
}

/// Runs every (seed, sweep value) cell, validating each returned solution.
/// Rows come back sorted by sweep value, then seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    config.validate()?;
    let mut cells: Vec<(f64, u64)> =
        config.sweep.iter().flat_map(|&v| config.seeds.iter().map(move |&s| (v, s))).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    cells.dedup();
    let rows = map_ordered(config.exec, &cells, |&(sweep, seed)| run_cell(config, seed, sweep))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(config.suite, &rows);
    Ok(ExperimentResult { rows, summary })
}

fn summarize(suite: Suite, rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut sweeps: Vec<f64> = rows.iter().map(|r| r.sweep).collect();
    sweeps.dedup();
    let seeds: BTreeSet<u64> = rows.iter().map(|r| r.seed).collect();
    let common: BTreeSet<u64> = seeds
        .into_iter()
        .filter(|s| rows.iter().filter(|r| r.seed == *s).all(|r| r.status == SolveStatus::Optimal))
        .collect();
    sweeps
        .into_iter()
        .map(|sweep| {
            let at: Vec<&MetricsRow> = rows.iter().filter(|r| r.sweep == sweep).collect();
            let kept: Vec<&MetricsRow> = at.iter().copied().filter(|r| common.contains(&r.seed)).collect();
            let collect = |f: &dyn Fn(&MetricsRow) -> Option<f64>| -> Vec<f64> {
                kept.iter().filter_map(|r| f(r)).collect()
            };
            SummaryRow {
                suite,
                sweep,
                seeds: at.len(),
                optimal: at.iter().filter(|r| r.status == SolveStatus::Optimal).count(),
                infeasible: at.iter().filter(|r| r.status == SolveStatus::Infeasible).count(),
                common: kept.len(),
                objective: MeanStd::of(&collect(&|r| r.objective.map(|o| o as f64))),
                wall_time_s: MeanStd::of(&collect(&|r| Some(r.wall_time_s))),
                replicates: MeanStd::of(&collect(&|r| r.mean_replicates)),
            }
        })
        .collect()
}

pub const ROW_HEADER: &str = "suite,sweep,seed,status,objective,wall_time_s,nodes_explored,mean_replicates,uav_latency_ms,uav_reliability,uav_replicates,uav_tier";

pub const SUMMARY_HEADER: &str = "suite,sweep,seeds,optimal,infeasible,common_seeds,objective_mean,objective_std,wall_time_s_mean,wall_time_s_std,replicates_mean,replicates_std";

fn opt_g12(v: Option<f64>) -> String {
    v.map(g12).unwrap_or_default()
}

fn joined<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(";")
}

impl MetricsRow {
    /// Per-UAV columns are `;`-separated in UAV order.
    pub fn to_csv(&self) -> String {
        [
            self.suite.as_str().to_string(),
            g12(self.sweep),
            self.seed.to_string(),
            self.status.as_str().to_string(),
            self.objective.map(|o| o.to_string()).unwrap_or_default(),
            g12(self.wall_time_s),
            self.nodes_explored.to_string(),
            opt_g12(self.mean_replicates),
            joined(&self.uavs, |m| g12(m.latency_ms)),
            joined(&self.uavs, |m| g12(m.reliability)),
            joined(&self.uavs, |m| m.replicates.to_string()),
            joined(&self.uavs, |m| m.tier.as_str().to_string()),
        ]
        .join(",")
    }
}

impl SummaryRow {
    pub fn to_csv(&self) -> String {
        [
            self.suite.as_str().to_string(),
            g12(self.sweep),
            self.seeds.to_string(),
            self.optimal.to_string(),
            self.infeasible.to_string(),
            self.common.to_string(),
            opt_g12(self.objective.mean),
            opt_g12(self.objective.std_dev),
            opt_g12(self.wall_time_s.mean),
            opt_g12(self.wall_time_s.std_dev),
            opt_g12(self.replicates.mean),
            opt_g12(self.replicates.std_dev),
        ]
        .join(",")
    }
}

pub fn rows_csv(rows: &[MetricsRow]) -> String {
    let mut out = format!("{ROW_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Writes `<suite>.csv` and `summary.csv` into `dir`, creating it if needed.
pub fn write_results(result: &ExperimentResult, suite: Suite, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{}.csv", suite.as_str())), rows_csv(&result.rows))?;
    std::fs::write(dir.join("summary.csv"), summary_csv(&result.summary))?;
    Ok(())
}
