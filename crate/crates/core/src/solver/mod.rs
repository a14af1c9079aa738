//! Exact placement solvers: branch-and-bound over (serving host, candidate
//! path) choices per service pair, and an exhaustive oracle for tiny
//! instances.

mod bnb;
mod brute;
pub mod file;

pub use brute::{solve_bruteforce, solve_bruteforce_with, BruteForceLimits};

use crate::exec::Execution;
use crate::fleet::UavId;
use crate::model::{PlacementProblem, PlacementSolution};
use crate::paths::DEFAULT_K_PATHS;
use crate::topology::{NodeId, NodeKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    BranchAndBound,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub time_limit: Duration,
    /// Candidate paths per (host, access) used at assembly; `None` keeps all.
    pub k_paths: Option<usize>,
    pub mode: SolveMode,
    /// Whether root subtrees are searched on the rayon pool. The returned
    /// status, objective, and assignment do not depend on this; the
    /// explored-node count does.
    pub search: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(60),
            k_paths: Some(DEFAULT_K_PATHS),
            mode: SolveMode::BranchAndBound,
            search: Execution::Sequential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimeLimitIncumbent,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimitIncumbent => "time_limit_incumbent",
        }
    }
}

/// Why no feasible placement exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InfeasibilityWitness {
    /// No host has a QoS-feasible path to this access point.
    NoCandidate { uav: UavId, access: NodeId },
    /// Every combination of candidates breaks a capacity or bandwidth bound.
    CapacityConflict,
}

/// (host index, path index within that host's pool) for one service pair.
pub type Choice = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solution: Option<PlacementSolution>,
    /// Chosen option per service pair, in pair order.
    pub assignment: Vec<Choice>,
    pub witness: Option<InfeasibilityWitness>,
    pub nodes_explored: u64,
    pub wall_time: Duration,
}

impl SolveOutcome {
    pub fn objective(&self) -> Option<u64> {
        self.solution.as_ref().map(|s| s.objective)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("uav {uav}: trajectory references node {node}, which is not an access node")]
    Inconsistent { uav: UavId, node: NodeId },
    #[error("instance exceeds brute-force guard rails: {0}")]
    TooLarge(String),
}

/// Pairs in branch order: decreasing D_u · dwell, then uav id, then
/// trajectory order.
pub fn branch_order(problem: &PlacementProblem) -> Vec<usize> {
    let mut order: Vec<usize> = (0..problem.pairs.len()).collect();
    let weight = |i: usize| {
        let p = &problem.pairs[i];
        problem.scenario.uavs[p.uav].demand.demand * p.dwell() as u64
    };
    order.sort_by(|&x, &y| {
        let (px, py) = (&problem.pairs[x], &problem.pairs[y]);
        weight(y)
            .cmp(&weight(x))
            .then(px.uav.cmp(&py.uav))
            .then(px.trajectory_index.cmp(&py.trajectory_index))
    });
    order
}

fn check_consistency(problem: &PlacementProblem) -> Result<(), SolveError> {
    let graph = &problem.scenario.graph;
    for uav in &problem.scenario.uavs {
        for stop in &uav.plan.trajectory {
            if graph.kind(stop.access) != Some(NodeKind::Access) {
                return Err(SolveError::Inconsistent { uav: uav.id, node: stop.access });
            }
        }
    }
    for pair in &problem.pairs {
        if graph.kind(pair.access) != Some(NodeKind::Access) {
            return Err(SolveError::Inconsistent { uav: pair.uav, node: pair.access });
        }
    }
    Ok(())
}

/// Pair index → chosen option, for partially built placements.
pub type PartialAssignment = BTreeMap<usize, Choice>;

/// Σ over unassigned pairs of the cheapest path-feasible host cost,
/// ignoring capacity and bandwidth. `u64::MAX` when some unassigned pair
/// has no candidate at all.
pub fn lower_bound(problem: &PlacementProblem, partial: &PartialAssignment) -> u64 {
    (0..problem.pairs.len())
        .filter(|p| !partial.contains_key(p))
        .map(|p| min_option_cost(problem, p).unwrap_or(u64::MAX))
        .fold(0u64, |acc, c| acc.saturating_add(c))
}

pub(crate) fn min_option_cost(problem: &PlacementProblem, pair: usize) -> Option<u64> {
    problem.pool.options(pair).iter().map(|hp| problem.option_cost(pair, hp.host)).min()
}

/// Minimum-cost feasible placement within the candidate-path pool. Equal
/// cost optima are resolved towards the lexicographically smallest
/// (host index, path index) vector in branch order.
pub fn solve_exact(problem: &PlacementProblem, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    check_consistency(problem)?;
    Ok(bnb::run(problem, opts))
}

/// Dispatches on `opts.mode`.
pub fn solve(problem: &PlacementProblem, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    match opts.mode {
        SolveMode::BranchAndBound => solve_exact(problem, opts),
        SolveMode::BruteForce => solve_bruteforce(problem),
    }
}
