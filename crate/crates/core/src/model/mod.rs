//! The placement ILP instance: service pairs, candidate-path pool, solution
//! representation, objective, constraint checker, and LP export.

mod check;
pub mod lp;

pub use check::{check_solution, ConstraintId, Violation, ViolationReport};

use crate::exec::Execution;
use crate::fleet::{self, AttachmentSchedule, FleetError, Period, UavId};
use crate::paths::{candidate_paths_batch, CandidatePath, PathError, PathRequest};
use crate::scenario::Scenario;
use crate::topology::{NodeId, NodeKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Candidate paths from one host for one service pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HostPaths {
    /// Index into the graph's host list.
    pub host: usize,
    pub paths: Vec<CandidatePath>,
}

/// One (UAV, access point of its trajectory) combination that needs exactly
/// one serving host.
#[derive(Debug, Clone, PartialEq)]
pub struct ServicePair {
    pub uav: UavId,
    pub access: NodeId,
    /// Position of `access` among the trajectory's distinct access points.
    pub trajectory_index: usize,
    /// Periods with Z_{u,a,t} = 1.
    pub periods: Vec<Period>,
}

impl ServicePair {
    pub fn dwell(&self) -> u32 {
        self.periods.len() as u32
    }
}

/// Candidate (host, path) options per service pair, hosts in host-index
/// order, paths in canonical order. Hosts without a feasible path are absent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathPool {
    per_pair: Vec<Vec<HostPaths>>,
}

impl PathPool {
    pub fn options(&self, pair: usize) -> &[HostPaths] {
        &self.per_pair[pair]
    }

    pub fn paths(&self, pair: usize, host: usize) -> &[CandidatePath] {
        self.per_pair[pair]
            .iter()
            .find(|hp| hp.host == host)
            .map_or(&[], |hp| hp.paths.as_slice())
    }

    pub fn option_count(&self, pair: usize) -> usize {
        self.per_pair[pair].iter().map(|hp| hp.paths.len()).sum()
    }
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Fleet(#[from] FleetError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("uav {uav} at access {access}: no host has a QoS-feasible path (constraint 4 unsatisfiable)")]
    NoCandidate { uav: UavId, access: NodeId },
}

#[derive(Debug, Clone)]
pub struct PlacementProblem {
    pub scenario: Scenario,
    pub schedule: AttachmentSchedule,
    pub pairs: Vec<ServicePair>,
    pub pool: PathPool,
    /// `None` keeps every feasible simple path.
    pub k_paths: Option<usize>,
    /// Pairs with an empty candidate set, in pair order.
    pub infeasible: Vec<(UavId, NodeId)>,
}

impl PlacementProblem {
    /// Builds the instance and fails on the first pair without candidates.
    pub fn assemble(
        scenario: &Scenario,
        k_paths: Option<usize>,
        exec: Execution,
    ) -> Result<Self, AssemblyError> {
        let problem = Self::assemble_lenient(scenario, k_paths, exec)?;
        if let Some(&(uav, access)) = problem.infeasible.first() {
            return Err(AssemblyError::NoCandidate { uav, access });
        }
        Ok(problem)
    }

    /// Builds the instance and records pairs without candidates instead of failing.
    pub fn assemble_lenient(
        scenario: &Scenario,
        k_paths: Option<usize>,
        exec: Execution,
    ) -> Result<Self, AssemblyError> {
        scenario.validate_fleet()?;
        let schedule = fleet::derive_attachment_schedule(&scenario.plans(), scenario.horizon)?;
        let mut pairs = Vec::new();
        for uav in &scenario.uavs {
            for (idx, access) in uav.plan.access_points().into_iter().enumerate() {
                pairs.push(ServicePair {
                    uav: uav.id,
                    access,
                    trajectory_index: idx,
                    periods: schedule.periods_at(uav.id, access),
                });
            }
        }

        let graph = &scenario.graph;
        let mut requests = Vec::new();
        for pair in &pairs {
            let d = &scenario.uavs[pair.uav].demand;
            for host in graph.hosts() {
                requests.push(PathRequest {
                    host: host.node,
                    access: pair.access,
                    latency_ms: d.latency_ms,
                    reliability: d.reliability,
                });
            }
        }
        let found = candidate_paths_batch(graph, &requests, k_paths, exec)?;
        let mut found = found.into_iter();
        let mut per_pair = Vec::with_capacity(pairs.len());
        let mut infeasible = Vec::new();
        for pair in &pairs {
            let mut options = Vec::new();
            for host in 0..graph.hosts().len() {
                let paths = found.next().expect("one answer per request");
                if !paths.is_empty() {
                    options.push(HostPaths { host, paths });
                }
            }
            if options.is_empty() {
                infeasible.push((pair.uav, pair.access));
            }
            per_pair.push(options);
        }
        Ok(Self {
            scenario: scenario.clone(),
            schedule,
            pairs,
            pool: PathPool { per_pair },
            k_paths,
            infeasible,
        })
    }

    pub fn pair_index(&self, uav: UavId, access: NodeId) -> Option<usize> {
        self.pairs.iter().position(|p| p.uav == uav && p.access == access)
    }

    /// dwell · D_u · C_h for serving `pair` from host index `host`.
    pub fn option_cost(&self, pair: usize, host: usize) -> u64 {
        let p = &self.pairs[pair];
        p.dwell() as u64
            * self.scenario.uavs[p.uav].demand.demand
            * self.scenario.graph.host(host).unit_cost
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Serving {
    pub uav: UavId,
    pub access: NodeId,
    pub host: NodeId,
}

/// The support of Y for one (uav, host, access) triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Route {
    pub uav: UavId,
    pub host: NodeId,
    pub access: NodeId,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl Route {
    pub fn from_path(uav: UavId, path: &CandidatePath) -> Self {
        Self { uav, host: path.host, access: path.access, edges: path.edges().collect() }
    }

    /// Node sequence when the edges chain from host to access, else `None`.
    pub fn node_sequence(&self) -> Option<Vec<NodeId>> {
        let mut seq = vec![self.host];
        for (i, j) in &self.edges {
            if seq.last() != Some(i) {
                return None;
            }
            seq.push(*j);
        }
        Some(seq)
    }
}

/// Decision variables with value 1: placements X, serving assignments K,
/// and route supports Y.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlacementSolution {
    pub placements: BTreeMap<UavId, BTreeSet<NodeId>>,
    pub serving: Vec<Serving>,
    pub routes: Vec<Route>,
    pub objective: u64,
}

impl PlacementSolution {
    /// Solution serving each pair from the given (host index, path) choice.
    pub fn from_choices(problem: &PlacementProblem, choices: &[(usize, &CandidatePath)]) -> Self {
        let graph = &problem.scenario.graph;
        let mut sol = PlacementSolution::default();
        for uav in &problem.scenario.uavs {
            sol.placements.insert(uav.id, BTreeSet::new());
        }
        for (pair, (host, path)) in problem.pairs.iter().zip(choices) {
            let node = graph.host(*host).node;
            sol.placements.entry(pair.uav).or_default().insert(node);
            sol.serving.push(Serving { uav: pair.uav, access: pair.access, host: node });
            sol.routes.push(Route::from_path(pair.uav, path));
        }
        sol.serving.sort();
        sol.routes.sort();
        sol.objective = objective_cost(problem, &sol);
        sol
    }

    pub fn serving_host(&self, uav: UavId, access: NodeId) -> Option<NodeId> {
        self.serving.iter().find(|s| s.uav == uav && s.access == access).map(|s| s.host)
    }

    pub fn route(&self, uav: UavId, host: NodeId, access: NodeId) -> Option<&Route> {
        self.routes.iter().find(|r| r.uav == uav && r.host == host && r.access == access)
    }
}

/// Σ over serving assignments of dwell(u, a) · D_u · C_h.
pub fn objective_cost(problem: &PlacementProblem, solution: &PlacementSolution) -> u64 {
    let graph = &problem.scenario.graph;
    solution
        .serving
        .iter()
        .filter_map(|s| {
            let uav = problem.scenario.uavs.get(s.uav)?;
            let host = graph.host_index(s.host)?;
            let dwell = fleet::dwell_periods(&problem.schedule, s.uav, s.access) as u64;
            Some(dwell * uav.demand.demand * graph.host(host).unit_cost)
        })
        .sum()
}

/// Tier of a host node, as reported in experiment output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HostTier {
    EdgeBs,
    EdgeAgg,
    Cloud,
}

impl HostTier {
    pub fn of_kind(kind: NodeKind) -> Option<Self> {
        match kind {
            NodeKind::EdgeHostBs => Some(HostTier::EdgeBs),
            NodeKind::EdgeHostAgg => Some(HostTier::EdgeAgg),
            NodeKind::CloudHost => Some(HostTier::Cloud),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HostTier::EdgeBs => "edge_bs",
            HostTier::EdgeAgg => "edge_agg",
            HostTier::Cloud => "cloud",
        }
    }
}
