//! Solution files: solve status plus placements, serving assignments and
//! routes per UAV.

use super::{InfeasibilityWitness, SolveOutcome, SolveStatus};
use crate::model::{PlacementProblem, PlacementSolution, Route, Serving};
use crate::numfmt::{canonical_json, round12};
use crate::topology::NodeId;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub access: NodeId,
    pub serving_host: NodeId,
    pub route: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavRecord {
    pub uav: usize,
    pub placements: Vec<NodeId>,
    pub assignments: Vec<AssignmentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub status: SolveStatus,
    pub objective: Option<u64>,
    pub wall_time_s: f64,
    pub nodes_explored: u64,
    #[serde(default)]
    pub witness: Option<InfeasibilityWitness>,
    #[serde(default)]
    pub uavs: Vec<UavRecord>,
}

#[derive(Debug, Error)]
pub enum SolutionFileError {
    #[error("malformed solution file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("uav {uav}: route for access {access} is empty")]
    EmptyRoute { uav: usize, access: NodeId },
}

impl SolutionFile {
    pub fn from_outcome(outcome: &SolveOutcome) -> Self {
        let uavs = outcome.solution.as_ref().map_or_else(Vec::new, |sol| {
            sol.placements
                .iter()
                .map(|(&u, hosts)| UavRecord {
                    uav: u,
                    placements: hosts.iter().copied().collect(),
                    assignments: sol
                        .serving
                        .iter()
                        .filter(|s| s.uav == u)
                        .map(|s| AssignmentRecord {
                            access: s.access,
                            serving_host: s.host,
                            route: sol
                                .route(u, s.host, s.access)
                                .and_then(Route::node_sequence)
                                .unwrap_or_default(),
                        })
                        .collect(),
                })
                .collect()
        });
        Self {
            status: outcome.status,
            objective: outcome.objective(),
            wall_time_s: round12(outcome.wall_time.as_secs_f64()),
            nodes_explored: outcome.nodes_explored,
            witness: outcome.witness.clone(),
            uavs,
        }
    }

    pub fn to_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("serializable"))
    }

    pub fn from_json(text: &str) -> Result<Self, SolutionFileError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuilds the decision variables; the objective is recomputed from
    /// `problem`.
    pub fn to_solution(&self, problem: &PlacementProblem) -> Result<PlacementSolution, SolutionFileError> {
        let mut sol = PlacementSolution::default();
        for rec in &self.uavs {
            sol.placements.entry(rec.uav).or_default().extend(rec.placements.iter().copied());
            for a in &rec.assignments {
                if a.route.is_empty() {
                    return Err(SolutionFileError::EmptyRoute { uav: rec.uav, access: a.access });
                }
                sol.serving.push(Serving { uav: rec.uav, access: a.access, host: a.serving_host });
                sol.routes.push(Route {
                    uav: rec.uav,
                    host: a.serving_host,
                    access: a.access,
                    edges: a.route.windows(2).map(|w| (w[0], w[1])).collect(),
                });
            }
        }
        sol.serving.sort();
        sol.routes.sort();
        sol.objective = crate::model::objective_cost(problem, &sol);
        Ok(sol)
    }
}
