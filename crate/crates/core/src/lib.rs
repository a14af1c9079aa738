//! Cost-optimal placement of UAV service VNFs over edge, aggregation, and
//! cloud hosts under per-UAV latency, reliability, bandwidth, and mobility
//! constraints.
//!
//! Pipeline: [`scenario::generate_scenario`] (or a scenario file) →
//! [`model::PlacementProblem::assemble`] → [`solver::solve_exact`] →
//! [`model::check_solution`]. The [`harness`] runs seeded experiment sweeps
//! and [`cli`] exposes all of it on the command line.

pub mod cli;
pub mod exec;
pub mod fleet;
pub mod harness;
pub mod model;
pub mod numfmt;
pub mod paths;
pub mod rng;
pub mod scenario;
pub mod solver;
pub mod topology;

pub use exec::Execution;
pub use fleet::{AttachmentSchedule, FlightPlan, Stop, TimeHorizon, Uav, UavDemand, UavId};
pub use model::{check_solution, objective_cost, PlacementProblem, PlacementSolution};
pub use scenario::{generate_scenario, Scenario};
pub use solver::{solve_bruteforce, solve_exact, SolveOutcome, SolveStatus, SolverOptions};
pub use topology::{NetworkGraph, NodeId, NodeKind, ScenarioParams};
