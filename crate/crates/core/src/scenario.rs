//! A complete planning input: infrastructure, fleet, and horizon, plus its
//! JSON file form.

use crate::fleet::{self, FleetError, TimeHorizon, Uav};
use crate::numfmt::canonical_json;
use crate::rng::SplitMix64;
use crate::topology::{
    generate_network, validate_topology, HostSpec, LinkSpec, NetworkGraph, NodeId, NodeKind,
    ParamsError, ScenarioParams, TopologyError,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: NetworkGraph,
    pub uavs: Vec<Uav>,
    pub horizon: TimeHorizon,
    pub seed: u64,
    pub params: Option<ScenarioParams>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Fleet(#[from] FleetError),
    #[error("malformed scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("node {index} listed with id {found}")]
    NodeOrder { index: usize, found: usize },
}

/// Same params (seed included) always yield the same scenario.
pub fn generate_scenario(params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    let mut rng = SplitMix64::new(params.seed);
    let graph = generate_network(params, &mut rng)?;
    let access: Vec<NodeId> = graph.nodes_of(NodeKind::Access).collect();
    let uavs = fleet::generate_fleet(params, &access, &mut rng);
    let scenario = Scenario {
        graph,
        uavs,
        horizon: TimeHorizon::new(params.periods),
        seed: params.seed,
        params: Some(params.clone()),
    };
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    /// Full check: topology invariants, demands, and plans.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let report = validate_topology(&self.graph);
        if !report.is_empty() {
            return Err(TopologyError::Invalid(report).into());
        }
        self.validate_fleet()?;
        Ok(())
    }

    /// Demands and plans only; the topology is not re-checked.
    pub fn validate_fleet(&self) -> Result<(), FleetError> {
        for (index, uav) in self.uavs.iter().enumerate() {
            if uav.id != index {
                return Err(FleetError::IdOrder { index, found: uav.id });
            }
            fleet::validate_demand(uav.id, &uav.demand)?;
            fleet::validate_plan(uav.id, &uav.plan, self.horizon, Some(&self.graph))?;
        }
        Ok(())
    }

    pub fn plans(&self) -> Vec<fleet::FlightPlan> {
        self.uavs.iter().map(|u| u.plan.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            nodes: self
                .graph
                .kinds()
                .iter()
                .enumerate()
                .map(|(id, kind)| NodeEntry { id, kind: *kind })
                .collect(),
            links: self.graph.links().to_vec(),
            hosts: self.graph.hosts().to_vec(),
            uavs: self.uavs.clone(),
            periods: self.horizon.periods,
            seed: self.seed,
            params: self.params.clone(),
        };
        canonical_json(&serde_json::to_value(file).expect("scenario serializes"))
    }

    /// Parses and fully validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario = Self::from_json_unchecked(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Parses without checking graph invariants (ids must still resolve).
    pub fn from_json_unchecked(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        let mut kinds = Vec::with_capacity(file.nodes.len());
        for (index, node) in file.nodes.iter().enumerate() {
            if node.id != index {
                return Err(ScenarioError::NodeOrder { index, found: node.id });
            }
            kinds.push(node.kind);
        }
        let graph = NetworkGraph::build(kinds, file.links, file.hosts)?;
        Ok(Self {
            graph,
            uavs: file.uavs,
            horizon: TimeHorizon::new(file.periods),
            seed: file.seed,
            params: file.params,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeEntry {
    id: usize,
    kind: NodeKind,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    nodes: Vec<NodeEntry>,
    links: Vec<LinkSpec>,
    hosts: Vec<HostSpec>,
    uavs: Vec<Uav>,
    periods: u32,
    seed: u64,
    params: Option<ScenarioParams>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_exact() {
        let s = generate_scenario(&ScenarioParams::desk(7, 4)).unwrap();
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn top_level_keys() {
        let s = generate_scenario(&ScenarioParams::desk(1, 1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["hosts", "links", "nodes", "params", "periods", "seed", "uavs"]);
        let uav = &v["uavs"][0];
        for key in ["demand", "bandwidth_mbps", "reliability", "latency_ms", "trajectory", "end_period"] {
            assert!(uav.get(key).is_some(), "missing {key}");
        }
        assert!(uav["trajectory"][0].get("arrive_period").is_some());
        assert_eq!(v["nodes"][0]["kind"], "access");
    }
}
