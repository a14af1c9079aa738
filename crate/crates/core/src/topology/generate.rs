//! Seeded scenario parameters and the infrastructure generator.
//!
//! Draw order (fixed, all from one SplitMix64 stream):
//! 1. core spanning tree (Aldous-Broder walk over the pure core nodes);
//! 2. extra core links until the mean core degree reaches 3;
//! 3. two core uplinks per aggregation point;
//! 4. cloud host attachment points;
//! 5. link parameters in link-id order (latency, failure probability, bandwidth);
//! 6. host parameters in host order (capacity, cost).
//!
//! The fleet is drawn afterwards from the same stream, UAV by UAV, so a fleet
//! of `n` UAVs is a prefix of the fleet of `n + 1` UAVs for the same seed.

use super::{HostSpec, LinkSpec, NetworkGraph, NodeId, NodeKind, TopologyError};
use crate::numfmt::round12;
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub min: u64,
    pub max: u64,
}

impl IntRange {
    pub const fn new(min: u64, max: u64) -> Self {
        Self { min, max }
    }
    pub fn fixed(v: u64) -> Self {
        Self { min: v, max: v }
    }
    pub fn contains(&self, v: u64) -> bool {
        (self.min..=self.max).contains(&v)
    }
    pub(crate) fn draw(&self, rng: &mut SplitMix64) -> u64 {
        rng.int_in(self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRange {
    pub min: f64,
    pub max: f64,
}

impl RealRange {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }
    pub fn fixed(v: f64) -> Self {
        Self { min: v, max: v }
    }
    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }
    /// Draws and rounds to 12 significant digits; the rounded value stays in range.
    pub(crate) fn draw(&self, rng: &mut SplitMix64) -> f64 {
        round12(rng.real_in(self.min, self.max)).clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub seed: u64,
    pub base_stations: usize,
    pub edge_hosts: usize,
    pub aggregation_hosts: usize,
    pub cloud_hosts: usize,
    /// Transport/core transit nodes, aggregation points included.
    pub core_nodes: usize,
    pub edge_capacity: IntRange,
    pub edge_cost: IntRange,
    pub aggregation_capacity: IntRange,
    pub aggregation_cost: IntRange,
    pub cloud_capacity: IntRange,
    pub cloud_cost: IntRange,
    pub link_latency_ms: RealRange,
    pub link_failure_prob: RealRange,
    pub link_bandwidth_mbps: IntRange,
    pub periods: u32,
    pub uavs: usize,
    pub uav_demand: IntRange,
    pub uav_bandwidth_mbps: IntRange,
    pub uav_reliability: RealRange,
    pub uav_latency_ms: RealRange,
    /// Base stations per trajectory.
    pub mission_stops: IntRange,
}

impl ScenarioParams {
    /// The full evaluation profile.
    pub fn table1(seed: u64, uavs: usize) -> Self {
        Self {
            seed,
            base_stations: 20,
            edge_hosts: 20,
            aggregation_hosts: 3,
            cloud_hosts: 15,
            core_nodes: 37,
            edge_capacity: IntRange::new(200, 400),
            edge_cost: IntRange::new(500, 1000),
            aggregation_capacity: IntRange::new(400, 800),
            aggregation_cost: IntRange::new(250, 500),
            cloud_capacity: IntRange::new(800, 1600),
            cloud_cost: IntRange::new(100, 300),
            link_latency_ms: RealRange::new(1.0, 3.0),
            link_failure_prob: RealRange::new(0.0, 0.01),
            link_bandwidth_mbps: IntRange::new(1000, 10000),
            periods: 30,
            uavs,
            uav_demand: IntRange::new(10, 20),
            uav_bandwidth_mbps: IntRange::new(50, 100),
            uav_reliability: RealRange::new(0.95, 0.99),
            uav_latency_ms: RealRange::new(1.0, 50.0),
            mission_stops: IntRange::new(1, 3),
        }
    }

    /// Reduced topology sized for exact solving in seconds.
    pub fn desk(seed: u64, uavs: usize) -> Self {
        Self {
            base_stations: 8,
            edge_hosts: 8,
            aggregation_hosts: 2,
            cloud_hosts: 4,
            core_nodes: 12,
            periods: 10,
            ..Self::table1(seed, uavs)
        }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let counts = [
            ("base_stations", self.base_stations),
            ("edge_hosts", self.edge_hosts),
            ("aggregation_hosts", self.aggregation_hosts),
            ("cloud_hosts", self.cloud_hosts),
            ("core_nodes", self.core_nodes),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(ParamsError::ZeroCount(name));
            }
        }
        if self.edge_hosts > self.base_stations {
            return Err(ParamsError::Counts(format!(
                "{} edge hosts cannot be co-located 1:1 with {} base stations",
                self.edge_hosts, self.base_stations
            )));
        }
        if self.core_nodes <= self.aggregation_hosts {
            return Err(ParamsError::Counts(format!(
                "{} core nodes leave no pure core node beside {} aggregation points",
                self.core_nodes, self.aggregation_hosts
            )));
        }
        if self.periods == 0 {
            return Err(ParamsError::ZeroCount("periods"));
        }
        let positive_int = [
            ("edge_capacity", self.edge_capacity),
            ("edge_cost", self.edge_cost),
            ("aggregation_capacity", self.aggregation_capacity),
            ("aggregation_cost", self.aggregation_cost),
            ("cloud_capacity", self.cloud_capacity),
            ("cloud_cost", self.cloud_cost),
            ("link_bandwidth_mbps", self.link_bandwidth_mbps),
            ("uav_demand", self.uav_demand),
            ("uav_bandwidth_mbps", self.uav_bandwidth_mbps),
            ("mission_stops", self.mission_stops),
        ];
        for (name, r) in positive_int {
            if r.min > r.max || r.min == 0 {
                return Err(ParamsError::Range(name));
            }
        }
        let reals = [
            ("link_latency_ms", self.link_latency_ms, f64::MIN_POSITIVE, f64::INFINITY),
            ("link_failure_prob", self.link_failure_prob, 0.0, 1.0 - f64::EPSILON),
            ("uav_reliability", self.uav_reliability, f64::MIN_POSITIVE, 1.0),
            ("uav_latency_ms", self.uav_latency_ms, f64::MIN_POSITIVE, f64::INFINITY),
        ];
        for (name, r, lo, hi) in reals {
            if !(r.min <= r.max && r.min >= lo && r.max <= hi) {
                return Err(ParamsError::Range(name));
            }
        }
        if self.mission_stops.max > self.periods as u64 {
            return Err(ParamsError::Counts(format!(
                "missions of up to {} stops do not fit in {} periods",
                self.mission_stops.max, self.periods
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("count `{0}` must be positive")]
    ZeroCount(&'static str),
    #[error("range `{0}` is empty or out of bounds")]
    Range(&'static str),
    #[error("impossible counts: {0}")]
    Counts(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Node id layout produced by [`generate_network`].
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub base_stations: Vec<NodeId>,
    pub aggregation_points: Vec<NodeId>,
    pub core: Vec<NodeId>,
    pub edge_hosts: Vec<NodeId>,
    pub aggregation_hosts: Vec<NodeId>,
    pub cloud_hosts: Vec<NodeId>,
}

impl Layout {
    fn new(p: &ScenarioParams) -> (Self, Vec<NodeKind>) {
        let mut kinds = Vec::new();
        let mut take = |count: usize, kind: NodeKind| -> Vec<NodeId> {
            let start = kinds.len();
            kinds.extend(std::iter::repeat_n(kind, count));
            (start..start + count).map(NodeId).collect()
        };
        let base_stations = take(p.base_stations, NodeKind::Access);
        let aggregation_points = take(p.aggregation_hosts, NodeKind::Transit);
        let core = take(p.core_nodes - p.aggregation_hosts, NodeKind::Transit);
        let edge_hosts = take(p.edge_hosts, NodeKind::EdgeHostBs);
        let aggregation_hosts = take(p.aggregation_hosts, NodeKind::EdgeHostAgg);
        let cloud_hosts = take(p.cloud_hosts, NodeKind::CloudHost);
        (
            Self {
                base_stations,
                aggregation_points,
                core,
                edge_hosts,
                aggregation_hosts,
                cloud_hosts,
            },
            kinds,
        )
    }
}

/// Generates the infrastructure graph, leaving `rng` positioned for the fleet draws.
pub fn generate_network(
    params: &ScenarioParams,
    rng: &mut SplitMix64,
) -> Result<NetworkGraph, ParamsError> {
    params.validate()?;
    let (layout, kinds) = Layout::new(params);
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let mut present: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut add = |pairs: &mut Vec<(NodeId, NodeId)>, a: NodeId, b: NodeId| -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        if a == b || !present.insert(key) {
            return false;
        }
        pairs.push(key);
        true
    };

    // Each base station homes on one aggregation point, round-robin.
    for (i, bs) in layout.base_stations.iter().enumerate() {
        let agg = layout.aggregation_points[i % layout.aggregation_points.len()];
        add(&mut pairs, *bs, agg);
    }

    // Uniform spanning tree of the pure core (Aldous-Broder on the complete graph).
    let core = &layout.core;
    let n_core = core.len();
    let mut core_links = 0usize;
    if n_core > 1 {
        let mut visited = vec![false; n_core];
        let mut current = rng.index(n_core);
        visited[current] = true;
        let mut remaining = n_core - 1;
        while remaining > 0 {
            let mut next = rng.index(n_core - 1);
            if next >= current {
                next += 1;
            }
            if !visited[next] {
                visited[next] = true;
                remaining -= 1;
                add(&mut pairs, core[current], core[next]);
                core_links += 1;
            }
            current = next;
        }
        let max_links = n_core * (n_core - 1) / 2;
        let target = (3 * n_core).div_ceil(2).min(max_links);
        while core_links < target {
            let a = rng.index(n_core);
            let b = rng.index(n_core);
            if add(&mut pairs, core[a], core[b]) {
                core_links += 1;
            }
        }
    }

    // Aggregation points uplink into the core.
    let uplinks = n_core.min(2);
    for agg in &layout.aggregation_points {
        let mut made = 0;
        while made < uplinks {
            if add(&mut pairs, *agg, core[rng.index(n_core)]) {
                made += 1;
            }
        }
    }

    for (i, host) in layout.edge_hosts.iter().enumerate() {
        add(&mut pairs, *host, layout.base_stations[i]);
    }
    for (j, host) in layout.aggregation_hosts.iter().enumerate() {
        add(&mut pairs, *host, layout.aggregation_points[j]);
    }
    for host in &layout.cloud_hosts {
        add(&mut pairs, *host, core[rng.index(n_core)]);
    }

    let links = pairs
        .into_iter()
        .map(|(a, b)| LinkSpec {
            a,
            b,
            latency_ms: params.link_latency_ms.draw(rng),
            failure_prob: params.link_failure_prob.draw(rng),
            bandwidth_mbps: params.link_bandwidth_mbps.draw(rng),
        })
        .collect();

    let mut hosts = Vec::new();
    let tiers = [
        (&layout.edge_hosts, params.edge_capacity, params.edge_cost),
        (&layout.aggregation_hosts, params.aggregation_capacity, params.aggregation_cost),
        (&layout.cloud_hosts, params.cloud_capacity, params.cloud_cost),
    ];
    for (nodes, capacity, cost) in tiers {
        for node in nodes {
            hosts.push(HostSpec {
                node: *node,
                capacity: capacity.draw(rng),
                unit_cost: cost.draw(rng),
            });
        }
    }

    Ok(NetworkGraph::validated(kinds, links, hosts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::validate_topology;

    #[test]
    fn table1_counts() {
        let p = ScenarioParams::table1(42, 5);
        let g = generate_network(&p, &mut SplitMix64::new(p.seed)).unwrap();
        assert_eq!(g.nodes_of(NodeKind::Access).count(), 20);
        assert_eq!(g.nodes_of(NodeKind::EdgeHostBs).count(), 20);
        assert_eq!(g.nodes_of(NodeKind::EdgeHostAgg).count(), 3);
        assert_eq!(g.nodes_of(NodeKind::CloudHost).count(), 15);
        assert_eq!(g.nodes_of(NodeKind::Transit).count(), 37);
        assert_eq!(g.hosts().len(), 38);
        assert!(validate_topology(&g).is_empty());
    }

    #[test]
    fn core_mean_degree_at_least_three() {
        let p = ScenarioParams::table1(3, 0);
        let g = generate_network(&p, &mut SplitMix64::new(p.seed)).unwrap();
        let (layout, _) = Layout::new(&p);
        let in_core = |n: NodeId| layout.core.contains(&n);
        let core_links = g.links().iter().filter(|l| in_core(l.a) && in_core(l.b)).count();
        assert!(2 * core_links >= 3 * layout.core.len());
    }

    #[test]
    fn impossible_counts_rejected() {
        let mut p = ScenarioParams::desk(1, 2);
        p.edge_hosts = p.base_stations + 1;
        assert!(matches!(
            generate_network(&p, &mut SplitMix64::new(1)),
            Err(ParamsError::Counts(_))
        ));
        let mut p = ScenarioParams::desk(1, 2);
        p.core_nodes = p.aggregation_hosts;
        assert!(matches!(p.validate(), Err(ParamsError::Counts(_))));
        let mut p = ScenarioParams::desk(1, 2);
        p.edge_cost = IntRange::new(10, 5);
        assert_eq!(p.validate(), Err(ParamsError::Range("edge_cost")));
    }

    #[test]
    fn drawn_values_in_range() {
        let p = ScenarioParams::table1(9, 0);
        let g = generate_network(&p, &mut SplitMix64::new(p.seed)).unwrap();
        for l in g.links() {
            assert!(p.link_latency_ms.contains(l.latency_ms));
            assert!(p.link_failure_prob.contains(l.failure_prob));
            assert!(p.link_bandwidth_mbps.contains(l.bandwidth_mbps));
        }
        for h in g.hosts() {
            let (cap, cost) = match g.kind(h.node).unwrap() {
                NodeKind::EdgeHostBs => (p.edge_capacity, p.edge_cost),
                NodeKind::EdgeHostAgg => (p.aggregation_capacity, p.aggregation_cost),
                _ => (p.cloud_capacity, p.cloud_cost),
            };
            assert!(cap.contains(h.capacity));
            assert!(cost.contains(h.unit_cost));
        }
    }
}
