#![allow(dead_code)]

pub mod fixtures;

use vnfplace::rng::SplitMix64;
use vnfplace::topology::{HostSpec, LinkSpec};
use vnfplace::{
    FlightPlan, NetworkGraph, NodeId, NodeKind, PlacementProblem, PlacementSolution, Scenario, Stop, TimeHorizon,
    Uav, UavDemand,
};

pub fn n(i: usize) -> NodeId {
    NodeId(i)
}

pub fn link(a: usize, b: usize, latency_ms: f64, failure_prob: f64, bandwidth_mbps: u64) -> LinkSpec {
    LinkSpec { a: NodeId(a), b: NodeId(b), latency_ms, failure_prob, bandwidth_mbps }
}

pub fn host(node: usize, capacity: u64, unit_cost: u64) -> HostSpec {
    HostSpec { node: NodeId(node), capacity, unit_cost }
}

pub fn uav(id: usize, demand: u64, bandwidth: u64, reliability: f64, latency: f64, stops: &[(usize, u32)], end: u32) -> Uav {
    Uav {
        id,
        demand: UavDemand { demand, bandwidth_mbps: bandwidth, reliability, latency_ms: latency },
        plan: FlightPlan {
            trajectory: stops.iter().map(|&(a, t)| Stop { access: NodeId(a), arrive_period: t }).collect(),
            end_period: end,
        },
    }
}

pub fn scenario(kinds: Vec<NodeKind>, links: Vec<LinkSpec>, hosts: Vec<HostSpec>, uavs: Vec<Uav>, periods: u32) -> Scenario {
    Scenario {
        graph: NetworkGraph::build(kinds, links, hosts).expect("well-formed graph"),
        uavs,
        horizon: TimeHorizon::new(periods),
        seed: 0,
        params: None,
    }
}

/// Every simple path from `from` to `to` as a node sequence, by plain
/// depth-first enumeration over the link list.
pub fn all_simple_paths(graph: &NetworkGraph, from: NodeId, to: NodeId) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![from]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == to {
            out.push(path);
            continue;
        }
        for l in graph.links() {
            let next = if l.a == last {
                l.b
            } else if l.b == last {
                l.a
            } else {
                continue;
            };
            if !path.contains(&next) {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn path_latency(graph: &NetworkGraph, nodes: &[NodeId]) -> f64 {
    nodes.windows(2).map(|w| graph.link(graph.link_between(w[0], w[1]).unwrap()).latency_ms).sum()
}

pub fn path_product(graph: &NetworkGraph, nodes: &[NodeId]) -> f64 {
    nodes.windows(2).map(|w| 1.0 - graph.link(graph.link_between(w[0], w[1]).unwrap()).failure_prob).product()
}

/// Σ_u Σ_h Σ_a Σ_t K·Z·D_u·C_h with Z read straight from the trajectories.
pub fn literal_objective(problem: &PlacementProblem, solution: &PlacementSolution) -> u64 {
    let s = &problem.scenario;
    let mut total = 0;
    for u in &s.uavs {
        for h in s.graph.hosts() {
            for a in u.plan.access_points() {
                let k = solution.serving.iter().any(|x| x.uav == u.id && x.host == h.node && x.access == a);
                if !k {
                    continue;
                }
                for t in 1..=s.horizon.periods {
                    let in_flight = t >= u.plan.launch_period() && t <= u.plan.end_period;
                    let at = u.plan.trajectory.iter().rfind(|st| st.arrive_period <= t).map(|st| st.access);
                    if in_flight && at == Some(a) {
                        total += u.demand.demand * h.unit_cost;
                    }
                }
            }
        }
    }
    total
}

/// Random instance within the brute-force guard rails: at most 10 nodes,
/// 5 degree-one hosts, 3 UAVs, 3 stops per UAV and 8 stops overall, 6
/// periods. Capacities and bandwidths are tight enough to bind.
pub fn tiny_instance(seed: u64) -> Scenario {
    let mut rng = SplitMix64::new(seed);
    let n_access = rng.int_in(2, 3) as usize;
    let n_transit = rng.int_in(1, 3) as usize;
    let budget = 10 - n_access - n_transit;
    let n_hosts = (rng.int_in(1, 5) as usize).min(budget);
    let mut kinds = vec![NodeKind::Access; n_access];
    kinds.extend(std::iter::repeat_n(NodeKind::Transit, n_transit));
    let mut links = Vec::new();
    let draw_link = |rng: &mut SplitMix64, a: usize, b: usize| {
        link(a, b, rng.int_in(1, 3) as f64, rng.int_in(0, 20) as f64 / 1000.0, rng.int_in(80, 300))
    };
    // Spanning tree over access and transit nodes, then a couple of chords.
    let core = n_access + n_transit;
    for i in 1..core {
        let j = rng.index(i);
        links.push(draw_link(&mut rng, i, j));
    }
    for _ in 0..rng.int_in(0, 2) {
        let a = rng.index(core);
        let b = rng.index(core);
        let dup = links.iter().any(|l| (l.a.0, l.b.0) == (a, b) || (l.a.0, l.b.0) == (b, a));
        if a != b && !dup {
            links.push(draw_link(&mut rng, a, b));
        }
    }
    let mut hosts = Vec::new();
    for k in 0..n_hosts {
        let node = core + k;
        let (kind, anchor, cost) = match rng.int_in(0, 2) {
            0 => (NodeKind::EdgeHostBs, rng.index(n_access), rng.int_in(6, 10)),
            1 => (NodeKind::EdgeHostAgg, n_access + rng.index(n_transit), rng.int_in(3, 6)),
            _ => (NodeKind::CloudHost, n_access + rng.index(n_transit), rng.int_in(1, 3)),
        };
        kinds.push(kind);
        links.push(draw_link(&mut rng, node, anchor));
        hosts.push(host(node, rng.int_in(15, 60), cost));
    }
    let periods = rng.int_in(2, 6) as u32;
    let n_uavs = rng.int_in(1, 3) as usize;
    let mut uavs = Vec::new();
    let mut stops_left = 8usize;
    for id in 0..n_uavs {
        let max_stops = 3.min(periods as usize).min(stops_left - (n_uavs - id - 1));
        let count = rng.int_in(1, max_stops as u64) as usize;
        stops_left -= count;
        let mut stops: Vec<(usize, u32)> = Vec::new();
        let mut t = rng.int_in(1, (periods as u64 + 1 - count as u64).max(1)) as u32;
        for _ in 0..count {
            let mut a = rng.index(n_access);
            if stops.last().is_some_and(|&(p, _)| p == a) {
                a = (a + 1) % n_access;
            }
            stops.push((a, t));
            t += 1;
        }
        let last = stops.last().unwrap().1;
        let end = rng.int_in(last as u64, periods as u64) as u32;
        uavs.push(uav(
            id,
            rng.int_in(5, 20),
            rng.int_in(40, 120),
            0.8 + rng.int_in(0, 17) as f64 / 100.0,
            rng.int_in(3, 14) as f64,
            &stops,
            end,
        ));
    }
    scenario(kinds, links, hosts, uavs, periods)
}
