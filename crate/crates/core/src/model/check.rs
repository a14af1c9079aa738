//! Independent feasibility check of a solution against every constraint
//! family of the placement ILP, plus a strict simple-path rule for routes.

use super::{PlacementProblem, PlacementSolution};
use crate::fleet::UavId;
use crate::numfmt::g12;
use crate::paths::LATENCY_EPS;
use crate::topology::{LinkId, NodeId};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Absolute slack on the direct survivability product.
pub const PRODUCT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintId {
    /// Every VNF placed somewhere.
    C1,
    /// Serving host must hold an instance.
    C2,
    /// No instance that never serves.
    C3,
    /// Exactly one serving host per (uav, access).
    C4,
    /// Host capacity per period.
    C5,
    /// Link bandwidth per period, both directions combined.
    C6,
    /// Route edges only for the serving host.
    C7,
    /// One edge leaves the host.
    C8,
    /// One edge enters the access node.
    C9,
    /// No edge leaves the access node.
    C10,
    /// Flow conservation at intermediate nodes.
    C11,
    /// Route latency within tolerance.
    C12,
    /// Route survivability meets the reliability demand.
    C18,
    /// Route support is not a single simple host→access path in the graph.
    SimplePath,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintId::SimplePath => "simple-path",
            other => return write!(f, "{other:?}"),
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: ConstraintId,
    /// Offending indices, e.g. `u=0 h=12 a=3`.
    pub at: String,
    pub measured: f64,
    pub bound: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}: measured {} vs bound {}",
            self.constraint,
            self.at,
            g12(self.measured),
            g12(self.bound)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn ids(&self) -> BTreeSet<ConstraintId> {
        self.violations.iter().map(|v| v.constraint).collect()
    }

    fn push(&mut self, constraint: ConstraintId, at: String, measured: f64, bound: f64) {
        self.violations.push(Violation { constraint, at, measured, bound });
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "feasible: no violations");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

type Triple = (UavId, NodeId, NodeId);

/// Checks `solution` against constraints 1–12 and 18 using only the
/// scenario data; never consults the candidate-path pool.
pub fn check_solution(problem: &PlacementProblem, solution: &PlacementSolution) -> ViolationReport {
    use ConstraintId::*;
    let scenario = &problem.scenario;
    let graph = &scenario.graph;
    let schedule = &problem.schedule;
    let mut report = ViolationReport::default();
    let empty = BTreeSet::new();
    let placed = |u: UavId| solution.placements.get(&u).unwrap_or(&empty);

    for uav in &scenario.uavs {
        if placed(uav.id).is_empty() {
            report.push(C1, format!("u={}", uav.id), 0.0, 1.0);
        }
    }

    let mut serving: BTreeMap<(UavId, NodeId), Vec<NodeId>> = BTreeMap::new();
    for s in &solution.serving {
        serving.entry((s.uav, s.access)).or_default().push(s.host);
        if !placed(s.uav).contains(&s.host) {
            report.push(C2, format!("u={} h={} a={}", s.uav, s.host, s.access), 1.0, 0.0);
        }
    }

    for (u, hosts) in &solution.placements {
        for h in hosts {
            if !solution.serving.iter().any(|s| s.uav == *u && s.host == *h) {
                report.push(C3, format!("u={u} h={h}"), 1.0, 0.0);
            }
        }
    }

    for uav in &scenario.uavs {
        for a in uav.plan.access_points() {
            let count = serving.get(&(uav.id, a)).map_or(0, Vec::len);
            if count != 1 {
                report.push(C4, format!("u={} a={a}", uav.id), count as f64, 1.0);
            }
        }
    }
    for ((u, a), hosts) in &serving {
        let on_trajectory = scenario
            .uavs
            .get(*u)
            .is_some_and(|uav| uav.plan.trajectory.iter().any(|s| s.access == *a));
        let all_hosts = hosts.iter().all(|h| graph.host_index(*h).is_some());
        if !on_trajectory || !all_hosts {
            report.push(C4, format!("u={u} a={a} (not a trajectory access point or host)"), hosts.len() as f64, 0.0);
        }
    }

    // C5: capacity per host and period.
    for (h_idx, host) in graph.hosts().iter().enumerate() {
        for t in schedule.horizon().iter() {
            let load: u64 = solution
                .serving
                .iter()
                .filter(|s| s.host == host.node && schedule.attached(s.uav, t) == Some(s.access))
                .filter_map(|s| scenario.uavs.get(s.uav))
                .map(|u| u.demand.demand)
                .sum();
            if load > host.capacity {
                report.push(C5, format!("h={} (host #{h_idx}) t={t}", host.node), load as f64, host.capacity as f64);
            }
        }
    }

    // Route supports per triple, duplicates collapsed.
    let mut supports: BTreeMap<Triple, Vec<(NodeId, NodeId)>> = BTreeMap::new();
    for r in &solution.routes {
        let edges = supports.entry((r.uav, r.host, r.access)).or_default();
        for e in &r.edges {
            if !edges.contains(e) {
                edges.push(*e);
            }
        }
    }

    // C6: bandwidth per link and period, both directions.
    let mut link_users: BTreeMap<LinkId, Vec<(Triple, u64)>> = BTreeMap::new();
    for (triple, edges) in &supports {
        for (i, j) in edges {
            if let Some(link) = graph.link_between(*i, *j) {
                let users = link_users.entry(link).or_default();
                match users.iter_mut().find(|(tr, _)| tr == triple) {
                    Some((_, uses)) => *uses += 1,
                    None => users.push((*triple, 1)),
                }
            }
        }
    }
    for (link, users) in &link_users {
        let capacity = graph.link(*link).bandwidth_mbps;
        for t in schedule.horizon().iter() {
            let load: u64 = users
                .iter()
                .filter(|((u, _, a), _)| schedule.attached(*u, t) == Some(*a))
                .filter_map(|((u, _, _), uses)| Some(scenario.uavs.get(*u)?.demand.bandwidth_mbps * uses))
                .sum();
            if load > capacity {
                let l = graph.link(*link);
                report.push(C6, format!("link {}-{} t={t}", l.a, l.b), load as f64, capacity as f64);
            }
        }
    }

    // Routing, latency, reliability per triple that is served or routed.
    let mut triples: BTreeSet<Triple> = supports.keys().copied().collect();
    triples.extend(solution.serving.iter().map(|s| (s.uav, s.host, s.access)));
    for triple @ (u, h, a) in triples {
        let k = u8::from(serving.get(&(u, a)).is_some_and(|hs| hs.contains(&h)));
        let edges = supports.get(&triple).map_or(&[][..], Vec::as_slice);
        let at = format!("u={u} h={h} a={a}");

        if k == 0 && !edges.is_empty() {
            report.push(C7, at.clone(), edges.len() as f64, 0.0);
        }
        let out_of = |n: NodeId| edges.iter().filter(|(i, _)| *i == n).count();
        let into = |n: NodeId| edges.iter().filter(|(_, j)| *j == n).count();
        let mut flow_ok = true;
        if out_of(h) != k as usize {
            report.push(C8, at.clone(), out_of(h) as f64, k as f64);
            flow_ok = false;
        }
        if into(a) != k as usize {
            report.push(C9, at.clone(), into(a) as f64, k as f64);
            flow_ok = false;
        }
        if out_of(a) != 0 {
            report.push(C10, at.clone(), out_of(a) as f64, 0.0);
            flow_ok = false;
        }
        let inner: BTreeSet<NodeId> = edges
            .iter()
            .flat_map(|(i, j)| [*i, *j])
            .filter(|n| *n != h && *n != a)
            .collect();
        for n in inner {
            if into(n) != out_of(n) {
                report.push(C11, format!("{at} i={n}"), into(n) as f64, out_of(n) as f64);
                flow_ok = false;
            }
        }

        let links: Vec<Option<LinkId>> = edges.iter().map(|(i, j)| graph.link_between(*i, *j)).collect();
        let Some(uav) = scenario.uavs.get(u) else { continue };
        if links.iter().any(Option::is_none) {
            report.push(SimplePath, format!("{at} (edge without a link)"), 0.0, 0.0);
            continue;
        }
        let links: Vec<LinkId> = links.into_iter().flatten().collect();

        let ordered = walk_order(edges, h);
        let sequence: Vec<LinkId> = match &ordered {
            Some(order) => order.iter().map(|idx| links[*idx]).collect(),
            None => links.clone(),
        };
        let latency: f64 = sequence.iter().map(|l| graph.link(*l).latency_ms).sum();
        if latency > uav.demand.latency_ms + LATENCY_EPS {
            report.push(C12, at.clone(), latency, uav.demand.latency_ms);
        }
        let survivability: f64 = sequence.iter().map(|l| 1.0 - graph.link(*l).failure_prob).product();
        if survivability < uav.demand.reliability - PRODUCT_EPS {
            report.push(C18, at.clone(), survivability, uav.demand.reliability);
        }

        if k == 1 && flow_ok && !is_simple_path(edges, h, a) {
            report.push(SimplePath, at, edges.len() as f64, 0.0);
        }
    }

    report.violations.sort_by(|x, y| x.constraint.cmp(&y.constraint).then_with(|| x.at.cmp(&y.at)));
    report
}

/// Edge indices in walk order from `start` when the support is one chain.
fn walk_order(edges: &[(NodeId, NodeId)], start: NodeId) -> Option<Vec<usize>> {
    let mut order = Vec::with_capacity(edges.len());
    let mut used = vec![false; edges.len()];
    let mut at = start;
    while order.len() < edges.len() {
        let mut next = edges.iter().enumerate().filter(|(idx, (i, _))| !used[*idx] && *i == at);
        let (idx, (_, j)) = next.next()?;
        if next.next().is_some() {
            return None;
        }
        used[idx] = true;
        order.push(idx);
        at = *j;
    }
    Some(order)
}

fn is_simple_path(edges: &[(NodeId, NodeId)], h: NodeId, a: NodeId) -> bool {
    let Some(order) = walk_order(edges, h) else { return false };
    let mut seen = BTreeSet::from([h]);
    let mut at = h;
    for idx in order {
        at = edges[idx].1;
        if !seen.insert(at) {
            return false;
        }
    }
    at == a
}
