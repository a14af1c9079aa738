//! QoS-feasible simple paths from a host to an access node.
//!
//! Both path weights are additive: latency directly, reliability after the
//! log transform `ln(1 - p)`. That makes label dominance well defined, and
//! because every cycle strictly increases latency the Pareto front over walks
//! equals the Pareto front over simple paths, so dominance pruning keeps the
//! search exact.

use crate::exec::{map_ordered, Execution};
use crate::topology::{LinkId, NetworkGraph, NodeId, NodeKind};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use thiserror::Error;

/// Slack on the log-domain reliability test.
pub const RELIABILITY_EPS: f64 = 1e-9;
/// Slack on latency sums.
pub const LATENCY_EPS: f64 = 1e-9;
/// Default candidate paths kept per (host, access) pair.
pub const DEFAULT_K_PATHS: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("node {0} is not a host")]
    NotHost(NodeId),
    #[error("node {0} is not an access node")]
    NotAccess(NodeId),
    #[error("nodes {0} and {1} are not linked")]
    NoLink(NodeId, NodeId),
    #[error("node sequence is empty or repeats a node")]
    NotSimple,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub from: NodeId,
    pub to: NodeId,
    pub link: LinkId,
    pub latency_ms: f64,
    pub failure_prob: f64,
    pub bandwidth_mbps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePath {
    pub host: NodeId,
    pub access: NodeId,
    /// Directed link uses from host to access.
    pub hops: Vec<Hop>,
    pub total_latency: f64,
    /// Σ ln(1 - p) over the hops; never positive.
    pub log_survivability: f64,
    /// `u64::MAX` for the empty path.
    pub min_link_bandwidth: u64,
}

impl CandidatePath {
    pub fn from_hops(host: NodeId, access: NodeId, hops: Vec<Hop>) -> Self {
        let total_latency = hops.iter().map(|h| h.latency_ms).sum();
        let log_survivability = hops.iter().map(|h| (-h.failure_prob).ln_1p()).sum();
        let min_link_bandwidth = hops.iter().map(|h| h.bandwidth_mbps).min().unwrap_or(u64::MAX);
        Self {
            host,
            access,
            hops,
            total_latency,
            log_survivability,
            min_link_bandwidth,
        }
    }

    /// Builds a path along `nodes`, which must be simple and linked hop by hop.
    pub fn from_nodes(graph: &NetworkGraph, nodes: &[NodeId]) -> Result<Self, PathError> {
        let (&first, &last) = match (nodes.first(), nodes.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(PathError::NotSimple),
        };
        let mut seen = std::collections::HashSet::new();
        if !nodes.iter().all(|n| seen.insert(*n)) {
            return Err(PathError::NotSimple);
        }
        let mut hops = Vec::with_capacity(nodes.len().saturating_sub(1));
        for w in nodes.windows(2) {
            let link = graph.link_between(w[0], w[1]).ok_or(PathError::NoLink(w[0], w[1]))?;
            hops.push(hop(graph, w[0], w[1], link));
        }
        Ok(Self::from_hops(first, last, hops))
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        let mut out = vec![self.host];
        out.extend(self.hops.iter().map(|h| h.to));
        out
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.hops.iter().map(|h| (h.from, h.to))
    }

    pub fn links(&self) -> impl Iterator<Item = LinkId> + '_ {
        self.hops.iter().map(|h| h.link)
    }
}

fn hop(graph: &NetworkGraph, from: NodeId, to: NodeId, link: LinkId) -> Hop {
    let spec = graph.link(link);
    Hop {
        from,
        to,
        link,
        latency_ms: spec.latency_ms,
        failure_prob: spec.failure_prob,
        bandwidth_mbps: spec.bandwidth_mbps,
    }
}

pub fn path_latency(path: &CandidatePath) -> f64 {
    path.hops.iter().map(|h| h.latency_ms).sum()
}

/// Success probability of the whole path, ∏(1 − p).
pub fn path_survivability(path: &CandidatePath) -> f64 {
    path.hops.iter().map(|h| 1.0 - h.failure_prob).product()
}

/// Log-domain reliability test: Σ ln(1 − p) ≥ ln(P_u) − ε.
pub fn reliability_feasible(path: &CandidatePath, reliability: f64) -> bool {
    path.log_survivability >= reliability.ln() - RELIABILITY_EPS
}

pub fn latency_feasible(path: &CandidatePath, latency_ms: f64) -> bool {
    path.total_latency <= latency_ms + LATENCY_EPS
}

/// Deterministic pool order: latency, then higher survivability, then node sequence.
pub fn canonical_cmp(a: &CandidatePath, b: &CandidatePath) -> Ordering {
    a.total_latency
        .total_cmp(&b.total_latency)
        .then(b.log_survivability.total_cmp(&a.log_survivability))
        .then_with(|| a.edges().cmp(b.edges()))
}

/// `a` is at least as good as `b` in every weight and strictly better in one.
fn dominates(a: (f64, f64, u64), b: (f64, f64, u64)) -> bool {
    let weakly = a.0 <= b.0 && a.1 >= b.1 && a.2 >= b.2;
    weakly && (a.0 < b.0 || a.1 > b.1 || a.2 > b.2)
}

fn weights(p: &CandidatePath) -> (f64, f64, u64) {
    (p.total_latency, p.log_survivability, p.min_link_bandwidth)
}

/// Admissible completion bounds towards one access node.
#[derive(Debug, Clone)]
pub struct AccessBounds {
    access: NodeId,
    /// Minimum latency from each node to the access node.
    latency: Vec<f64>,
    /// Maximum Σ ln(1 − p) from each node to the access node.
    log_survivability: Vec<f64>,
}

impl AccessBounds {
    pub fn new(graph: &NetworkGraph, access: NodeId) -> Self {
        let latency = dijkstra(graph, access, |l| graph.link(l).latency_ms);
        let neg = dijkstra(graph, access, |l| -(-graph.link(l).failure_prob).ln_1p());
        Self {
            access,
            latency,
            log_survivability: neg.into_iter().map(|v| -v).collect(),
        }
    }
}

fn dijkstra(graph: &NetworkGraph, source: NodeId, weight: impl Fn(LinkId) -> f64) -> Vec<f64> {
    #[derive(PartialEq)]
    struct Entry(f64, NodeId);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
        }
    }
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    dist[source.0] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, source)]);
    while let Some(Entry(d, n)) = heap.pop() {
        if d > dist[n.0] {
            continue;
        }
        for (m, link) in graph.adjacent(n) {
            let nd = d + weight(*link);
            if nd < dist[m.0] {
                dist[m.0] = nd;
                heap.push(Entry(nd, *m));
            }
        }
    }
    dist
}

/// Up to `k` simple host→access paths meeting the latency and reliability
/// bounds (`k = None` returns every feasible simple path). All
/// Pareto-optimal paths under (latency, survivability, bottleneck bandwidth)
/// come first, truncated to `k` in canonical order; remaining slots are
/// filled with dominated feasible paths the search met. The result is sorted
/// by [`canonical_cmp`].
pub fn qos_candidate_paths(
    graph: &NetworkGraph,
    host: NodeId,
    access: NodeId,
    latency_ms: f64,
    reliability: f64,
    k: Option<usize>,
) -> Result<Vec<CandidatePath>, PathError> {
    check_endpoints(graph, host, access)?;
    let bounds = AccessBounds::new(graph, access);
    Ok(search(graph, host, &bounds, latency_ms, reliability, k))
}

fn check_endpoints(graph: &NetworkGraph, host: NodeId, access: NodeId) -> Result<(), PathError> {
    match graph.kind(host) {
        None => return Err(PathError::UnknownNode(host)),
        Some(kind) if !kind.is_host() => return Err(PathError::NotHost(host)),
        _ => {}
    }
    match graph.kind(access) {
        None => Err(PathError::UnknownNode(access)),
        Some(NodeKind::Access) => Ok(()),
        Some(_) => Err(PathError::NotAccess(access)),
    }
}

fn search(
    graph: &NetworkGraph,
    host: NodeId,
    bounds: &AccessBounds,
    latency_ms: f64,
    reliability: f64,
    k: Option<usize>,
) -> Vec<CandidatePath> {
    let limits = Limits {
        latency: latency_ms + LATENCY_EPS,
        log_reliability: reliability.ln() - RELIABILITY_EPS,
    };
    if !limits.admits(0.0, 0.0, bounds, host) {
        return Vec::new();
    }
    match k {
        None => {
            let mut out = Vec::new();
            let mut stack = vec![host];
            let mut on_path = vec![false; graph.node_count()];
            on_path[host.0] = true;
            enumerate(graph, host, bounds, &limits, &mut stack, &mut on_path, &mut Vec::new(), &mut out);
            out.sort_by(canonical_cmp);
            out
        }
        Some(k) => label_setting(graph, host, bounds, &limits, k),
    }
}

struct Limits {
    latency: f64,
    log_reliability: f64,
}

impl Limits {
    fn admits(&self, lat: f64, logs: f64, bounds: &AccessBounds, at: NodeId) -> bool {
        lat + bounds.latency[at.0] <= self.latency
            && logs + bounds.log_survivability[at.0] >= self.log_reliability
    }
}

fn may_enter(graph: &NetworkGraph, host: NodeId, next: NodeId) -> bool {
    next == host || !graph.kinds()[next.0].is_host()
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    graph: &NetworkGraph,
    host: NodeId,
    bounds: &AccessBounds,
    limits: &Limits,
    stack: &mut Vec<NodeId>,
    on_path: &mut [bool],
    hops: &mut Vec<Hop>,
    out: &mut Vec<CandidatePath>,
) {
    let at = *stack.last().expect("non-empty stack");
    if at == bounds.access {
        let path = CandidatePath::from_hops(host, bounds.access, hops.clone());
        if path.total_latency <= limits.latency && path.log_survivability >= limits.log_reliability {
            out.push(path);
        }
        return;
    }
    let lat: f64 = hops.iter().map(|h| h.latency_ms).sum();
    let logs: f64 = hops.iter().map(|h| (-h.failure_prob).ln_1p()).sum();
    for (next, link) in graph.adjacent(at) {
        if on_path[next.0] || !may_enter(graph, host, *next) {
            continue;
        }
        let h = hop(graph, at, *next, *link);
        if !limits.admits(lat + h.latency_ms, logs + (-h.failure_prob).ln_1p(), bounds, *next) {
            continue;
        }
        on_path[next.0] = true;
        stack.push(*next);
        hops.push(h);
        enumerate(graph, host, bounds, limits, stack, on_path, hops, out);
        hops.pop();
        stack.pop();
        on_path[next.0] = false;
    }
}

struct Label {
    node: NodeId,
    parent: Option<usize>,
    link: LinkId,
    latency: f64,
    log_survivability: f64,
    min_bandwidth: u64,
}

#[derive(PartialEq)]
struct Queued {
    priority: f64,
    log_survivability: f64,
    id: usize,
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // Reversed for a min-heap on (priority, -log_survivability, id).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .priority
            .total_cmp(&self.priority)
            .then(self.log_survivability.total_cmp(&other.log_survivability))
            .then(other.id.cmp(&self.id))
    }
}

fn label_setting(
    graph: &NetworkGraph,
    host: NodeId,
    bounds: &AccessBounds,
    limits: &Limits,
    k: usize,
) -> Vec<CandidatePath> {
    let mut labels = vec![Label {
        node: host,
        parent: None,
        link: usize::MAX,
        latency: 0.0,
        log_survivability: 0.0,
        min_bandwidth: u64::MAX,
    }];
    let mut heap = BinaryHeap::from([Queued {
        priority: bounds.latency[host.0],
        log_survivability: 0.0,
        id: 0,
    }]);
    let mut settled: HashMap<NodeId, Vec<(f64, f64, u64)>> = HashMap::new();
    let mut complete: Vec<CandidatePath> = Vec::new();

    while let Some(Queued { id, .. }) = heap.pop() {
        let (node, w) = {
            let l = &labels[id];
            (l.node, (l.latency, l.log_survivability, l.min_bandwidth))
        };
        if node == bounds.access {
            complete.push(rebuild(graph, host, bounds.access, &labels, id));
            continue;
        }
        let at_node = settled.entry(node).or_default();
        if at_node.iter().any(|s| dominates(*s, w)) {
            continue;
        }
        at_node.push(w);

        for (next, link) in graph.adjacent(node) {
            if !may_enter(graph, host, *next) || on_label_path(&labels, id, *next) {
                continue;
            }
            let spec = graph.link(*link);
            let lat = w.0 + spec.latency_ms;
            let logs = w.1 + (-spec.failure_prob).ln_1p();
            if !limits.admits(lat, logs, bounds, *next) {
                continue;
            }
            let child = labels.len();
            labels.push(Label {
                node: *next,
                parent: Some(id),
                link: *link,
                latency: lat,
                log_survivability: logs,
                min_bandwidth: w.2.min(spec.bandwidth_mbps),
            });
            heap.push(Queued {
                priority: lat + bounds.latency[next.0],
                log_survivability: logs,
                id: child,
            });
        }
    }

    complete.retain(|p| {
        p.total_latency <= limits.latency && p.log_survivability >= limits.log_reliability
    });
    select(complete, k)
}

/// Pareto-optimal paths first (canonical order), truncated to `k`, topped up
/// with dominated ones; returned in canonical order.
fn select(mut paths: Vec<CandidatePath>, k: usize) -> Vec<CandidatePath> {
    paths.sort_by(canonical_cmp);
    paths.dedup_by(|a, b| a.edges().eq(b.edges()));
    let front: Vec<bool> = paths
        .iter()
        .map(|p| !paths.iter().any(|q| dominates(weights(q), weights(p))))
        .collect();
    let (mut chosen, rest): (Vec<_>, Vec<_>) =
        paths.into_iter().zip(front).partition(|(_, on_front)| *on_front);
    chosen.truncate(k);
    chosen.extend(rest.into_iter().take(k.saturating_sub(chosen.len())));
    let mut out: Vec<CandidatePath> = chosen.into_iter().map(|(p, _)| p).collect();
    out.sort_by(canonical_cmp);
    out
}

fn on_label_path(labels: &[Label], mut id: usize, node: NodeId) -> bool {
    loop {
        if labels[id].node == node {
            return true;
        }
        match labels[id].parent {
            Some(p) => id = p,
            None => return false,
        }
    }
}

fn rebuild(
    graph: &NetworkGraph,
    host: NodeId,
    access: NodeId,
    labels: &[Label],
    mut id: usize,
) -> CandidatePath {
    let mut hops = Vec::new();
    while let Some(parent) = labels[id].parent {
        hops.push(hop(graph, labels[parent].node, labels[id].node, labels[id].link));
        id = parent;
    }
    hops.reverse();
    CandidatePath::from_hops(host, access, hops)
}

/// One candidate-path query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRequest {
    pub host: NodeId,
    pub access: NodeId,
    pub latency_ms: f64,
    pub reliability: f64,
}

/// Answers a batch of queries, sharing per-access bounds. Output order
/// matches `requests` whatever the execution mode.
pub fn candidate_paths_batch(
    graph: &NetworkGraph,
    requests: &[PathRequest],
    k: Option<usize>,
    exec: Execution,
) -> Result<Vec<Vec<CandidatePath>>, PathError> {
    for r in requests {
        check_endpoints(graph, r.host, r.access)?;
    }
    let mut accesses: Vec<NodeId> = requests.iter().map(|r| r.access).collect();
    accesses.sort();
    accesses.dedup();
    let bounds: HashMap<NodeId, AccessBounds> = map_ordered(exec, &accesses, |a| AccessBounds::new(graph, *a))
        .into_iter()
        .map(|b| (b.access, b))
        .collect();
    Ok(map_ordered(exec, requests, |r| {
        search(graph, r.host, &bounds[&r.access], r.latency_ms, r.reliability, k)
    }))
}
