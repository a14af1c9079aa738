//! The NFV infrastructure graph: access points, transport/core nodes, and
//! the three host tiers, joined by undirected QoS-weighted links.

mod generate;

pub use generate::{generate_network, IntRange, ParamsError, RealRange, ScenarioParams};

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type LinkId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    #[serde(rename = "access")]
    Access,
    #[serde(rename = "transit")]
    Transit,
    /// MEC host co-located with a base station.
    #[serde(rename = "edge_bs")]
    EdgeHostBs,
    /// MEC host at an aggregation point.
    #[serde(rename = "edge_agg")]
    EdgeHostAgg,
    #[serde(rename = "cloud")]
    CloudHost,
}

impl NodeKind {
    pub fn is_host(self) -> bool {
        matches!(
            self,
            NodeKind::EdgeHostBs | NodeKind::EdgeHostAgg | NodeKind::CloudHost
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostSpec {
    pub node: NodeId,
    /// Resource units available (R_h).
    pub capacity: u64,
    /// Cost per resource unit per time period (C_h).
    pub unit_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub latency_ms: f64,
    pub failure_prob: f64,
    pub bandwidth_mbps: u64,
}

impl LinkSpec {
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("link {link} references unknown node {node}")]
    UnknownLinkEndpoint { link: LinkId, node: NodeId },
    #[error("host spec references unknown node {0}")]
    UnknownHostNode(NodeId),
    #[error("node {0} has more than one host spec")]
    DuplicateHost(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("invalid topology: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<TopologyViolation>),
}

/// One broken graph invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum TopologyViolation {
    SelfLoop { link: LinkId },
    DuplicateLink { link: LinkId, first: LinkId },
    LinkLatency { link: LinkId, value: f64 },
    LinkFailureProb { link: LinkId, value: f64 },
    LinkBandwidth { link: LinkId, value: u64 },
    HostOnNonHostNode { node: NodeId, kind: NodeKind },
    MissingHostSpec { node: NodeId },
    HostCapacity { node: NodeId },
    HostCost { node: NodeId },
    HostAttachment { node: NodeId, detail: String },
    Disconnected { unreachable: Vec<NodeId> },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TopologyViolation::*;
        match self {
            SelfLoop { link } => write!(f, "link {link} is a self-loop"),
            DuplicateLink { link, first } => {
                write!(f, "link {link} duplicates link {first}")
            }
            LinkLatency { link, value } => write!(f, "link {link} latency {value} must be > 0"),
            LinkFailureProb { link, value } => {
                write!(f, "link {link} failure probability {value} outside [0, 1)")
            }
            LinkBandwidth { link, value } => {
                write!(f, "link {link} bandwidth {value} must be > 0")
            }
            HostOnNonHostNode { node, kind } => {
                write!(f, "host spec on node {node} of kind {kind:?}")
            }
            MissingHostSpec { node } => write!(f, "host node {node} has no host spec"),
            HostCapacity { node } => write!(f, "host {node} capacity must be > 0"),
            HostCost { node } => write!(f, "host {node} unit cost must be > 0"),
            HostAttachment { node, detail } => write!(f, "host {node} attachment: {detail}"),
            Disconnected { unreachable } => write!(
                f,
                "graph disconnected; unreachable from node 0: {:?}",
                unreachable.iter().map(|n| n.0).collect::<Vec<_>>()
            ),
        }
    }
}

/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    kinds: Vec<NodeKind>,
    links: Vec<LinkSpec>,
    hosts: Vec<HostSpec>,
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
    host_of_node: Vec<Option<usize>>,
    link_index: HashMap<(NodeId, NodeId), LinkId>,
}

impl NetworkGraph {
    /// Builds the graph and its indexes. Only structural errors (dangling ids)
    /// fail here; invariant breaches are reported by [`validate_topology`].
    pub fn build(
        kinds: Vec<NodeKind>,
        links: Vec<LinkSpec>,
        hosts: Vec<HostSpec>,
    ) -> Result<Self, TopologyError> {
        let n = kinds.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut link_index = HashMap::new();
        for (id, link) in links.iter().enumerate() {
            for end in [link.a, link.b] {
                if end.0 >= n {
                    return Err(TopologyError::UnknownLinkEndpoint { link: id, node: end });
                }
            }
            if link.a == link.b {
                continue;
            }
            let key = ordered(link.a, link.b);
            if link_index.contains_key(&key) {
                continue;
            }
            link_index.insert(key, id);
            adjacency[link.a.0].push((link.b, id));
            adjacency[link.b.0].push((link.a, id));
        }
        for adj in &mut adjacency {
            adj.sort();
        }
        let mut host_of_node = vec![None; n];
        for (idx, host) in hosts.iter().enumerate() {
            if host.node.0 >= n {
                return Err(TopologyError::UnknownHostNode(host.node));
            }
            if host_of_node[host.node.0].is_some() {
                return Err(TopologyError::DuplicateHost(host.node));
            }
            host_of_node[host.node.0] = Some(idx);
        }
        Ok(Self {
            kinds,
            links,
            hosts,
            adjacency,
            host_of_node,
            link_index,
        })
    }

    /// [`NetworkGraph::build`] followed by full validation.
    pub fn validated(
        kinds: Vec<NodeKind>,
        links: Vec<LinkSpec>,
        hosts: Vec<HostSpec>,
    ) -> Result<Self, TopologyError> {
        let graph = Self::build(kinds, links, hosts)?;
        let report = validate_topology(&graph);
        if report.is_empty() {
            Ok(graph)
        } else {
            Err(TopologyError::Invalid(report))
        }
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn kind(&self, n: NodeId) -> Option<NodeKind> {
        self.kinds.get(n.0).copied()
    }

    pub fn links(&self) -> &[LinkSpec] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &LinkSpec {
        &self.links[id]
    }

    pub fn hosts(&self) -> &[HostSpec] {
        &self.hosts
    }

    pub fn host(&self, idx: usize) -> &HostSpec {
        &self.hosts[idx]
    }

    /// Position of `n` in [`NetworkGraph::hosts`], if it is a host.
    pub fn host_index(&self, n: NodeId) -> Option<usize> {
        self.host_of_node.get(n.0).copied().flatten()
    }

    pub fn nodes_of(&self, kind: NodeKind) -> impl Iterator<Item = NodeId> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter(move |(_, k)| **k == kind)
            .map(|(i, _)| NodeId(i))
    }

    /// Neighbours with the connecting link, sorted by neighbour id.
    pub fn adjacent(&self, n: NodeId) -> &[(NodeId, LinkId)] {
        &self.adjacency[n.0]
    }

    pub fn link_between(&self, i: NodeId, j: NodeId) -> Option<LinkId> {
        self.link_index.get(&ordered(i, j)).copied()
    }

    /// Number of directed link uses, i.e. twice the number of usable links.
    pub fn directed_edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }
}

fn ordered(i: NodeId, j: NodeId) -> (NodeId, NodeId) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// η(i): the nodes sharing a link with `i`, in increasing id order.
pub fn neighbors(graph: &NetworkGraph, i: NodeId) -> Result<Vec<NodeId>, TopologyError> {
    if i.0 >= graph.node_count() {
        return Err(TopologyError::UnknownNode(i));
    }
    Ok(graph.adjacent(i).iter().map(|(j, _)| *j).collect())
}

/// Lists every broken graph invariant; empty means the graph is valid.
pub fn validate_topology(graph: &NetworkGraph) -> Vec<TopologyViolation> {
    let mut report = Vec::new();
    let mut first_use: HashMap<(NodeId, NodeId), LinkId> = HashMap::new();
    for (id, link) in graph.links.iter().enumerate() {
        if link.a == link.b {
            report.push(TopologyViolation::SelfLoop { link: id });
        } else if let Some(first) = first_use.get(&ordered(link.a, link.b)) {
            report.push(TopologyViolation::DuplicateLink { link: id, first: *first });
        } else {
            first_use.insert(ordered(link.a, link.b), id);
        }
        if !(link.latency_ms > 0.0) {
            report.push(TopologyViolation::LinkLatency { link: id, value: link.latency_ms });
        }
        if !(0.0..1.0).contains(&link.failure_prob) {
            report.push(TopologyViolation::LinkFailureProb {
                link: id,
                value: link.failure_prob,
            });
        }
        if link.bandwidth_mbps == 0 {
            report.push(TopologyViolation::LinkBandwidth {
                link: id,
                value: link.bandwidth_mbps,
            });
        }
    }

    for host in &graph.hosts {
        let kind = graph.kinds[host.node.0];
        if !kind.is_host() {
            report.push(TopologyViolation::HostOnNonHostNode { node: host.node, kind });
        }
        if host.capacity == 0 {
            report.push(TopologyViolation::HostCapacity { node: host.node });
        }
        if host.unit_cost == 0 {
            report.push(TopologyViolation::HostCost { node: host.node });
        }
    }

    for (idx, kind) in graph.kinds.iter().enumerate() {
        if !kind.is_host() {
            continue;
        }
        let node = NodeId(idx);
        if graph.host_of_node[idx].is_none() {
            report.push(TopologyViolation::MissingHostSpec { node });
        }
        let adj = graph.adjacent(node);
        if adj.len() != 1 {
            report.push(TopologyViolation::HostAttachment {
                node,
                detail: format!("expected exactly one link, found {}", adj.len()),
            });
            continue;
        }
        let peer = adj[0].0;
        let peer_kind = graph.kinds[peer.0];
        let expected = match kind {
            NodeKind::EdgeHostBs => NodeKind::Access,
            _ => NodeKind::Transit,
        };
        if peer_kind != expected {
            report.push(TopologyViolation::HostAttachment {
                node,
                detail: format!("attached to {peer_kind:?} node {peer}, expected {expected:?}"),
            });
        }
    }

    if graph.node_count() > 0 {
        let mut seen = vec![false; graph.node_count()];
        let mut queue = VecDeque::from([NodeId(0)]);
        seen[0] = true;
        while let Some(n) = queue.pop_front() {
            for (m, _) in graph.adjacent(n) {
                if !seen[m.0] {
                    seen[m.0] = true;
                    queue.push_back(*m);
                }
            }
        }
        let unreachable: Vec<NodeId> = seen
            .iter()
            .enumerate()
            .filter(|(_, s)| !**s)
            .map(|(i, _)| NodeId(i))
            .collect();
        if !unreachable.is_empty() {
            report.push(TopologyViolation::Disconnected { unreachable });
        }
    }
    report
}
