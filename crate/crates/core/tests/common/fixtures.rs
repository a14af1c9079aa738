use super::*;
use vnfplace::model::{Route, Serving};
use vnfplace::*;

pub const A: usize = 0;
pub const B: usize = 1;
pub const T1: usize = 2;
pub const T2: usize = 3;
pub const H1: usize = 4;
pub const H2: usize = 5;

/// Two access points behind T1; H1 reaches T1 and T2, H2 only T1. A T1–T2
/// link makes small cycles available for malformed routes.
pub fn validator_scenario() -> Scenario {
    scenario(
        vec![NodeKind::Access, NodeKind::Access, NodeKind::Transit, NodeKind::Transit, NodeKind::CloudHost, NodeKind::CloudHost],
        vec![
            link(H1, T1, 1.0, 0.0, 1000),
            link(H1, T2, 1.0, 0.0, 1000),
            link(T1, A, 1.0, 0.0, 1000),
            link(T2, A, 1.0, 0.0, 1000),
            link(T1, T2, 1.0, 0.0, 1000),
            link(H2, T1, 1.0, 0.0, 1000),
            link(T1, B, 1.0, 0.0, 1000),
        ],
        vec![host(H1, 100, 1), host(H2, 100, 2)],
        vec![uav(0, 10, 10, 0.9, 100.0, &[(A, 1), (B, 2)], 2), uav(1, 10, 10, 0.9, 100.0, &[(A, 1)], 1)],
        2,
    )
}

pub fn problem(s: &Scenario) -> PlacementProblem {
    PlacementProblem::assemble_lenient(s, None, Execution::Sequential).unwrap()
}

pub fn edges(seq: &[usize]) -> Vec<(NodeId, NodeId)> {
    seq.windows(2).map(|w| (n(w[0]), n(w[1]))).collect()
}

pub struct Build {
    pub sol: PlacementSolution,
}

impl Build {
    /// UAV 0: A and B from H1; UAV 1: A from H1.
    pub fn baseline() -> Self {
        let mut b = Build { sol: PlacementSolution::default() };
        b.place(0, &[H1]).place(1, &[H1]);
        b.serve(0, A, H1, &[H1, T1, A]).serve(0, B, H1, &[H1, T1, B]).serve(1, A, H1, &[H1, T1, A]);
        b
    }

    pub fn place(&mut self, u: usize, hosts: &[usize]) -> &mut Self {
        self.sol.placements.insert(u, hosts.iter().map(|h| n(*h)).collect());
        self
    }

    pub fn serve(&mut self, u: usize, a: usize, h: usize, path: &[usize]) -> &mut Self {
        self.sol.serving.push(Serving { uav: u, access: n(a), host: n(h) });
        self.route(u, h, a, edges(path))
    }

    pub fn route(&mut self, u: usize, h: usize, a: usize, e: Vec<(NodeId, NodeId)>) -> &mut Self {
        self.sol.routes.retain(|r| !(r.uav == u && r.host == n(h) && r.access == n(a)));
        self.sol.routes.push(Route { uav: u, host: n(h), access: n(a), edges: e });
        self
    }

    pub fn unserve(&mut self, u: usize, a: usize) -> &mut Self {
        self.sol.serving.retain(|s| !(s.uav == u && s.access == n(a)));
        self.sol.routes.retain(|r| !(r.uav == u && r.access == n(a)));
        self
    }
}

