use super::{branch_order, check_consistency, SolveError, SolveOutcome, SolveStatus};
use crate::model::{check_solution, PlacementProblem, PlacementSolution};
use crate::paths::{canonical_cmp, CandidatePath};
use crate::topology::{NetworkGraph, NodeId};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceLimits {
    /// Maximum total trajectory length over all UAVs.
    pub max_stops: usize,
    pub max_hosts: usize,
    /// Maximum number of complete assignments enumerated.
    pub max_assignments: u64,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        Self { max_stops: 8, max_hosts: 5, max_assignments: 2_000_000 }
    }
}

fn simple_paths(graph: &NetworkGraph, from: NodeId, to: NodeId) -> Vec<Vec<NodeId>> {
    fn go(g: &NetworkGraph, to: NodeId, stack: &mut Vec<NodeId>, on: &mut [bool], out: &mut Vec<Vec<NodeId>>) {
        let cur = *stack.last().unwrap();
        if cur == to {
            out.push(stack.clone());
            return;
        }
        for &(next, _) in g.adjacent(cur) {
            if !on[next.0] {
                on[next.0] = true;
                stack.push(next);
                go(g, to, stack, on, out);
                stack.pop();
                on[next.0] = false;
            }
        }
    }
    let mut on = vec![false; graph.node_count()];
    on[from.0] = true;
    let mut out = Vec::new();
    go(graph, to, &mut vec![from], &mut on, &mut out);
    out
}

pub fn solve_bruteforce(problem: &PlacementProblem) -> Result<SolveOutcome, SolveError> {
    solve_bruteforce_with(problem, BruteForceLimits::default())
}

/// Enumerates every assignment of (host, simple path) to each service pair,
/// independent of the candidate pool, and returns the cheapest one that
/// passes the constraint checker.
pub fn solve_bruteforce_with(problem: &PlacementProblem, limits: BruteForceLimits) -> Result<SolveOutcome, SolveError> {
    check_consistency(problem)?;
    let start = Instant::now();
    let graph = &problem.scenario.graph;
    let stops: usize = problem.scenario.uavs.iter().map(|u| u.plan.trajectory.len()).sum();
    if stops > limits.max_stops {
        return Err(SolveError::TooLarge(format!("{stops} trajectory stops > {}", limits.max_stops)));
    }
    if graph.hosts().len() > limits.max_hosts {
        return Err(SolveError::TooLarge(format!("{} hosts > {}", graph.hosts().len(), limits.max_hosts)));
    }

    let order = branch_order(problem);
    let options: Vec<Vec<(usize, usize, u64, CandidatePath)>> = order
        .iter()
        .map(|&p| {
            let access = problem.pairs[p].access;
            let mut v = Vec::new();
            for (h, host) in graph.hosts().iter().enumerate() {
                let mut paths: Vec<CandidatePath> = simple_paths(graph, host.node, access)
                    .iter()
                    .map(|nodes| CandidatePath::from_nodes(graph, nodes).expect("walk follows links"))
                    .collect();
                paths.sort_by(canonical_cmp);
                let cost = problem.option_cost(p, h);
                v.extend(paths.into_iter().enumerate().map(|(i, path)| (h, i, cost, path)));
            }
            v
        })
        .collect();

    let total = options.iter().try_fold(1u64, |acc, o| acc.checked_mul(o.len() as u64));
    match total {
        Some(t) if t <= limits.max_assignments => {}
        _ => return Err(SolveError::TooLarge(format!("more than {} assignments", limits.max_assignments))),
    }
    let total = total.unwrap();

    // Linear index with the first branch depth as the most significant digit,
    // so index order is lexicographic (host, path) order.
    let radix: Vec<u64> = options.iter().map(|o| o.len() as u64).collect();
    let digits = |mut idx: u64| -> Vec<usize> {
        let mut d = vec![0; radix.len()];
        for k in (0..radix.len()).rev() {
            d[k] = (idx % radix[k]) as usize;
            idx /= radix[k];
        }
        d
    };
    let mut ranked: Vec<(u64, u64)> = (0..total)
        .map(|idx| {
            let cost = digits(idx).iter().enumerate().map(|(k, &i)| options[k][i].2).sum();
            (cost, idx)
        })
        .collect();
    ranked.sort_unstable();

    let mut checked = 0u64;
    for (_, idx) in ranked {
        checked += 1;
        let d = digits(idx);
        let mut per_pair: Vec<Option<(usize, &CandidatePath)>> = vec![None; problem.pairs.len()];
        let mut assignment = vec![(0, 0); problem.pairs.len()];
        for (k, &i) in d.iter().enumerate() {
            let (h, pi, _, ref path) = options[k][i];
            per_pair[order[k]] = Some((h, path));
            assignment[order[k]] = (h, pi);
        }
        let choices: Vec<_> = per_pair.into_iter().map(Option::unwrap).collect();
        let solution = PlacementSolution::from_choices(problem, &choices);
        if check_solution(problem, &solution).is_empty() {
            return Ok(SolveOutcome {
                status: SolveStatus::Optimal,
                solution: Some(solution),
                assignment,
                witness: None,
                nodes_explored: checked,
                wall_time: start.elapsed(),
            });
        }
    }
    Ok(SolveOutcome {
        status: SolveStatus::Infeasible,
        solution: None,
        assignment: Vec::new(),
        witness: None,
        nodes_explored: checked,
        wall_time: start.elapsed(),
    })
}
