use super::{branch_order, Choice, InfeasibilityWitness, SolveOutcome, SolveStatus, SolverOptions};
use crate::exec::Execution;
use crate::model::{PlacementProblem, PlacementSolution};
use crate::topology::LinkId;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

const CLOCK_INTERVAL: u64 = 1024;

struct Opt {
    host: usize,
    path: usize,
    cost: u64,
    links: Vec<LinkId>,
}

/// Static search data indexed by depth (position in branch order).
struct Prepared {
    order: Vec<usize>,
    opts: Vec<Vec<Opt>>,
    suffix_lb: Vec<u64>,
    demand: Vec<u64>,
    bandwidth: Vec<u64>,
    segments: Vec<Vec<usize>>,
    n_segments: usize,
}

impl Prepared {
    fn new(problem: &PlacementProblem) -> Self {
        let order = branch_order(problem);
        let opts: Vec<Vec<Opt>> = order
            .iter()
            .map(|&p| {
                let mut v: Vec<Opt> = problem
                    .pool
                    .options(p)
                    .iter()
                    .flat_map(|hp| {
                        let cost = problem.option_cost(p, hp.host);
                        hp.paths.iter().enumerate().map(move |(i, path)| Opt {
                            host: hp.host,
                            path: i,
                            cost,
                            links: path.links().collect(),
                        })
                    })
                    .collect();
                v.sort_by_key(|o| (o.cost, o.host, o.path));
                v
            })
            .collect();
        let mut suffix_lb = vec![0u64; order.len() + 1];
        for d in (0..order.len()).rev() {
            let m = opts[d].first().map_or(u64::MAX, |o| o.cost);
            suffix_lb[d] = suffix_lb[d + 1].saturating_add(m);
        }

        // Periods in which the set of attached pairs is constant share a segment.
        let horizon = problem.schedule.horizon();
        let active = |t| -> Vec<bool> {
            problem.pairs.iter().map(|p| p.periods.binary_search(&t).is_ok()).collect()
        };
        let mut seg_of = Vec::new();
        let mut prev: Option<Vec<bool>> = None;
        let mut n_segments = 0;
        for t in horizon.iter() {
            let cur = active(t);
            if prev.as_ref() != Some(&cur) {
                n_segments += 1;
                prev = Some(cur);
            }
            seg_of.push(n_segments - 1);
        }
        let segments = order
            .iter()
            .map(|&p| {
                let mut s: Vec<usize> = problem.pairs[p].periods.iter().map(|&t| seg_of[t as usize - 1]).collect();
                s.dedup();
                s
            })
            .collect();
        let uavs = &problem.scenario.uavs;
        Self {
            demand: order.iter().map(|&p| uavs[problem.pairs[p].uav].demand.demand).collect(),
            bandwidth: order.iter().map(|&p| uavs[problem.pairs[p].uav].demand.bandwidth_mbps).collect(),
            order,
            opts,
            suffix_lb,
            segments,
            n_segments,
        }
    }
}

#[derive(Clone)]
struct State {
    host_res: Vec<u64>,
    link_res: Vec<u64>,
    prefix: Vec<(u32, u32)>,
    picks: Vec<usize>,
    cost: u64,
}

impl State {
    fn root(problem: &PlacementProblem, s: usize) -> Self {
        let g = &problem.scenario.graph;
        Self {
            host_res: g.hosts().iter().flat_map(|h| std::iter::repeat_n(h.capacity, s)).collect(),
            link_res: g.links().iter().flat_map(|l| std::iter::repeat_n(l.bandwidth_mbps, s)).collect(),
            prefix: Vec::new(),
            picks: Vec::new(),
            cost: 0,
        }
    }
}

#[derive(Default)]
struct Incumbent {
    best: AtomicU64,
    inner: Mutex<Option<(u64, Vec<(u32, u32)>, Vec<usize>)>>,
}

impl Incumbent {
    fn new() -> Self {
        Self { best: AtomicU64::new(u64::MAX), inner: Mutex::new(None) }
    }

    /// True when no completion of `prefix` with cost ≥ `bound` can replace
    /// the incumbent.
    fn prunes(&self, bound: u64, prefix: &[(u32, u32)]) -> bool {
        let best = self.best.load(Ordering::Acquire);
        if bound != best {
            return bound > best;
        }
        let guard = self.inner.lock().unwrap();
        match &*guard {
            Some((c, v, _)) if *c == bound => prefix > &v[..prefix.len()],
            Some((c, _, _)) => bound > *c,
            None => false,
        }
    }

    fn offer(&self, cost: u64, vector: &[(u32, u32)], picks: &[usize]) {
        let mut guard = self.inner.lock().unwrap();
        let better = match &*guard {
            None => true,
            Some((c, v, _)) => cost < *c || (cost == *c && vector < v.as_slice()),
        };
        if better {
            *guard = Some((cost, vector.to_vec(), picks.to_vec()));
            self.best.store(cost, Ordering::Release);
        }
    }
}

struct Search<'a> {
    prep: &'a Prepared,
    incumbent: Incumbent,
    deadline: Option<Instant>,
    timed_out: AtomicBool,
    nodes: AtomicU64,
}

impl Search<'_> {
    fn fits(&self, state: &State, depth: usize, opt: &Opt) -> bool {
        let s = self.prep.n_segments;
        let segs = &self.prep.segments[depth];
        let d = self.prep.demand[depth];
        let b = self.prep.bandwidth[depth];
        segs.iter().all(|&g| state.host_res[opt.host * s + g] >= d)
            && opt.links.iter().all(|&l| segs.iter().all(|&g| state.link_res[l * s + g] >= b))
    }

    fn apply(&self, state: &mut State, depth: usize, idx: usize, sign: bool) {
        let s = self.prep.n_segments;
        let opt = &self.prep.opts[depth][idx];
        let d = self.prep.demand[depth];
        let b = self.prep.bandwidth[depth];
        for &g in &self.prep.segments[depth] {
            let h = &mut state.host_res[opt.host * s + g];
            *h = if sign { *h - d } else { *h + d };
            for &l in &opt.links {
                let r = &mut state.link_res[l * s + g];
                *r = if sign { *r - b } else { *r + b };
            }
        }
        if sign {
            state.cost += opt.cost;
            state.prefix.push((opt.host as u32, opt.path as u32));
            state.picks.push(idx);
        } else {
            state.cost -= opt.cost;
            state.prefix.pop();
            state.picks.pop();
        }
    }

    fn out_of_time(&self, local: &mut u64) -> bool {
        *local += 1;
        if *local % CLOCK_INTERVAL == 1 {
            if let Some(dl) = self.deadline {
                if Instant::now() >= dl {
                    self.timed_out.store(true, Ordering::Relaxed);
                }
            }
        }
        self.timed_out.load(Ordering::Relaxed)
    }

    fn dfs(&self, depth: usize, state: &mut State, local: &mut u64) {
        if self.out_of_time(local) {
            return;
        }
        let n = self.prep.order.len();
        if depth == n {
            self.incumbent.offer(state.cost, &state.prefix, &state.picks);
            return;
        }
        for (idx, opt) in self.prep.opts[depth].iter().enumerate() {
            let bound = state.cost.saturating_add(opt.cost).saturating_add(self.prep.suffix_lb[depth + 1]);
            if bound > self.incumbent.best.load(Ordering::Acquire) {
                break;
            }
            state.prefix.push((opt.host as u32, opt.path as u32));
            let pruned = self.incumbent.prunes(bound, &state.prefix);
            state.prefix.pop();
            if pruned || !self.fits(state, depth, opt) {
                continue;
            }
            self.apply(state, depth, idx, true);
            self.dfs(depth + 1, state, local);
            self.apply(state, depth, idx, false);
            if self.timed_out.load(Ordering::Relaxed) {
                return;
            }
        }
    }

    /// Expands the shallowest levels breadth-first into independent subtrees.
    fn frontier(&self, root: State, target: usize) -> Vec<(usize, State)> {
        let mut level = vec![root];
        let mut depth = 0;
        while depth < self.prep.order.len() && level.len() < target {
            let mut next = Vec::new();
            for state in &level {
                for (idx, opt) in self.prep.opts[depth].iter().enumerate() {
                    if self.fits(state, depth, opt) {
                        let mut child = state.clone();
                        self.apply(&mut child, depth, idx, true);
                        next.push(child);
                    }
                }
            }
            self.nodes.fetch_add(level.len() as u64, Ordering::Relaxed);
            level = next;
            depth += 1;
        }
        level.into_iter().map(|s| (depth, s)).collect()
    }

    fn run(&self, root: State, exec: Execution) {
        match exec.effective() {
            Execution::Sequential => {
                let mut state = root;
                let mut local = 0;
                self.dfs(0, &mut state, &mut local);
                self.nodes.fetch_add(local, Ordering::Relaxed);
            }
            Execution::Parallel => {
                let items = self.frontier(root, 64);
                crate::exec::map_ordered(Execution::Parallel, &items, |(depth, state)| {
                    if self.incumbent.prunes(state.cost.saturating_add(self.prep.suffix_lb[*depth]), &state.prefix) {
                        return;
                    }
                    let mut state = state.clone();
                    let mut local = 0;
                    self.dfs(*depth, &mut state, &mut local);
                    self.nodes.fetch_add(local, Ordering::Relaxed);
                });
            }
        }
    }
}

pub(super) fn run(problem: &PlacementProblem, opts: &SolverOptions) -> SolveOutcome {
    let start = Instant::now();
    for (p, pair) in problem.pairs.iter().enumerate() {
        if problem.pool.options(p).is_empty() {
            return SolveOutcome {
                status: SolveStatus::Infeasible,
                solution: None,
                assignment: Vec::new(),
                witness: Some(InfeasibilityWitness::NoCandidate { uav: pair.uav, access: pair.access }),
                nodes_explored: 0,
                wall_time: start.elapsed(),
            };
        }
    }

    let prep = Prepared::new(problem);
    let search = Search {
        prep: &prep,
        incumbent: Incumbent::new(),
        deadline: (opts.time_limit < Duration::MAX).then(|| start.checked_add(opts.time_limit)).flatten(),
        timed_out: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
    };
    search.run(State::root(problem, prep.n_segments), opts.search);

    let timed_out = search.timed_out.load(Ordering::Relaxed);
    let best = search.incumbent.inner.into_inner().unwrap();
    let (solution, assignment) = match &best {
        Some((_, _, picks)) => {
            let mut per_pair: Vec<Option<(usize, usize)>> = vec![None; problem.pairs.len()];
            for (depth, &idx) in picks.iter().enumerate() {
                per_pair[prep.order[depth]] = Some((depth, idx));
            }
            let assignment: Vec<Choice> = per_pair
                .iter()
                .map(|c| {
                    let (d, i) = c.expect("complete assignment");
                    (prep.opts[d][i].host, prep.opts[d][i].path)
                })
                .collect();
            let choices: Vec<_> = assignment
                .iter()
                .enumerate()
                .map(|(p, &(h, i))| (h, &problem.pool.paths(p, h)[i]))
                .collect();
            (Some(PlacementSolution::from_choices(problem, &choices)), assignment)
        }
        None => (None, Vec::new()),
    };
    let status = match (timed_out, solution.is_some()) {
        (true, _) => SolveStatus::TimeLimitIncumbent,
        (false, true) => SolveStatus::Optimal,
        (false, false) => SolveStatus::Infeasible,
    };
    SolveOutcome {
        status,
        witness: (status == SolveStatus::Infeasible).then_some(InfeasibilityWitness::CapacityConflict),
        solution,
        assignment,
        nodes_explored: search.nodes.load(Ordering::Relaxed),
        wall_time: start.elapsed(),
    }
}
