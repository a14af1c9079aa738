//! Plain-text LP export of the full placement ILP over raw edge variables,
//! a reader for the same format, and 0/1 assignment evaluation.
//!
//! Layout: `Minimize` / `Subject To` / `Binary` / `End`, one row per line as
//! `name: +coef var -coef var ... <= rhs`. Rows appear in constraint-family
//! order (1–12, then 18) and are named `c1..cN`. Variables are `X_u_h`,
//! `K_u_h_a` and `Y_u_h_a_i_j` with node ids.

use super::{objective_cost, PlacementProblem, PlacementSolution, Route, Serving};
use crate::numfmt::{g12, round12};
use crate::topology::NodeId;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub var: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<Term>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    pub objective: Vec<Term>,
    pub rows: Vec<Row>,
    pub binaries: Vec<String>,
}

pub fn x_var(u: usize, h: NodeId) -> String {
    format!("X_{u}_{h}")
}
pub fn k_var(u: usize, h: NodeId, a: NodeId) -> String {
    format!("K_{u}_{h}_{a}")
}
pub fn y_var(u: usize, h: NodeId, a: NodeId, i: NodeId, j: NodeId) -> String {
    format!("Y_{u}_{h}_{a}_{i}_{j}")
}

fn term(coef: f64, var: String) -> Term {
    Term { coef: round12(coef), var }
}

/// Builds the ILP model. Coefficients are stored already rounded to the 12
/// significant digits the text form carries.
pub fn build_model(problem: &PlacementProblem) -> LpModel {
    let scenario = &problem.scenario;
    let graph = &scenario.graph;
    let schedule = &problem.schedule;
    let hosts: Vec<NodeId> = graph.hosts().iter().map(|h| h.node).collect();
    let directed: Vec<(NodeId, NodeId)> = (0..graph.node_count())
        .flat_map(|i| graph.adjacent(NodeId(i)).iter().map(move |(j, _)| (NodeId(i), *j)))
        .collect();

    let mut model = LpModel::default();
    let mut pending: Vec<(Vec<Term>, Sense, f64)> = Vec::new();

    for (p, pair) in problem.pairs.iter().enumerate() {
        for (h_idx, h) in hosts.iter().enumerate() {
            let cost = problem.option_cost(p, h_idx);
            model.objective.push(term(cost as f64, k_var(pair.uav, *h, pair.access)));
        }
    }

    // C1
    for uav in &scenario.uavs {
        let terms = hosts.iter().map(|h| term(1.0, x_var(uav.id, *h))).collect();
        pending.push((terms, Sense::Ge, 1.0));
    }
    // C2
    for pair in &problem.pairs {
        for h in &hosts {
            pending.push((
                vec![term(1.0, k_var(pair.uav, *h, pair.access)), term(-1.0, x_var(pair.uav, *h))],
                Sense::Le,
                0.0,
            ));
        }
    }
    // C3
    for uav in &scenario.uavs {
        for h in &hosts {
            let mut terms = vec![term(1.0, x_var(uav.id, *h))];
            for a in uav.plan.access_points() {
                terms.push(term(-1.0, k_var(uav.id, *h, a)));
            }
            pending.push((terms, Sense::Le, 0.0));
        }
    }
    // C4
    for pair in &problem.pairs {
        let terms = hosts.iter().map(|h| term(1.0, k_var(pair.uav, *h, pair.access))).collect();
        pending.push((terms, Sense::Eq, 1.0));
    }
    // C5
    for host in graph.hosts() {
        for t in schedule.horizon().iter() {
            let terms: Vec<Term> = problem
                .pairs
                .iter()
                .filter(|p| schedule.attached(p.uav, t) == Some(p.access))
                .map(|p| {
                    term(scenario.uavs[p.uav].demand.demand as f64, k_var(p.uav, host.node, p.access))
                })
                .collect();
            if !terms.is_empty() {
                pending.push((terms, Sense::Le, host.capacity as f64));
            }
        }
    }
    // C6, one row per undirected link and period.
    for (id, link) in graph.links().iter().enumerate() {
        if graph.link_between(link.a, link.b) != Some(id) {
            continue;
        }
        for t in schedule.horizon().iter() {
            let mut terms = Vec::new();
            for p in problem.pairs.iter().filter(|p| schedule.attached(p.uav, t) == Some(p.access)) {
                let b = scenario.uavs[p.uav].demand.bandwidth_mbps as f64;
                for h in &hosts {
                    terms.push(term(b, y_var(p.uav, *h, p.access, link.a, link.b)));
                    terms.push(term(b, y_var(p.uav, *h, p.access, link.b, link.a)));
                }
            }
            if !terms.is_empty() {
                pending.push((terms, Sense::Le, link.bandwidth_mbps as f64));
            }
        }
    }
    // C7
    for p in &problem.pairs {
        for h in &hosts {
            for (i, j) in &directed {
                pending.push((
                    vec![term(1.0, y_var(p.uav, *h, p.access, *i, *j)), term(-1.0, k_var(p.uav, *h, p.access))],
                    Sense::Le,
                    0.0,
                ));
            }
        }
    }
    // C8
    for p in &problem.pairs {
        for h in &hosts {
            let mut terms: Vec<Term> = graph
                .adjacent(*h)
                .iter()
                .map(|(j, _)| term(1.0, y_var(p.uav, *h, p.access, *h, *j)))
                .collect();
            terms.push(term(-1.0, k_var(p.uav, *h, p.access)));
            pending.push((terms, Sense::Eq, 0.0));
        }
    }
    // C9
    for p in &problem.pairs {
        for h in &hosts {
            let mut terms: Vec<Term> = graph
                .adjacent(p.access)
                .iter()
                .map(|(i, _)| term(1.0, y_var(p.uav, *h, p.access, *i, p.access)))
                .collect();
            terms.push(term(-1.0, k_var(p.uav, *h, p.access)));
            pending.push((terms, Sense::Eq, 0.0));
        }
    }
    // C10
    for p in &problem.pairs {
        for h in &hosts {
            let terms: Vec<Term> = graph
                .adjacent(p.access)
                .iter()
                .map(|(j, _)| term(1.0, y_var(p.uav, *h, p.access, p.access, *j)))
                .collect();
            if !terms.is_empty() {
                pending.push((terms, Sense::Eq, 0.0));
            }
        }
    }
    // C11
    for p in &problem.pairs {
        for h in &hosts {
            for i in (0..graph.node_count()).map(NodeId) {
                if i == *h || i == p.access || graph.adjacent(i).is_empty() {
                    continue;
                }
                let mut terms = Vec::new();
                for (j, _) in graph.adjacent(i) {
                    terms.push(term(1.0, y_var(p.uav, *h, p.access, *j, i)));
                }
                for (j, _) in graph.adjacent(i) {
                    terms.push(term(-1.0, y_var(p.uav, *h, p.access, i, *j)));
                }
                pending.push((terms, Sense::Eq, 0.0));
            }
        }
    }
    // C12
    for p in &problem.pairs {
        let demand = &scenario.uavs[p.uav].demand;
        for h in &hosts {
            let terms = directed
                .iter()
                .map(|(i, j)| {
                    let l = graph.link(graph.link_between(*i, *j).unwrap()).latency_ms;
                    term(l, y_var(p.uav, *h, p.access, *i, *j))
                })
                .collect();
            pending.push((terms, Sense::Le, demand.latency_ms));
        }
    }
    // C18
    for p in &problem.pairs {
        let demand = &scenario.uavs[p.uav].demand;
        for h in &hosts {
            let terms = directed
                .iter()
                .map(|(i, j)| {
                    let fail = graph.link(graph.link_between(*i, *j).unwrap()).failure_prob;
                    term((-fail).ln_1p(), y_var(p.uav, *h, p.access, *i, *j))
                })
                .collect();
            pending.push((terms, Sense::Ge, demand.reliability.ln()));
        }
    }

    model.rows = pending
        .into_iter()
        .enumerate()
        .map(|(n, (terms, sense, rhs))| Row { name: format!("c{}", n + 1), terms, sense, rhs: round12(rhs) })
        .collect();

    for uav in &scenario.uavs {
        for h in &hosts {
            model.binaries.push(x_var(uav.id, *h));
        }
    }
    for p in &problem.pairs {
        for h in &hosts {
            model.binaries.push(k_var(p.uav, *h, p.access));
        }
    }
    for p in &problem.pairs {
        for h in &hosts {
            for (i, j) in &directed {
                model.binaries.push(y_var(p.uav, *h, p.access, *i, *j));
            }
        }
    }
    model
}

fn write_terms(out: &mut String, terms: &[Term]) {
    for t in terms {
        let sign = if t.coef.is_sign_negative() && t.coef != 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign}{} {}", g12(t.coef.abs()), t.var);
    }
}

impl LpModel {
    pub fn to_text(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        write_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            write_terms(&mut out, &row.terms);
            let _ = writeln!(out, " {} {}", row.sense.as_str(), g12(row.rhs));
        }
        out.push_str("Binary\n");
        for b in &self.binaries {
            let _ = writeln!(out, " {b}");
        }
        out.push_str("End\n");
        out
    }

    /// Objective value and names of rows violated by a 0/1 assignment;
    /// variables absent from `values` are 0.
    pub fn evaluate(&self, values: &BTreeMap<String, u8>, tolerance: f64) -> (f64, Vec<String>) {
        let value = |terms: &[Term]| -> f64 {
            terms
                .iter()
                .map(|t| t.coef * f64::from(values.get(&t.var).copied().unwrap_or(0)))
                .sum()
        };
        let objective = value(&self.objective);
        let violated = self
            .rows
            .iter()
            .filter(|r| {
                let lhs = value(&r.terms);
                match r.sense {
                    Sense::Le => lhs > r.rhs + tolerance,
                    Sense::Ge => lhs < r.rhs - tolerance,
                    Sense::Eq => (lhs - r.rhs).abs() > tolerance,
                }
            })
            .map(|r| r.name.clone())
            .collect();
        (objective, violated)
    }
}

pub fn export_lp(problem: &PlacementProblem) -> String {
    build_model(problem).to_text()
}

#[derive(Debug, Error, PartialEq)]
pub enum LpParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
}

/// Reads the text form written by [`LpModel::to_text`].
pub fn parse_lp(text: &str) -> Result<LpModel, LpParseError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Objective,
        Rows,
        Binary,
        Done,
    }
    let mut section = Section::None;
    let mut model = LpModel::default();
    let mut saw = [false; 3];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str| LpParseError::Syntax { line: n + 1, msg: msg.to_string() };
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Minimize" => {
                section = Section::Objective;
                saw[0] = true;
                continue;
            }
            "Subject To" => {
                section = Section::Rows;
                saw[1] = true;
                continue;
            }
            "Binary" => {
                section = Section::Binary;
                saw[2] = true;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                let (_, body) = line.split_once(':').ok_or_else(|| err("expected `obj:`"))?;
                model.objective = parse_terms(body.split_whitespace().collect::<Vec<_>>().as_slice())
                    .map_err(|m| err(&m))?;
            }
            Section::Rows => {
                let (name, body) = line.split_once(':').ok_or_else(|| err("expected `name:`"))?;
                let tokens: Vec<&str> = body.split_whitespace().collect();
                if tokens.len() < 2 {
                    return Err(err("row without sense and rhs"));
                }
                let sense = match tokens[tokens.len() - 2] {
                    "<=" => Sense::Le,
                    ">=" => Sense::Ge,
                    "=" => Sense::Eq,
                    _ => return Err(err("unknown sense")),
                };
                let rhs: f64 = tokens[tokens.len() - 1].parse().map_err(|_| err("bad rhs"))?;
                let terms = parse_terms(&tokens[..tokens.len() - 2]).map_err(|m| err(&m))?;
                model.rows.push(Row { name: name.trim().to_string(), terms, sense, rhs });
            }
            Section::Binary => model.binaries.push(line.to_string()),
            Section::None | Section::Done => return Err(err("content outside a section")),
        }
    }
    for (i, name) in ["Minimize", "Subject To", "Binary"].into_iter().enumerate() {
        if !saw[i] {
            return Err(LpParseError::MissingSection(name));
        }
    }
    Ok(model)
}

fn parse_terms(tokens: &[&str]) -> Result<Vec<Term>, String> {
    if !tokens.len().is_multiple_of(2) {
        return Err("terms must be `coef var` pairs".into());
    }
    tokens
        .chunks(2)
        .map(|pair| {
            let coef: f64 = pair[0].parse().map_err(|_| format!("bad coefficient `{}`", pair[0]))?;
            if !pair[0].starts_with(['+', '-']) {
                return Err(format!("coefficient `{}` lacks an explicit sign", pair[0]));
            }
            Ok(Term { coef, var: pair[1].to_string() })
        })
        .collect()
}

/// The 0/1 variable map of a solution (only variables equal to 1 listed).
pub fn solution_variables(solution: &PlacementSolution) -> BTreeMap<String, u8> {
    let mut vars = BTreeMap::new();
    for (u, hosts) in &solution.placements {
        for h in hosts {
            vars.insert(x_var(*u, *h), 1);
        }
    }
    for s in &solution.serving {
        vars.insert(k_var(s.uav, s.host, s.access), 1);
    }
    for r in &solution.routes {
        for (i, j) in &r.edges {
            vars.insert(y_var(r.uav, r.host, r.access, *i, *j), 1);
        }
    }
    vars
}

#[derive(Debug, Error, PartialEq)]
pub enum VariableError {
    #[error("unrecognised variable name `{0}`")]
    Name(String),
    #[error("variable `{0}` must be 0 or 1")]
    Value(String),
}

/// Rebuilds a solution from a variable map (entries equal to 1 are set).
pub fn solution_from_variables(
    problem: &PlacementProblem,
    vars: &BTreeMap<String, u8>,
) -> Result<PlacementSolution, VariableError> {
    let mut sol = PlacementSolution::default();
    for uav in &problem.scenario.uavs {
        sol.placements.insert(uav.id, BTreeSet::new());
    }
    let mut routes: BTreeMap<(usize, NodeId, NodeId), Vec<(NodeId, NodeId)>> = BTreeMap::new();
    for (name, value) in vars {
        if *value > 1 {
            return Err(VariableError::Value(name.clone()));
        }
        let bad = || VariableError::Name(name.clone());
        let mut parts = name.split('_');
        let kind = parts.next().ok_or_else(bad)?;
        let nums: Vec<usize> = parts.map(|p| p.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        match (kind, nums.as_slice()) {
            ("X", [u, h]) => {
                if *value == 1 {
                    sol.placements.entry(*u).or_default().insert(NodeId(*h));
                }
            }
            ("K", [u, h, a]) => {
                if *value == 1 {
                    sol.serving.push(Serving { uav: *u, access: NodeId(*a), host: NodeId(*h) });
                }
            }
            ("Y", [u, h, a, i, j]) => {
                if *value == 1 {
                    routes.entry((*u, NodeId(*h), NodeId(*a))).or_default().push((NodeId(*i), NodeId(*j)));
                }
            }
            _ => return Err(bad()),
        }
    }
    for ((uav, host, access), edges) in routes {
        sol.routes.push(Route { uav, host, access, edges: chain(host, edges) });
    }
    sol.serving.sort();
    sol.objective = objective_cost(problem, &sol);
    Ok(sol)
}

/// Orders edges into a walk from `start` where possible; leftovers keep their order.
fn chain(start: NodeId, mut edges: Vec<(NodeId, NodeId)>) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::with_capacity(edges.len());
    let mut at = start;
    while let Some(pos) = edges.iter().position(|(i, _)| *i == at) {
        let e = edges.remove(pos);
        at = e.1;
        out.push(e);
    }
    out.extend(edges);
    out
}
