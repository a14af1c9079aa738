//! UAV demands, flight plans, and the attachment schedule Z derived from them.

use crate::rng::SplitMix64;
use crate::topology::{NetworkGraph, NodeId, NodeKind, ScenarioParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type UavId = usize;
/// 1-based discrete time period.
pub type Period = u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavDemand {
    /// Resource units the VNF consumes while serving (D_u).
    pub demand: u64,
    /// B_u.
    pub bandwidth_mbps: u64,
    /// Required path survivability P_u, in (0, 1].
    pub reliability: f64,
    /// Tolerated host-to-UAV latency L_u.
    pub latency_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stop {
    pub access: NodeId,
    pub arrive_period: Period,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPlan {
    pub trajectory: Vec<Stop>,
    pub end_period: Period,
}

impl FlightPlan {
    pub fn launch_period(&self) -> Period {
        self.trajectory.first().map_or(0, |s| s.arrive_period)
    }

    /// Distinct access points of T_u, in order of first appearance.
    pub fn access_points(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = Vec::new();
        for stop in &self.trajectory {
            if !out.contains(&stop.access) {
                out.push(stop.access);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uav {
    pub id: UavId,
    #[serde(flatten)]
    pub demand: UavDemand,
    #[serde(flatten)]
    pub plan: FlightPlan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeHorizon {
    pub periods: Period,
}

impl TimeHorizon {
    pub fn new(periods: Period) -> Self {
        Self { periods }
    }
    pub fn iter(&self) -> impl Iterator<Item = Period> {
        1..=self.periods
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FleetError {
    #[error("uav {uav}: trajectory is empty")]
    EmptyTrajectory { uav: UavId },
    #[error("uav {uav}: trajectory node {node} is not an access node")]
    NotAccess { uav: UavId, node: NodeId },
    #[error("uav {uav}: arrival periods must be strictly increasing")]
    ArrivalOrder { uav: UavId },
    #[error("uav {uav}: consecutive trajectory entries repeat node {node}")]
    RepeatedStop { uav: UavId, node: NodeId },
    #[error("uav {uav}: period {period} outside horizon 1..={horizon}")]
    BeyondHorizon { uav: UavId, period: Period, horizon: Period },
    #[error("uav {uav}: end period {end} precedes launch period {launch}")]
    EndBeforeLaunch { uav: UavId, launch: Period, end: Period },
    #[error("uav {uav}: invalid demand ({0})", .detail)]
    Demand { uav: UavId, detail: String },
    #[error("uav ids must equal their position; found {found} at {index}")]
    IdOrder { index: usize, found: UavId },
}

pub fn validate_demand(uav: UavId, d: &UavDemand) -> Result<(), FleetError> {
    let bad = |detail: &str| Err(FleetError::Demand { uav, detail: detail.into() });
    if d.demand == 0 {
        return bad("resource demand must be > 0");
    }
    if d.bandwidth_mbps == 0 {
        return bad("bandwidth demand must be > 0");
    }
    if !(d.reliability > 0.0 && d.reliability <= 1.0) {
        return bad("reliability must lie in (0, 1]");
    }
    if !(d.latency_ms > 0.0) {
        return bad("latency tolerance must be > 0");
    }
    Ok(())
}

/// Checks a plan against the horizon and, when given, the graph's node kinds.
pub fn validate_plan(
    uav: UavId,
    plan: &FlightPlan,
    horizon: TimeHorizon,
    graph: Option<&NetworkGraph>,
) -> Result<(), FleetError> {
    let first = plan.trajectory.first().ok_or(FleetError::EmptyTrajectory { uav })?;
    for stop in &plan.trajectory {
        if stop.arrive_period < 1 || stop.arrive_period > horizon.periods {
            return Err(FleetError::BeyondHorizon {
                uav,
                period: stop.arrive_period,
                horizon: horizon.periods,
            });
        }
        if let Some(g) = graph {
            if g.kind(stop.access) != Some(NodeKind::Access) {
                return Err(FleetError::NotAccess { uav, node: stop.access });
            }
        }
    }
    for w in plan.trajectory.windows(2) {
        if w[1].arrive_period <= w[0].arrive_period {
            return Err(FleetError::ArrivalOrder { uav });
        }
        if w[1].access == w[0].access {
            return Err(FleetError::RepeatedStop { uav, node: w[1].access });
        }
    }
    if plan.end_period > horizon.periods {
        return Err(FleetError::BeyondHorizon {
            uav,
            period: plan.end_period,
            horizon: horizon.periods,
        });
    }
    if plan.end_period < first.arrive_period {
        return Err(FleetError::EndBeforeLaunch {
            uav,
            launch: first.arrive_period,
            end: plan.end_period,
        });
    }
    Ok(())
}

/// Z_{u,a,t} in compact form: the attached access node per UAV per period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachmentSchedule {
    horizon: TimeHorizon,
    /// `attached[u][t - 1]`
    attached: Vec<Vec<Option<NodeId>>>,
}

impl AttachmentSchedule {
    pub fn horizon(&self) -> TimeHorizon {
        self.horizon
    }

    pub fn uav_count(&self) -> usize {
        self.attached.len()
    }

    pub fn attached(&self, u: UavId, t: Period) -> Option<NodeId> {
        if t == 0 {
            return None;
        }
        self.attached.get(u)?.get(t as usize - 1).copied().flatten()
    }

    /// Z_{u,a,t} as 0/1.
    pub fn z(&self, u: UavId, a: NodeId, t: Period) -> u8 {
        u8::from(self.attached(u, t) == Some(a))
    }

    /// Periods with Z_{u,a,t} = 1, ascending.
    pub fn periods_at(&self, u: UavId, a: NodeId) -> Vec<Period> {
        self.horizon.iter().filter(|t| self.attached(u, *t) == Some(a)).collect()
    }

    pub fn active_periods(&self, u: UavId) -> usize {
        self.attached.get(u).map_or(0, |row| row.iter().flatten().count())
    }
}

/// The attached node at `t` is the trajectory entry with the latest arrival
/// not after `t`, within `[launch, end_period]`.
pub fn derive_attachment_schedule(
    plans: &[FlightPlan],
    horizon: TimeHorizon,
) -> Result<AttachmentSchedule, FleetError> {
    let mut attached = Vec::with_capacity(plans.len());
    for (u, plan) in plans.iter().enumerate() {
        validate_plan(u, plan, horizon, None)?;
        let mut row = vec![None; horizon.periods as usize];
        for t in plan.launch_period()..=plan.end_period {
            row[t as usize - 1] = plan
                .trajectory
                .iter()
                .rev()
                .find(|s| s.arrive_period <= t)
                .map(|s| s.access);
        }
        attached.push(row);
    }
    Ok(AttachmentSchedule { horizon, attached })
}

/// Number of periods `u` spends attached to `a`.
pub fn dwell_periods(schedule: &AttachmentSchedule, u: UavId, a: NodeId) -> u32 {
    schedule.horizon.iter().filter(|t| schedule.attached(u, *t) == Some(a)).count() as u32
}

/// Draws `params.uavs` UAVs from `rng`, one after another.
pub(crate) fn generate_fleet(
    params: &ScenarioParams,
    access: &[NodeId],
    rng: &mut SplitMix64,
) -> Vec<Uav> {
    (0..params.uavs).map(|id| generate_uav(id, params, access, rng)).collect()
}

fn generate_uav(id: UavId, p: &ScenarioParams, access: &[NodeId], rng: &mut SplitMix64) -> Uav {
    let demand = UavDemand {
        demand: p.uav_demand.draw(rng),
        bandwidth_mbps: p.uav_bandwidth_mbps.draw(rng),
        reliability: p.uav_reliability.draw(rng),
        latency_ms: p.uav_latency_ms.draw(rng),
    };
    let stops = p.mission_stops.draw(rng) as usize;

    // No revisits while unvisited base stations remain.
    let mut nodes: Vec<NodeId> = Vec::with_capacity(stops);
    let mut current = access[rng.index(access.len())];
    nodes.push(current);
    while nodes.len() < stops {
        let fresh: Vec<NodeId> = access.iter().copied().filter(|a| !nodes.contains(a)).collect();
        let pool: Vec<NodeId> = if fresh.is_empty() {
            access.iter().copied().filter(|a| *a != current).collect()
        } else {
            fresh
        };
        current = pool[rng.index(pool.len())];
        nodes.push(current);
    }

    let horizon = p.periods as u64;
    let window = rng.int_in(stops as u64, horizon);
    let start = rng.int_in(1, horizon - window + 1);
    let end = start + window - 1;
    // Arrival of stops 2..n: distinct periods in (start, end], partial Fisher-Yates.
    let mut candidates: Vec<u64> = (start + 1..=end).collect();
    for i in 0..stops - 1 {
        let j = i + rng.index(candidates.len() - i);
        candidates.swap(i, j);
    }
    let mut arrivals: Vec<u64> = candidates[..stops - 1].to_vec();
    arrivals.sort_unstable();
    arrivals.insert(0, start);

    Uav {
        id,
        demand,
        plan: FlightPlan {
            trajectory: nodes
                .into_iter()
                .zip(arrivals)
                .map(|(access, t)| Stop { access, arrive_period: t as Period })
                .collect(),
            end_period: end as Period,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stop(a: usize, t: Period) -> Stop {
        Stop { access: NodeId(a), arrive_period: t }
    }

    #[test]
    fn step_function_attachment() {
        let plan = FlightPlan { trajectory: vec![stop(1, 1), stop(2, 3)], end_period: 4 };
        let s = derive_attachment_schedule(&[plan], TimeHorizon::new(5)).unwrap();
        let got: Vec<Option<NodeId>> = (1..=5).map(|t| s.attached(0, t)).collect();
        assert_eq!(
            got,
            vec![Some(NodeId(1)), Some(NodeId(1)), Some(NodeId(2)), Some(NodeId(2)), None]
        );
        assert_eq!(dwell_periods(&s, 0, NodeId(1)), 2);
        assert_eq!(dwell_periods(&s, 0, NodeId(7)), 0);
        assert_eq!(s.active_periods(0), 4);
    }

    #[test]
    fn single_stop_covers_horizon() {
        let plan = FlightPlan { trajectory: vec![stop(3, 1)], end_period: 30 };
        let s = derive_attachment_schedule(&[plan], TimeHorizon::new(30)).unwrap();
        assert_eq!(dwell_periods(&s, 0, NodeId(3)), 30);
    }

    #[test]
    fn arrival_beyond_horizon_is_error() {
        let plan = FlightPlan { trajectory: vec![stop(3, 31)], end_period: 30 };
        assert_eq!(
            derive_attachment_schedule(&[plan], TimeHorizon::new(30)),
            Err(FleetError::BeyondHorizon { uav: 0, period: 31, horizon: 30 })
        );
    }

    #[test]
    fn malformed_plans_rejected() {
        let h = TimeHorizon::new(10);
        let empty = FlightPlan { trajectory: vec![], end_period: 3 };
        assert_eq!(validate_plan(0, &empty, h, None), Err(FleetError::EmptyTrajectory { uav: 0 }));
        let order = FlightPlan { trajectory: vec![stop(1, 3), stop(2, 3)], end_period: 5 };
        assert_eq!(validate_plan(0, &order, h, None), Err(FleetError::ArrivalOrder { uav: 0 }));
        let repeat = FlightPlan { trajectory: vec![stop(1, 1), stop(1, 3)], end_period: 5 };
        assert!(matches!(validate_plan(0, &repeat, h, None), Err(FleetError::RepeatedStop { .. })));
        let early = FlightPlan { trajectory: vec![stop(1, 4)], end_period: 2 };
        assert!(matches!(validate_plan(0, &early, h, None), Err(FleetError::EndBeforeLaunch { .. })));
    }

    #[test]
    fn revisit_counts_toward_same_access() {
        let plan = FlightPlan { trajectory: vec![stop(1, 1), stop(2, 2), stop(1, 4)], end_period: 5 };
        assert_eq!(plan.access_points(), vec![NodeId(1), NodeId(2)]);
        let s = derive_attachment_schedule(&[plan], TimeHorizon::new(5)).unwrap();
        assert_eq!(s.periods_at(0, NodeId(1)), vec![1, 4, 5]);
    }

    #[test]
    fn stops_past_end_are_never_attached() {
        let plan = FlightPlan { trajectory: vec![stop(1, 1), stop(2, 5)], end_period: 3 };
        let s = derive_attachment_schedule(&[plan], TimeHorizon::new(6)).unwrap();
        assert_eq!(dwell_periods(&s, 0, NodeId(2)), 0);
        assert_eq!(dwell_periods(&s, 0, NodeId(1)), 3);
    }
}
