mod common;

use common::*;
use vnfplace::harness::*;
use vnfplace::model::HostTier;
use vnfplace::*;

fn config(suite: Suite, seeds: u64, sweep: &[f64]) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(suite, (1..=seeds).collect());
    c.sweep = sweep.to_vec();
    c
}

fn mask_timing(csv: &str) -> String {
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let timed: Vec<usize> = header.iter().enumerate().filter(|(_, h)| h.starts_with("wall_time_s")).map(|(i, _)| i).collect();
    csv.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .map(|(i, c)| if timed.contains(&i) { "-" } else { c })
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn replicate_count_examples() {
    // One cloud host reachable from three base stations.
    let s = scenario(
        vec![NodeKind::Access, NodeKind::Access, NodeKind::Access, NodeKind::Transit, NodeKind::CloudHost],
        vec![link(0, 3, 1.0, 0.0, 100), link(1, 3, 1.0, 0.0, 100), link(2, 3, 1.0, 0.0, 100), link(4, 3, 1.0, 0.0, 100)],
        vec![host(4, 100, 1)],
        vec![uav(0, 5, 10, 0.9, 10.0, &[(0, 1), (1, 2), (2, 3)], 3)],
        3,
    );
    let p = PlacementProblem::assemble(&s, None, Execution::Sequential).unwrap();
    let sol = solve_exact(&p, &SolverOptions::default()).unwrap().solution.unwrap();
    assert_eq!(replicate_count(&sol, 0).unwrap(), 1);
    assert!(matches!(replicate_count(&sol, 1), Err(HarnessError::UnknownUav(1))));
}

#[test]
fn replicates_never_exceed_trajectory_length() {
    for seed in 0..20 {
        let s = generate_scenario(&ScenarioParams::desk(seed, 5)).unwrap();
        let p = PlacementProblem::assemble_lenient(&s, Some(8), Execution::Sequential).unwrap();
        let Some(sol) = solve_exact(&p, &SolverOptions::default()).unwrap().solution else { continue };
        for u in &s.uavs {
            let r = replicate_count(&sol, u.id).unwrap();
            assert!(r >= 1 && r <= u.plan.trajectory.len());
        }
    }
}

#[test]
fn tiers_follow_node_kinds() {
    let s = generate_scenario(&ScenarioParams::desk(1, 1)).unwrap();
    let g = &s.graph;
    for h in g.hosts() {
        let want = match g.kind(h.node).unwrap() {
            NodeKind::EdgeHostBs => HostTier::EdgeBs,
            NodeKind::EdgeHostAgg => HostTier::EdgeAgg,
            _ => HostTier::Cloud,
        };
        assert_eq!(classify_host_tier(g, h.node).unwrap(), want);
    }
    let a = g.nodes_of(NodeKind::Access).next().unwrap();
    assert!(matches!(classify_host_tier(g, a), Err(HarnessError::NotAHost(_))));
    assert!(HostTier::EdgeBs < HostTier::EdgeAgg && HostTier::EdgeAgg < HostTier::Cloud);
}

#[test]
fn mean_cost_grows_with_fleet() {
    let r = run_experiment(&config(Suite::CostVsUavs, 10, &[2.0, 4.0, 6.0])).unwrap();
    let means: Vec<f64> = r.summary.iter().map(|s| s.objective.mean.unwrap()).collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
    assert_eq!(r.rows.len(), 30);
}

#[test]
fn two_millisecond_tolerance_stays_at_base_stations() {
    let r = run_experiment(&config(Suite::TierVsQos, 30, &[2.0])).unwrap();
    let served: Vec<&MetricsRow> = r.rows.iter().filter(|row| row.status == SolveStatus::Optimal).collect();
    assert!(!served.is_empty());
    for row in served {
        assert!(row.uavs.iter().all(|m| m.tier == HostTier::EdgeBs && m.latency_ms == 2.0), "seed {}", row.seed);
    }
}

#[test]
fn single_stop_missions_have_one_replicate() {
    let r = run_experiment(&config(Suite::ReplicatesVsMissionLength, 10, &[1.0])).unwrap();
    assert_eq!(r.summary[0].replicates.mean, Some(1.0));
    assert!(r.rows.iter().filter_map(|row| row.mean_replicates).all(|m| m == 1.0));
}

#[test]
fn csv_output_is_deterministic_and_sorted() {
    let mut c = config(Suite::RuntimeVsUavs, 4, &[4.0, 2.0]);
    let a = run_experiment(&c).unwrap();
    c.exec = Execution::Sequential;
    let b = run_experiment(&c).unwrap();
    assert_eq!(mask_timing(&rows_csv(&a.rows)), mask_timing(&rows_csv(&b.rows)));
    assert_eq!(mask_timing(&summary_csv(&a.summary)), mask_timing(&summary_csv(&b.summary)));
    let keys: Vec<(f64, u64)> = a.rows.iter().map(|r| (r.sweep, r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    assert_eq!(keys, sorted);
    assert!(rows_csv(&a.rows).starts_with(&format!("{ROW_HEADER}\n")));
    assert!(summary_csv(&a.summary).starts_with(&format!("{SUMMARY_HEADER}\n")));

    let dir = tempfile::tempdir().unwrap();
    write_results(&a, Suite::RuntimeVsUavs, dir.path()).unwrap();
    assert!(dir.path().join("runtime_vs_uavs.csv").exists());
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(matches!(run_experiment(&config(Suite::CostVsUavs, 0, &[2.0])), Err(HarnessError::Config(_))));
    assert!(matches!(run_experiment(&config(Suite::TierVsQos, 2, &[])), Err(HarnessError::Config(_))));
    assert!(matches!(run_experiment(&config(Suite::TierVsQos, 2, &[-1.0])), Err(HarnessError::Config(_))));
}
