use manoma::sca::ScaConfig;
use manoma::scenario::{
    aggregate, draw_scenario, run_sweep, run_sweep_records, run_trial, ScenarioSpec, Sweep,
    SweepAxis, TrialRecord,
};
use manoma::schemes::Scheme;

fn records(n: u64) -> Vec<TrialRecord> {
    let spec = ScenarioSpec::default();
    (0..n)
        .map(|t| run_trial(&draw_scenario(&spec, t).unwrap(), &ScaConfig::default()))
        .collect()
}

#[test]
fn aggregate_matches_direct_reduction() {
    let recs = records(40);
    let stats = aggregate(&recs).unwrap();
    for (k, scheme) in Scheme::ALL.iter().enumerate() {
        let s = stats.get(*scheme);
        assert_eq!(stats.schemes[k].scheme, *scheme);
        let rows: Vec<_> = recs.iter().map(|r| r.result(*scheme)).collect();
        let n = rows.len() as f64;
        let sum_mean = rows.iter().map(|r| r.sum_rate).sum::<f64>() / n;
        let u1 = rows.iter().map(|r| r.rate_user1).sum::<f64>() / n;
        let o2 = rows.iter().filter(|r| r.outage_user2).count() as f64 / n;
        assert!((s.mean_sum_rate - sum_mean).abs() <= 1e-12 * sum_mean.max(1.0));
        assert!((s.mean_rate_user1 - u1).abs() <= 1e-12 * u1.max(1.0));
        assert_eq!(s.mean_sum_rate, s.mean_rate_user1 + s.mean_rate_user2);
        assert_eq!(s.outage_prob_user2, o2);
        assert_eq!(s.trials, 40);
    }
}

#[test]
fn sweep_reuses_draws_across_points() {
    let spec = ScenarioSpec::default();
    let sweep = Sweep {
        axis: SweepAxis::TotalPower,
        values: vec![20.0, 30.0],
    };
    let recs = run_sweep_records(&spec, &sweep, 8, &ScaConfig::default()).unwrap();
    assert_eq!(recs.len(), 2);
    for (a, b) in recs[0].1.iter().zip(&recs[1].1) {
        assert_eq!(a.trial_index, b.trial_index);
        // power does not move the antennas or change the gains
        let (pa, pb) = (
            a.result(Scheme::ProposedMaNoma),
            b.result(Scheme::ProposedMaNoma),
        );
        assert_eq!(pa.positions, pb.positions);
        assert_eq!(pa.gains, pb.gains);
    }
    // the 30 dBm point equals a plain run at 30 dBm
    let direct = records(8);
    assert_eq!(recs[1].1, direct);
}

#[test]
fn region_sweep_point_matches_direct_run() {
    let spec = ScenarioSpec::default();
    let sweep = Sweep {
        axis: SweepAxis::RegionSize,
        values: vec![3.0],
    };
    let rows = run_sweep(&spec, &sweep, 10, &ScaConfig::default()).unwrap();
    assert_eq!(rows[0].1, aggregate(&records(10)).unwrap());
}
