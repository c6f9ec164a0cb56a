use manoma::output::write_sweep_csv;
use manoma::sca::ScaConfig;
use manoma::scenario::{run_sweep, ScenarioSpec, Sweep, SweepAxis};

fn sweep_bytes(threads: usize, spec: &ScenarioSpec, cfg: &ScaConfig) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    let sweep = Sweep {
        axis: SweepAxis::RegionSize,
        values: vec![0.5, 1.0, 2.0],
    };
    let rows = pool.install(|| run_sweep(spec, &sweep, 24, cfg)).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows).unwrap();
    buf
}

#[test]
fn output_independent_of_thread_count() {
    let spec = ScenarioSpec::default();
    let cfg = ScaConfig {
        multistart_count: 4,
        ..ScaConfig::default()
    };
    let one = sweep_bytes(1, &spec, &cfg);
    assert_eq!(one, sweep_bytes(2, &spec, &cfg));
    assert_eq!(one, sweep_bytes(5, &spec, &cfg));
}

#[test]
fn seed_changes_output() {
    let cfg = ScaConfig::default();
    let a = sweep_bytes(2, &ScenarioSpec::default(), &cfg);
    let b = sweep_bytes(
        2,
        &ScenarioSpec {
            master_seed: 43,
            ..ScenarioSpec::default()
        },
        &cfg,
    );
    assert_ne!(a, b);
}
