//! Numerical self-checks run by `manoma validate` and the acceptance tests.
//!
//! Every check draws its random channels from [`draw_scenario`] with the
//! given spec and its probe points from a ChaCha8 stream keyed by the check,
//! so a report is a pure function of `(spec, sizes)`. Derivative oracles
//! differentiate `-|h(r)|²` computed straight from the field-response
//! vectors, not the cosine expansion used by the optimizer.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alloc::{
    alloc_bounds, alloc_metric, alloc_metric_derivative, classify, classify_and_allocate,
    sinr_and_rates, AllocCase, GainPair, LinkBudget,
};
use crate::channel::{
    channel_gain, channel_power_expansion, coupling_matrix, AntennaArray, CouplingMatrix,
    MoveRegion, Position2D, UserChannelModel,
};
use crate::oracle::{fd_gradient, fd_hessian, grid_search_alpha, grid_search_position, GridSpec};
use crate::sca::{optimize_position, PositionObjective, ScaConfig};
use crate::scenario::{draw_scenario, ScenarioSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

/// Sample counts for each check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    pub expansion_instances: usize,
    pub gradient_instances: usize,
    pub gradient_positions: usize,
    pub majorization_pairs: usize,
    pub hessian_instances: usize,
    pub hessian_positions: usize,
    /// Runs per damping value.
    pub descent_runs: usize,
    pub grid_trials: usize,
    pub grid_resolution: usize,
    pub allocator_pairs: usize,
    pub alpha_grid: usize,
    pub derivative_points: usize,
    pub case_scan: usize,
}

impl SuiteSizes {
    pub fn full() -> Self {
        Self {
            expansion_instances: 1000,
            gradient_instances: 100,
            gradient_positions: 10,
            majorization_pairs: 10_000,
            hessian_instances: 100,
            hessian_positions: 20,
            descent_runs: 1000,
            grid_trials: 100,
            grid_resolution: 201,
            allocator_pairs: 1000,
            alpha_grid: 10_000,
            derivative_points: 10_000,
            case_scan: 1_000_000,
        }
    }

    /// Small enough for an interactive `validate` run.
    pub fn quick() -> Self {
        Self {
            expansion_instances: 200,
            gradient_instances: 20,
            gradient_positions: 10,
            majorization_pairs: 2000,
            hessian_instances: 20,
            hessian_positions: 10,
            descent_runs: 100,
            grid_trials: 20,
            grid_resolution: 101,
            allocator_pairs: 200,
            alpha_grid: 10_000,
            derivative_points: 2000,
            case_scan: 100_000,
        }
    }
}

struct Instance {
    model: UserChannelModel,
    array: AntennaArray,
    m: CouplingMatrix,
    region: MoveRegion,
}

/// Instance `i` is user `i % 2` of trial `i / 2`.
fn instance(spec: &ScenarioSpec, i: usize) -> Instance {
    let draw = draw_scenario(spec, (i / 2) as u64).expect("validation spec is valid");
    let u = i % 2;
    let model = draw.users[u].clone();
    let m = coupling_matrix(&draw.array, &model);
    Instance {
        model,
        array: draw.array,
        m,
        region: draw.regions[u],
    }
}

fn probe_rng(spec: &ScenarioSpec, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.master_seed);
    rng.set_stream(stream);
    rng
}

fn uniform_point(rng: &mut ChaCha8Rng, region: &MoveRegion) -> Position2D {
    let h = region.half_side();
    if h == 0.0 {
        return Position2D::ORIGIN;
    }
    Position2D::new(rng.random_range(-h..=h), rng.random_range(-h..=h))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

fn direct_objective(inst: &Instance) -> impl Fn(Position2D) -> f64 + '_ {
    move |r| -channel_gain(r, &inst.array, &inst.model).norm_sqr()
}

pub fn check_expansion(spec: &ScenarioSpec, instances: usize) -> CheckResult {
    let mut rng = probe_rng(spec, 1);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let inst = instance(spec, i);
        let r = uniform_point(&mut rng, &inst.region);
        let direct = channel_gain(r, &inst.array, &inst.model).norm_sqr();
        let expanded = channel_power_expansion(r, &inst.m, &inst.model);
        let err = (expanded - direct).abs() / direct.max(f64::EPSILON);
        worst = worst.max(err);
    }
    CheckResult {
        name: "expansion",
        passed: worst < 1e-9,
        detail: format!("{instances} instances, max relative error {worst:.3e} (limit 1e-9)"),
    }
}

pub fn check_gradient(spec: &ScenarioSpec, instances: usize, positions: usize) -> CheckResult {
    let mut rng = probe_rng(spec, 2);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let inst = instance(spec, i);
        let obj = PositionObjective::new(&inst.m, &inst.model);
        let f = direct_objective(&inst);
        let step = 1e-6 * inst.model.wavelength();
        for _ in 0..positions {
            let r = uniform_point(&mut rng, &inst.region);
            let g = obj.gradient(r);
            let fd = fd_gradient(&f, r, step);
            let diff = (g[0] - fd[0]).hypot(g[1] - fd[1]);
            let scale = g[0].hypot(g[1]).max(fd[0].hypot(fd[1]));
            let err = if scale == 0.0 { 0.0 } else { diff / scale };
            worst = worst.max(err);
        }
    }
    CheckResult {
        name: "gradient",
        passed: worst < 1e-5,
        detail: format!(
            "{instances}x{positions} points, max relative error {worst:.3e} (limit 1e-5)"
        ),
    }
}

pub fn check_majorization(spec: &ScenarioSpec, pairs: usize) -> CheckResult {
    let mut rng = probe_rng(spec, 3);
    let per_instance = 100;
    let mut violations = 0usize;
    let mut done = 0usize;
    let mut i = 0;
    while done < pairs {
        let inst = instance(spec, i);
        let obj = PositionObjective::new(&inst.m, &inst.model);
        let delta = obj.lipschitz_delta();
        for _ in 0..per_instance.min(pairs - done) {
            let anchor = uniform_point(&mut rng, &inst.region);
            let r = uniform_point(&mut rng, &inst.region);
            let f = obj.value(r);
            if obj.surrogate(r, anchor, delta) < f - 1e-9 * f.abs() {
                violations += 1;
            }
            done += 1;
        }
        i += 1;
    }
    CheckResult {
        name: "majorization",
        passed: violations == 0,
        detail: format!("{pairs} (anchor, r) pairs, {violations} violations"),
    }
}

pub fn check_hessian_bound(spec: &ScenarioSpec, instances: usize, positions: usize) -> CheckResult {
    let mut rng = probe_rng(spec, 4);
    let mut violations = 0usize;
    let mut asymmetric = 0usize;
    let mut worst_ratio = 0.0f64;
    for i in 0..instances {
        let inst = instance(spec, i);
        let delta = PositionObjective::new(&inst.m, &inst.model).lipschitz_delta();
        let f = direct_objective(&inst);
        let step = 1e-4 * inst.model.wavelength();
        for _ in 0..positions {
            let r = uniform_point(&mut rng, &inst.region);
            let h = fd_hessian(&f, r, step);
            if h.symmetry_residual >= 1e-6 {
                asymmetric += 1;
                continue;
            }
            let norm = h.spectral_norm();
            if delta > 0.0 {
                worst_ratio = worst_ratio.max(norm / delta);
            }
            if norm > delta * (1.0 + 1e-6) {
                violations += 1;
            }
        }
    }
    CheckResult {
        name: "hessian_bound",
        passed: violations == 0 && asymmetric == 0,
        detail: format!(
            "{instances}x{positions} points, {violations} violations, {asymmetric} asymmetric, max |eig|/delta {worst_ratio:.4}"
        ),
    }
}

pub fn check_descent(spec: &ScenarioSpec, runs: usize) -> CheckResult {
    let mut bad_runs = 0usize;
    let mut out_of_region = 0usize;
    let etas = [0.5, 0.9, 1.0];
    for (k, &eta) in etas.iter().enumerate() {
        let cfg = ScaConfig {
            damping: eta,
            ..ScaConfig::default()
        };
        let mut rng = probe_rng(spec, 10 + k as u64);
        for i in 0..runs {
            let inst = instance(spec, i);
            let obj = PositionObjective::new(&inst.m, &inst.model);
            let start = uniform_point(&mut rng, &inst.region);
            let (_, trace) = optimize_position(start, &obj, &inst.region, &cfg, i as u64)
                .expect("start drawn inside the region");
            let v = &trace.objective_values;
            if v.windows(2).any(|w| w[1] > w[0] + 1e-12 * w[0].abs()) {
                bad_runs += 1;
            }
            out_of_region += trace
                .iterates
                .iter()
                .filter(|r| !inst.region.contains(r))
                .count();
        }
    }
    CheckResult {
        name: "sca_descent",
        passed: bad_runs == 0 && out_of_region == 0,
        detail: format!(
            "{runs} runs for each damping in {{0.5, 0.9, 1}}, {bad_runs} increasing traces, {out_of_region} iterates outside region"
        ),
    }
}

pub fn check_sca_vs_grid(spec: &ScenarioSpec, trials: usize, resolution: usize) -> CheckResult {
    let cfg = ScaConfig {
        multistart_count: 8,
        ..ScaConfig::default()
    };
    let grid = GridSpec::new(resolution).expect("resolution at least 2");
    let ratios: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let d = draw_scenario(spec, t).expect("validation spec is valid");
            let model = &d.users[0];
            let m = coupling_matrix(&d.array, model);
            let obj = PositionObjective::new(&m, model);
            let (r, _) = optimize_position(
                Position2D::ORIGIN,
                &obj,
                &d.regions[0],
                &cfg,
                d.sca_seeds[0],
            )
            .expect("origin lies in the region");
            let (_, best) = grid_search_position(&m, model, &d.regions[0], grid);
            if best > 0.0 {
                obj.channel_power(r) / best
            } else {
                1.0
            }
        })
        .collect();
    let hits = ratios.iter().filter(|&&q| q >= 0.9).count();
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    CheckResult {
        name: "sca_vs_grid",
        passed: 10 * hits >= 9 * trials,
        detail: format!(
            "{hits}/{trials} trials reach 0.9 of the {resolution}x{resolution} grid maximum (need 90%), worst ratio {worst:.3}"
        ),
    }
}

pub fn check_allocator_case1(spec: &ScenarioSpec, pairs: usize, alpha_grid: usize) -> CheckResult {
    let mut rng = probe_rng(spec, 20);
    let grid = GridSpec::new(alpha_grid).expect("grid at least 2");
    let mut metric_fail = 0usize;
    let mut threshold_fail = 0usize;
    let mut found = 0usize;
    while found < pairs {
        let gamma0 = 10f64.powf(rng.random_range(0.0..=2.0));
        let lb = LinkBudget::from_snr(1.0, gamma0).expect("positive budget");
        let strong = log_uniform(&mut rng, 1.0, 1e6);
        let weak = log_uniform(&mut rng, 1.0, strong);
        let g = GainPair::new(strong, weak).expect("ordered gains");
        if classify(&alloc_bounds(&g, &lb)) != AllocCase::I {
            continue;
        }
        found += 1;
        let out = classify_and_allocate(&g, &lb);
        let achieved = alloc_metric(out.alpha_s, &g, &lb);
        let (_, scan) = grid_search_alpha(&g, &lb, grid).expect("Case I is feasible");
        if achieved < scan * (1.0 - 1e-12) {
            metric_fail += 1;
        }
        let sinr_w = sinr_and_rates(out.alpha_s, &g, &lb).sinr_weak;
        if (sinr_w - gamma0).abs() > 1e-9 * gamma0 {
            threshold_fail += 1;
        }
    }
    CheckResult {
        name: "allocator_case1",
        passed: metric_fail == 0 && threshold_fail == 0,
        detail: format!(
            "{pairs} Case-I pairs, {metric_fail} below the {alpha_grid}-point scan, {threshold_fail} weak SINR off threshold"
        ),
    }
}

pub fn check_metric_derivative(spec: &ScenarioSpec, points: usize) -> CheckResult {
    let mut rng = probe_rng(spec, 21);
    let lb = LinkBudget::from_snr(1.0, 10.0).expect("positive budget");
    let mut worst = 0.0f64;
    let mut negative = 0usize;
    for _ in 0..points {
        let a = log_uniform(&mut rng, 0.1, 1e4);
        let b = log_uniform(&mut rng, 0.1, 1e4);
        let g = GainPair::from_users(a, b);
        let alpha = rng.random_range(0.0..=1.0);
        // step on the scale over which m varies: 1/(ρ·g_w) near α = 0
        let h = 1e-4 * (alpha + 1.0 / (1.0 + g.weak_gain()));
        let fd = (alloc_metric(alpha + h, &g, &lb) - alloc_metric(alpha - h, &g, &lb)) / (2.0 * h);
        let d = alloc_metric_derivative(alpha, &g, &lb);
        if d < 0.0 {
            negative += 1;
        }
        let scale = d.abs().max(fd.abs());
        if scale > 0.0 {
            worst = worst.max((d - fd).abs() / scale);
        }
    }
    CheckResult {
        name: "metric_derivative",
        passed: worst < 1e-5 && negative == 0,
        detail: format!(
            "{points} points, max relative error {worst:.3e} (limit 1e-5), {negative} negative"
        ),
    }
}

pub fn check_case_coverage(spec: &ScenarioSpec, tuples: usize) -> CheckResult {
    let mut rng = probe_rng(spec, 22);
    let mut counts = [0usize; 5];
    for _ in 0..tuples {
        let gamma0 = 10f64.powf(rng.random_range(0.0..=2.0));
        let rho = log_uniform(&mut rng, 1e-2, 1e2);
        let lb = LinkBudget::from_snr(rho, gamma0).expect("positive budget");
        let mut gain = || {
            if rng.random_bool(0.01) {
                0.0
            } else {
                log_uniform(&mut rng, 1e-3, 1e5)
            }
        };
        let g = GainPair::from_users(gain(), gain());
        let idx = match classify_and_allocate(&g, &lb).case_label {
            AllocCase::I => 0,
            AllocCase::II => 1,
            AllocCase::III => 2,
            AllocCase::IV => 3,
            AllocCase::V => 4,
        };
        counts[idx] += 1;
    }
    let covered = counts[0] > 0 && counts[1] > 0 && counts[2] > 0 && counts[4] > 0;
    CheckResult {
        name: "case_coverage",
        passed: covered && counts[3] == 0,
        detail: format!(
            "{tuples} tuples, I={} II={} III={} IV={} V={}",
            counts[0], counts[1], counts[2], counts[3], counts[4]
        ),
    }
}

/// Runs every check. `spec` supplies the channel distribution; its region
/// size is used as given.
pub fn run_suite(spec: &ScenarioSpec, sizes: &SuiteSizes) -> ValidationReport {
    ValidationReport {
        checks: vec![
            check_expansion(spec, sizes.expansion_instances),
            check_gradient(spec, sizes.gradient_instances, sizes.gradient_positions),
            check_majorization(spec, sizes.majorization_pairs),
            check_hessian_bound(spec, sizes.hessian_instances, sizes.hessian_positions),
            check_descent(spec, sizes.descent_runs),
            check_sca_vs_grid(spec, sizes.grid_trials, sizes.grid_resolution),
            check_allocator_case1(spec, sizes.allocator_pairs, sizes.alpha_grid),
            check_metric_derivative(spec, sizes.derivative_points),
            check_case_coverage(spec, sizes.case_scan),
        ],
    }
}
