//! Successive convex approximation for the receive-antenna position.
//!
//! The objective is `F(r) = -|h(r)|²`, written through the coupling matrix
//! as
//!
//! ```text
//! F(r) = -[ Σ_k M[k,k] + Σ_{k<l} 2|M[k,l]|·cos(κ·(ρ_k(r) - ρ_l(r)) - ∠M[k,l]) ]
//! ```
//!
//! with `κ = 2π/λ` and `ρ_n(r) = a_n·x + b_n·y`, `a_n = cos θ_n sin φ_n`,
//! `b_n = sin θ_n`. Each term is a plane wave in `r`, so every second
//! derivative is bounded by a position-independent sum. Collecting those
//! bounds for `∂²F/∂x²`, `∂²F/∂y²` and `∂²F/∂x∂y` into `A`, `B`, `C` gives the
//! Frobenius bound `δ = √(A² + B² + 2C²) ≥ ‖∇²F‖₂`, and therefore the global
//! majorizer
//!
//! ```text
//! F(r) ≤ F(r') + ∇F(r')ᵀ(r - r') + δ/2·‖r - r'‖².
//! ```
//!
//! The majorizer is isotropic, so its minimizer over the square region is
//! the coordinate-wise clamp of `r' - ∇F(r')/δ`.
//!
//! Each iteration moves to `η·r̂ + (1-η)·r'` where `r̂` is that minimizer.
//! For any `η ∈ (0, 1]` the surrogate is convex and equals `F` at `r'`, so
//! its value at the blended point is at most `F(r')`; since it also bounds
//! `F` from above, `F` never increases. `η = 1` is allowed for that reason.
//!
//! Cost per iteration is `O(L²)` in the number of receive paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{principal_arg, CouplingMatrix, MoveRegion, Position2D, UserChannelModel};
use crate::error::ScaError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScaConfig {
    /// Blend factor `η ∈ (0, 1]` between the surrogate minimizer and the
    /// previous iterate.
    pub damping: f64,
    /// Stop once successive iterates are within this distance, meters.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Number of starts; the first is the caller's start point.
    pub multistart_count: usize,
    /// The extra starts are the best `multistart_count - 1` of
    /// `screening_factor·(multistart_count - 1)` points drawn uniformly in
    /// the region. `1` keeps every drawn point.
    pub screening_factor: usize,
    /// `δ` at or below this value is treated as a flat objective.
    pub delta_floor: f64,
}

impl Default for ScaConfig {
    fn default() -> Self {
        Self {
            damping: 0.9,
            tolerance: 1e-6,
            max_iterations: 200,
            multistart_count: 1,
            screening_factor: 8,
            delta_floor: 1e-18,
        }
    }
}

impl ScaConfig {
    pub fn validate(&self) -> Result<(), ScaError> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(ScaError::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ScaError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(ScaError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if self.multistart_count == 0 {
            return Err(ScaError::InvalidConfig(
                "multistart_count must be at least 1".into(),
            ));
        }
        if self.screening_factor == 0 {
            return Err(ScaError::InvalidConfig(
                "screening_factor must be at least 1".into(),
            ));
        }
        if !(self.delta_floor >= 0.0 && self.delta_floor.is_finite()) {
            return Err(ScaError::InvalidConfig(format!(
                "delta_floor must be non-negative, got {}",
                self.delta_floor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// Flat objective or zero gradient at the anchor.
    Stationary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaTrace {
    pub iterates: Vec<Position2D>,
    pub objective_values: Vec<f64>,
    pub termination: Termination,
}

impl ScaTrace {
    /// Number of SCA iterations performed.
    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn final_value(&self) -> f64 {
        *self
            .objective_values
            .last()
            .expect("trace holds the start value")
    }
}

#[derive(Debug, Clone, Copy)]
struct PairTerm {
    /// `2|M[k,l]|`
    weight: f64,
    phase: f64,
    da: f64,
    db: f64,
}

/// `F(r) = -|h(r)|²` for one user, with the pair terms cached.
#[derive(Debug, Clone)]
pub struct PositionObjective {
    wavenumber: f64,
    diagonal: f64,
    pairs: Vec<PairTerm>,
}

impl PositionObjective {
    pub fn new(m: &CouplingMatrix, model: &UserChannelModel) -> Self {
        let e = m.entries();
        let n = m.dim();
        let coeffs: Vec<(f64, f64)> = model
            .rx_paths()
            .iter()
            .map(|p| (p.x_coefficient(), p.y_coefficient()))
            .collect();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for k in 0..n {
            for l in k + 1..n {
                let c = e[(k, l)];
                let mag = c.norm();
                if mag == 0.0 {
                    continue;
                }
                pairs.push(PairTerm {
                    weight: 2.0 * mag,
                    phase: principal_arg(c),
                    da: coeffs[k].0 - coeffs[l].0,
                    db: coeffs[k].1 - coeffs[l].1,
                });
            }
        }
        Self {
            wavenumber: model.wavenumber(),
            diagonal: (0..n).map(|k| e[(k, k)].re).sum(),
            pairs,
        }
    }

    pub fn value(&self, r: Position2D) -> f64 {
        let k = self.wavenumber;
        let cross: f64 = self
            .pairs
            .iter()
            .map(|p| p.weight * (k * (p.da * r.x + p.db * r.y) - p.phase).cos())
            .sum();
        -(self.diagonal + cross)
    }

    /// `|h(r)|²`.
    pub fn channel_power(&self, r: Position2D) -> f64 {
        -self.value(r)
    }

    pub fn gradient(&self, r: Position2D) -> [f64; 2] {
        let k = self.wavenumber;
        let mut g = [0.0, 0.0];
        for p in &self.pairs {
            let s = k * p.weight * (k * (p.da * r.x + p.db * r.y) - p.phase).sin();
            g[0] += s * p.da;
            g[1] += s * p.db;
        }
        g
    }

    /// Position-independent bound `δ ≥ ‖∇²F(r)‖₂`.
    ///
    /// The mixed-derivative sum uses `|Δa|·|Δb|` per pair so that it bounds
    /// `|∂²F/∂x∂y|` regardless of the sign pattern of the path geometry.
    pub fn lipschitz_delta(&self) -> f64 {
        let scale = self.wavenumber * self.wavenumber;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for p in &self.pairs {
            // weight = 2|M|, so weight·κ² = 8π²/λ²·|M|
            let w = p.weight * scale;
            a += w * p.da * p.da;
            b += w * p.db * p.db;
            c += w * p.da.abs() * p.db.abs();
        }
        (a * a + b * b + 2.0 * c * c).sqrt()
    }

    /// Quadratic upper bound of `F` anchored at `anchor`.
    pub fn surrogate(&self, r: Position2D, anchor: Position2D, delta: f64) -> f64 {
        let g = self.gradient(anchor);
        let dx = r.x - anchor.x;
        let dy = r.y - anchor.y;
        self.value(anchor) + g[0] * dx + g[1] * dy + 0.5 * delta * (dx * dx + dy * dy)
    }

    /// Exact minimizer of the surrogate over `region`, or `None` when the
    /// anchor is already stationary (`δ ≤ delta_floor` or zero gradient).
    pub fn surrogate_step(
        &self,
        anchor: Position2D,
        delta: f64,
        region: &MoveRegion,
        delta_floor: f64,
    ) -> Option<Position2D> {
        let g = self.gradient(anchor);
        if delta <= delta_floor || (g[0] == 0.0 && g[1] == 0.0) {
            return None;
        }
        Some(region.clamp(Position2D::new(
            anchor.x - g[0] / delta,
            anchor.y - g[1] / delta,
        )))
    }

    fn descend(
        &self,
        start: Position2D,
        delta: f64,
        region: &MoveRegion,
        cfg: &ScaConfig,
    ) -> ScaTrace {
        let eta = cfg.damping;
        let mut r = start;
        let mut iterates = vec![r];
        let mut objective_values = vec![self.value(r)];
        let mut termination = Termination::MaxIterations;
        for n in 1..=cfg.max_iterations {
            let step = self.surrogate_step(r, delta, region, cfg.delta_floor);
            let next = match step {
                Some(hat) if eta == 1.0 => hat,
                Some(hat) => region.clamp(Position2D::new(
                    eta * hat.x + (1.0 - eta) * r.x,
                    eta * hat.y + (1.0 - eta) * r.y,
                )),
                None => r,
            };
            let moved = next.distance(&r);
            r = next;
            iterates.push(r);
            objective_values.push(self.value(r));
            if step.is_none() {
                termination = Termination::Stationary;
                break;
            }
            if moved <= cfg.tolerance {
                termination = Termination::Converged;
                break;
            }
            if n >= cfg.max_iterations {
                termination = Termination::MaxIterations;
            }
        }
        ScaTrace {
            iterates,
            objective_values,
            termination,
        }
    }
}

/// `F(r) = -|h(r)|²`.
pub fn objective(r: Position2D, m: &CouplingMatrix, model: &UserChannelModel) -> f64 {
    PositionObjective::new(m, model).value(r)
}

pub fn gradient(r: Position2D, m: &CouplingMatrix, model: &UserChannelModel) -> [f64; 2] {
    PositionObjective::new(m, model).gradient(r)
}

pub fn lipschitz_delta(m: &CouplingMatrix, model: &UserChannelModel) -> f64 {
    PositionObjective::new(m, model).lipschitz_delta()
}

/// Extra start points: the `count` lowest-objective points of a uniform
/// pseudo-random pool of `count·factor` points, in pool order on ties.
fn screened_starts(
    objective: &PositionObjective,
    region: &MoveRegion,
    count: usize,
    factor: usize,
    seed: u64,
) -> Vec<Position2D> {
    let h = region.half_side();
    if h == 0.0 {
        return vec![Position2D::ORIGIN; count];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(f64, Position2D)> = (0..count * factor)
        .map(|_| {
            let p = Position2D::new(rng.random_range(-h..=h), rng.random_range(-h..=h));
            (objective.value(p), p)
        })
        .collect();
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    pool.into_iter().take(count).map(|(_, p)| p).collect()
}

/// Runs the damped SCA iteration from `start` and, when
/// `cfg.multistart_count > 1`, from screened pseudo-random points drawn with
/// a generator seeded by `seed`. Returns the final position with the lowest
/// objective (earliest start on ties) and its trace.
pub fn optimize_position(
    start: Position2D,
    objective: &PositionObjective,
    region: &MoveRegion,
    cfg: &ScaConfig,
    seed: u64,
) -> Result<(Position2D, ScaTrace), ScaError> {
    cfg.validate()?;
    if !region.contains(&start) {
        return Err(ScaError::StartOutsideRegion(start));
    }
    let delta = objective.lipschitz_delta();
    let mut best = objective.descend(start, delta, region, cfg);
    if cfg.multistart_count > 1 {
        let extra = screened_starts(
            objective,
            region,
            cfg.multistart_count - 1,
            cfg.screening_factor,
            seed,
        );
        for p in extra {
            let trace = objective.descend(p, delta, region, cfg);
            if trace.final_value() < best.final_value() {
                best = trace;
            }
        }
    }
    let r = *best.iterates.last().expect("trace holds the start point");
    Ok((r, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{coupling_matrix, AntennaArray, ComplexMatrix, PathAngles};
    use num_complex::Complex64;

    fn model(rx: Vec<PathAngles>, diag: Vec<Complex64>) -> UserChannelModel {
        UserChannelModel::new(rx.clone(), rx, ComplexMatrix::from_diagonal(&diag), 0.1).unwrap()
    }

    fn two_path() -> (CouplingMatrix, UserChannelModel) {
        let m = model(
            vec![PathAngles::new(0.2, 0.9), PathAngles::new(-0.6, -0.3)],
            vec![Complex64::new(1.0, 0.5), Complex64::new(-0.4, 0.8)],
        );
        let array = AntennaArray::uniform_planar(4, 0.05).unwrap();
        (coupling_matrix(&array, &m), m)
    }

    #[test]
    fn single_path_is_flat() {
        let m = model(
            vec![PathAngles::new(0.3, 0.4)],
            vec![Complex64::new(2.0, 0.0)],
        );
        let array = AntennaArray::uniform_planar(1, 0.05).unwrap();
        let cm = coupling_matrix(&array, &m);
        let obj = PositionObjective::new(&cm, &m);
        let r = Position2D::new(0.01, -0.02);
        assert_eq!(obj.value(r), -4.0);
        assert_eq!(obj.gradient(r), [0.0, 0.0]);
        assert_eq!(obj.lipschitz_delta(), 0.0);
        assert_eq!(obj.surrogate(Position2D::new(0.1, 0.1), r, 0.0), -4.0);

        let region = MoveRegion::with_side(0.3).unwrap();
        let (end, trace) =
            optimize_position(Position2D::ORIGIN, &obj, &region, &ScaConfig::default(), 0).unwrap();
        assert_eq!(end, Position2D::ORIGIN);
        assert_eq!(trace.iterations(), 1);
        assert_eq!(trace.termination, Termination::Stationary);
        assert_eq!(trace.objective_values, vec![-4.0, -4.0]);
    }

    #[test]
    fn zero_channel_objective_is_zero() {
        let m = model(
            vec![PathAngles::new(0.3, 0.4), PathAngles::new(0.1, -0.2)],
            vec![Complex64::new(0.0, 0.0); 2],
        );
        let array = AntennaArray::uniform_planar(4, 0.05).unwrap();
        let cm = coupling_matrix(&array, &m);
        assert_eq!(objective(Position2D::new(0.02, 0.03), &cm, &m), 0.0);
        assert_eq!(lipschitz_delta(&cm, &m), 0.0);
    }

    #[test]
    fn identical_direction_coefficients_give_zero_gradient() {
        // Same (a, b) for both paths: the cross term never varies with r.
        let p = PathAngles::new(0.5, 0.7);
        let m = model(
            vec![p, p],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        );
        let array = AntennaArray::uniform_planar(4, 0.05).unwrap();
        let cm = coupling_matrix(&array, &m);
        for r in [Position2D::ORIGIN, Position2D::new(0.07, -0.11)] {
            assert_eq!(gradient(r, &cm, &m), [0.0, 0.0]);
        }
    }

    #[test]
    fn surrogate_matches_objective_at_anchor() {
        let (cm, m) = two_path();
        let obj = PositionObjective::new(&cm, &m);
        let d = obj.lipschitz_delta();
        let a = Position2D::new(0.03, -0.04);
        assert_eq!(obj.surrogate(a, a, d), obj.value(a));
    }

    #[test]
    fn step_clamps_to_boundary() {
        let (cm, m) = two_path();
        let obj = PositionObjective::new(&cm, &m);
        let anchor = Position2D::ORIGIN;
        let g = obj.gradient(anchor);
        let side = 0.3;
        let region = MoveRegion::with_side(side).unwrap();
        // δ = |∂F/∂x|/A puts the unclamped x target at ∓A, twice the half side
        let delta = g[0].abs() / side;
        let step = obj.surrogate_step(anchor, delta, &region, 0.0).unwrap();
        assert_eq!(step.x, -g[0].signum() * side / 2.0);
        assert_eq!(step.y, (-g[1] / delta).clamp(-side / 2.0, side / 2.0));
        assert!(obj.surrogate_step(anchor, 1e-20, &region, 1e-18).is_none());
    }

    #[test]
    fn delta_scales_with_inverse_square_wavelength() {
        let rx = vec![
            PathAngles::new(0.2, 0.9),
            PathAngles::new(-0.6, -0.3),
            PathAngles::new(1.1, 0.1),
        ];
        let diag = vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.4, 0.8),
            Complex64::new(0.3, -0.2),
        ];
        let src = vec![
            Complex64::new(0.7, 0.1),
            Complex64::new(-0.2, 1.3),
            Complex64::new(0.5, 0.5),
        ];
        let cm = CouplingMatrix::from_source(src);
        let m1 = UserChannelModel::new(
            rx.clone(),
            rx.clone(),
            ComplexMatrix::from_diagonal(&diag),
            0.1,
        )
        .unwrap();
        let m2 = UserChannelModel::new(rx.clone(), rx, ComplexMatrix::from_diagonal(&diag), 0.2)
            .unwrap();
        let d1 = lipschitz_delta(&cm, &m1);
        let d2 = lipschitz_delta(&cm, &m2);
        assert!((d2 / d1 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rejects_start_outside_region() {
        let (cm, m) = two_path();
        let obj = PositionObjective::new(&cm, &m);
        let region = MoveRegion::new(0.05).unwrap();
        let err = optimize_position(
            Position2D::new(0.1, 0.0),
            &obj,
            &region,
            &ScaConfig::default(),
            0,
        );
        assert!(matches!(err, Err(ScaError::StartOutsideRegion(_))));
    }

    #[test]
    fn config_validation() {
        let bad = ScaConfig {
            damping: 0.0,
            ..ScaConfig::default()
        };
        assert!(bad.validate().is_err());
        let one = ScaConfig {
            damping: 1.0,
            ..ScaConfig::default()
        };
        assert!(one.validate().is_ok());
        let bad = ScaConfig {
            max_iterations: 0,
            ..ScaConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn two_path_run_descends_and_improves() {
        let (cm, m) = two_path();
        let obj = PositionObjective::new(&cm, &m);
        let region = MoveRegion::with_side(0.3).unwrap();
        for eta in [0.5, 0.9, 1.0] {
            let cfg = ScaConfig {
                damping: eta,
                ..ScaConfig::default()
            };
            let (end, trace) =
                optimize_position(Position2D::ORIGIN, &obj, &region, &cfg, 3).unwrap();
            assert!(region.contains(&end));
            for w in trace.objective_values.windows(2) {
                assert!(w[1] <= w[0] + 1e-12 * w[0].abs());
            }
            assert!(obj.channel_power(end) >= obj.channel_power(Position2D::ORIGIN));
        }
        // two paths: |h|² peaks at |v1|+|v2| squared
        let v = cm.source_vector();
        let peak = (v[0].norm() + v[1].norm()).powi(2);
        let cfg = ScaConfig {
            multistart_count: 4,
            max_iterations: 2000,
            ..ScaConfig::default()
        };
        let (end, _) = optimize_position(Position2D::ORIGIN, &obj, &region, &cfg, 11).unwrap();
        assert!(
            obj.channel_power(end) > 0.999 * peak,
            "{} vs {}",
            obj.channel_power(end),
            peak
        );
    }
}
