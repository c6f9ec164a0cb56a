//! Brute-force and finite-difference reference computations.
//!
//! Nothing here calls into the SCA optimizer; the grid search evaluates the
//! channel expansion directly and the derivative estimates only see the
//! function they are handed.

use rayon::prelude::*;

use crate::alloc::{alloc_bounds, alloc_metric, GainPair, LinkBudget};
use crate::channel::{
    channel_power_expansion, CouplingMatrix, MoveRegion, Position2D, UserChannelModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    resolution: usize,
}

impl GridSpec {
    /// Points per axis; at least 2.
    pub fn new(resolution: usize) -> Option<Self> {
        (resolution >= 2).then_some(Self { resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `i`-th of `resolution` evenly spaced points on `[lo, hi]`, endpoints
    /// included exactly.
    fn point(&self, lo: f64, hi: f64, i: usize) -> f64 {
        let last = self.resolution - 1;
        if i == last {
            hi
        } else {
            lo + (hi - lo) * (i as f64 / last as f64)
        }
    }
}

/// Exhaustive search for the largest `|h|²` on a uniform grid over the
/// region. Ties resolve to the lowest linear index (row-major in `y`, then
/// `x`).
pub fn grid_search_position(
    m: &CouplingMatrix,
    model: &UserChannelModel,
    region: &MoveRegion,
    grid: GridSpec,
) -> (Position2D, f64) {
    let h = region.half_side();
    let n = grid.resolution();
    let (idx, best) = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let r = Position2D::new(grid.point(-h, h, i % n), grid.point(-h, h, i / n));
            (i, channel_power_expansion(r, m, model))
        })
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    (
        Position2D::new(grid.point(-h, h, idx % n), grid.point(-h, h, idx / n)),
        best,
    )
}

/// Scans `alloc_metric` over the feasible interval `[l₁, min(μ₁, μ₂)] ∩ [0, 1]`.
/// Returns `None` when the interval is empty.
pub fn grid_search_alpha(g: &GainPair, lb: &LinkBudget, grid: GridSpec) -> Option<(f64, f64)> {
    let b = alloc_bounds(g, lb);
    let lo = b.lower.max(0.0);
    let hi = b.upper_strong.min(b.upper_weak).min(1.0);
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return None;
    }
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..grid.resolution() {
        let a = grid.point(lo, hi, i);
        let v = alloc_metric(a, g, lb);
        if v > best.1 {
            best = (a, v);
        }
    }
    Some(best)
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(Position2D) -> f64, r: Position2D, step: f64) -> [f64; 2] {
    let dx = f(Position2D::new(r.x + step, r.y)) - f(Position2D::new(r.x - step, r.y));
    let dy = f(Position2D::new(r.x, r.y + step)) - f(Position2D::new(r.x, r.y - step));
    [dx / (2.0 * step), dy / (2.0 * step)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianEstimate {
    /// Symmetrised `(H + Hᵀ)/2`.
    pub matrix: [[f64; 2]; 2],
    /// `|H_xy - H_yx| / max|H|` before symmetrisation.
    pub symmetry_residual: f64,
}

impl HessianEstimate {
    /// Largest eigenvalue magnitude of the symmetric 2×2 matrix.
    pub fn spectral_norm(&self) -> f64 {
        let [[a, b], [_, d]] = self.matrix;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        (mean + radius).abs().max((mean - radius).abs())
    }
}

/// Central-difference Hessian. The mixed partial is estimated twice, as the
/// `y`-difference of `x`-slopes and the `x`-difference of `y`-slopes taken on
/// half steps, and the two are averaged.
pub fn fd_hessian(f: impl Fn(Position2D) -> f64, r: Position2D, step: f64) -> HessianEstimate {
    let at = |dx: f64, dy: f64| f(Position2D::new(r.x + dx, r.y + dy));
    let h = step;
    let f0 = at(0.0, 0.0);
    let hxx = (at(h, 0.0) - 2.0 * f0 + at(-h, 0.0)) / (h * h);
    let hyy = (at(0.0, h) - 2.0 * f0 + at(0.0, -h)) / (h * h);
    let hxy = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
    let s = 0.5 * h;
    let slope_x = |dy: f64| (at(s, dy) - at(-s, dy)) / (2.0 * s);
    let slope_y = |dx: f64| (at(dx, s) - at(dx, -s)) / (2.0 * s);
    let hxy_a = (slope_x(s) - slope_x(-s)) / (2.0 * s);
    let hyx_b = (slope_y(s) - slope_y(-s)) / (2.0 * s);
    let scale = hxx
        .abs()
        .max(hyy.abs())
        .max(hxy.abs())
        .max(f64::MIN_POSITIVE);
    let off = 0.5 * (hxy + 0.5 * (hxy_a + hyx_b));
    HessianEstimate {
        matrix: [[hxx, off], [off, hyy]],
        symmetry_residual: (hxy_a - hyx_b).abs() / scale,
    }
}
