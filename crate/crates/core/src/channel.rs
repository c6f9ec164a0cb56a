//! Far-field response channel between a fixed BS array and a single movable
//! receive antenna.
//!
//! The channel from the BS to user `i` is
//!
//! ```text
//! h(r) = f(r)^T · Σ · G · 1
//! ```
//!
//! where `f(r)` is the receive field response vector at the antenna position
//! `r`, `Σ` the path response matrix and `G` the transmit field response
//! matrix whose columns are the per-antenna transmit field response vectors.
//! Every phase term uses the `exp(-j·2π/λ·ρ)` convention.
//!
//! Because `v = Σ·G·1` does not depend on `r`, `|h(r)|²` expands into a sum
//! of cosines over receive-path pairs driven by the rank-1 coupling matrix
//! `M = v·v^H`. That expansion is what the position optimizer works on.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Elevation and azimuth of one propagation path, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathAngles {
    pub elevation: f64,
    pub azimuth: f64,
}

impl PathAngles {
    pub fn new(elevation: f64, azimuth: f64) -> Self {
        Self { elevation, azimuth }
    }

    /// Coefficient multiplying `x` in the propagation difference.
    #[inline]
    pub fn x_coefficient(&self) -> f64 {
        self.elevation.cos() * self.azimuth.sin()
    }

    /// Coefficient multiplying `y` in the propagation difference.
    #[inline]
    pub fn y_coefficient(&self) -> f64 {
        self.elevation.sin()
    }
}

/// A point in a local 2D antenna coordinate frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position2D {
    pub x: f64,
    pub y: f64,
}

impl Position2D {
    pub const ORIGIN: Position2D = Position2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Square movement region `[-half_side, half_side]²` centred on the user's
/// local origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoveRegion {
    half_side: f64,
}

impl MoveRegion {
    pub fn new(half_side: f64) -> Result<Self, ModelError> {
        if !(half_side.is_finite() && half_side >= 0.0) {
            return Err(ModelError::InvalidRegion(half_side));
        }
        Ok(Self { half_side })
    }

    /// Region with full side length `side` (the `A` in an `A × A` square).
    pub fn with_side(side: f64) -> Result<Self, ModelError> {
        Self::new(side / 2.0)
    }

    pub fn half_side(&self) -> f64 {
        self.half_side
    }

    pub fn contains(&self, r: &Position2D) -> bool {
        r.x.abs() <= self.half_side && r.y.abs() <= self.half_side
    }

    /// Coordinate-wise projection onto the region.
    pub fn clamp(&self, r: Position2D) -> Position2D {
        // `+ 0.0` turns a clamped -0.0 into +0.0
        Position2D {
            x: r.x.clamp(-self.half_side, self.half_side) + 0.0,
            y: r.y.clamp(-self.half_side, self.half_side) + 0.0,
        }
    }
}

/// Dense row-major complex matrix. Only what the channel model needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = *d;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, ModelError> {
        if data.len() != rows * cols {
            return Err(ModelError::Dimension {
                what: "matrix data",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Path geometry and path response matrix of one BS-to-user link.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannelModel {
    tx_paths: Vec<PathAngles>,
    rx_paths: Vec<PathAngles>,
    prm: ComplexMatrix,
    wavelength: f64,
}

impl UserChannelModel {
    /// `prm` must be `rx_paths.len() × tx_paths.len()`.
    pub fn new(
        tx_paths: Vec<PathAngles>,
        rx_paths: Vec<PathAngles>,
        prm: ComplexMatrix,
        wavelength: f64,
    ) -> Result<Self, ModelError> {
        if tx_paths.is_empty() {
            return Err(ModelError::NoPaths("transmit"));
        }
        if rx_paths.is_empty() {
            return Err(ModelError::NoPaths("receive"));
        }
        if prm.rows() != rx_paths.len() {
            return Err(ModelError::Dimension {
                what: "PRM rows vs receive paths",
                expected: rx_paths.len(),
                found: prm.rows(),
            });
        }
        if prm.cols() != tx_paths.len() {
            return Err(ModelError::Dimension {
                what: "PRM columns vs transmit paths",
                expected: tx_paths.len(),
                found: prm.cols(),
            });
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(ModelError::InvalidWavelength(wavelength));
        }
        Ok(Self {
            tx_paths,
            rx_paths,
            prm,
            wavelength,
        })
    }

    pub fn tx_paths(&self) -> &[PathAngles] {
        &self.tx_paths
    }

    pub fn rx_paths(&self) -> &[PathAngles] {
        &self.rx_paths
    }

    pub fn prm(&self) -> &ComplexMatrix {
        &self.prm
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// `2π/λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

/// Positions of the BS antenna elements in the transmit-local frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    elements: Vec<Position2D>,
}

impl AntennaArray {
    pub fn new(elements: Vec<Position2D>) -> Result<Self, ModelError> {
        if elements.is_empty() {
            return Err(ModelError::EmptyArray);
        }
        for (i, a) in elements.iter().enumerate() {
            if !a.is_finite() {
                return Err(ModelError::NonFiniteElement(i));
            }
            if elements[..i].iter().any(|b| b == a) {
                return Err(ModelError::DuplicateElement(i));
            }
        }
        Ok(Self { elements })
    }

    /// Uniform planar array with `spacing` between neighbours, laid out on
    /// the most-square `rows × cols` factorisation of `n` and centred on the
    /// origin. `n = 16` gives a 4×4 grid.
    pub fn uniform_planar(n: usize, spacing: f64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::EmptyArray);
        }
        let rows = (1..=n)
            .take_while(|r| r * r <= n)
            .filter(|r| n.is_multiple_of(*r))
            .last()
            .unwrap_or(1);
        let cols = n / rows;
        let x0 = (cols as f64 - 1.0) / 2.0;
        let y0 = (rows as f64 - 1.0) / 2.0;
        let elements = (0..rows)
            .flat_map(|row| {
                (0..cols).map(move |col| {
                    Position2D::new((col as f64 - x0) * spacing, (row as f64 - y0) * spacing)
                })
            })
            .collect();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[Position2D] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Rank-1 Hermitian matrix `M = v·v^H` with `v = Σ·G·1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: ComplexMatrix,
    source: Vec<Complex64>,
}

impl CouplingMatrix {
    /// Builds `v·v^H` from `v`.
    pub fn from_source(source: Vec<Complex64>) -> Self {
        let n = source.len();
        let mut entries = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                entries[(k, l)] = source[k] * source[l].conj();
            }
        }
        Self { entries, source }
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn source_vector(&self) -> &[Complex64] {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.source.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.entries[(k, k)].re).sum()
    }
}

/// Propagation difference of a receive path between `r` and the origin.
#[inline]
pub fn propagation_diff_rx(r: Position2D, path: &PathAngles) -> f64 {
    r.x * path.elevation.cos() * path.azimuth.sin() + r.y * path.elevation.sin()
}

/// Propagation difference of a transmit path between `t` and the origin.
/// Carries the opposite sign of the receive expression.
#[inline]
pub fn propagation_diff_tx(t: Position2D, path: &PathAngles) -> f64 {
    -(t.x * path.elevation.cos() * path.azimuth.sin() + t.y * path.elevation.sin())
}

#[inline]
fn phasor(wavenumber: f64, diff: f64) -> Complex64 {
    Complex64::from_polar(1.0, -wavenumber * diff)
}

/// Receive field response vector at `r`, one unit phasor per receive path.
pub fn receive_frv(r: Position2D, model: &UserChannelModel) -> Vec<Complex64> {
    let k = model.wavenumber();
    model
        .rx_paths()
        .iter()
        .map(|p| phasor(k, propagation_diff_rx(r, p)))
        .collect()
}

/// Transmit field response matrix `G`, `L_t × N`; column `k` belongs to
/// antenna `k`.
pub fn transmit_frm(array: &AntennaArray, model: &UserChannelModel) -> ComplexMatrix {
    let k = model.wavenumber();
    let lt = model.tx_paths().len();
    let mut g = ComplexMatrix::zeros(lt, array.len());
    for (m, path) in model.tx_paths().iter().enumerate() {
        for (col, t) in array.elements().iter().enumerate() {
            g[(m, col)] = phasor(k, propagation_diff_tx(*t, path));
        }
    }
    g
}

/// `Σ·G·1`: per-receive-path aggregate of the transmit side.
fn source_vector(array: &AntennaArray, model: &UserChannelModel) -> Vec<Complex64> {
    let g = transmit_frm(array, model);
    let g_sum: Vec<Complex64> = (0..g.rows()).map(|m| g.row(m).iter().sum()).collect();
    let prm = model.prm();
    (0..prm.rows())
        .map(|n| prm.row(n).iter().zip(&g_sum).map(|(s, g)| s * g).sum())
        .collect()
}

/// Channel response coefficient `f(r)^T·Σ·G·1`.
pub fn channel_gain(r: Position2D, array: &AntennaArray, model: &UserChannelModel) -> Complex64 {
    let f = receive_frv(r, model);
    source_vector(array, model)
        .iter()
        .zip(&f)
        .map(|(v, f)| v * f)
        .sum()
}

/// Coupling matrix `M = v·v^H` of a link; independent of the receive position.
pub fn coupling_matrix(array: &AntennaArray, model: &UserChannelModel) -> CouplingMatrix {
    CouplingMatrix::from_source(source_vector(array, model))
}

/// Principal argument in `(-π, π]`, with `arg(0) = 0`.
#[inline]
pub(crate) fn principal_arg(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// `|h(r)|²` through the cosine expansion over receive-path pairs.
pub fn channel_power_expansion(r: Position2D, m: &CouplingMatrix, model: &UserChannelModel) -> f64 {
    let k = model.wavenumber();
    let e = m.entries();
    let rho: Vec<f64> = model
        .rx_paths()
        .iter()
        .map(|p| propagation_diff_rx(r, p))
        .collect();
    let n = m.dim();
    let mut total: f64 = (0..n).map(|i| e[(i, i)].re).sum();
    for i in 0..n {
        for j in i + 1..n {
            let c = e[(i, j)];
            let mag = c.norm();
            if mag == 0.0 {
                continue;
            }
            total += 2.0 * mag * (k * (rho[i] - rho[j]) - principal_arg(c)).cos();
        }
    }
    total.max(0.0)
}
