//! Random scenario generation, Monte Carlo trials and parameter sweeps.
//!
//! # Random streams
//!
//! Trial `t` of a run with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `t`
//! (`set_stream(t)`). Each trial therefore has its own independent,
//! reproducible stream no matter which worker runs it or in what order.
//! Within a trial the draw order is fixed: for user 1 then user 2, the `L`
//! transmit paths (elevation, azimuth), the `L` receive paths (elevation,
//! azimuth) and the `L` diagonal path responses (real, imaginary); then one
//! `u64` SCA multistart seed per user.
//!
//! Nothing drawn depends on the transmit power or the region size, so sweeps
//! over either reuse identical channels at every sweep point.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alloc::LinkBudget;
use crate::channel::{AntennaArray, ComplexMatrix, MoveRegion, PathAngles, UserChannelModel};
use crate::error::{ConfigError, Error, Result};
use crate::sca::ScaConfig;
use crate::schemes::{eval_all, Scheme, SchemeResult};
use crate::units::dbm_to_watts;

/// Physical parameters of one Monte Carlo experiment, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n_antennas: usize,
    /// BS-to-user distances `d₁`, `d₂`, meters.
    pub distances: [f64; 2],
    pub carrier_wavelength: f64,
    /// Paths per side, `L = L_t = L_r`.
    pub path_count: usize,
    pub path_loss_exponent: f64,
    /// `σ²`, watts.
    pub noise_power: f64,
    /// `γ₀`, linear.
    pub sinr_threshold: f64,
    /// `A/2`, meters.
    pub region_half_side: f64,
    /// `P`, watts.
    pub total_power: f64,
    pub master_seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        let wavelength = 0.1;
        Self {
            n_antennas: 16,
            distances: [60.0, 100.0],
            carrier_wavelength: wavelength,
            path_count: 10,
            path_loss_exponent: 2.8,
            noise_power: dbm_to_watts(-90.0),
            sinr_threshold: 10.0,
            region_half_side: 1.5 * wavelength,
            total_power: 1.0,
            master_seed: 42,
        }
    }
}

impl ScenarioSpec {
    /// `c₀ = (λ/4π)²`, the average gain at 1 m.
    pub fn reference_gain(&self) -> f64 {
        (self.carrier_wavelength / (4.0 * PI)).powi(2)
    }

    /// `P₀ = P/N`.
    pub fn per_antenna_power(&self) -> f64 {
        self.total_power / self.n_antennas as f64
    }

    /// Variance of each diagonal path response of user `i`:
    /// `c₀·d_i^{-β}/L`.
    pub fn path_variance(&self, user: usize) -> f64 {
        self.reference_gain() * self.distances[user].powf(-self.path_loss_exponent)
            / self.path_count as f64
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(
                    field,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        if self.n_antennas == 0 {
            return Err(ConfigError::invalid("n_antennas", "must be at least 1"));
        }
        if self.path_count == 0 {
            return Err(ConfigError::invalid("path_count", "must be at least 1"));
        }
        positive("distances[0]", self.distances[0])?;
        positive("distances[1]", self.distances[1])?;
        positive("carrier_wavelength", self.carrier_wavelength)?;
        positive("path_loss_exponent", self.path_loss_exponent)?;
        positive("noise_power", self.noise_power)?;
        positive("sinr_threshold", self.sinr_threshold)?;
        positive("total_power", self.total_power)?;
        if !(self.region_half_side.is_finite() && self.region_half_side >= 0.0) {
            return Err(ConfigError::invalid(
                "region_half_side",
                format!(
                    "must be non-negative and finite, got {}",
                    self.region_half_side
                ),
            ));
        }
        Ok(())
    }

    fn link_budget(&self) -> LinkBudget {
        LinkBudget::new(
            self.per_antenna_power(),
            self.noise_power,
            self.sinr_threshold,
        )
        .expect("validated spec yields a valid link budget")
    }
}

/// One random channel realisation plus everything needed to evaluate the
/// schemes on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDraw {
    pub users: [UserChannelModel; 2],
    pub array: AntennaArray,
    pub link: LinkBudget,
    pub regions: [MoveRegion; 2],
    pub trial_index: u64,
    /// Seeds for the extra SCA starts of each user.
    pub sca_seeds: [u64; 2],
}

impl ScenarioDraw {
    /// Same channels, both regions replaced by `[-h, h]²`.
    pub fn with_region_half_side(&self, half_side: f64) -> Result<Self> {
        let region = MoveRegion::new(half_side)?;
        Ok(Self {
            regions: [region; 2],
            ..self.clone()
        })
    }

    /// Same channels, different total transmit power in watts.
    pub fn with_total_power(&self, total_power: f64) -> Option<Self> {
        let n = self.array.len() as f64;
        let link = self.link.with_per_antenna_power(total_power / n)?;
        Some(Self {
            link,
            ..self.clone()
        })
    }
}

fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

fn sample_angles(rng: &mut ChaCha8Rng, count: usize) -> Vec<PathAngles> {
    (0..count)
        .map(|_| {
            let elevation = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
            let azimuth = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
            PathAngles::new(elevation, azimuth)
        })
        .collect()
}

/// Circularly-symmetric complex Gaussian samples with total variance `variance`.
fn sample_cn(rng: &mut ChaCha8Rng, count: usize, variance: f64) -> Vec<Complex64> {
    let scale = (variance / 2.0).sqrt();
    (0..count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(scale * re, scale * im)
        })
        .collect()
}

/// Deterministic draw for `(spec.master_seed, trial_index)`.
pub fn draw_scenario(spec: &ScenarioSpec, trial_index: u64) -> Result<ScenarioDraw> {
    spec.validate()?;
    let mut rng = trial_rng(spec.master_seed, trial_index);
    let l = spec.path_count;
    let mut build_user = |user: usize| -> Result<UserChannelModel> {
        let tx = sample_angles(&mut rng, l);
        let rx = sample_angles(&mut rng, l);
        let diag = sample_cn(&mut rng, l, spec.path_variance(user));
        Ok(UserChannelModel::new(
            tx,
            rx,
            ComplexMatrix::from_diagonal(&diag),
            spec.carrier_wavelength,
        )?)
    };
    let u1 = build_user(0)?;
    let u2 = build_user(1)?;
    let sca_seeds = [rng.random(), rng.random()];
    let array = AntennaArray::uniform_planar(spec.n_antennas, spec.carrier_wavelength / 2.0)?;
    let region = MoveRegion::new(spec.region_half_side)?;
    Ok(ScenarioDraw {
        users: [u1, u2],
        array,
        link: spec.link_budget(),
        regions: [region; 2],
        trial_index,
        sca_seeds,
    })
}

/// Per-draw results for every scheme, ordered as [`Scheme::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub results: [SchemeResult; 4],
}

impl TrialRecord {
    pub fn result(&self, scheme: Scheme) -> &SchemeResult {
        self.results
            .iter()
            .find(|r| r.scheme == scheme)
            .expect("every scheme has a result")
    }
}

pub fn run_trial(draw: &ScenarioDraw, cfg: &ScaConfig) -> TrialRecord {
    TrialRecord {
        trial_index: draw.trial_index,
        results: eval_all(draw, cfg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeStats {
    pub scheme: Scheme,
    /// Equal to `mean_rate_user1 + mean_rate_user2`.
    pub mean_sum_rate: f64,
    pub mean_rate_user1: f64,
    pub mean_rate_user2: f64,
    pub outage_prob_user1: f64,
    pub outage_prob_user2: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    /// One entry per scheme, ordered as [`Scheme::ALL`].
    pub schemes: Vec<SchemeStats>,
}

impl AggregateStats {
    pub fn get(&self, scheme: Scheme) -> &SchemeStats {
        self.schemes
            .iter()
            .find(|s| s.scheme == scheme)
            .expect("every scheme is aggregated")
    }
}

/// Means and outage frequencies, reduced in record order.
pub fn aggregate(records: &[TrialRecord]) -> Result<AggregateStats> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let n = records.len() as f64;
    let schemes = Scheme::ALL
        .iter()
        .map(|&scheme| {
            let (mut r1, mut r2, mut o1, mut o2) = (0.0, 0.0, 0usize, 0usize);
            for rec in records {
                let r = rec.result(scheme);
                r1 += r.rate_user1;
                r2 += r.rate_user2;
                o1 += usize::from(r.outage_user1);
                o2 += usize::from(r.outage_user2);
            }
            let mean_rate_user1 = r1 / n;
            let mean_rate_user2 = r2 / n;
            SchemeStats {
                scheme,
                mean_sum_rate: mean_rate_user1 + mean_rate_user2,
                mean_rate_user1,
                mean_rate_user2,
                outage_prob_user1: o1 as f64 / n,
                outage_prob_user2: o2 as f64 / n,
                trials: records.len(),
            }
        })
        .collect();
    Ok(AggregateStats { schemes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Values are normalised region sizes `A/λ`.
    RegionSize,
    /// Values are total transmit powers in dBm.
    TotalPower,
}

impl std::str::FromStr for SweepAxis {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "region_size" => Ok(SweepAxis::RegionSize),
            "total_power" => Ok(SweepAxis::TotalPower),
            other => Err(ConfigError::invalid(
                "sweep.axis",
                format!("unknown sweep axis `{other}` (expected region_size or total_power)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.values.is_empty() {
            return Err(ConfigError::invalid("sweep.values", "must not be empty"));
        }
        for &v in &self.values {
            let ok = match self.axis {
                SweepAxis::RegionSize => v.is_finite() && v >= 0.0,
                SweepAxis::TotalPower => v.is_finite(),
            };
            if !ok {
                return Err(ConfigError::invalid(
                    "sweep.values",
                    format!("invalid sweep value {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Draws `trials` scenarios once, then evaluates every sweep point on the
/// same draws. Trials run on the ambient rayon pool; results are identical
/// for any pool size.
pub fn run_sweep_records(
    spec: &ScenarioSpec,
    sweep: &Sweep,
    trials: usize,
    cfg: &ScaConfig,
) -> Result<Vec<(f64, Vec<TrialRecord>)>> {
    spec.validate()?;
    sweep.validate()?;
    cfg.validate()?;
    if trials == 0 {
        return Err(ConfigError::invalid("trials", "must be at least 1").into());
    }
    let draws = (0..trials as u64)
        .into_par_iter()
        .map(|t| draw_scenario(spec, t))
        .collect::<Result<Vec<_>>>()?;
    sweep
        .values
        .iter()
        .map(|&value| {
            let records = draws
                .par_iter()
                .map(|d| {
                    let point = match sweep.axis {
                        SweepAxis::RegionSize => {
                            d.with_region_half_side(value * spec.carrier_wavelength / 2.0)?
                        }
                        SweepAxis::TotalPower => {
                            d.with_total_power(dbm_to_watts(value)).ok_or_else(|| {
                                ConfigError::invalid(
                                    "sweep.values",
                                    format!("invalid power {value} dBm"),
                                )
                            })?
                        }
                    };
                    Ok(run_trial(&point, cfg))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((value, records))
        })
        .collect()
}

pub fn run_sweep(
    spec: &ScenarioSpec,
    sweep: &Sweep,
    trials: usize,
    cfg: &ScaConfig,
) -> Result<Vec<(f64, AggregateStats)>> {
    run_sweep_records(spec, sweep, trials, cfg)?
        .into_iter()
        .map(|(v, recs)| Ok((v, aggregate(&recs)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let s = ScenarioSpec::default();
        assert_eq!(s.n_antennas, 16);
        assert_eq!(s.path_count, 10);
        assert!((s.noise_power - 1e-12).abs() < 1e-27);
        assert!((s.per_antenna_power() - 1.0 / 16.0).abs() < 1e-15);
        assert!((s.reference_gain() - (0.1 / (4.0 * PI)).powi(2)).abs() < 1e-20);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn draws_are_reproducible_and_distinct() {
        let s = ScenarioSpec::default();
        let a = draw_scenario(&s, 3).unwrap();
        let b = draw_scenario(&s, 3).unwrap();
        let c = draw_scenario(&s, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.users[0], c.users[0]);
        let other_seed = ScenarioSpec {
            master_seed: 7,
            ..s.clone()
        };
        assert_ne!(draw_scenario(&other_seed, 3).unwrap().users[0], a.users[0]);
    }

    #[test]
    fn angles_in_range_and_prm_diagonal() {
        let s = ScenarioSpec::default();
        for t in 0..20 {
            let d = draw_scenario(&s, t).unwrap();
            for u in &d.users {
                for p in u.tx_paths().iter().chain(u.rx_paths()) {
                    assert!(p.elevation.abs() <= FRAC_PI_2 && p.azimuth.abs() <= FRAC_PI_2);
                }
                let prm = u.prm();
                for r in 0..prm.rows() {
                    for c in 0..prm.cols() {
                        if r != c {
                            assert_eq!(prm[(r, c)], Complex64::new(0.0, 0.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn aggregate_rejects_empty() {
        assert!(matches!(aggregate(&[]), Err(Error::EmptyRecords)));
    }

    #[test]
    fn sweep_validation() {
        let s = ScenarioSpec::default();
        let sweep = Sweep {
            axis: SweepAxis::TotalPower,
            values: vec![],
        };
        assert!(run_sweep(&s, &sweep, 1, &ScaConfig::default()).is_err());
        let sweep = Sweep {
            axis: SweepAxis::RegionSize,
            values: vec![1.0],
        };
        assert!(run_sweep(&s, &sweep, 0, &ScaConfig::default()).is_err());
        assert!("diagonal".parse::<SweepAxis>().is_err());
        assert_eq!(
            "total_power".parse::<SweepAxis>().unwrap(),
            SweepAxis::TotalPower
        );
    }

    #[test]
    fn invalid_spec_names_field() {
        let s = ScenarioSpec {
            path_count: 0,
            ..ScenarioSpec::default()
        };
        match s.validate() {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "path_count"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
