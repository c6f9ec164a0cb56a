//! JSON run configuration.
//!
//! Every field is optional; omitted fields take the reference setup
//! (16 BS antennas, users at 60 m and 100 m, λ = 0.1 m, 10 paths, path-loss
//! exponent 2.8, σ² = −90 dBm, γ₀ = 10 dB, A = 3λ, P = 30 dBm). Unknown keys
//! are rejected. Powers are in dBm, thresholds in dB, distances in meters and
//! region sizes in wavelengths.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::sca::ScaConfig;
use crate::scenario::{ScenarioSpec, Sweep, SweepAxis};
use crate::units::{db_to_linear, dbm_to_watts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub antennas: usize,
    pub distances_m: [f64; 2],
    pub wavelength_m: f64,
    pub paths: usize,
    pub path_loss_exponent: f64,
    pub noise_power_dbm: f64,
    pub sinr_threshold_db: f64,
    pub region_size_wavelengths: f64,
    pub total_power_dbm: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            antennas: 16,
            distances_m: [60.0, 100.0],
            wavelength_m: 0.1,
            paths: 10,
            path_loss_exponent: 2.8,
            noise_power_dbm: -90.0,
            sinr_threshold_db: 10.0,
            region_size_wavelengths: 3.0,
            total_power_dbm: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub seed: u64,
    pub trials: usize,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    /// Trial index dumped by `single`.
    pub trial: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 200,
            threads: 0,
            trial: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub region_sizes_wavelengths: Vec<f64>,
    pub total_powers_dbm: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            region_sizes_wavelengths: vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0],
            total_powers_dbm: vec![20.0, 25.0, 30.0, 35.0, 40.0],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// CSV destination; standard output when absent.
    pub path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub sca: ScaConfig,
    pub mc: McConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

fn check_positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            field,
            format!("must be positive, got {v}"),
        ))
    }
}

fn check_finite(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            field,
            format!("must be finite, got {v}"),
        ))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.system;
        if s.antennas == 0 {
            return Err(ConfigError::invalid(
                "system.antennas",
                "must be at least 1",
            ));
        }
        if s.paths == 0 {
            return Err(ConfigError::invalid("system.paths", "must be at least 1"));
        }
        check_positive("system.distances_m[0]", s.distances_m[0])?;
        check_positive("system.distances_m[1]", s.distances_m[1])?;
        check_positive("system.wavelength_m", s.wavelength_m)?;
        check_positive("system.path_loss_exponent", s.path_loss_exponent)?;
        check_finite("system.noise_power_dbm", s.noise_power_dbm)?;
        check_finite("system.sinr_threshold_db", s.sinr_threshold_db)?;
        check_finite("system.total_power_dbm", s.total_power_dbm)?;
        if !(s.region_size_wavelengths.is_finite() && s.region_size_wavelengths >= 0.0) {
            return Err(ConfigError::invalid(
                "system.region_size_wavelengths",
                format!("must be non-negative, got {}", s.region_size_wavelengths),
            ));
        }
        self.sca
            .validate()
            .map_err(|e| ConfigError::invalid("sca", e.to_string()))?;
        if self.mc.trials == 0 {
            return Err(ConfigError::invalid("mc.trials", "must be at least 1"));
        }
        if self.sweep.region_sizes_wavelengths.is_empty() {
            return Err(ConfigError::invalid(
                "sweep.region_sizes_wavelengths",
                "must not be empty",
            ));
        }
        if self
            .sweep
            .region_sizes_wavelengths
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(ConfigError::invalid(
                "sweep.region_sizes_wavelengths",
                "values must be non-negative",
            ));
        }
        if self.sweep.total_powers_dbm.is_empty() {
            return Err(ConfigError::invalid(
                "sweep.total_powers_dbm",
                "must not be empty",
            ));
        }
        if self.sweep.total_powers_dbm.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::invalid(
                "sweep.total_powers_dbm",
                "values must be finite",
            ));
        }
        self.scenario_spec().validate()
    }

    /// Physical parameters in SI units.
    pub fn scenario_spec(&self) -> ScenarioSpec {
        let s = &self.system;
        ScenarioSpec {
            n_antennas: s.antennas,
            distances: s.distances_m,
            carrier_wavelength: s.wavelength_m,
            path_count: s.paths,
            path_loss_exponent: s.path_loss_exponent,
            noise_power: dbm_to_watts(s.noise_power_dbm),
            sinr_threshold: db_to_linear(s.sinr_threshold_db),
            region_half_side: s.region_size_wavelengths * s.wavelength_m / 2.0,
            total_power: dbm_to_watts(s.total_power_dbm),
            master_seed: self.mc.seed,
        }
    }

    pub fn region_sweep(&self) -> Sweep {
        Sweep {
            axis: SweepAxis::RegionSize,
            values: self.sweep.region_sizes_wavelengths.clone(),
        }
    }

    pub fn power_sweep(&self) -> Sweep {
        Sweep {
            axis: SweepAxis::TotalPower,
            values: self.sweep.total_powers_dbm.clone(),
        }
    }

    /// Canonical pretty-printed JSON with every field present.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_reference_setup() {
        let cfg = parse_config("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let spec = cfg.scenario_spec();
        assert_eq!(spec.n_antennas, 16);
        assert_eq!(spec.distances, [60.0, 100.0]);
        assert_eq!(spec.carrier_wavelength, 0.1);
        assert_eq!(spec.path_count, 10);
        assert_eq!(spec.path_loss_exponent, 2.8);
        assert!((spec.noise_power - 1e-12).abs() < 1e-27);
        assert_eq!(spec.sinr_threshold, 10.0);
        assert!((spec.region_half_side - 0.15).abs() < 1e-15);
        assert_eq!(spec.total_power, 1.0);
    }

    #[test]
    fn partial_override() {
        let cfg = parse_config(r#"{"mc":{"seed":7}}"#).unwrap();
        assert_eq!(cfg.mc.seed, 7);
        assert_eq!(cfg.mc.trials, 200);
        assert_eq!(cfg.system, SystemConfig::default());
    }

    #[test]
    fn zero_paths_names_field() {
        match parse_config(r#"{"system":{"paths":0}}"#) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "system.paths"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(
            parse_config(r#"{"systen":{}}"#),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            parse_config(r#"{"system":{"pahts":3}}"#),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(parse_config("{"), Err(ConfigError::Parse(_))));
        assert!(matches!(
            parse_config(r#"{"system":{"wavelength_m":-1}}"#),
            Err(ConfigError::Invalid {
                field: "system.wavelength_m",
                ..
            })
        ));
        assert!(matches!(
            parse_config(r#"{"sca":{"damping":1.5}}"#),
            Err(ConfigError::Invalid { field: "sca", .. })
        ));
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let cfg = parse_config(r#"{"system":{"total_power_dbm":25.5},"mc":{"trials":3}}"#).unwrap();
        let once = cfg.to_json();
        let again = parse_config(&once).unwrap().to_json();
        assert_eq!(once, again);
    }
}
