//! dB/dBm conversions.

/// `10^((x-30)/10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// `10^(x/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert!((dbm_to_watts(-90.0) - 1e-12).abs() < 1e-27);
        assert_eq!(db_to_linear(10.0), 10.0);
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((watts_to_dbm(1e-3)).abs() < 1e-12);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn round_trips() {
        for x in [-120.0, -90.0, -3.5, 0.0, 17.25, 40.0] {
            assert!((watts_to_dbm(dbm_to_watts(x)) - x).abs() < 1e-9);
            assert!((linear_to_db(db_to_linear(x)) - x).abs() < 1e-9);
        }
    }
}
