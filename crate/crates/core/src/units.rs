//! Decibel conversions. Everything past the configuration boundary is linear.

/// dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert!((dbm_to_watts(-120.0) - 1e-15).abs() < 1e-27);
        assert!((db_to_linear(-60.0) - 1e-6).abs() < 1e-18);
        assert!((watts_to_dbm(1e-3)).abs() < 1e-12);
    }

    #[test]
    fn inverse_pair() {
        for db in [-150.0, -3.0, 0.0, 17.5, 90.0] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-10);
        }
    }
}
