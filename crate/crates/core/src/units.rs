//! dB / dBm conversions. Everything inside the crate works in linear units and watts.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(-40.0) - 1e-7).abs() < 1e-20);
        assert!((dbm_to_watts(10.0) - 0.01).abs() < 1e-15);
        assert!((watts_to_dbm(1e-7) + 40.0).abs() < 1e-12);
        assert!((db_to_linear(3.0) - 1.9952623149688795).abs() < 1e-15);
    }
}
