//! Number formatting shared by the CSV writers.

/// Formats `x` with 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.0, 1.0, 1.5, std::f64::consts::PI, 1e-300, -2.5e17, 0.1 + 0.2] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }
}
