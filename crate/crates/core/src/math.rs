/// `H(k) = 1 + 1/2 + ... + 1/k`, with `H(0) = 0`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Harmonic number extended to non-negative reals by linear interpolation
/// between consecutive integers. Agrees with [`harmonic`] on integers.
pub fn harmonic_real(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return 0.0;
    }
    let whole = x.floor();
    let base = harmonic(whole as usize);
    base + (x - whole) / (whole + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-12);
        assert!((harmonic_real(4.0) - 25.0 / 12.0).abs() < 1e-12);
        assert!((harmonic_real(1.5) - 1.25).abs() < 1e-12);
        assert_eq!(harmonic_real(0.0), 0.0);
    }
}
