//! Small numeric helpers for order-of-accuracy fits.

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law_exponent() {
        let xs: Vec<f64> = (1..20).map(|n| (n as f64).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.5 * x).collect();
        assert!((least_squares_slope(&xs, &ys) + 2.5).abs() < 1e-12);
    }
}
