//! Small numerical helpers: composite Simpson weights and least-squares
//! fitting in log-log coordinates.

use crate::error::{CrossingError, Result};

/// Composite Simpson weights for `n` equally spaced nodes (`n` odd, >= 3),
/// already multiplied by `h / 3`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "Simpson rule needs an odd node count >= 3");
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    w[n - 1] = 1.0;
    for (i, wi) in w.iter_mut().enumerate().take(n - 1).skip(1) {
        *wi = if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    for wi in w.iter_mut() {
        *wi *= h / 3.0;
    }
    w
}

/// Slope and intercept of the least-squares line through `(x_i, y_i)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(CrossingError::DegenerateFit(format!(
            "need at least two matched points, got {} / {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    if sxx == 0.0 {
        return Err(CrossingError::DegenerateFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fit `y = c * x^q` by least squares on `(ln x, ln y)`; returns the
/// exponent `q`. All inputs must be strictly positive.
pub fn power_law_exponent(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(CrossingError::DegenerateFit(
            "power-law fit requires strictly positive finite data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).map(|(slope, _)| slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let n = 33;
        let h = 1.0 / (n - 1) as f64;
        let w = simpson_weights(n, h);
        let integral: f64 = (0..n)
            .map(|i| {
                let x = i as f64 * h;
                w[i] * (x * x * x - 2.0 * x + 1.0)
            })
            .sum();
        assert_abs_diff_eq!(integral, 0.25 - 1.0 + 1.0, epsilon = 1e-14);
    }

    #[test]
    fn power_law_recovers_exponent() {
        let x: Vec<f64> = (1..10).map(|i| 10f64.powi(-i)).collect();
        let y: Vec<f64> = x.iter().map(|&xi| 3.7 * xi.powf(0.5)).collect();
        let q = power_law_exponent(&x, &y).unwrap();
        assert_abs_diff_eq!(q, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn power_law_rejects_nonpositive_data() {
        assert!(power_law_exponent(&[1.0, 2.0], &[1.0, 0.0]).is_err());
    }
}
