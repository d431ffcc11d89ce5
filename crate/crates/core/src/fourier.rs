//! Thin wrappers around `rustfft` with the normalization conventions used by
//! the rest of the crate.
//!
//! Momentum-space wave functions follow
//! `psi~(p_k) = dx / sqrt(2 pi hbar) * sum_j psi_j exp(-i p_k x_j / hbar)`,
//! which makes the momentum-space norm `sum_k |psi~_k|^2 dp` equal to the
//! position-space norm (Parseval).

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::grid::Grid1D;

/// In-place forward DFT (unnormalized, `rustfft` convention).
pub fn fft_in_place(values: &mut [C64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(values.len()).process(values);
}

/// In-place inverse DFT, scaled by `1/n` so that `ifft(fft(x)) = x`.
pub fn ifft_in_place(values: &mut [C64]) {
    let n = values.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(values);
    let scale = 1.0 / n as f64;
    for v in values.iter_mut() {
        *v *= scale;
    }
}

/// Multiply the state by `f(p)` in momentum space.
pub fn apply_momentum_multiplier<F>(grid: &Grid1D, hbar: f64, values: &mut Array1<C64>, f: F)
where
    F: Fn(f64) -> C64,
{
    let buf = values.as_slice_mut().expect("contiguous wavefunction storage");
    fft_in_place(buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= f(grid.momentum(k, hbar));
    }
    ifft_in_place(buf);
}

/// Momentum-space samples of the state, in FFT bin order, normalized so that
/// `sum_k |out_k|^2 dp = sum_i |psi_i|^2 dx`.
///
/// The returned phases assume the first grid point carries `x = x_min`
/// (the DFT is shifted accordingly).
pub fn momentum_representation(grid: &Grid1D, hbar: f64, values: &Array1<C64>) -> Array1<C64> {
    let n = grid.len();
    let mut buf: Vec<C64> = values.to_vec();
    fft_in_place(&mut buf);
    let scale = grid.dx() / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let mut out = Array1::zeros(n);
    for k in 0..n {
        let p = grid.momentum(k, hbar);
        // shift for the x_min offset: DFT assumes samples start at index 0
        let phase = C64::from_polar(1.0, -p * grid.x_min() / hbar);
        out[k] = buf[k] * phase * scale;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn round_trip_is_identity() {
        let n = 64;
        let mut values: Vec<C64> = (0..n)
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let original = values.clone();
        fft_in_place(&mut values);
        ifft_in_place(&mut values);
        for (a, b) in values.iter().zip(&original) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn parseval_holds_for_momentum_representation() {
        let grid = Grid1D::symmetric(10.0, 256).unwrap();
        let hbar = 1.0;
        let values: Array1<C64> = grid
            .points()
            .map(|x| C64::new((-x * x / 2.0).exp(), 0.0) * C64::from_polar(1.0, 1.3 * x))
            .collect();
        let pos_norm: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx();
        let tilde = momentum_representation(&grid, hbar, &values);
        let mom_norm: f64 = tilde.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dp(hbar);
        assert_abs_diff_eq!(pos_norm, mom_norm, epsilon = 1e-10 * pos_norm);
    }
}
