//! Wigner transform of pure states and the environment-induced (quantum
//! Brownian motion) no-crossing probability built from it.
//!
//! `W(p, x) = 1/(2 pi hbar) int dxi exp(-i p xi / hbar)
//!            psi(x + xi/2) psi*(x - xi/2)`
//!
//! The offset is discretized as `xi = 2 j dx`, so both `x + xi/2` and
//! `x - xi/2` land on grid points; the conjugate momentum grid then spans
//! half the usual spectral band, `[-pi hbar / (2 dx), pi hbar / (2 dx))`,
//! with `n` points. Column sums of the DFT make the position marginal
//! `int W dp = |psi(x)|^2` exact by construction.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{CrossingError, Result};
use crate::fokker_planck::{classical_no_cross_probability, FpKernelParams, FpQuadrature};
use crate::fourier::fft_in_place;
use crate::grid::Grid1D;
use crate::phase_space::PhaseSpaceDistribution;
use crate::wavefunction::WaveFunction;

/// A phase-space quasi-density produced by [`wigner_transform`], together
/// with the state it came from.
#[derive(Debug, Clone)]
pub struct WignerFunction {
    pub dist: PhaseSpaceDistribution,
    pub source: WaveFunction,
}

const NORM_TOLERANCE: f64 = 1e-8;
const IMAG_RESIDUE_TOLERANCE: f64 = 1e-12;

/// Wigner transform of a normalized pure state.
pub fn wigner_transform(psi: &WaveFunction) -> Result<WignerFunction> {
    if !psi.is_normalized(NORM_TOLERANCE) {
        return Err(CrossingError::Domain(format!(
            "state must be normalized (norm^2 = {})",
            psi.norm_squared()
        )));
    }
    let n = psi.grid.len();
    let dx = psi.grid.dx();
    let p_half_band = std::f64::consts::PI * psi.hbar / (2.0 * dx);
    let p_grid = Grid1D::new(-p_half_band, p_half_band, n)?;

    let prefactor = dx / (std::f64::consts::PI * psi.hbar);
    let mut values = Array2::zeros((n, n));
    let mut max_imag: f64 = 0.0;
    let mut row: Vec<C64> = vec![C64::new(0.0, 0.0); n];
    for ix in 0..n {
        // f_j = psi(x + j dx) psi*(x - j dx) with periodic indexing;
        // f_{-j} = conj(f_j), so the DFT over j is real. Offsets are
        // windowed to |j| < n/4: beyond that the periodic offsets j and
        // j - n/2 address the same point pairs, which would plant a
        // spurious alternating-sign copy of the state half a box away.
        for (j, slot) in row.iter_mut().enumerate() {
            let signed_j = if j < n / 2 { j as isize } else { j as isize - n as isize };
            if signed_j.unsigned_abs() >= n / 4 {
                *slot = C64::new(0.0, 0.0);
                continue;
            }
            let plus = (ix + j) % n;
            let minus = (ix + n - j) % n;
            *slot = psi.values[plus] * psi.values[minus].conj();
        }
        fft_in_place(&mut row);
        // DFT bin k holds momentum p_k = pi hbar k / (n dx), k wrapped to
        // [-n/2, n/2); map bins onto the monotone p grid.
        for (k, val) in row.iter().enumerate() {
            let signed = if k < n / 2 { k as isize } else { k as isize - n as isize };
            let ip = (signed + (n / 2) as isize) as usize;
            values[[ip, ix]] = prefactor * val.re;
            max_imag = max_imag.max((prefactor * val.im).abs());
        }
    }
    if max_imag > IMAG_RESIDUE_TOLERANCE {
        return Err(CrossingError::Numerical(format!(
            "Wigner transform has imaginary residue {max_imag:.3e}"
        )));
    }
    let dist = PhaseSpaceDistribution::new(p_grid, psi.grid, values)?;
    Ok(WignerFunction { dist, source: psi.clone() })
}

/// Outcome of the QBM no-crossing computation.
#[derive(Debug, Clone, Copy)]
pub struct QbmNoCross {
    /// Final probability, clamped to `[0, 1]`.
    pub p_nocross: f64,
    /// Raw quadrature value before clamping.
    pub pre_clamp: f64,
    /// Wigner mass removed from `x <= 0` before propagation.
    pub clipped_mass: f64,
}

const SUPPORT_TOLERANCE: f64 = 1e-6;

/// Probability of never crossing `x = 0` for a particle coupled to a thermal
/// environment: the classical restricted Fokker-Planck quadrature with the
/// initial Wigner function in place of the classical distribution.
pub fn qbm_no_cross_probability(
    psi: &WaveFunction,
    params: &FpKernelParams,
    quad: &FpQuadrature,
) -> Result<QbmNoCross> {
    let left_mass = psi.mass_left_of_origin();
    if left_mass > SUPPORT_TOLERANCE {
        return Err(CrossingError::Domain(format!(
            "initial state has probability mass {left_mass:.3e} at x <= 0"
        )));
    }
    let mut wigner = wigner_transform(psi)?;
    // clip the x <= 0 sliver so the classical quadrature sees clean support
    let mut clipped_mass = 0.0;
    let cell = wigner.dist.p_grid.dx() * wigner.dist.x_grid.dx();
    for ix in 0..wigner.dist.x_grid.len() {
        if wigner.dist.x_grid.x(ix) <= 0.0 {
            for ip in 0..wigner.dist.p_grid.len() {
                clipped_mass += wigner.dist.values[[ip, ix]] * cell;
                wigner.dist.values[[ip, ix]] = 0.0;
            }
        }
    }
    let pre_clamp = classical_no_cross_probability(&wigner.dist, params, quad)?;
    Ok(QbmNoCross { p_nocross: pre_clamp.clamp(0.0, 1.0), pre_clamp, clipped_mass })
}
