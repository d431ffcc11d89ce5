//! Free, restricted (never cross `x = 0`) and crossing (always cross)
//! propagation of a wave function.
//!
//! The restricted propagator is built by the method of images. Splitting the
//! state into its `x >= 0` and `x < 0` parts, the image construction is
//! equivalent to free-evolving the odd extension of each part and keeping the
//! evolved amplitude on the original side:
//!
//! `Psi_r = theta(x) U(tau)[psi_+ - R psi_+] + theta(-x) U(tau)[psi_- - R psi_-]`
//!
//! where `R` mirrors the grid about `x = 0`. The crossing propagator uses the
//! free kernel between opposite sides and the reflected kernel on the same
//! side, which in the same notation reads
//!
//! `Psi_c = theta(x) (U psi_- + R U psi_+) + theta(-x) (U psi_+ + R U psi_-)`.
//!
//! Both agree with `Psi_free = Psi_r + Psi_c` to round-off. The grid point at
//! `x = 0` is assigned to the positive side throughout.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fourier::apply_momentum_multiplier;
use crate::wavefunction::WaveFunction;

/// Which family of paths the propagator sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMode {
    Unrestricted,
    /// Paths that never cross `x = 0`.
    Restricted,
    /// Paths that cross `x = 0` at least once.
    Crossing,
}

/// Exact free evolution through momentum space; unitary.
pub fn free_propagate(psi: &WaveFunction, tau: f64) -> WaveFunction {
    let mut out = psi.clone();
    let grid = out.grid;
    let scale = tau / (2.0 * psi.mass * psi.hbar);
    apply_momentum_multiplier(&grid, out.hbar, &mut out.values, |p| {
        C64::from_polar(1.0, -p * p * scale)
    });
    out
}

fn mirrored(psi: &WaveFunction) -> Array1<C64> {
    let n = psi.grid.len();
    let mut out = Array1::zeros(n);
    for i in 0..n {
        out[i] = psi.values[psi.grid.mirror_index(i)];
    }
    out
}

/// Zero out one half-line in place. `keep_positive` keeps `x >= 0`
/// (including the grid point at the origin), otherwise keeps `x < 0`.
fn restrict(psi: &mut WaveFunction, zero_index: usize, keep_positive: bool) {
    for (i, v) in psi.values.iter_mut().enumerate() {
        let on_positive_side = i >= zero_index;
        if on_positive_side != keep_positive {
            *v = C64::new(0.0, 0.0);
        }
    }
}

fn split_sides(psi: &WaveFunction, zero_index: usize) -> (WaveFunction, WaveFunction) {
    let mut plus = psi.clone();
    let mut minus = psi.clone();
    restrict(&mut plus, zero_index, true);
    restrict(&mut minus, zero_index, false);
    (plus, minus)
}

/// Amplitude for never crossing `x = 0` during `[0, tau]` (method of images).
/// Not norm-preserving.
pub fn restricted_propagate(psi: &WaveFunction, tau: f64) -> Result<WaveFunction> {
    let zero_index = psi.grid.zero_index()?;
    let (plus, minus) = split_sides(psi, zero_index);

    let mut out = psi.clone();
    out.values.fill(C64::new(0.0, 0.0));
    for (part, keep_positive) in [(plus, true), (minus, false)] {
        let mut odd = part.clone();
        let mirror = mirrored(&part);
        odd.values.zip_mut_with(&mirror, |v, m| *v -= m);
        let mut evolved = free_propagate(&odd, tau);
        restrict(&mut evolved, zero_index, keep_positive);
        out.values.zip_mut_with(&evolved.values, |v, e| *v += e);
    }
    Ok(out)
}

/// Amplitude for crossing `x = 0` at least once during `[0, tau]`:
/// free kernel between opposite sides, reflected kernel on the same side.
/// Not norm-preserving.
pub fn crossing_propagate(psi: &WaveFunction, tau: f64) -> Result<WaveFunction> {
    let zero_index = psi.grid.zero_index()?;
    let (plus, minus) = split_sides(psi, zero_index);

    let evolved_plus = free_propagate(&plus, tau);
    let evolved_minus = free_propagate(&minus, tau);
    let reflected_plus = mirrored(&evolved_plus);
    let reflected_minus = mirrored(&evolved_minus);

    let mut out = psi.clone();
    let n = out.grid.len();
    for i in 0..n {
        out.values[i] = if i >= zero_index {
            evolved_minus.values[i] + reflected_plus[i]
        } else {
            evolved_plus.values[i] + reflected_minus[i]
        };
    }
    Ok(out)
}

/// Dispatch over [`PropagationMode`].
pub fn propagate(psi: &WaveFunction, tau: f64, mode: PropagationMode) -> Result<WaveFunction> {
    match mode {
        PropagationMode::Unrestricted => Ok(free_propagate(psi, tau)),
        PropagationMode::Restricted => restricted_propagate(psi, tau),
        PropagationMode::Crossing => crossing_propagate(psi, tau),
    }
}
