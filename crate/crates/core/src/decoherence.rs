//! The 2x2 decoherence functional for crossing vs. not-crossing histories.
//!
//! With `Psi_r` and `Psi_c` the restricted and crossing amplitudes, the
//! candidate probabilities are `p_nocross = <Psi_r|Psi_r>`,
//! `p_cross = <Psi_c|Psi_c>` and the off-diagonal entry is the overlap
//! `D = <Psi_c|Psi_r>`. Since `Psi_free = Psi_r + Psi_c` and free evolution
//! is unitary, `p_nocross + p_cross + 2 Re D = 1` holds identically.

use crate::error::{CrossingError, Result};
use crate::numeric::power_law_exponent;
use crate::propagation::{crossing_propagate, restricted_propagate};
use crate::wavefunction::WaveFunction;

/// The decoherence-functional entries reduced to real diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct CrossingResult {
    pub p_nocross: f64,
    pub p_cross: f64,
    pub re_d: f64,
    pub abs_d: f64,
    pub tau: f64,
    /// `|D|^2 / (p_cross * p_nocross)`; `None` when the product vanishes.
    pub consistency_ratio: Option<f64>,
}

impl CrossingResult {
    pub fn sum_rule_residual(&self) -> f64 {
        self.p_nocross + self.p_cross + 2.0 * self.re_d - 1.0
    }
}

const NORM_TOLERANCE: f64 = 1e-8;

/// Both probabilities below this scale are treated as an exactly-consistent
/// degenerate pair (0/0 in the ratio).
const DEGENERATE_SCALE: f64 = 1e-20;

/// Assemble the crossing/no-crossing decoherence functional at time `tau`.
pub fn crossing_decoherence(psi: &WaveFunction, tau: f64) -> Result<CrossingResult> {
    if !psi.is_normalized(NORM_TOLERANCE) {
        return Err(CrossingError::Domain(format!(
            "initial state must be normalized (norm^2 = {})",
            psi.norm_squared()
        )));
    }
    if tau < 0.0 {
        return Err(CrossingError::Domain(format!("tau must be >= 0, got {tau}")));
    }
    let restricted = restricted_propagate(psi, tau)?;
    let crossing = crossing_propagate(psi, tau)?;
    let p_nocross = restricted.norm_squared();
    let p_cross = crossing.norm_squared();
    let d = crossing.inner(&restricted);
    let product = p_cross * p_nocross;
    let consistency_ratio =
        if product > DEGENERATE_SCALE { Some(d.norm_sqr() / product) } else { None };
    Ok(CrossingResult {
        p_nocross,
        p_cross,
        re_d: d.re,
        abs_d: d.norm(),
        tau,
        consistency_ratio,
    })
}

/// Result of the small-time power-law fit.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    /// Fitted exponent of `p_cross(tau)`.
    pub p_cross_exponent: f64,
    /// Fitted exponent of `|Re D|(tau)`.
    pub re_d_exponent: f64,
    /// `p_nocross` at the smallest tau in the fit window.
    pub p_nocross_at_min_tau: f64,
    /// Number of tau points that entered the fit.
    pub points_used: usize,
}

/// Fit window: points with `p_cross` outside this band are dropped (below is
/// float-noise floor, above the small-time expansion breaks down).
const FIT_WINDOW: (f64, f64) = (1e-8, 1e-2);
const MIN_FIT_POINTS: usize = 4;

/// Log-log fit of `p_cross(tau)` and `|Re D(tau)|` over a list of small times.
pub fn small_time_scaling(psi: &WaveFunction, tau_list: &[f64]) -> Result<ScalingFit> {
    if tau_list.len() < MIN_FIT_POINTS {
        return Err(CrossingError::DegenerateFit(format!(
            "need at least {MIN_FIT_POINTS} tau values, got {}",
            tau_list.len()
        )));
    }
    let mut taus = Vec::new();
    let mut p_cross = Vec::new();
    let mut re_d = Vec::new();
    let mut p_nocross_min = (f64::INFINITY, f64::NAN);
    for &tau in tau_list {
        let r = crossing_decoherence(psi, tau)?;
        if r.p_cross <= 0.0 {
            return Err(CrossingError::DegenerateFit(format!(
                "p_cross({tau}) = {} is not positive",
                r.p_cross
            )));
        }
        if tau < p_nocross_min.0 {
            p_nocross_min = (tau, r.p_nocross);
        }
        if r.p_cross < FIT_WINDOW.0 || r.p_cross > FIT_WINDOW.1 {
            continue;
        }
        taus.push(tau);
        p_cross.push(r.p_cross);
        re_d.push(r.re_d.abs());
    }
    if taus.len() < MIN_FIT_POINTS {
        return Err(CrossingError::DegenerateFit(format!(
            "only {} points fall in the p_cross fit window [{:.0e}, {:.0e}]",
            taus.len(),
            FIT_WINDOW.0,
            FIT_WINDOW.1
        )));
    }
    Ok(ScalingFit {
        p_cross_exponent: power_law_exponent(&taus, &p_cross)?,
        re_d_exponent: power_law_exponent(&taus, &re_d)?,
        p_nocross_at_min_tau: p_nocross_min.1,
        points_used: taus.len(),
    })
}

/// Verdict of the approximate-decoherence diagnostic `|D|^2 << p p_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoherenceCheck {
    /// Ratio defined; `passes` compares it against the threshold.
    Ratio { value: f64, passes: bool },
    /// `p_cross * p_nocross` vanished while `|D|^2` did not.
    Undefined,
}

pub const DEFAULT_DECOHERENCE_THRESHOLD: f64 = 0.01;

/// Evaluate `|D|^2 / (p p_bar)` against a threshold.
pub fn approximate_decoherence_check(result: &CrossingResult, threshold: f64) -> DecoherenceCheck {
    match result.consistency_ratio {
        Some(value) => DecoherenceCheck::Ratio { value, passes: value < threshold },
        None => {
            let d2 = result.abs_d * result.abs_d;
            if d2 < DEGENERATE_SCALE {
                // exactly-consistent degenerate case: 0/0 counts as ratio 0
                DecoherenceCheck::Ratio { value: 0.0, passes: true }
            } else {
                DecoherenceCheck::Undefined
            }
        }
    }
}
