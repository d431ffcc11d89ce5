//! Irreversible detector model and the continuous-measurement proposal.
//!
//! The detector couples to the particle in `x < 0` and reduces, for the
//! no-detection branch, to pure-state evolution under a complex absorbing
//! potential: `|Psi(t)> = exp(-i H_s t / hbar - gamma_d V t / 2) |Psi_0>`
//! with `V(x) = theta(-x)`. We integrate it by symmetric (Strang) splitting:
//! half a damping step, an exact spectral kinetic step, half a damping step.
//!
//! The continuous-measurement amplitude replaces the sharp step damping with
//! the per-slice factor `exp(-V_eff(x) dt)` where
//! `V_eff(x) = -(1/dt) ln[(1 + erf(sqrt(2 a dt) x)) / 2]`,
//! obtained by restricting the Gaussian position readout to `x > 0` and
//! normalizing so `V_eff(+inf) = 0`. It behaves as `2 a x^2` deep in `x < 0`.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::decoherence::{crossing_decoherence, CrossingResult};
use crate::error::{CrossingError, Result};
use crate::fokker_planck::{FpKernelParams, FpQuadrature};
use crate::params::PhysParams;
use crate::wavefunction::WaveFunction;
use crate::wigner::qbm_no_cross_probability;

/// Absorbing sponge at the grid edges, outside the physics region, to keep
/// spectral wrap-around from re-injecting amplitude.
#[derive(Debug, Clone, Copy)]
pub struct Sponge {
    /// Fraction of the grid length covered at each edge.
    pub width_fraction: f64,
    /// Peak damping rate.
    pub strength: f64,
}

/// Detector model parameters; the evolution time is `dt * n_steps`.
#[derive(Debug, Clone, Copy)]
pub struct DetectorParams {
    /// Detection rate; zero recovers unitary evolution.
    pub gamma_d: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub sponge: Option<Sponge>,
}

impl DetectorParams {
    pub fn new(gamma_d: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !(gamma_d >= 0.0) || !(dt > 0.0) || n_steps == 0 {
            return Err(CrossingError::Config(format!(
                "need gamma_d >= 0, dt > 0, n_steps > 0; got {gamma_d}, {dt}, {n_steps}"
            )));
        }
        Ok(Self { gamma_d, dt, n_steps, sponge: None })
    }

    /// Split a total time into `n_steps` equal slices.
    pub fn for_duration(gamma_d: f64, tau: f64, n_steps: usize) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(CrossingError::Config(format!("tau must be > 0, got {tau}")));
        }
        Self::new(gamma_d, tau / n_steps as f64, n_steps)
    }

    pub fn tau(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// Continuous-measurement parameters: strength `a = D / hbar^2` and slicing.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementParams {
    pub a: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl MeasurementParams {
    pub fn new(a: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !(a > 0.0) || !(dt > 0.0) || n_steps == 0 {
            return Err(CrossingError::Config(format!(
                "need a > 0, dt > 0, n_steps > 0; got {a}, {dt}, {n_steps}"
            )));
        }
        Ok(Self { a, dt, n_steps })
    }

    pub fn for_duration(a: f64, tau: f64, n_steps: usize) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(CrossingError::Config(format!("tau must be > 0, got {tau}")));
        }
        Self::new(a, tau / n_steps as f64, n_steps)
    }

    pub fn tau(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

fn sponge_profile(psi: &WaveFunction, sponge: &Sponge) -> Array1<f64> {
    let n = psi.grid.len();
    let width = ((n as f64 * sponge.width_fraction) as usize).max(1);
    let mut profile = Array1::zeros(n);
    for i in 0..width {
        // cos^2 ramp from the edge inward
        let s = (width - i) as f64 / width as f64;
        let ramp = (0.5 * std::f64::consts::PI * s).sin().powi(2) * sponge.strength;
        profile[i] = ramp;
        profile[n - 1 - i] = ramp;
    }
    profile
}

/// Half-step multiplicative damping factors for one Strang slice.
fn damping_masks(psi: &WaveFunction, det: &DetectorParams) -> Array1<f64> {
    let zero_index = psi.grid.zero_index();
    let n = psi.grid.len();
    let mut mask = Array1::from_elem(n, 1.0);
    if det.gamma_d > 0.0 {
        // V = theta(-x); the x = 0 point belongs to the positive side
        let i0 = zero_index.ok();
        for i in 0..n {
            let negative_side = match i0 {
                Some(i0) => i < i0,
                None => psi.grid.x(i) < 0.0,
            };
            if negative_side {
                mask[i] = (-0.5 * det.gamma_d * det.dt / 2.0).exp();
            }
        }
    }
    if let Some(sponge) = &det.sponge {
        let profile = sponge_profile(psi, sponge);
        for i in 0..n {
            if profile[i] > 0.0 {
                mask[i] *= (-0.5 * profile[i] * det.dt / 2.0).exp();
            }
        }
    }
    mask
}

fn strang_evolve(psi: &WaveFunction, mask_half: &Array1<f64>, dt: f64, n_steps: usize) -> WaveFunction {
    let mut state = psi.clone();
    let grid = state.grid;
    let scale = dt / (2.0 * state.mass * state.hbar);
    let kinetic: Vec<C64> = (0..grid.len())
        .map(|k| {
            let p = grid.momentum(k, state.hbar);
            C64::from_polar(1.0, -p * p * scale)
        })
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    let forward = planner.plan_fft_forward(grid.len());
    let inverse = planner.plan_fft_inverse(grid.len());
    let inv_n = 1.0 / grid.len() as f64;
    for _ in 0..n_steps {
        state.values.zip_mut_with(mask_half, |v, m| *v *= m);
        let buf = state.values.as_slice_mut().expect("contiguous storage");
        forward.process(buf);
        for (v, k) in buf.iter_mut().zip(kinetic.iter()) {
            *v *= k * inv_n;
        }
        inverse.process(buf);
        state.values.zip_mut_with(mask_half, |v, m| *v *= m);
    }
    state
}

/// Evolve under the complex absorbing potential `-i hbar gamma_d theta(-x)/2`.
/// The norm is non-increasing; `gamma_d = 0` recovers free evolution.
pub fn detector_evolve(psi: &WaveFunction, det: &DetectorParams) -> WaveFunction {
    let mask = damping_masks(psi, det);
    strang_evolve(psi, &mask, det.dt, det.n_steps)
}

/// Like [`detector_evolve`] but records the norm after every step.
pub fn detector_evolve_tracked(psi: &WaveFunction, det: &DetectorParams) -> (WaveFunction, Vec<f64>) {
    let mask = damping_masks(psi, det);
    let mut state = psi.clone();
    let mut norms = Vec::with_capacity(det.n_steps);
    for _ in 0..det.n_steps {
        state = strang_evolve(&state, &mask, det.dt, 1);
        norms.push(state.norm_squared().sqrt());
    }
    (state, norms)
}

/// Detection statistics after the interval.
#[derive(Debug, Clone, Copy)]
pub struct DetectionProbabilities {
    /// Probability that the detector never registered.
    pub p_nd: f64,
    /// `1 - p_nd`, exactly.
    pub p_d: f64,
}

/// `p_nd = ||Psi(tau)||^2` for the absorbing evolution; `p_d` complements it.
pub fn detection_probabilities(psi: &WaveFunction, det: &DetectorParams) -> Result<DetectionProbabilities> {
    if !psi.is_normalized(1e-8) {
        return Err(CrossingError::Domain(format!(
            "initial state must be normalized (norm^2 = {})",
            psi.norm_squared()
        )));
    }
    let p_nd = detector_evolve(psi, det).norm_squared();
    Ok(DetectionProbabilities { p_nd, p_d: 1.0 - p_nd })
}

/// Effective potential of one continuous-measurement slice:
/// `V_eff(x) = -(1/dt) ln[(1 + erf(sqrt(2 a dt) x)) / 2]`.
///
/// Limits: `V_eff(+inf) = 0`, `V_eff(0) = ln(2)/dt`, `V_eff ~ 2 a x^2` for
/// `x << 0`. Deep in the suppressed region the erfc underflows and the
/// asymptotic expansion takes over.
pub fn effective_potential(x: f64, a: f64, dt: f64) -> f64 {
    let z = (2.0 * a * dt).sqrt() * x;
    if z > -26.0 {
        -libm::log(0.5 * libm::erfc(-z)) / dt
    } else {
        // -ln(erfc(|z|)/2) = z^2 + ln(2 sqrt(pi) |z|) + 1/(2 z^2) + O(z^-4)
        let s = -z;
        (z * z + (2.0 * std::f64::consts::PI.sqrt() * s).ln() + 0.5 / (z * z)) / dt
    }
}

/// Per-slice suppression factor `exp(-V_eff(x) dt) = (1 + erf(sqrt(2 a dt) x))/2`.
fn measurement_mask(x: f64, a: f64, dt: f64) -> f64 {
    let z = (2.0 * a * dt).sqrt() * x;
    0.5 * libm::erfc(-z)
}

/// Norm of the continuous-measurement amplitude summed over positive
/// trajectories: split-operator evolution with the real damping factor
/// `exp(-V_eff(x) dt)` in place of the detector's sharp step.
pub fn continuous_measurement_probability(
    psi: &WaveFunction,
    meas: &MeasurementParams,
) -> Result<f64> {
    if !psi.is_normalized(1e-8) {
        return Err(CrossingError::Domain(format!(
            "initial state must be normalized (norm^2 = {})",
            psi.norm_squared()
        )));
    }
    let n = psi.grid.len();
    let mut mask_half = Array1::zeros(n);
    for i in 0..n {
        mask_half[i] = measurement_mask(psi.grid.x(i), meas.a, meas.dt).sqrt();
    }
    let out = strang_evolve(psi, &mask_half, meas.dt, meas.n_steps);
    Ok(out.norm_squared())
}

/// One row of the cross-method comparison table.
#[derive(Debug, Clone, Copy)]
pub struct MethodComparison {
    pub tau: f64,
    /// Image-method (decoherent histories, point particle) entries.
    pub image: CrossingResult,
    /// QBM / Wigner no-crossing probability; `None` when the state has
    /// support on both sides of the origin (outside the QBM domain).
    pub p_nocross_qbm: Option<f64>,
    /// Detector no-detection probability at `gamma_d`.
    pub p_nd_detector: f64,
    /// Continuous-measurement probability at strength `a`.
    pub p_plus_cmeas: f64,
    pub gamma_d: f64,
    pub a: f64,
}

/// Numerical resolutions for [`compare_methods`].
#[derive(Debug, Clone, Copy)]
pub struct ComparisonConfig {
    pub detector_steps: usize,
    /// Slice width of the continuous-measurement evolution. The per-slice
    /// position readout has precision `(2 a dt)^(-1/2)`, so slices must stay
    /// coarse enough for the readout to resolve the support of the state;
    /// shrinking dt toward zero blurs every slice into `ln 2 / dt` damping.
    pub cmeas_slice_dt: f64,
    pub fp_quadrature: FpQuadrature,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            detector_steps: 2000,
            cmeas_slice_dt: 0.1,
            fp_quadrature: FpQuadrature::default(),
        }
    }
}

/// Evaluate all candidate crossing-time probabilities on one initial state.
pub fn compare_methods(
    psi: &WaveFunction,
    params: &PhysParams,
    tau: f64,
    config: &ComparisonConfig,
) -> Result<MethodComparison> {
    let image = crossing_decoherence(psi, tau)?;
    let fp = FpKernelParams::new(params.mass, params.diffusion(), tau)?;
    let qbm = match qbm_no_cross_probability(psi, &fp, &config.fp_quadrature) {
        Ok(out) => Some(out.p_nocross),
        Err(CrossingError::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    let det = DetectorParams::for_duration(params.gamma_d, tau, config.detector_steps)?;
    let detection = detection_probabilities(psi, &det)?;
    let cmeas_steps = ((tau / config.cmeas_slice_dt).round() as usize).max(4);
    let meas =
        MeasurementParams::for_duration(params.measurement_strength(), tau, cmeas_steps)?;
    let p_plus = continuous_measurement_probability(psi, &meas)?;
    Ok(MethodComparison {
        tau,
        image,
        p_nocross_qbm: qbm,
        p_nd_detector: detection.p_nd,
        p_plus_cmeas: p_plus,
        gamma_d: params.gamma_d,
        a: params.measurement_strength(),
    })
}
