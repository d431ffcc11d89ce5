//! Wave functions on a grid and Gaussian packet construction.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{CrossingError, Result};
use crate::fourier::momentum_representation;
use crate::grid::Grid1D;
use crate::params::PhysParams;

/// Complex amplitude sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: Grid1D,
    pub values: Array1<C64>,
    pub hbar: f64,
    pub mass: f64,
}

/// Minimum-uncertainty Gaussian packet:
/// `psi(x) = (2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / (4 sigma^2) + i p0 x / hbar)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianPacketSpec {
    pub center: f64,
    pub momentum: f64,
    pub sigma: f64,
}

impl GaussianPacketSpec {
    pub fn new(center: f64, momentum: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(CrossingError::Config(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self { center, momentum, sigma })
    }
}

/// Amplitude threshold at the grid edges above which a packet is considered
/// to leak out of the box.
const EDGE_TOLERANCE: f64 = 1e-12;

/// Build a normalized Gaussian packet on the grid.
///
/// Errors if the packet has visible support at the grid edges; spectral
/// propagation would wrap it around.
pub fn make_gaussian(
    spec: &GaussianPacketSpec,
    grid: &Grid1D,
    params: &PhysParams,
) -> Result<WaveFunction> {
    let norm = (2.0 * std::f64::consts::PI * spec.sigma * spec.sigma).powf(-0.25);
    let values: Array1<C64> = grid
        .points()
        .map(|x| {
            let envelope = norm * (-(x - spec.center).powi(2) / (4.0 * spec.sigma * spec.sigma)).exp();
            C64::from_polar(envelope, spec.momentum * x / params.hbar)
        })
        .collect();
    let edge = values[0].norm().max(values[grid.len() - 1].norm());
    if edge > EDGE_TOLERANCE {
        return Err(CrossingError::Config(format!(
            "packet leaks past grid edge (|psi| = {edge:.3e} > {EDGE_TOLERANCE:.0e})"
        )));
    }
    let mut wf = WaveFunction { grid: *grid, values, hbar: params.hbar, mass: params.mass };
    wf.renormalize();
    Ok(wf)
}

/// `sum |psi_i|^2 dx`.
pub fn norm_squared(psi: &WaveFunction) -> f64 {
    psi.norm_squared()
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Array1<C64>, hbar: f64, mass: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CrossingError::Config(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, hbar, mass })
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_squared() - 1.0).abs() <= tol
    }

    /// Rescale to unit norm; a zero state is left untouched.
    pub fn renormalize(&mut self) {
        let n2 = self.norm_squared();
        if n2 > 0.0 {
            let s = 1.0 / n2.sqrt();
            self.values.mapv_inplace(|v| v * s);
        }
    }

    /// Inner product `<self|other> = sum conj(self_i) other_i dx`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.dx()
    }

    pub fn expectation_x(&self) -> f64 {
        let n2 = self.norm_squared();
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.x(i) * v.norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
            / n2
    }

    pub fn variance_x(&self) -> f64 {
        let mean = self.expectation_x();
        let n2 = self.norm_squared();
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.grid.x(i) - mean).powi(2) * v.norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
            / n2
    }

    /// Momentum moments from the spectral representation.
    pub fn momentum_moments(&self) -> (f64, f64) {
        let tilde = momentum_representation(&self.grid, self.hbar, &self.values);
        let dp = self.grid.dp(self.hbar);
        let n2: f64 = tilde.iter().map(|v| v.norm_sqr()).sum::<f64>() * dp;
        let mean: f64 = tilde
            .iter()
            .enumerate()
            .map(|(k, v)| self.grid.momentum(k, self.hbar) * v.norm_sqr())
            .sum::<f64>()
            * dp
            / n2;
        let var: f64 = tilde
            .iter()
            .enumerate()
            .map(|(k, v)| (self.grid.momentum(k, self.hbar) - mean).powi(2) * v.norm_sqr())
            .sum::<f64>()
            * dp
            / n2;
        (mean, var)
    }

    /// Norm squared of the momentum representation (Parseval check).
    pub fn momentum_norm_squared(&self) -> f64 {
        let tilde = momentum_representation(&self.grid, self.hbar, &self.values);
        tilde.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dp(self.hbar)
    }

    /// Probability mass on grid points with `x <= 0` (the `x = 0` point
    /// itself belongs to the positive side and is excluded).
    pub fn mass_left_of_origin(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.x(*i) < 0.0)
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
    }

    /// Antisymmetrized copy: `(psi(x) - psi(-x))` through the grid mirror,
    /// renormalized. Exactly odd on the grid, so it vanishes at `x = 0` and
    /// at the periodic edge point.
    pub fn antisymmetrized(&self) -> Result<Self> {
        self.grid.zero_index()?;
        let n = self.grid.len();
        let mut values = Array1::zeros(n);
        for i in 0..n {
            values[i] = self.values[i] - self.values[self.grid.mirror_index(i)];
        }
        let mut wf = Self { grid: self.grid, values, hbar: self.hbar, mass: self.mass };
        if wf.norm_squared() == 0.0 {
            return Err(CrossingError::Config(
                "state is symmetric; antisymmetrization vanishes".into(),
            ));
        }
        wf.renormalize();
        Ok(wf)
    }
}
