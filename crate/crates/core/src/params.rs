//! Physical parameter bundle.

use crate::error::{CrossingError, Result};

/// Physical constants for one experiment. The diffusion coefficient and
/// measurement strength are derived, never set independently:
/// `D = 2 m gamma kT` and `a = D / hbar^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub mass: f64,
    pub hbar: f64,
    /// Dissipation rate of the thermal environment.
    pub gamma: f64,
    /// Environment temperature in energy units.
    pub k_t: f64,
    /// Detector transition rate.
    pub gamma_d: f64,
}

impl PhysParams {
    pub fn new(mass: f64, hbar: f64, gamma: f64, k_t: f64, gamma_d: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CrossingError::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("gamma", gamma), ("kT", k_t), ("gamma_d", gamma_d)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CrossingError::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(Self { mass, hbar, gamma, k_t, gamma_d })
    }

    /// Natural units `hbar = m = 1` with the given environment parameters.
    pub fn natural(gamma: f64, k_t: f64, gamma_d: f64) -> Result<Self> {
        Self::new(1.0, 1.0, gamma, k_t, gamma_d)
    }

    /// Momentum diffusion coefficient `D = 2 m gamma kT`.
    pub fn diffusion(&self) -> f64 {
        2.0 * self.mass * self.gamma * self.k_t
    }

    /// Continuous-measurement strength `a = D / hbar^2`.
    pub fn measurement_strength(&self) -> f64 {
        self.diffusion() / (self.hbar * self.hbar)
    }
}
