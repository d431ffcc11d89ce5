//! Uniform 1-D grids.

use crate::error::{CrossingError, Result};

/// A uniform grid of `n_points` samples on `[x_min, x_max)`.
///
/// The right endpoint is excluded; spectral operations treat the domain as
/// periodic with period `x_max - x_min`. `n_points` must be a power of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(CrossingError::Config(format!(
                "grid bounds must be finite with x_max > x_min, got [{x_min}, {x_max})"
            )));
        }
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(CrossingError::Config(format!(
                "n_points must be a power of two >= 2, got {n_points}"
            )));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid on `[-half_width, half_width)`; places `x = 0` exactly on the
    /// point with index `n_points / 2`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.x(i))
    }

    /// Index of the grid point at `x = 0`, required by the image
    /// constructions. Errors if no point lies on the origin.
    pub fn zero_index(&self) -> Result<usize> {
        let dx = self.dx();
        let guess = (-self.x_min / dx).round();
        if guess < 0.0 || guess >= self.n_points as f64 {
            return Err(CrossingError::Config(
                "grid does not contain x = 0".into(),
            ));
        }
        let i = guess as usize;
        if self.x(i).abs() > 1e-12 * (self.x_max - self.x_min) {
            return Err(CrossingError::Config(format!(
                "x = 0 does not coincide with a grid point (nearest is {})",
                self.x(i)
            )));
        }
        Ok(i)
    }

    /// Mirror of index `i` under `x -> -x` on the periodic grid.
    ///
    /// Only meaningful when `x = 0` lies on a grid point; index 0 (the left
    /// edge) maps to itself through the periodic identification.
    pub fn mirror_index(&self, i: usize) -> usize {
        debug_assert!(i < self.n_points);
        if i == 0 {
            0
        } else {
            self.n_points - i
        }
    }

    /// Momentum sample conjugate to this grid in FFT bin order:
    /// `p_k = 2 pi hbar k / (n dx)` with `k` wrapped to `[-n/2, n/2)`.
    pub fn momentum(&self, k: usize, hbar: f64) -> f64 {
        debug_assert!(k < self.n_points);
        let n = self.n_points;
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * std::f64::consts::PI * hbar * signed / (n as f64 * self.dx())
    }

    /// Spacing of the momentum grid.
    pub fn dp(&self, hbar: f64) -> f64 {
        2.0 * std::f64::consts::PI * hbar / (self.n_points as f64 * self.dx())
    }
}
