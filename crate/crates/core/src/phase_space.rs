//! Real-valued densities on a uniform (p, x) grid.

use ndarray::Array2;

use crate::error::{CrossingError, Result};
use crate::grid::Grid1D;

/// Density on the tensor grid `p_grid x x_grid`; `values[[i_p, i_x]]`.
///
/// Classical distributions are non-negative; Wigner functions reuse this
/// container but may carry negative values.
#[derive(Debug, Clone)]
pub struct PhaseSpaceDistribution {
    pub p_grid: Grid1D,
    pub x_grid: Grid1D,
    pub values: Array2<f64>,
}

impl PhaseSpaceDistribution {
    pub fn new(p_grid: Grid1D, x_grid: Grid1D, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (p_grid.len(), x_grid.len()) {
            return Err(CrossingError::Config(format!(
                "value shape {:?} does not match grids ({}, {})",
                values.dim(),
                p_grid.len(),
                x_grid.len()
            )));
        }
        Ok(Self { p_grid, x_grid, values })
    }

    /// Gaussian density truncated to `x > 0` and normalized on the grid.
    /// Grid nodes with `x <= 0` carry exactly zero weight.
    pub fn gaussian_truncated(
        p_grid: Grid1D,
        x_grid: Grid1D,
        p_center: f64,
        x_center: f64,
        sigma_p: f64,
        sigma_x: f64,
    ) -> Result<Self> {
        if !(sigma_p > 0.0 && sigma_x > 0.0) {
            return Err(CrossingError::Config("widths must be positive".into()));
        }
        let mut values = Array2::zeros((p_grid.len(), x_grid.len()));
        for ip in 0..p_grid.len() {
            let gp = (-(p_grid.x(ip) - p_center).powi(2) / (2.0 * sigma_p * sigma_p)).exp();
            for ix in 0..x_grid.len() {
                let x = x_grid.x(ix);
                if x <= 0.0 {
                    continue;
                }
                values[[ip, ix]] =
                    gp * (-(x - x_center).powi(2) / (2.0 * sigma_x * sigma_x)).exp();
            }
        }
        let mut dist = Self::new(p_grid, x_grid, values)?;
        let total = dist.integrate();
        if total <= 0.0 {
            return Err(CrossingError::Config(
                "truncated Gaussian has no weight on the grid".into(),
            ));
        }
        dist.values.mapv_inplace(|v| v / total);
        Ok(dist)
    }

    /// `sum w dp dx` over the whole grid.
    pub fn integrate(&self) -> f64 {
        self.values.sum() * self.p_grid.dx() * self.x_grid.dx()
    }

    /// Signed mass on nodes with `x <= 0`.
    pub fn mass_left_of_origin(&self) -> f64 {
        let mut total = 0.0;
        for ix in 0..self.x_grid.len() {
            if self.x_grid.x(ix) <= 0.0 {
                total += self.values.column(ix).sum();
            }
        }
        total * self.p_grid.dx() * self.x_grid.dx()
    }

    /// Position marginal `int w dp`, one value per x node.
    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.x_grid.len())
            .map(|ix| self.values.column(ix).sum() * self.p_grid.dx())
            .collect()
    }

    /// Momentum marginal `int w dx`, one value per p node.
    pub fn marginal_p(&self) -> Vec<f64> {
        (0..self.p_grid.len())
            .map(|ip| self.values.row(ip).sum() * self.x_grid.dx())
            .collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.integrate() - 1.0).abs() <= tol
    }
}
