//! Classical dissipationless Fokker-Planck machinery for the crossing-time
//! problem: the exact free-particle phase-space propagator, the Carslaw
//! multiform Green function and the absorbing-boundary restricted propagator
//! built from it, quadrature crossing probabilities, and an Euler-Maruyama
//! first-passage Monte Carlo engine.
//!
//! The evolution equation is `dw/dt = -(p/m) dw/dx + D d^2w/dp^2`.
//!
//! Coordinates for the image construction:
//! `X = p/m - 3x/(2 tau)`, `Y = sqrt(3) x / (2 tau)` for the final point and
//! `X0 = -p0/(2m) - 3 x0/(2 tau)`, `Y0 = (sqrt(3)/2)(p0/m + x0/tau)` for the
//! initial point, with reduced time `t~ = D tau / m^2`. In these variables
//! the propagator is an isotropic Gaussian and the absorbing set
//! `{x = 0, p > 0}` is the ray `theta = 0`, so an image at `-theta'` on the
//! two-sheeted (period `4 pi`) cover enforces the boundary condition.
//!
//! Initial angles are tracked on the cover: physical initial data sweep
//! `theta' in (2 pi/3, 5 pi/3)`, and initial conditions that cross the
//! boundary under free flight before `tau` lie beyond `pi`. Wrapping them to
//! a principal branch would break positivity of the restricted propagator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{CrossingError, Result};
use crate::numeric::simpson_weights;
use crate::phase_space::PhaseSpaceDistribution;

const PI: f64 = std::f64::consts::PI;

/// Parameters of the two-time Fokker-Planck kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpKernelParams {
    pub mass: f64,
    /// Momentum diffusion coefficient `D = 2 m gamma kT`.
    pub diffusion: f64,
    pub tau: f64,
}

impl FpKernelParams {
    pub fn new(mass: f64, diffusion: f64, tau: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("diffusion", diffusion), ("tau", tau)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CrossingError::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self { mass, diffusion, tau })
    }

    /// Same kernel family at a different elapsed time.
    pub fn at_time(&self, tau: f64) -> Result<Self> {
        Self::new(self.mass, self.diffusion, tau)
    }

    pub fn alpha(&self) -> f64 {
        1.0 / (self.diffusion * self.tau)
    }

    pub fn beta(&self) -> f64 {
        3.0 * self.mass * self.mass / (self.diffusion * self.tau.powi(3))
    }

    /// Coefficient of the `(p - p0)(x - x0 - p0 tau / m)` cross term.
    pub fn cross_coef(&self) -> f64 {
        3.0 * self.mass / (self.diffusion * self.tau * self.tau)
    }

    /// Normalization constant `sqrt(3) m / (2 pi D tau^2)`, i.e.
    /// `(3 m^2 / (4 pi^2 D^2 tau^4))^(1/2)`; makes the kernel integrate to
    /// one in `dp dx`.
    pub fn norm_const(&self) -> f64 {
        3f64.sqrt() * self.mass / (2.0 * PI * self.diffusion * self.tau * self.tau)
    }

    /// Reduced time `t~ = D tau / m^2` of the transformed coordinates.
    pub fn t_tilde(&self) -> f64 {
        self.diffusion * self.tau / (self.mass * self.mass)
    }

    /// Jacobian `|d(X,Y)/d(p,x)| = sqrt(3) / (2 m tau)`.
    fn map_jacobian(&self) -> f64 {
        3f64.sqrt() / (2.0 * self.mass * self.tau)
    }

    fn final_point(&self, p: f64, x: f64) -> (f64, f64) {
        (p / self.mass - 1.5 * x / self.tau, 3f64.sqrt() * x / (2.0 * self.tau))
    }

    fn initial_point(&self, p0: f64, x0: f64) -> (f64, f64) {
        (
            -p0 / (2.0 * self.mass) - 1.5 * x0 / self.tau,
            3f64.sqrt() / 2.0 * (p0 / self.mass + x0 / self.tau),
        )
    }
}

/// Unrestricted Fokker-Planck propagator, a normalized density in `(p, x)`.
pub fn fp_propagator(p: f64, x: f64, p0: f64, x0: f64, params: &FpKernelParams) -> f64 {
    let q = p - p0;
    let u = x - x0 - p0 * params.tau / params.mass;
    let exponent =
        -params.alpha() * q * q - params.beta() * u * u + params.cross_coef() * q * u;
    params.norm_const() * exponent.exp()
}

/// Polar coordinates of the transformed final and initial points.
///
/// `theta` is the principal angle in `[0, pi]` (final points always have
/// `Y >= 0`); `theta_prime` lives on the two-sheeted cover in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy)]
pub struct CarslawCoords {
    pub r: f64,
    pub theta: f64,
    pub r_prime: f64,
    pub theta_prime: f64,
    pub t_tilde: f64,
}

impl CarslawCoords {
    pub fn from_phase_space(p: f64, x: f64, p0: f64, x0: f64, params: &FpKernelParams) -> Self {
        let (big_x, big_y) = params.final_point(p, x);
        let (big_x0, big_y0) = params.initial_point(p0, x0);
        Self::from_transformed(big_x, big_y, big_x0, big_y0, params.t_tilde())
    }

    pub fn from_transformed(x: f64, y: f64, x0: f64, y0: f64, t_tilde: f64) -> Self {
        let mut theta_prime = y0.atan2(x0);
        if theta_prime < 0.0 {
            theta_prime += 2.0 * PI;
        }
        Self::from_transformed_with_angles(x, y, x0.hypot(y0), theta_prime, t_tilde)
    }

    fn from_transformed_with_angles(
        x: f64,
        y: f64,
        r_prime: f64,
        theta_prime: f64,
        t_tilde: f64,
    ) -> Self {
        let mut theta = y.atan2(x);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        Self { r: x.hypot(y), theta, r_prime, theta_prime, t_tilde }
    }
}

/// `int_{-inf}^{a} exp(-lambda^2) d lambda = sqrt(pi) (1 + erf(a)) / 2`,
/// evaluated through `erfc` for stability at large negative `a`.
pub(crate) fn lambda_integral(a: f64) -> f64 {
    0.5 * PI.sqrt() * libm::erfc(-a)
}

/// Reduce an angle difference onto the two-sheeted cover, `[-2 pi, 2 pi)`.
fn reduce_angle(delta: f64) -> f64 {
    let period = 4.0 * PI;
    let mut d = delta % period;
    if d >= 2.0 * PI {
        d -= period;
    } else if d < -2.0 * PI {
        d += period;
    }
    d
}

/// Carslaw multiform Green function on the two-sheeted cover:
/// `g = sqrt(3)/(2 pi^{3/2} t~^2) exp(-(r^2 + r'^2 - 2 r r' cos(dtheta))/t~)
///  * int_{-inf}^{a} e^{-lambda^2} d lambda`,
/// `a = 2 sqrt(r r'/t~) cos(dtheta / 2)`. Periodic with period `4 pi` in the
/// angle difference; single-valued only on the double cover.
pub fn carslaw_green(coords: &CarslawCoords) -> f64 {
    let t = coords.t_tilde;
    let delta = reduce_angle(coords.theta - coords.theta_prime);
    let gauss = (-(coords.r * coords.r + coords.r_prime * coords.r_prime
        - 2.0 * coords.r * coords.r_prime * delta.cos())
        / t)
        .exp();
    let a = 2.0 * (coords.r * coords.r_prime / t).sqrt() * (delta / 2.0).cos();
    3f64.sqrt() / (2.0 * PI.powf(1.5) * t * t) * gauss * lambda_integral(a)
}

fn carslaw_image_pair(coords: &CarslawCoords) -> (f64, f64) {
    let direct = carslaw_green(coords);
    let image = carslaw_green(&CarslawCoords {
        theta_prime: -coords.theta_prime,
        ..*coords
    });
    (direct, image)
}

/// Restricted (absorbing-boundary) Fokker-Planck propagator
/// `K_r(p, x, tau | p0, x0, 0)`, a density in `(p, x)`.
///
/// Vanishes on the absorbing set `{x = 0, p > 0}`; the image term vanishes
/// as `tau -> 0` leaving the delta-concentrating direct term.
pub fn restricted_fp_propagator(
    p: f64,
    x: f64,
    p0: f64,
    x0: f64,
    params: &FpKernelParams,
) -> Result<f64> {
    if x < 0.0 || x0 < 0.0 {
        return Err(CrossingError::Domain(format!(
            "restricted propagator needs x, x0 >= 0, got x = {x}, x0 = {x0}"
        )));
    }
    let coords = CarslawCoords::from_phase_space(p, x, p0, x0, params);
    let (direct, image) = carslaw_image_pair(&coords);
    // The multiform g carries the paper normalization, which corresponds to
    // m^3/D per unit (p, x) measure; rescale to a plain density.
    Ok((direct - image) * params.diffusion / params.mass.powi(3))
}

/// Resolution knobs for the phase-space quadratures.
#[derive(Debug, Clone, Copy)]
pub struct FpQuadrature {
    /// Simpson nodes along X for the survival integral (odd).
    pub inner_nx: usize,
    /// Simpson nodes along Y for the survival integral (odd).
    pub inner_ny: usize,
    /// Integration box half-width in units of `sqrt(t~)`.
    pub padding: f64,
    /// Survival-table nodes along p0 (interpolated path).
    pub table_np: usize,
    /// Survival-table nodes along x0 (interpolated path).
    pub table_nx: usize,
    /// Simpson nodes for the time integral of the boundary flux (odd).
    pub flux_time_nodes: usize,
    /// Simpson nodes for the momentum integral of the boundary flux (odd).
    pub flux_momentum_nodes: usize,
}

impl Default for FpQuadrature {
    fn default() -> Self {
        Self {
            inner_nx: 129,
            inner_ny: 129,
            padding: 10.0,
            table_np: 81,
            table_nx: 81,
            flux_time_nodes: 129,
            flux_momentum_nodes: 257,
        }
    }
}

/// Probability that a particle started at exactly `(p0, x0)` stays in
/// `x > 0` up to `params.tau`: `int dp int_{x>0} dx K_r`.
///
/// Evaluated in the transformed `(X, Y)` plane where the integrand is a
/// Gaussian difference confined near the mapped initial point.
pub fn survival_probability(p0: f64, x0: f64, params: &FpKernelParams, quad: &FpQuadrature) -> f64 {
    let t = params.t_tilde();
    let width = quad.padding * t.sqrt();
    let (x0t, y0t) = params.initial_point(p0, x0);
    let theta_prime = {
        let mut th = y0t.atan2(x0t);
        if th < 0.0 {
            th += 2.0 * PI;
        }
        th
    };
    let r_prime = x0t.hypot(y0t);

    let x_lo = x0t - width;
    let x_hi = x0t + width;
    let y_lo = (y0t - width).max(0.0);
    let y_hi = y0t.max(0.0) + width;

    let wx = simpson_weights(quad.inner_nx, (x_hi - x_lo) / (quad.inner_nx - 1) as f64);
    let wy = simpson_weights(quad.inner_ny, (y_hi - y_lo) / (quad.inner_ny - 1) as f64);

    let mut integral = 0.0;
    for iy in 0..quad.inner_ny {
        let y = y_lo + (y_hi - y_lo) * iy as f64 / (quad.inner_ny - 1) as f64;
        let mut row = 0.0;
        for ix in 0..quad.inner_nx {
            let x = x_lo + (x_hi - x_lo) * ix as f64 / (quad.inner_nx - 1) as f64;
            let coords = CarslawCoords::from_transformed_with_angles(
                x, y, r_prime, theta_prime, t,
            );
            let (direct, image) = carslaw_image_pair(&coords);
            row += wx[ix] * (direct - image);
        }
        integral += wy[iy] * row;
    }
    // d p d x = dX dY / |J|; the g normalization contributes D / m^3.
    integral * params.diffusion / params.mass.powi(3) / params.map_jacobian()
}

const SUPPORT_TOLERANCE: f64 = 1e-8;
const SIGNIFICANCE: f64 = 1e-12;

struct SignificantNodes {
    /// (p0, x0, weight) with weight = w * dp * dx.
    nodes: Vec<(f64, f64, f64)>,
    p_range: (f64, f64),
    x_range: (f64, f64),
}

fn significant_nodes(w0: &PhaseSpaceDistribution) -> Result<SignificantNodes> {
    let max_abs = w0.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max_abs == 0.0 {
        return Err(CrossingError::Domain("distribution is identically zero".into()));
    }
    let cell = w0.p_grid.dx() * w0.x_grid.dx();
    let mut nodes = Vec::new();
    let mut p_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut x_range = (f64::INFINITY, f64::NEG_INFINITY);
    for ip in 0..w0.p_grid.len() {
        for ix in 0..w0.x_grid.len() {
            let x = w0.x_grid.x(ix);
            if x <= 0.0 {
                continue;
            }
            let v = w0.values[[ip, ix]];
            if v.abs() <= SIGNIFICANCE * max_abs {
                continue;
            }
            let p = w0.p_grid.x(ip);
            p_range = (p_range.0.min(p), p_range.1.max(p));
            x_range = (x_range.0.min(x), x_range.1.max(x));
            nodes.push((p, x, v * cell));
        }
    }
    if nodes.is_empty() {
        return Err(CrossingError::Domain(
            "distribution has no significant weight in x > 0".into(),
        ));
    }
    Ok(SignificantNodes { nodes, p_range, x_range })
}

fn survival_weighted_sum(
    nodes: &SignificantNodes,
    params: &FpKernelParams,
    quad: &FpQuadrature,
) -> f64 {
    let table_capacity = quad.table_np * quad.table_nx;
    if nodes.nodes.len() <= table_capacity {
        // cheap enough to evaluate the survival integral at every node
        let survivals: Vec<f64> = nodes
            .nodes
            .par_iter()
            .map(|&(p0, x0, _)| survival_probability(p0, x0, params, quad))
            .collect();
        return nodes
            .nodes
            .iter()
            .zip(survivals.iter())
            .map(|(&(_, _, wgt), &s)| wgt * s)
            .sum();
    }

    // survival table + bilinear interpolation
    let (p_lo, p_hi) = nodes.p_range;
    let (x_lo, x_hi) = nodes.x_range;
    let np = quad.table_np.max(2);
    let nx = quad.table_nx.max(2);
    let dp = (p_hi - p_lo) / (np - 1) as f64;
    let dx = (x_hi - x_lo) / (nx - 1) as f64;
    let table: Vec<f64> = (0..np * nx)
        .into_par_iter()
        .map(|idx| {
            let ip = idx / nx;
            let ix = idx % nx;
            let p0 = p_lo + ip as f64 * dp;
            let x0 = (x_lo + ix as f64 * dx).max(f64::MIN_POSITIVE);
            survival_probability(p0, x0, params, quad)
        })
        .collect();
    let lookup = |p0: f64, x0: f64| -> f64 {
        let fp = if dp > 0.0 { ((p0 - p_lo) / dp).clamp(0.0, (np - 1) as f64) } else { 0.0 };
        let fx = if dx > 0.0 { ((x0 - x_lo) / dx).clamp(0.0, (nx - 1) as f64) } else { 0.0 };
        let ip = (fp.floor() as usize).min(np - 2);
        let ix = (fx.floor() as usize).min(nx - 2);
        let tp = fp - ip as f64;
        let tx = fx - ix as f64;
        let s00 = table[ip * nx + ix];
        let s01 = table[ip * nx + ix + 1];
        let s10 = table[(ip + 1) * nx + ix];
        let s11 = table[(ip + 1) * nx + ix + 1];
        (1.0 - tp) * ((1.0 - tx) * s00 + tx * s01) + tp * ((1.0 - tx) * s10 + tx * s11)
    };
    nodes.nodes.iter().map(|&(p0, x0, wgt)| wgt * lookup(p0, x0)).sum()
}

/// Probability of never crossing `x = 0` during `[0, tau]` for an initial
/// phase-space distribution supported in `x > 0`.
pub fn classical_no_cross_probability(
    w0: &PhaseSpaceDistribution,
    params: &FpKernelParams,
    quad: &FpQuadrature,
) -> Result<f64> {
    let total = w0.integrate();
    let left = w0.mass_left_of_origin();
    if left.abs() > SUPPORT_TOLERANCE * total.abs().max(1.0) {
        return Err(CrossingError::Domain(format!(
            "initial distribution has mass {left:.3e} at x <= 0"
        )));
    }
    let nodes = significant_nodes(w0)?;
    Ok(survival_weighted_sum(&nodes, params, quad))
}

/// Crossing probability in both available forms.
#[derive(Debug, Clone, Copy)]
pub struct CrossingSplit {
    /// Defining value `1 - p_r`.
    pub complement: f64,
    /// Outgoing boundary flux `int_0^tau dt int_{p<0} (|p|/m) K_r(p, 0, t)`,
    /// folded with the initial distribution; a numerical cross-check.
    pub flux: f64,
}

/// Probability of crossing `x = 0` during `[0, tau]`: the complement of the
/// no-crossing probability, plus the absorbed-flux form as a cross-check.
pub fn classical_cross_probability(
    w0: &PhaseSpaceDistribution,
    params: &FpKernelParams,
    quad: &FpQuadrature,
) -> Result<CrossingSplit> {
    let p_r = classical_no_cross_probability(w0, params, quad)?;
    let nodes = significant_nodes(w0)?;

    // time integral of the exit flux; the integrand vanishes at t -> 0 for
    // distributions supported away from the boundary
    let t_lo = params.tau * 1e-6;
    let t_hi = params.tau;
    let wt = simpson_weights(quad.flux_time_nodes, (t_hi - t_lo) / (quad.flux_time_nodes - 1) as f64);
    let times: Vec<f64> = (0..quad.flux_time_nodes)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / (quad.flux_time_nodes - 1) as f64)
        .collect();
    let flux_at_t: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let pt = match params.at_time(t) {
                Ok(pt) => pt,
                Err(_) => return 0.0,
            };
            let np = quad.flux_momentum_nodes;
            let spread = quad.padding * pt.t_tilde().sqrt();
            let mut total = 0.0;
            for &(p0, x0, wgt) in &nodes.nodes {
                // At the boundary the final point maps to (X, Y) = (p/m, 0);
                // the direct Gaussian is centered at the mapped initial
                // point, so only a window of negative p contributes.
                let (cx, cy) = pt.initial_point(p0, x0);
                if cy.abs() > spread {
                    continue;
                }
                let p_center = pt.mass * cx;
                let half = pt.mass * spread;
                let p_hi = (p_center + half).min(0.0);
                let p_lo = p_center - half;
                if p_lo >= 0.0 || p_hi <= p_lo {
                    continue;
                }
                let wp = simpson_weights(np, (p_hi - p_lo) / (np - 1) as f64);
                let mut inner = 0.0;
                for i in 0..np {
                    let p = p_lo + (p_hi - p_lo) * i as f64 / (np - 1) as f64;
                    let k_r = restricted_fp_propagator(p, 0.0, p0, x0, &pt).unwrap_or(0.0);
                    inner += wp[i] * (p.abs() / pt.mass) * k_r;
                }
                total += wgt * inner;
            }
            total
        })
        .collect();
    let flux: f64 = wt.iter().zip(flux_at_t.iter()).map(|(w, f)| w * f).sum();

    Ok(CrossingSplit { complement: 1.0 - p_r, flux })
}

/// Where Monte Carlo paths start.
#[derive(Debug, Clone, Copy)]
pub enum InitialSampler {
    /// Every path starts exactly at `(p0, x0)`.
    Point { p0: f64, x0: f64 },
    /// Gaussian in `(p, x)`, rejection-sampled to `x > 0`.
    TruncatedGaussian { p_center: f64, x_center: f64, sigma_p: f64, sigma_x: f64 },
}

/// Monte Carlo engine configuration.
#[derive(Debug, Clone, Copy)]
pub struct LangevinConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    /// Brownian-bridge within-step crossing correction for the position
    /// noise accumulated inside one step.
    pub bridge_correction: bool,
}

/// Fraction of paths surviving plus its binomial standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

const MC_CHUNK: usize = 8192;

/// Euler-Maruyama first-passage Monte Carlo:
/// `x += (p/m) dt`, `p += sqrt(2 D dt) xi`; a path is absorbed when
/// `x <= 0` at any step. Deterministic for a fixed seed regardless of the
/// number of worker threads (fixed-size chunks with per-chunk RNG streams,
/// merged by integer counts).
pub fn langevin_first_passage(
    sampler: &InitialSampler,
    params: &FpKernelParams,
    config: &LangevinConfig,
) -> Result<McEstimate> {
    if !(config.dt > 0.0) || config.dt >= params.tau {
        return Err(CrossingError::Config(format!(
            "dt must satisfy 0 < dt << tau, got dt = {}, tau = {}",
            config.dt, params.tau
        )));
    }
    if config.n_paths == 0 {
        return Err(CrossingError::Config("n_paths must be positive".into()));
    }
    let n_steps = (params.tau / config.dt).round() as usize;
    if n_steps == 0 || (n_steps as f64 * config.dt - params.tau).abs() > 1e-9 * params.tau {
        return Err(CrossingError::Config(format!(
            "tau = {} is not an integer multiple of dt = {}",
            params.tau, config.dt
        )));
    }
    let n_chunks = config.n_paths.div_ceil(MC_CHUNK);
    let survivors: u64 = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            rng.set_stream(chunk as u64 + 1);
            let lo = chunk * MC_CHUNK;
            let hi = ((chunk + 1) * MC_CHUNK).min(config.n_paths);
            let mut count = 0u64;
            for _ in lo..hi {
                if simulate_path(sampler, params, config, n_steps, &mut rng) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let value = survivors as f64 / config.n_paths as f64;
    let std_error = (value * (1.0 - value) / config.n_paths as f64).sqrt();
    Ok(McEstimate { value, std_error, n_samples: config.n_paths })
}

fn simulate_path(
    sampler: &InitialSampler,
    params: &FpKernelParams,
    config: &LangevinConfig,
    n_steps: usize,
    rng: &mut ChaCha12Rng,
) -> bool {
    let (mut p, mut x) = match *sampler {
        InitialSampler::Point { p0, x0 } => (p0, x0),
        InitialSampler::TruncatedGaussian { p_center, x_center, sigma_p, sigma_x } => {
            let x = loop {
                let z: f64 = rng.sample(StandardNormal);
                let cand = x_center + sigma_x * z;
                if cand > 0.0 {
                    break cand;
                }
            };
            let z: f64 = rng.sample(StandardNormal);
            (p_center + sigma_p * z, x)
        }
    };
    if x <= 0.0 {
        return false;
    }
    let noise = (2.0 * params.diffusion * config.dt).sqrt();
    // within-step variance of the position noise, for the bridge correction
    let bridge_var = 2.0 * params.diffusion * config.dt.powi(3) / (3.0 * params.mass * params.mass);
    for _ in 0..n_steps {
        let x_prev = x;
        x += p / params.mass * config.dt;
        let z: f64 = rng.sample(StandardNormal);
        p += noise * z;
        if x <= 0.0 {
            return false;
        }
        if config.bridge_correction {
            let p_cross = (-2.0 * x_prev * x / bridge_var).exp();
            if p_cross > 0.0 && rng.random::<f64>() < p_cross {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use approx::assert_abs_diff_eq;

    fn unit_params(tau: f64) -> FpKernelParams {
        FpKernelParams::new(1.0, 1.0, tau).unwrap()
    }

    #[test]
    fn kernel_normalizes_to_one() {
        let params = unit_params(1.0);
        // generous box around the kernel mean (p0, x0 + p0 tau / m)
        let (p0, x0) = (0.4, 0.7);
        let n = 401;
        let p_lo = p0 - 12.0;
        let p_hi = p0 + 12.0;
        let x_c = x0 + p0 * params.tau;
        let x_lo = x_c - 10.0;
        let x_hi = x_c + 10.0;
        let wp = simpson_weights(n, (p_hi - p_lo) / (n - 1) as f64);
        let wx = simpson_weights(n, (x_hi - x_lo) / (n - 1) as f64);
        let mut total = 0.0;
        for i in 0..n {
            let p = p_lo + (p_hi - p_lo) * i as f64 / (n - 1) as f64;
            let mut row = 0.0;
            for j in 0..n {
                let x = x_lo + (x_hi - x_lo) * j as f64 / (n - 1) as f64;
                row += wx[j] * fp_propagator(p, x, p0, x0, &params);
            }
            total += wp[i] * row;
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn kernel_moments_match_analytic_covariance() {
        // Var(p) = 2 D tau, Var(x) = 2 D tau^3 / (3 m^2), Cov = D tau^2 / m,
        // from inverting the quadratic form of the exponent.
        let params = unit_params(1.0);
        let n = 401;
        let bound = 10.0;
        let w = simpson_weights(n, 2.0 * bound / (n - 1) as f64);
        let (mut m_pp, mut m_xx, mut m_px, mut mass) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let p = -bound + 2.0 * bound * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let x = -bound + 2.0 * bound * j as f64 / (n - 1) as f64;
                let k = w[i] * w[j] * fp_propagator(p, x, 0.0, 0.0, &params);
                mass += k;
                m_pp += k * p * p;
                m_xx += k * x * x;
                m_px += k * p * x;
            }
        }
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m_pp, 2.0, epsilon = 1e-4);
        assert_abs_diff_eq!(m_xx, 2.0 / 3.0, epsilon = 1e-4);
        assert_abs_diff_eq!(m_px, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn kernel_satisfies_composition_law() {
        let tau = 1.0;
        let t1 = 0.4;
        let full = unit_params(tau);
        let late = unit_params(tau - t1);
        let early = unit_params(t1);
        let (p0, x0) = (0.5, 0.0);
        // intermediate integration box covers both kernels
        let n = 301;
        let p_lo = -9.0;
        let p_hi = 9.0;
        let x_lo = -7.0;
        let x_hi = 7.0;
        let wp = simpson_weights(n, (p_hi - p_lo) / (n - 1) as f64);
        let wx = simpson_weights(n, (x_hi - x_lo) / (n - 1) as f64);
        for (p, x) in [(0.6, 0.5), (0.0, 0.0), (-1.0, 0.8)] {
            let mut composed = 0.0;
            for i in 0..n {
                let p1 = p_lo + (p_hi - p_lo) * i as f64 / (n - 1) as f64;
                let mut row = 0.0;
                for j in 0..n {
                    let x1 = x_lo + (x_hi - x_lo) * j as f64 / (n - 1) as f64;
                    row += wx[j]
                        * fp_propagator(p, x, p1, x1, &late)
                        * fp_propagator(p1, x1, p0, x0, &early);
                }
                composed += wp[i] * row;
            }
            let direct = fp_propagator(p, x, p0, x0, &full);
            assert_abs_diff_eq!(composed, direct, epsilon = 1e-4);
        }
    }

    #[test]
    fn lambda_integral_limits() {
        assert_abs_diff_eq!(lambda_integral(0.0), PI.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_integral(10.0), PI.sqrt(), epsilon = 1e-15);
        assert!(lambda_integral(-15.0) > 0.0);
    }

    #[test]
    fn green_function_recovers_gaussian_when_erf_saturates() {
        // large r r' / t~ and small angle difference: the lambda integral
        // saturates and g reduces to the plain Gaussian kernel factor
        let coords = CarslawCoords {
            r: 5.0,
            theta: 0.8,
            r_prime: 5.2,
            theta_prime: 0.9,
            t_tilde: 1.0,
        };
        let g = carslaw_green(&coords);
        let gauss = 3f64.sqrt() / (2.0 * PI * coords.t_tilde * coords.t_tilde)
            * (-(coords.r * coords.r + coords.r_prime * coords.r_prime
                - 2.0 * coords.r * coords.r_prime * (coords.theta - coords.theta_prime).cos())
                / coords.t_tilde)
                .exp();
        assert_abs_diff_eq!(g / gauss, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn green_function_halves_at_opposite_angles() {
        // theta - theta' = pi makes a = 0: the lambda integral is sqrt(pi)/2
        let coords = CarslawCoords {
            r: 1.0,
            theta: PI,
            r_prime: 1.3,
            theta_prime: 0.0,
            t_tilde: 0.7,
        };
        let g = carslaw_green(&coords);
        let gauss = 3f64.sqrt() / (2.0 * PI.powf(1.5) * coords.t_tilde * coords.t_tilde)
            * (-(coords.r * coords.r
                + coords.r_prime * coords.r_prime
                + 2.0 * coords.r * coords.r_prime)
                / coords.t_tilde)
                .exp();
        assert_abs_diff_eq!(g / gauss, PI.sqrt() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn green_function_is_four_pi_periodic_not_two_pi() {
        let base = CarslawCoords {
            r: 1.1,
            theta: 0.9,
            r_prime: 0.8,
            theta_prime: 0.4,
            t_tilde: 0.5,
        };
        let g0 = carslaw_green(&base);
        let g4 = carslaw_green(&CarslawCoords { theta: base.theta + 4.0 * PI, ..base });
        let g2 = carslaw_green(&CarslawCoords { theta: base.theta + 2.0 * PI, ..base });
        assert_abs_diff_eq!(g4, g0, epsilon = 1e-12 * g0);
        assert!((g2 - g0).abs() > 1e-3 * g0);
    }

    #[test]
    fn restricted_propagator_vanishes_on_absorbing_ray() {
        let params = unit_params(0.8);
        for &(p, p0, x0) in &[(0.5, 1.0, 1.0), (2.0, -1.0, 0.5), (0.1, 0.3, 2.0), (3.0, -2.5, 1.5)]
        {
            let k = restricted_fp_propagator(p, 0.0, p0, x0, &params).unwrap();
            assert!(k.abs() < 1e-10, "K_r({p}, 0 | {p0}, {x0}) = {k}");
        }
    }

    #[test]
    fn image_term_dies_at_small_tau() {
        // probe on the kernel support: the free-flight image of the start
        let params = unit_params(1e-3);
        let (p0, x0) = (1.0, 1.0);
        let x = x0 + p0 * params.tau / params.mass;
        let coords = CarslawCoords::from_phase_space(p0, x, p0, x0, &params);
        let (direct, image) = carslaw_image_pair(&coords);
        assert!(direct > 0.0);
        assert!(image / direct < 1e-8);
    }

    #[test]
    fn restricted_propagator_rejects_negative_x() {
        let params = unit_params(1.0);
        assert!(restricted_fp_propagator(0.0, -0.1, 0.0, 1.0, &params).is_err());
        assert!(restricted_fp_propagator(0.0, 0.1, 0.0, -1.0, &params).is_err());
    }

    #[test]
    fn restricted_propagator_bounded_by_unrestricted() {
        let params = unit_params(0.7);
        for &(p, x, p0, x0) in &[
            (0.3, 0.5, 1.0, 1.0),
            (-0.8, 1.5, -0.5, 0.7),
            (1.2, 0.1, 0.0, 0.2),
            (-2.0, 2.5, -3.0, 1.0),
        ] {
            let kr = restricted_fp_propagator(p, x, p0, x0, &params).unwrap();
            let k = fp_propagator(p, x, p0, x0, &params);
            assert!(kr >= -1e-12, "K_r must be non-negative, got {kr}");
            assert!(kr <= k + 1e-12, "K_r = {kr} exceeds K = {k}");
        }
    }

    #[test]
    fn boundary_becomes_irrelevant_far_away() {
        let params = unit_params(0.5);
        let kr = restricted_fp_propagator(0.5, 30.0, 0.3, 30.0, &params).unwrap();
        let k = fp_propagator(0.5, 30.0, 0.3, 30.0, &params);
        assert_abs_diff_eq!(kr / k, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn survival_is_near_one_for_receding_start() {
        let params = unit_params(0.5);
        let s = survival_probability(3.0, 5.0, &params, &FpQuadrature::default());
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn survival_is_near_zero_for_deterministic_crosser() {
        let params = unit_params(1.0);
        let s = survival_probability(-4.0, 1.0, &params, &FpQuadrature::default());
        assert!(s.abs() < 1e-3, "survival = {s}");
        assert!(s > -1e-6);
    }

    #[test]
    fn noiseless_limit_recovers_deterministic_first_passage() {
        let params = FpKernelParams::new(1.0, 1e-12, 1.0).unwrap();
        let config = LangevinConfig { n_paths: 2000, dt: 1e-3, seed: 7, bridge_correction: false };
        // crossing time x0/|p0| = 0.5 < tau: everything is absorbed
        let crossing = InitialSampler::Point { p0: -2.0, x0: 1.0 };
        let est = langevin_first_passage(&crossing, &params, &config).unwrap();
        assert_eq!(est.value, 0.0);
        // crossing time 2.0 > tau: everything survives
        let surviving = InitialSampler::Point { p0: -0.5, x0: 1.0 };
        let est = langevin_first_passage(&surviving, &params, &config).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn monte_carlo_is_deterministic_across_thread_counts() {
        let params = unit_params(0.5);
        let config = LangevinConfig { n_paths: 20000, dt: 5e-4, seed: 42, bridge_correction: false };
        let sampler = InitialSampler::Point { p0: 0.0, x0: 0.5 };
        let a = langevin_first_passage(&sampler, &params, &config).unwrap();
        let b = langevin_first_passage(&sampler, &params, &config).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn quadrature_survival_matches_monte_carlo() {
        let params = unit_params(1.0);
        let quad = FpQuadrature::default();
        let config =
            LangevinConfig { n_paths: 200_000, dt: 2e-4, seed: 11, bridge_correction: false };
        let sampler = InitialSampler::Point { p0: 1.0, x0: 1.0 };
        let mc = langevin_first_passage(&sampler, &params, &config).unwrap();
        let s = survival_probability(1.0, 1.0, &params, &quad);
        assert!(
            (s - mc.value).abs() < 3.0 * mc.std_error + 2e-3,
            "quadrature {s} vs MC {} +- {}",
            mc.value,
            mc.std_error
        );
    }

    #[test]
    fn no_cross_probability_limits() {
        let quad = FpQuadrature::default();
        let p_grid = Grid1D::symmetric(8.0, 128).unwrap();
        let x_grid = Grid1D::new(0.0, 16.0, 256).unwrap();

        // far away and moving out: never crosses
        let away = PhaseSpaceDistribution::gaussian_truncated(
            p_grid, x_grid, 3.0, 8.0, 0.3, 0.3,
        )
        .unwrap();
        let params = unit_params(0.5);
        let p_r = classical_no_cross_probability(&away, &params, &quad).unwrap();
        assert_abs_diff_eq!(p_r, 1.0, epsilon = 1e-3);

        // fast inbound: crosses deterministically
        let inbound = PhaseSpaceDistribution::gaussian_truncated(
            p_grid, x_grid, -5.0, 1.0, 0.2, 0.1,
        )
        .unwrap();
        let params = unit_params(1.0);
        let p_r = classical_no_cross_probability(&inbound, &params, &quad).unwrap();
        assert!(p_r.abs() < 1e-3, "p_r = {p_r}");
    }

    #[test]
    fn support_violation_is_rejected() {
        let p_grid = Grid1D::symmetric(4.0, 64).unwrap();
        let x_grid = Grid1D::symmetric(4.0, 64).unwrap();
        let mut values = ndarray::Array2::zeros((64, 64));
        values[[32, 10]] = 1.0; // a node with x < 0
        let w = PhaseSpaceDistribution::new(p_grid, x_grid, values).unwrap();
        let params = unit_params(1.0);
        assert!(classical_no_cross_probability(&w, &params, &FpQuadrature::default()).is_err());
    }

    #[test]
    fn cross_probability_complement_and_flux_agree() {
        let p_grid = Grid1D::symmetric(6.0, 128).unwrap();
        let x_grid = Grid1D::new(0.0, 6.0, 128).unwrap();
        let w0 = PhaseSpaceDistribution::gaussian_truncated(
            p_grid, x_grid, 0.0, 1.0, 1.0, 0.15,
        )
        .unwrap();
        let params = unit_params(1.0);
        let split = classical_cross_probability(&w0, &params, &FpQuadrature::default()).unwrap();
        assert_abs_diff_eq!(split.flux, split.complement, epsilon = 1e-2);
    }
}
