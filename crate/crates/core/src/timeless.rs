//! Classical "timeless" probability that a free trajectory ever enters a
//! region of two-dimensional configuration space.
//!
//! Trajectories are straight lines `x(t) = x0 + p0 (t - t0) / m` over the
//! whole time axis; the sojourn time inside the region is computed
//! analytically (chord length over speed), never by stepping an integrator.
//! Because the time integral runs over all of `t`, the sojourn never depends
//! on the fiducial time `t0`, which makes the shift-invariance check exact.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{CrossingError, Result};
use crate::fokker_planck::McEstimate;

/// A region of configuration space.
#[derive(Debug, Clone, Copy)]
pub enum RegionSpec {
    Disk { center: [f64; 2], radius: f64 },
    /// Axis-aligned rectangle with `min[i] < max[i]`.
    Rect { min: [f64; 2], max: [f64; 2] },
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            RegionSpec::Disk { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(CrossingError::Config(format!(
                        "disk radius must be > 0, got {radius}"
                    )));
                }
            }
            RegionSpec::Rect { min, max } => {
                if min[0] >= max[0] || min[1] >= max[1] {
                    return Err(CrossingError::Config("degenerate rectangle".into()));
                }
            }
        }
        Ok(())
    }

    fn contains(&self, x: [f64; 2]) -> bool {
        match self {
            RegionSpec::Disk { center, radius } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                dx * dx + dy * dy < radius * radius
            }
            RegionSpec::Rect { min, max } => {
                (min[0]..=max[0]).contains(&x[0]) && (min[1]..=max[1]).contains(&x[1])
            }
        }
    }
}

/// Total time a trajectory spends inside a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sojourn {
    Finite(f64),
    /// Zero momentum while sitting inside the region.
    Infinite,
}

impl Sojourn {
    pub fn exceeds(&self, epsilon: f64) -> bool {
        match self {
            Sojourn::Finite(t) => *t > epsilon,
            Sojourn::Infinite => true,
        }
    }
}

/// Analytic sojourn time of the free trajectory through `x0` with momentum
/// `p0`, over `t` in `(-inf, inf)`.
pub fn sojourn_time(x0: [f64; 2], p0: [f64; 2], region: &RegionSpec, mass: f64) -> Sojourn {
    let speed2 = (p0[0] * p0[0] + p0[1] * p0[1]) / (mass * mass);
    if speed2 == 0.0 {
        return if region.contains(x0) { Sojourn::Infinite } else { Sojourn::Finite(0.0) };
    }
    let v = [p0[0] / mass, p0[1] / mass];
    match region {
        RegionSpec::Disk { center, radius } => {
            // |w + v s|^2 = R^2 with w the offset from the center; the
            // chord duration is sqrt(disc)/|v|^2
            let w = [x0[0] - center[0], x0[1] - center[1]];
            let b = 2.0 * (w[0] * v[0] + w[1] * v[1]);
            let c = w[0] * w[0] + w[1] * w[1] - radius * radius;
            let disc = b * b - 4.0 * speed2 * c;
            if disc <= 0.0 {
                Sojourn::Finite(0.0)
            } else {
                Sojourn::Finite(disc.sqrt() / speed2)
            }
        }
        RegionSpec::Rect { min, max } => {
            // intersect the per-axis time windows
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for axis in 0..2 {
                if v[axis] == 0.0 {
                    if x0[axis] < min[axis] || x0[axis] > max[axis] {
                        return Sojourn::Finite(0.0);
                    }
                    continue;
                }
                let (a, b) = (
                    (min[axis] - x0[axis]) / v[axis],
                    (max[axis] - x0[axis]) / v[axis],
                );
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                lo = lo.max(a);
                hi = hi.min(b);
            }
            if hi <= lo {
                Sojourn::Finite(0.0)
            } else if lo == f64::NEG_INFINITY || hi == f64::INFINITY {
                Sojourn::Infinite
            } else {
                Sojourn::Finite(hi - lo)
            }
        }
    }
}

/// Initial-data distribution on the four-dimensional phase space.
#[derive(Debug, Clone, Copy)]
pub enum PhaseSpaceSampler2D {
    /// Independent Gaussians in every component.
    Gaussian { x_center: [f64; 2], p_center: [f64; 2], sigma_x: f64, sigma_p: f64 },
}

impl PhaseSpaceSampler2D {
    fn draw(&self, rng: &mut ChaCha12Rng) -> ([f64; 2], [f64; 2]) {
        match *self {
            PhaseSpaceSampler2D::Gaussian { x_center, p_center, sigma_x, sigma_p } => {
                let mut x = [0.0; 2];
                let mut p = [0.0; 2];
                for i in 0..2 {
                    let zx: f64 = rng.sample(StandardNormal);
                    let zp: f64 = rng.sample(StandardNormal);
                    x[i] = x_center[i] + sigma_x * zx;
                    p[i] = p_center[i] + sigma_p * zp;
                }
                (x, p)
            }
        }
    }
}

/// Configuration of the timeless Monte Carlo.
#[derive(Debug, Clone, Copy)]
pub struct TimelessConfig {
    pub sampler: PhaseSpaceSampler2D,
    /// Sojourn threshold; taken small and positive.
    pub epsilon: f64,
    /// Fiducial time labeling the initial data; physical answers must not
    /// depend on it.
    pub t0: f64,
    pub n_samples: usize,
}

impl TimelessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(CrossingError::Config(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if self.n_samples < 1 {
            return Err(CrossingError::Config("n_samples must be >= 1".into()));
        }
        Ok(())
    }
}

const MC_CHUNK: usize = 8192;

/// Monte Carlo estimate of the probability that a trajectory spends more
/// than `epsilon` inside the region. Deterministic for a fixed seed.
pub fn timeless_region_probability(
    cfg: &TimelessConfig,
    region: &RegionSpec,
    mass: f64,
    seed: u64,
) -> Result<McEstimate> {
    cfg.validate()?;
    region.validate()?;
    let n_chunks = cfg.n_samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64 + 1);
            let lo = chunk * MC_CHUNK;
            let hi = ((chunk + 1) * MC_CHUNK).min(cfg.n_samples);
            let mut count = 0u64;
            for _ in lo..hi {
                let (x0, p0) = cfg.sampler.draw(&mut rng);
                if sojourn_time(x0, p0, region, mass).exceeds(cfg.epsilon) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let value = hits as f64 / cfg.n_samples as f64;
    let std_error = (value * (1.0 - value) / cfg.n_samples as f64).sqrt();
    Ok(McEstimate { value, std_error, n_samples: cfg.n_samples })
}

/// Sorted per-sample sojourn times for a seeded draw; the survival curve
/// over epsilon falls out by counting.
pub fn sojourn_samples(
    cfg: &TimelessConfig,
    region: &RegionSpec,
    mass: f64,
    seed: u64,
) -> Result<Vec<Sojourn>> {
    cfg.validate()?;
    region.validate()?;
    let n_chunks = cfg.n_samples.div_ceil(MC_CHUNK);
    let per_chunk: Vec<Vec<Sojourn>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64 + 1);
            let lo = chunk * MC_CHUNK;
            let hi = ((chunk + 1) * MC_CHUNK).min(cfg.n_samples);
            (lo..hi)
                .map(|_| {
                    let (x0, p0) = cfg.sampler.draw(&mut rng);
                    sojourn_time(x0, p0, region, mass)
                })
                .collect()
        })
        .collect();
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Recompute the region probability with `t0 -> t0 + shift` under the same
/// seed and report the absolute deviation. The sojourn of a straight line
/// over the full time axis does not reference `t0`, so the deviation is
/// exactly zero; the check guards that property.
pub fn fiducial_shift_check(
    cfg: &TimelessConfig,
    region: &RegionSpec,
    mass: f64,
    seed: u64,
    shift: f64,
) -> Result<f64> {
    let base = timeless_region_probability(cfg, region, mass, seed)?;
    let shifted_cfg = TimelessConfig { t0: cfg.t0 + shift, ..*cfg };
    let shifted = timeless_region_probability(&shifted_cfg, region, mass, seed)?;
    Ok((base.value - shifted.value).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const DISK: RegionSpec = RegionSpec::Disk { center: [0.0, 0.0], radius: 1.5 };

    #[test]
    fn chord_through_center_is_diameter() {
        let s = sojourn_time([-10.0, 0.0], [2.0, 0.0], &DISK, 1.0);
        assert_eq!(s, Sojourn::Finite(2.0 * 1.5 / 2.0));
    }

    #[test]
    fn miss_and_graze_have_zero_sojourn() {
        assert_eq!(sojourn_time([-10.0, 2.0], [1.0, 0.0], &DISK, 1.0), Sojourn::Finite(0.0));
        assert_eq!(sojourn_time([-10.0, 1.5], [1.0, 0.0], &DISK, 1.0), Sojourn::Finite(0.0));
    }

    #[test]
    fn zero_momentum_inside_region_is_infinite() {
        assert_eq!(sojourn_time([0.1, 0.0], [0.0, 0.0], &DISK, 1.0), Sojourn::Infinite);
        assert_eq!(sojourn_time([5.0, 0.0], [0.0, 0.0], &DISK, 1.0), Sojourn::Finite(0.0));
    }

    #[test]
    fn speed_scaling_inverts_sojourn() {
        let p = [0.7, -0.3];
        let x = [-4.0, 0.4];
        let lambda = 3.7;
        let s1 = match sojourn_time(x, p, &DISK, 1.0) {
            Sojourn::Finite(t) => t,
            _ => panic!(),
        };
        let s2 = match sojourn_time(x, [lambda * p[0], lambda * p[1]], &DISK, 1.0) {
            Sojourn::Finite(t) => t,
            _ => panic!(),
        };
        assert_abs_diff_eq!(s2, s1 / lambda, epsilon = 1e-12);
    }

    #[test]
    fn rectangle_sojourn_matches_hand_value() {
        let rect = RegionSpec::Rect { min: [0.0, 0.0], max: [2.0, 1.0] };
        // horizontal line through the middle: crosses the full width
        let s = sojourn_time([-5.0, 0.5], [4.0, 0.0], &rect, 2.0);
        assert_eq!(s, Sojourn::Finite(2.0 / 2.0));
        // axis-parallel line inside the strip forever
        let s = sojourn_time([1.0, 0.5], [0.0, 0.0], &rect, 1.0);
        assert_eq!(s, Sojourn::Infinite);
    }

    #[test]
    fn aimed_ensemble_always_enters() {
        let cfg = TimelessConfig {
            sampler: PhaseSpaceSampler2D::Gaussian {
                x_center: [-8.0, 0.0],
                p_center: [2.0, 0.0],
                sigma_x: 0.05,
                sigma_p: 0.05,
            },
            epsilon: 1e-6,
            t0: 0.0,
            n_samples: 20_000,
        };
        let est = timeless_region_probability(&cfg, &DISK, 1.0, 1).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn far_offset_ensemble_never_enters() {
        let cfg = TimelessConfig {
            sampler: PhaseSpaceSampler2D::Gaussian {
                x_center: [-8.0, 5.0],
                p_center: [2.0, 0.0],
                sigma_x: 0.05,
                sigma_p: 0.05,
            },
            epsilon: 1e-6,
            t0: 0.0,
            n_samples: 20_000,
        };
        let est = timeless_region_probability(&cfg, &DISK, 1.0, 1).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn fiducial_shifts_change_nothing() {
        let cfg = TimelessConfig {
            sampler: PhaseSpaceSampler2D::Gaussian {
                x_center: [-2.0, 0.5],
                p_center: [1.0, 0.0],
                sigma_x: 1.0,
                sigma_p: 1.0,
            },
            epsilon: 1e-6,
            t0: 0.3,
            n_samples: 50_000,
        };
        for shift in [0.0, 7.3, -100.0] {
            assert_eq!(fiducial_shift_check(&cfg, &DISK, 1.0, 99, shift).unwrap(), 0.0);
        }
    }

    #[test]
    fn probability_is_non_increasing_in_epsilon() {
        let cfg = TimelessConfig {
            sampler: PhaseSpaceSampler2D::Gaussian {
                x_center: [-2.0, 0.0],
                p_center: [1.0, 0.2],
                sigma_x: 1.5,
                sigma_p: 1.0,
            },
            epsilon: 1e-6,
            t0: 0.0,
            n_samples: 30_000,
        };
        let samples = sojourn_samples(&cfg, &DISK, 1.0, 5).unwrap();
        let count = |eps: f64| samples.iter().filter(|s| s.exceeds(eps)).count();
        let mut last = usize::MAX;
        for eps in [1e-9, 1e-6, 1e-3, 0.1, 1.0, 3.0] {
            let c = count(eps);
            assert!(c <= last);
            last = c;
        }
        // right-continuity at the configured epsilon: no sample falls in the
        // sliver (eps, eps * (1 + 1e-12)] for a continuous ensemble
        assert_eq!(count(cfg.epsilon), count(cfg.epsilon * (1.0 + 1e-12)));
    }

    #[test]
    fn monte_carlo_matches_semi_analytic_quadrature() {
        // Independent oracle: condition on p; the perpendicular offset of a
        // Gaussian cloud is itself Gaussian, so the disk-entry probability
        // reduces to a smooth 2-D integral over momentum.
        let (x_c, p_c) = ([-3.0f64, 0.8f64], [1.2f64, 0.0f64]);
        let (sigma_x, sigma_p) = (1.0f64, 0.8f64);
        let radius = 1.5f64;
        let mass = 1.0f64;
        let epsilon = 1e-6f64;

        let n = 241;
        let span = 8.0 * sigma_p;
        let h = 2.0 * span / (n - 1) as f64;
        let w = crate::numeric::simpson_weights(n, h);
        let mut prob = 0.0;
        for i in 0..n {
            let p1 = p_c[0] - span + i as f64 * h;
            for j in 0..n {
                let p2 = p_c[1] - span + j as f64 * h;
                let gauss = (-(p1 - p_c[0]).powi(2) / (2.0 * sigma_p * sigma_p)
                    - (p2 - p_c[1]).powi(2) / (2.0 * sigma_p * sigma_p))
                    .exp()
                    / (2.0 * std::f64::consts::PI * sigma_p * sigma_p);
                let speed = (p1 * p1 + p2 * p2).sqrt() / mass;
                if speed == 0.0 {
                    continue;
                }
                // impact parameter must satisfy b^2 < R^2 - (eps*v/2)^2
                let b2_max = radius * radius - (epsilon * speed / 2.0).powi(2);
                if b2_max <= 0.0 {
                    continue;
                }
                let b_max = b2_max.sqrt();
                // signed perpendicular offset of the line through x_c
                let inv = 1.0 / (p1 * p1 + p2 * p2).sqrt();
                let perp = (-p2 * x_c[0] + p1 * x_c[1]) * inv;
                let cdf = |t: f64| 0.5 * libm::erfc(-t / (sigma_x * 2f64.sqrt()));
                let inside = cdf(b_max - perp) - cdf(-b_max - perp);
                prob += w[i] * w[j] * gauss * inside;
            }
        }

        let cfg = TimelessConfig {
            sampler: PhaseSpaceSampler2D::Gaussian {
                x_center: x_c,
                p_center: p_c,
                sigma_x,
                sigma_p,
            },
            epsilon,
            t0: 0.0,
            n_samples: 200_000,
        };
        let disk = RegionSpec::Disk { center: [0.0, 0.0], radius };
        let est = timeless_region_probability(&cfg, &disk, mass, 12).unwrap();
        assert!(
            (est.value - prob).abs() < 3.0 * est.std_error,
            "MC {} +- {} vs quadrature {prob}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn degenerate_region_is_rejected() {
        let bad = RegionSpec::Rect { min: [0.0, 0.0], max: [0.0, 1.0] };
        assert!(bad.validate().is_err());
        let bad = RegionSpec::Disk { center: [0.0, 0.0], radius: 0.0 };
        assert!(bad.validate().is_err());
    }
}
