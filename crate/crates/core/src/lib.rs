//! Numerical machinery for crossing-time probabilities of a free quantum
//! particle: restricted/crossing propagators built by the method of images,
//! the two-history decoherence functional, classical and quantum-Brownian
//! phase-space propagation with an absorbing boundary, an irreversible
//! detector model with a complex absorbing potential, a continuous-measurement
//! effective potential, and classical "timeless" region probabilities.
//!
//! Conventions used throughout:
//! - uniform 1-D grids with a power-of-two number of points, treated as
//!   periodic for spectral (FFT) operations;
//! - the grid point at `x = 0` counts as part of the `x > 0` side;
//! - default natural units `hbar = m = 1`, but every operation takes explicit
//!   parameters.

pub mod decoherence;
pub mod detector;
pub mod error;
pub mod fokker_planck;
pub mod fourier;
pub mod grid;
pub mod numeric;
pub mod params;
pub mod phase_space;
pub mod propagation;
pub mod timeless;
pub mod wavefunction;
pub mod wigner;

pub use decoherence::{
    approximate_decoherence_check, crossing_decoherence, small_time_scaling, CrossingResult,
    DecoherenceCheck, ScalingFit,
};
pub use detector::{
    compare_methods, continuous_measurement_probability, detection_probabilities, detector_evolve,
    detector_evolve_tracked, effective_potential, ComparisonConfig, DetectionProbabilities,
    DetectorParams, MeasurementParams, MethodComparison,
};
pub use error::{CrossingError, Result};
pub use fokker_planck::{
    carslaw_green, classical_cross_probability, classical_no_cross_probability, fp_propagator,
    langevin_first_passage, restricted_fp_propagator, survival_probability, CarslawCoords,
    CrossingSplit, FpQuadrature, FpKernelParams, InitialSampler, LangevinConfig, McEstimate,
};
pub use grid::Grid1D;
pub use params::PhysParams;
pub use phase_space::PhaseSpaceDistribution;
pub use propagation::{crossing_propagate, free_propagate, restricted_propagate, PropagationMode};
pub use timeless::{
    fiducial_shift_check, sojourn_time, timeless_region_probability, PhaseSpaceSampler2D,
    RegionSpec, Sojourn, TimelessConfig,
};
pub use wavefunction::{make_gaussian, norm_squared, GaussianPacketSpec, WaveFunction};
pub use wigner::{qbm_no_cross_probability, wigner_transform, QbmNoCross, WignerFunction};
