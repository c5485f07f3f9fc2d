//! Well-spread sampling with the local pivotal method.
//!
//! The crate covers the whole pipeline for variance reduction on continuous
//! problems:
//!
//! * [`pivotal`]: LPM1 and LPM2 selection from a discrete population under
//!   any distance, backed by a k-d tree with deactivation;
//! * [`continuous`]: discretizing a continuous distribution into `N` iid
//!   points, optionally under an importance sampling proposal;
//! * [`estimation`]: Horvitz-Thompson estimates, the local mean variance
//!   estimator and a spatial balance diagnostic;
//! * [`oracle`]: exact enumeration of the sampler for populations of at most
//!   eight units;
//! * [`experiments`]: replicated integral, option pricing, rare event and
//!   rainforest stability studies;
//! * [`cli`]: the `pivotal` command line front end.
//!
//! ```
//! use pivotal_sampling::{continuous, lpm2, rng, Distance, InclusionProbabilities};
//!
//! let mut rng = rng::seeded(1);
//! let cloud = continuous::discretize(&continuous::DistributionSpec::unit_cube(2), 1000, &mut rng)?;
//! let probs = InclusionProbabilities::equal(10, 1000)?;
//! let s = lpm2(&probs, &cloud.coords, &Distance::Euclidean, &mut rng)?;
//! assert_eq!(s.selected.len(), 10);
//! # Ok::<(), pivotal_sampling::Error>(())
//! ```
//!
//! # Examples
//!
//! Runnable with `cargo run --release --example <name>`:
//!
//! * `sample_population`: LPM1/LPM2 on a grid, compared with simple random
//!   sampling;
//! * `unequal_probabilities`: size-proportional probabilities and the
//!   Horvitz-Thompson estimator;
//! * `continuous_normal`: thinning a discretized normal distribution;
//! * `importance_sampling`: rare-event mean with IS and IS+LPM2;
//! * `option_pricing`: European call against Black-Scholes;
//! * `variance_estimation`: local mean variance from one sample;
//! * `spatial_balance`: Voronoi balance of LPM and iid samples;
//! * `rainforest`: basin stability by ODE integration;
//! * `exact_oracle`: exact rational sample distributions;
//! * `integral`: the integral of `x`, including the sweep over `N`.

pub mod cli;
pub mod continuous;
pub mod distance;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod oracle;
pub mod pivotal;
pub mod points;
pub mod rng;

pub use distance::Distance;
pub use error::{Error, Result};
pub use pivotal::{
    lpm1, lpm2, sample, InclusionProbabilities, NeighborIndex, SampleResult, Variant,
};
pub use points::Points;
