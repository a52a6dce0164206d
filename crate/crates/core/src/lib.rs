//! Successive-sampling estimation for respondent-driven sampling (RDS) data.
//!
//! RDS recruits a hidden population through its social network: respondents
//! pass coupons to peers and sampling stops at a target size. Treating that
//! recruitment as probability-proportional-to-size sampling *without*
//! replacement (successive sampling) corrects the finite-population bias of
//! the usual with-replacement random-walk approximation, which matters
//! whenever the sample is a substantial fraction of the population.
//!
//! The crate provides:
//!
//! * the successive-sampling estimator: joint iterative estimation of the
//!   population degree distribution and the degree-to-inclusion-probability
//!   map by simulation, feeding a generalized Horvitz-Thompson estimator
//!   ([`ss`]);
//! * the classical comparators: the Volz-Heckathorn estimator and the sample
//!   mean ([`estimators`]);
//! * a PPSWOR draw engine with exact enumeration oracles for small
//!   populations and Monte-Carlo inclusion-probability estimation
//!   ([`ppswor`]);
//! * synthetic network generators (mixing-matrix and configuration models),
//!   a chain-referral sampling simulator, and a replicated study harness for
//!   bias/variance/MSE experiments ([`netgen`], [`rds_sim`], [`harness`]).
//!
//! Estimation arithmetic is generic over the scalar type through [`Scalar`]:
//! `f64` in production (see the aliases at the crate root), exact rationals
//! in tests that pin closed-form values.
//!
//! All randomness flows from explicit 64-bit seeds; replicated computations
//! derive one child stream per replicate so results do not depend on the
//! number of worker threads.
//!
//! # Quick example
//!
//! ```rust
//! use rds_ss::ss::{estimate, Method};
//! use rds_ss::{RealSample, SimConfig};
//!
//! // (degree, outcome) pairs; the sample is assumed to cover a third of
//! // the population.
//! let sample = RealSample::from_pairs([
//!     (3, 1.0), (5, 0.0), (2, 0.0), (8, 1.0), (4, 0.0), (2, 1.0),
//! ]);
//! let config = SimConfig::new(2000, 3, 42);
//! let ss = estimate(&sample, Method::Ss, Some(18), &config).unwrap();
//! let mean = estimate(&sample, Method::Mean, None, &config).unwrap();
//!
//! assert!(ss.value > 0.0 && ss.value < 1.0);
//! // Assuming the sample IS the population collapses the SS estimate to
//! // the sample mean exactly.
//! let census = estimate(&sample, Method::Ss, Some(sample.n()), &config).unwrap();
//! assert!((census.value - mean.value).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod domain;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod netgen;
pub mod ppswor;
pub mod rds_sim;
mod scalar;
pub mod ss;
pub mod stream;

pub use domain::{
    DegreeDistribution, InclusionMap, RdsRecord, RdsSample, Repair, SimConfig, Violation,
};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use ss::{Estimate, Method, SsFit};

/// Integer-count degree distribution, the form PPSWOR simulation draws from.
pub type IntDegreeDistribution = DegreeDistribution<u64>;
/// Real-valued degree distribution, the form the moment iteration produces.
pub type RealDegreeDistribution = DegreeDistribution<f64>;
/// Double-precision sample, the form the file formats and simulators use.
pub type RealSample = RdsSample<f64>;
/// Double-precision inclusion map.
pub type RealInclusionMap = InclusionMap<f64>;
/// Double-precision fit result.
pub type RealFit = SsFit<f64>;
/// Double-precision estimate.
pub type RealEstimate = Estimate<f64>;
