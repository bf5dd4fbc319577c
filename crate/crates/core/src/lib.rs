//! Jeffrey conditioning and Bayes blind spots on countable probability spaces.
//!
//! A posterior `q` is reachable from a strictly positive prior `p` by Jeffrey
//! conditioning on some nontrivial partition iff two coordinates share the
//! same ratio `q_i / p_i`. The blind spot of `p` is everything else. This
//! crate provides:
//!
//! * [`distributions`]: finite, truncated (prefix plus tail mass) and
//!   geometric distributions;
//! * [`jeffrey`]: the conditioning engine, rigidity and ratio checks, the
//!   coarsest witness partition, and a brute-force accessibility oracle;
//! * [`blindspot`]: membership tests for single priors and families;
//! * [`construct`]: generators and perturbations with certified l1 bounds;
//! * [`metrics`]: `l^p` distances and the bounded metric;
//! * [`sampler`]: stick-breaking sampling and Monte Carlo estimation.
//!
//! Numerical code is generic over [`Scalar`]. Exact work uses
//! [`Rational`]; sampling uses `f64`.

pub mod blindspot;
pub mod construct;
pub mod distributions;
pub mod error;
pub mod jeffrey;
pub mod json;
pub mod metrics;
pub mod rational;
pub mod sampler;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational in lowest terms.
pub type Rational = num_rational::BigRational;

pub type ExactDistribution = distributions::FiniteDistribution<Rational>;
pub type ExactTruncated = distributions::TruncatedDistribution<Rational>;
pub type ExactParametric = distributions::ParametricDistribution<Rational>;
pub type ExactProfile = distributions::RatioProfile<Rational>;
pub type ExactWeights = jeffrey::BlockWeights<Rational>;

pub type FloatDistribution = distributions::FiniteDistribution<f64>;
pub type FloatTruncated = distributions::TruncatedDistribution<f64>;
