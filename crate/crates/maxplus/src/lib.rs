//! Max-plus (tropical) linear algebra for stochastic dynamical systems.
//!
//! The carrier semiring replaces addition with `max` and multiplication
//! with `+`, with `eps` = -oo as the null element. On top of the matrix
//! algebra this crate provides:
//!
//! - random transition-matrix models with reproducible, splittable sampling
//!   streams ([`model`], [`seed`]);
//! - Monte Carlo and exact-enumeration expectations of chain functionals
//!   ([`expectation`]);
//! - analytic lower/upper bounds on the mean growth rate of the state
//!   vector, plus an absolute-error bound ([`bounds`]);
//! - simulation of the state recursion `x(k) = A^T(k) (x) x(k-1)` and
//!   replicated growth-rate estimation ([`sim`]).
//!
//! Everything stochastic is a pure function of a seed and a stream path, so
//! results are bit-for-bit reproducible at any worker count.
//!
//! ```
//! use maxplus::{MaxPlusMatrix, MaxPlusScalar};
//!
//! let a: MaxPlusMatrix = "1,2;3,4".parse()?;
//! let b: MaxPlusMatrix = "5,6;7,8".parse()?;
//! assert_eq!(a.otimes(&b)?, "9,10;11,12".parse()?);
//! assert_eq!(a.norm(), MaxPlusScalar::finite(4.0));
//! # Ok::<(), maxplus::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod expectation;
pub mod matrix;
pub mod model;
pub mod scalar;
pub mod seed;
pub mod sim;
pub mod testkit;

pub use bounds::{
    best_bounds, bound_basic, bound_corollary, bound_nested, bound_rowmax, error_bound,
    error_constant, BestBounds, BoundKind, BoundReport, BoundSide, ErrorConstant, FixtureSource,
};
pub use error::{Error, Result};
pub use expectation::{
    exact_mean, mc_mean, EstimateMethod, EstimateValue, ExactSource, ExpectationSource,
    Functional, MeanEstimate, MonteCarloSource,
};
pub use matrix::MaxPlusMatrix;
pub use model::{Atom, DistributionSpec, FixedMatrix, MatrixModel, TransitionSampler};
pub use scalar::MaxPlusScalar;
pub use seed::SeedSpec;
pub use sim::{chain_norm_growth, estimate_lambda, simulate_state, LambdaEstimate};
