//! Concave distortion semigroups and the acceptability indices built on them.
//!
//! A concave generator `G` on `[0, 1]` defines the flow `Psi_t` of
//! `dy/dt = G(y)`. Each `Psi_t` is a concave distortion, and the index
//! `alpha(X) = sup { t : E^{Psi_t}[X] >= 0 }` measures how much distortion a
//! gain `X` survives.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`, with `*32` variants for single precision.

// `!(x > 0)` is the NaN-rejecting form of every domain check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptability;
pub mod choquet;
pub mod distortion;
pub mod error;
pub mod generator;
pub mod hull;
pub mod io;
pub mod logarithm;
pub mod portfolio;
pub mod properties;
pub mod quadrature;
pub mod real;
pub mod semigroup;
pub mod spec;
pub mod special;
pub mod tail;

pub use acceptability::{alpha, alpha_family, craroc, glr, raroc, sharpe, AlphaResult, AlphaStatus, Ratio};
pub use choquet::{conjugate_phi, distorted_expectation, extreme_density};
pub use distortion::Distortion;
pub use error::{Error, Result};
pub use generator::{
    concave_majorant_max, dual_generator, make_builtin_generator, make_knot_generator, min_generators,
    scale_generator, sum_generators, Builtin, Generator,
};
pub use logarithm::{existence_check, recover_generator, LogOptions, LogRecovery};
pub use portfolio::{optimize, PortfolioOptions, PortfolioSolution, ScenarioMatrix};
pub use properties::{diagnose, table_report, PropertyReport};
pub use real::{Pos, Real};
pub use semigroup::{build_semigroup, DistortionFamily, Semigroup};
pub use spec::{DistortionSpec, GeneratorSpec};
pub use tail::Confidence;

pub type Sample = choquet::EmpiricalDistribution<f64>;
pub type Scenarios = ScenarioMatrix<f64>;
pub type Recovery = LogRecovery<f64>;
pub type Solution = PortfolioSolution<f64>;
pub type Report = PropertyReport<f64>;

pub type Generator32 = Generator<f32>;
pub type Semigroup32 = Semigroup<f32>;
pub type Distortion32 = Distortion<f32>;
pub type Sample32 = choquet::EmpiricalDistribution<f32>;
