//! Causal structure discovery from sequences of distributions produced by
//! local mechanism changes.
//!
//! The crate covers the whole pipeline: simulating transition sequences
//! from known causal Bayesian networks ([`simulate`]), detecting marginal
//! changes ([`detect`]), partitioning variables into ordered buckets and
//! building marked order graphs ([`discovery`]), Bayesian scoring of
//! candidate diagrams ([`score`]), and constraint-based learning that uses
//! the change-derived knowledge ([`hybrid`]). [`harness`] holds the file
//! formats and the error-rate experiments.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the file formats and experiments
//! use.

pub mod detect;
pub mod discovery;
pub mod error;
pub mod harness;
pub mod hybrid;
pub mod model;
pub mod scalar;
pub mod score;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type CausalModel = model::CausalModel<f64>;
pub type CausalModelF32 = model::CausalModel<f32>;
pub type Cpt = model::Cpt<f64>;
pub type TransitionScenario = simulate::TransitionScenario<f64>;
pub type MechanismChangeSpec = simulate::MechanismChangeSpec<f64>;
pub type Marginal = simulate::Marginal<f64>;
pub type ChangeDecision = detect::ChangeDecision<f64>;
pub type DirichletPrior = score::DirichletPrior<f64>;
pub type TsScore = score::TsScore<f64>;
pub type GraphPosterior = score::GraphPosterior<f64>;
