//! School choice with feature-based uncertain student preferences.
//!
//! Students rank colleges by a weighted sum of per-feature utilities whose
//! weights are random. This crate provides the generalized deferred-acceptance
//! engine with four proposing strategies, exact and sampled probability of
//! stability, brute-force optima, incentive audits and instance generators.

pub mod experiment;
pub mod gda;
pub mod goldens;
pub mod instances;
pub mod model;
pub mod oracle;
pub mod prob;
pub mod rational;

pub use model::{parse_instance, parse_matching, Instance, Matching, Report, WeightDistribution};
pub use rational::Rational;
pub use gda::{run_gda, Strategy};
pub use prob::{McConfig, ProsResult, Value};
