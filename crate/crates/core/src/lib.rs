//! Couple arbitrarily many finite distributions on one source of shared
//! randomness so that every pair (X, Y) satisfies
//! P(X != Y) <= 2 d / (1 + d), where d is the pair's total variation
//! distance. The crate provides the samplers, their exact agreement laws,
//! lower-bound machinery showing the guarantee is the best possible, the
//! subset-assignment combinatorics behind those lower bounds, and a small
//! LP oracle for computing optimal couplings of small families exactly.

pub mod bounds;
pub mod combi;
pub mod couplings;
pub mod dist;
pub mod error;
pub mod exact;
pub mod lp;
pub mod mc;
pub mod randomness;
pub mod render;

pub use couplings::{CouplingKind, SampleVector};
pub use dist::{AtomId, CdfSpec, DiscreteDistribution, Family, Universe};
pub use error::{Error, Result};
