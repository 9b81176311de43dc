//! Verification laboratory for Hurwitz-number tau functions of the 2D Toda
//! hierarchy: exact combinatorial oracles, truncated tau evaluation, dressing
//! operators, and the initial-value string-equation identities.

pub mod cache;
pub mod config;
pub mod dressing;
pub mod error;
pub mod hurwitz;
pub mod jet;
pub mod opalg;
pub mod partitions;
pub mod poly;
pub mod real;
pub mod report;
pub mod schur;
pub mod stringeq;
pub mod suite;
pub mod tau;

pub use error::{Error, Result};
pub use partitions::Partition;
pub use poly::{MultiPoly, Rational};
pub use real::Real;
