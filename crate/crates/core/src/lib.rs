//! The Kumaraswamy generalized Marshall-Olkin family of lifetime
//! distributions: evaluation, series expansions, quadrature-based moments
//! and maximum-likelihood fitting.

pub mod baseline;
pub mod data;
pub mod error;
pub mod estimation;
pub mod family;
pub mod optimize;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod series;
pub mod special;

pub use baseline::{Baseline, BaselineFamily, ZFunction};
pub use error::{Error, Result};
pub use family::{FamilyParams, KwGMODistribution};
pub use par::Execution;
