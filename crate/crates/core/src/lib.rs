//! Sparse group lasso for genome-wide association with pathway structure.
//!
//! The crate covers the full analysis chain:
//!
//! * [`data`]: genotype, phenotype and pathway-annotation input, standardisation
//!   and overlap expansion.
//! * [`solver`]: sparse group lasso fits (competitive block descent and
//!   independent per-pathway descent) and a plain lasso baseline.
//! * [`penalty`]: per-pathway entry penalties, `lambda_max`, lasso cardinality
//!   matching.
//! * [`weights`]: iterative pathway-weight tuning against selection bias.
//! * [`ranking`]: subsampling-based stability ranking of pathways, genes and
//!   features, with a permuted-phenotype null.
//! * [`compare`]: normalised top-k Canberra comparison of two rankings.
//! * [`simulation`]: the two simulation studies used to evaluate selection power.

pub mod compare;
pub mod data;
pub mod error;
pub mod linalg;
pub mod penalty;
pub mod ranking;
pub mod rng;
pub mod simulation;
pub mod solver;
pub mod weights;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
