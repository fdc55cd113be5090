//! The COM-negative binomial count distribution and its relatives.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod datasets;
pub mod dist;
pub mod error;
pub mod estimation;
pub mod gof;
pub mod sampling;
pub mod special;
pub mod table;

pub use error::{Error, Result};
