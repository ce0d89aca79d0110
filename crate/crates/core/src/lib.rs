//! Exact series solutions, closed-form maxima and a finite-difference oracle
//! for one-dimensional poro-visco-elastic confined compression.
//!
//! Everything is dimensionless unless it lives in [`scaling`]. The sample
//! occupies `x ∈ [0, 1]` with the impermeable base at `x = 0` and the loaded,
//! drained piston at `x = 1`.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod extremes;
pub mod oracle;
pub mod scaling;
pub mod series;
pub mod signals;
pub mod spectrum;
pub mod sum;
pub mod validation;

#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
pub use exec::Execution;
pub use scaling::{MaterialParams, QuantityKind, Scalings};
pub use series::{Field, FieldSample, SeriesConfig, TimeSlice, Truncation};
pub use signals::{Primitive, PrimitiveKind, Signal};
pub use spectrum::EigenMode;
