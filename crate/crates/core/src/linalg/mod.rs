//! Dense matrices over any [`Scalar`], plus real-only kernels.

mod dense;
pub mod real;

pub use dense::{Mat, Rref};
