//! Elimination-template generation and action-matrix polynomial solving.
//!
//! The offline side traces a Gröbner basis computation over `Z/p`, builds an
//! affinely parameterized template from the syzygy module, and greedily shrinks
//! it. The online side fills the frozen template with real data, eliminates,
//! reads off the action matrix and recovers the roots from its eigenvectors.

pub mod arith;
pub mod basisgen;
pub mod groebner;
pub mod linalg;
pub mod plan;
pub mod poly;
pub mod problems;
pub mod solverun;
pub mod templategen;

pub use arith::{Fp, Scalar, Zp, DEFAULT_PRIME};
