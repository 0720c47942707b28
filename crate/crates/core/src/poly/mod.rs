//! Monomials, orderings, sparse polynomials and Macaulay matrices.

mod macaulay;
mod monomial;
mod ordering;
pub mod parse;
mod polynomial;

pub use macaulay::{build_macaulay, shift_set, support_of, ColumnPartition, MacaulayError, MacaulayMatrix, Shift};
pub use monomial::Monomial;
pub use ordering::{MonomialOrdering, OrderKind, OrderingError};
pub use parse::{parse_poly, parse_slot_poly, Coef, ParseError, SlotPoly};
pub use polynomial::Poly;
