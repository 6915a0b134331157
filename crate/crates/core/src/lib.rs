//! Overconvergent analytic geometry over `ℤ` and `ℚ` with exact arithmetic.

mod error;

pub mod affinoid;
pub mod base;
pub mod coverings;
pub mod graded;
pub mod poly;
pub mod real;
pub mod spectrum;
pub mod tate;

pub use error::{Error, Result};
pub use poly::{parse_expression, Monomial, ParseError, Poly};
pub use real::{NormValue, Rational, Real};
