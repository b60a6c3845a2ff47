//! Exact coefficient-field arithmetic and rational functions in `x`.

pub mod field;
pub mod parse;
pub mod poly;
pub mod ratfunc;

pub use field::{field_arith, Field, FieldValue, Param};
pub use parse::{parse_point, parse_ratfunc, parse_value};
pub use poly::Poly;
pub use ratfunc::{PartialFractions, PolePoint, RatFunc};
