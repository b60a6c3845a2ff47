//! Exact computation with cyclic p-power covers of the projective line in
//! characteristic p: Witt-vector equations, ramification and conductor data,
//! genus and p-rank, the partition combinatorics of conductor strata, and
//! equal-characteristic deformation certificates.

pub mod algebra;
pub mod deform;
pub mod error;
pub mod json;
pub mod moduli;
pub mod ramify;
pub mod witt;

pub use algebra::{Field, FieldValue, Param, Poly, PolePoint, RatFunc};
pub use error::{Error, Result};
pub use ramify::BranchingDatum;
pub use witt::WittVector;
