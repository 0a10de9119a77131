//! Shintani cone geometry over totally real cubic fields.
//!
//! Field arithmetic is generic over an exact scalar; everything from the
//! embeddings onwards works with arbitrary-precision rationals.

pub mod dyadic;
pub mod embed;
pub mod error;
pub mod field;
pub mod geom;
pub mod interval;
pub mod pipeline;
pub mod plane;
pub mod render;
pub mod scalar;

use num_bigint::BigInt;

pub use error::{Error, Result};

pub type Rational = num_rational::BigRational;
pub type Spec = field::FieldSpec<Rational>;
pub type Element = field::FieldElement<Rational>;
/// Certified interval with binary endpoints.
pub type Ival = interval::Interval<dyadic::Dyadic>;
/// Interval with `f64` endpoints, used for fast prefilters.
pub type Fval = interval::Interval<f64>;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p / q` as a rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}
