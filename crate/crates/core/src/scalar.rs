//! Scalar bounds for the two numeric worlds of the crate.
//!
//! The exact half is generic over the integer component type of a Gaussian
//! integer; the shipped alias uses [`num_bigint::BigInt`] because the
//! dynamics does not conserve any norm and components grow without bound.
//! The floating-point half is generic over an IEEE float.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Integer component type of a Gaussian integer: a signed integer ring with
/// Euclidean division. Satisfied by `i64`, `i128` and `BigInt`; the crate
/// aliases pick `BigInt` so that no computation can overflow.
pub trait IntScalar:
    Integer
    + Signed
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Clone
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> IntScalar for T where
    T: Integer
        + Signed
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Clone
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalar for the bandlimited continuum bridge (f32 or f64).
pub trait FloatScalar:
    num_traits::Float
    + num_traits::FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Shorthand for embedding literal tolerances and constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal converts to any float scalar")
    }
}

impl FloatScalar for f32 {}
impl FloatScalar for f64 {}
