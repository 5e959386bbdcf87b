//! Scalar abstractions.
//!
//! The group law, dilations and polynomial calculus only need ring operations
//! plus small integer constants, so they are written against [`Scalar`] and run
//! unchanged over `f64`, `f32` or exact rationals. Anything that takes square
//! roots or compares against a tolerance lives on `f64`.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// A commutative ring element usable as a coordinate.
pub trait Scalar:
    Num + Copy + Neg<Output = Self> + FromPrimitive + ToPrimitive + PartialOrd + Debug + Send + Sync + 'static
{
    /// Embeds a small non-negative integer (exponents, multiplicities).
    fn from_count(k: u32) -> Self {
        Self::from_u32(k).expect("small integers are representable")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl<T> Scalar for T where
    T: Num + Copy + Neg<Output = T> + FromPrimitive + ToPrimitive + PartialOrd + Debug + Send + Sync + 'static
{
}

/// Floating-point scalar.
pub trait Real: Scalar + num_traits::Float {}

impl<T> Real for T where T: Scalar + num_traits::Float {}
