//! Value types that tables over the tree and the horocycle space may hold.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

/// A ring element stored in vertex and horocycle tables.
///
/// Integer tables keep the Radon-level identities exact; complex tables carry
/// everything downstream of the frequency side.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + AddAssign
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn to_complex(&self) -> Complex64;
}

impl Scalar for i64 {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self as f64, 0.0)
    }
}

impl Scalar for f64 {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn to_complex(&self) -> Complex64 {
        *self
    }
}
