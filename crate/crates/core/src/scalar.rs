use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

/// Coefficient field of every computation in the crate.
///
/// Any characteristic-zero field type from `num-traits` works structurally;
/// exact results (fixed points reached bit-for-bit, rank computations) need an
/// exact field such as [`crate::Rational`].
pub trait Scalar:
    Clone + PartialEq + Debug + Display + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer is representable")
    }

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_int(p) / Self::from_int(q)
    }

    fn factorial(n: usize) -> Self {
        (1..=n as i64).fold(Self::one(), |acc, k| acc * Self::from_int(k))
    }

    fn inv_factorial(n: usize) -> Self {
        Self::one() / Self::factorial(n)
    }

    /// `(-1)^odd`
    fn sign(odd: bool) -> Self {
        if odd {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn binomial(n: usize, k: usize) -> Self {
        if k > n {
            return Self::zero();
        }
        Self::factorial(n) / (Self::factorial(k) * Self::factorial(n - k))
    }
}

impl<T> Scalar for T where
    T: Clone + PartialEq + Debug + Display + Num + Neg<Output = T> + FromPrimitive + Send + Sync + 'static
{
}
