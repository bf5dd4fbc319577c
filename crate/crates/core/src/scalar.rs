//! The numeric abstraction every exact-or-float routine in this crate is written against.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field element usable as a probability mass.
///
/// Implemented for [`BigRational`] (exact mode) and for `f64`/`f32` (float
/// mode). Equality is always the type's own `==`: exact for rationals,
/// bit-for-bit for floats. Only the normalization check gets any slack.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// Largest tolerated deviation of a total mass from one.
    fn mass_slack() -> Self;

    /// `|self - 1| <= mass_slack()`.
    fn is_unit_mass(&self) -> bool {
        (self.clone() - Self::one()).abs() <= Self::mass_slack()
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn mass_slack() -> Self {
        BigRational::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn mass_slack() -> Self {
        // 2^-40
        9.094_947_017_729_282e-13
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn mass_slack() -> Self {
        // 2^-16; single precision cannot hold 2^-40.
        1.525_878_9e-5
    }
}

/// Sum of a slice, starting from zero.
pub(crate) fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc + v.clone())
}

/// Absolute value of the difference of two scalars.
pub(crate) fn abs_diff<T: Scalar>(a: &T, b: &T) -> T {
    (a.clone() - b.clone()).abs()
}

/// Larger of two scalars under `PartialOrd`; the left value wins ties.
pub(crate) fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}
