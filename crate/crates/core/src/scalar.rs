use core::fmt;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric field used by the estimation arithmetic.
///
/// Everything the estimators compute is built from ratios of counts, so any
/// ordered field with conversions from the primitive integers works: `f64`
/// (the default throughout the crate), `f32`, or an exact rational type such
/// as `num_rational::BigRational` when a test pins a closed-form value.
pub trait Scalar: Num + FromPrimitive + ToPrimitive + PartialOrd + Clone + fmt::Debug {}

impl<T> Scalar for T where T: Num + FromPrimitive + ToPrimitive + PartialOrd + Clone + fmt::Debug {}

/// Count-to-scalar conversion; counts in this crate stay far below 2^53.
pub(crate) fn from_count<T: Scalar>(count: usize) -> T {
    T::from_usize(count).expect("count representable in scalar type")
}

pub(crate) fn from_count_u64<T: Scalar>(count: u64) -> T {
    T::from_u64(count).expect("count representable in scalar type")
}

/// `|a - b|` without requiring `Neg` (the scalar may be unsigned).
pub(crate) fn abs_diff<T: Scalar>(a: T, b: T) -> T {
    if a >= b {
        a - b
    } else {
        b - a
    }
}
