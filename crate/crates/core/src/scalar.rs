//! Scalar abstraction for score vectors.
//!
//! Every ranking and metric routine is generic over [`Scalar`], so the same
//! code runs in `f64` (the default used by the CLI and the tolerance-pinned
//! tests) or `f32` for memory-constrained runs.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point type usable for influence scores.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only if the target type cannot
    /// represent finite `f64` values at all.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("scalar conversion from f64")
    }

    #[inline]
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("scalar conversion from u64")
    }

    #[inline]
    fn from_len(len: usize) -> Self {
        Self::from_usize(len).expect("scalar conversion from usize")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Neumaier-compensated sum. Used wherever the unit-sum invariant of a score
/// vector is established, so the normalizer itself does not drift with `n`.
pub fn compensated_sum<S: Scalar>(values: &[S]) -> S {
    let mut sum = S::zero();
    let mut carry = S::zero();
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// L1 distance between two equally sized vectors.
pub fn l1_distance<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum()
}

/// Rescales `values` to unit sum. A vector with zero (or non-finite) mass is
/// replaced by the uniform distribution so the unit-sum invariant always
/// holds after normalization.
pub fn normalize<S: Scalar>(values: &mut [S]) {
    if values.is_empty() {
        return;
    }
    let total = compensated_sum(values);
    if total > S::zero() && total.is_finite() {
        for v in values.iter_mut() {
            *v /= total;
        }
    } else {
        let uniform = S::one() / S::from_len(values.len());
        values.iter_mut().for_each(|v| *v = uniform);
    }
}
