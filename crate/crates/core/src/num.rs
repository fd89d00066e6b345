//! Scalar abstraction and deterministic reductions.
//!
//! Every floating-point reduction in this crate goes through the pairwise
//! summation routines below so that two runs on identical input produce
//! bit-identical results regardless of how callers assemble their data.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the numerics are generic over: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex value over a generic scalar.
pub type C<T> = Complex<T>;

/// Convert an f64 constant into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Complex value from f64 parts.
#[inline]
pub fn complex<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(real(re), real(im))
}

const PAIRWISE_LEAF: usize = 16;

fn pairwise_rec<T: Real, F: Fn(usize) -> C<T>>(offset: usize, len: usize, term: &F) -> C<T> {
    if len <= PAIRWISE_LEAF {
        let mut acc = C::new(T::zero(), T::zero());
        for i in 0..len {
            acc = acc + term(offset + i);
        }
        acc
    } else {
        let half = len / 2;
        pairwise_rec(offset, half, term) + pairwise_rec(offset + half, len - half, term)
    }
}

/// Pairwise sum of `term(0) + ... + term(len-1)` in a fixed association order.
pub fn pairwise_sum_by<T: Real, F: Fn(usize) -> C<T>>(len: usize, term: F) -> C<T> {
    pairwise_rec(0, len, &term)
}

/// Pairwise sum of a complex slice.
pub fn pairwise_sum<T: Real>(values: &[C<T>]) -> C<T> {
    pairwise_sum_by(values.len(), |i| values[i])
}

/// Pairwise sum of a real-valued term function.
pub fn pairwise_sum_real_by<T: Real, F: Fn(usize) -> T>(len: usize, term: F) -> T {
    pairwise_sum_by(len, |i| C::new(term(i), T::zero())).re
}
