//! Scalar abstraction shared by every module.
//!
//! All probability arithmetic is generic over [`Real`], which is implemented
//! for `f32` and `f64`. Exact combinatorics live in [`crate::combin`] and use
//! unbounded integers instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type used for probabilities and information quantities.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Tolerance for checking that a pmf sums to one.
    fn sum_tolerance() -> Self {
        let eps = Self::epsilon() * Self::from_f64(64.0).unwrap();
        eps.max(Self::from_f64(1e-12).unwrap())
    }

    /// Relative tolerance used to decide that two accumulated quantities tie.
    fn tie_tolerance() -> Self {
        let eps = Self::epsilon() * Self::from_f64(1024.0).unwrap();
        eps.max(Self::from_f64(1e-12).unwrap())
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

/// `x * log2(x)` with the convention `0 * log 0 = 0`.
#[inline]
pub fn xlog2x<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// True when `a` and `b` agree up to the relative tie tolerance.
pub fn nearly_equal<T: Real>(a: T, b: T) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= T::tie_tolerance() * scale
}

/// Base-2 logarithm of an unbounded integer; `-inf` for zero.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    top.to_f64().unwrap().log2() + shift as f64
}

/// Converts an unbounded integer to `T` (saturating to infinity).
pub fn biguint_to_real<T: Real>(x: &BigUint) -> T {
    match x.to_f64() {
        Some(v) => lit(v),
        None => T::infinity(),
    }
}

/// Neumaier-compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Accumulates `sum_i 2^{l_i}` given the base-2 logarithms `l_i`.
///
/// Terms are rescaled by the running maximum so that sums of probabilities
/// far below the underflow threshold (e.g. per-type masses at n = 10^4) are
/// still represented exactly in the log domain.
#[derive(Clone, Debug)]
pub struct Log2Sum<T> {
    max: T,
    acc: CompensatedSum<T>,
}

impl<T: Real> Default for Log2Sum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Log2Sum<T> {
    pub fn new() -> Self {
        Self { max: T::neg_infinity(), acc: CompensatedSum::new() }
    }

    pub fn add_log2(&mut self, l: T) {
        if l == T::neg_infinity() {
            return;
        }
        if l > self.max {
            if self.max != T::neg_infinity() {
                let scale = (self.max - l).exp2();
                let old = self.acc.value() * scale;
                self.acc = CompensatedSum::new();
                self.acc.add(old);
            }
            self.max = l;
        }
        self.acc.add((l - self.max).exp2());
    }

    /// log2 of the accumulated sum (`-inf` when empty).
    pub fn log2(&self) -> T {
        if self.max == T::neg_infinity() {
            return T::neg_infinity();
        }
        self.max + self.acc.value().log2()
    }

    /// The accumulated sum itself.
    pub fn value(&self) -> T {
        self.log2().exp2()
    }
}
