//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the toolkit is generic over (`f32`, `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + std::iter::Sum
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + std::iter::Sum
        + 'static
{
}

/// Complex number over the toolkit scalar.
pub type C<T> = Complex<T>;

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(lit(re), lit(im))
}

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x - two_pi * ((x + T::PI()) / two_pi).floor();
    if y <= -T::PI() {
        y = y + two_pi;
    }
    y
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum exp(x_i))` over an iterator.
pub fn log_sum_exp<T: Real, I: IntoIterator<Item = T>>(xs: I) -> T {
    let v: Vec<T> = xs.into_iter().collect();
    let m = v.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() || !m.is_finite() {
        return m;
    }
    let s: T = v.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Winding number of a closed polyline about `p`, from summed argument increments.
pub fn winding_number<T: Real>(curve: &[C<T>], p: C<T>) -> T {
    if curve.len() < 2 {
        return T::zero();
    }
    let mut total = T::zero();
    for i in 0..curve.len() {
        let a = curve[i] - p;
        let b = curve[(i + 1) % curve.len()] - p;
        total = total + (b / a).arg();
    }
    total / (T::PI() + T::PI())
}
