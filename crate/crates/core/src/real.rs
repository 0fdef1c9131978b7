use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar used by the analytic modules.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal. Every literal used in this crate is
    /// representable (possibly rounded) in both `f32` and `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Sign that returns zero at zero, unlike [`Float::signum`].
    #[inline]
    fn sign0(self) -> Self {
        if self > Self::zero() {
            Self::one()
        } else if self < Self::zero() {
            -Self::one()
        } else {
            Self::zero()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sign(x)|x|^p`, the odd extension of a power.
#[inline]
pub fn odd_pow<T: Real>(x: T, p: T) -> T {
    x.sign0() * x.abs().powf(p)
}

/// `|x|^p`, the even extension of a power, with `0^0 = 1`.
#[inline]
pub fn even_pow<T: Real>(x: T, p: T) -> T {
    if p == T::zero() {
        T::one()
    } else {
        x.abs().powf(p)
    }
}

/// `coef * |x|^p`, returning zero whenever `coef` is zero so that vanishing
/// derivative terms never evaluate `0^negative`.
#[inline]
pub fn scaled_even_pow<T: Real>(coef: T, x: T, p: T) -> T {
    if coef == T::zero() {
        T::zero()
    } else {
        coef * even_pow(x, p)
    }
}

/// `coef * sign(x)|x|^p` with the same zero-coefficient convention.
#[inline]
pub fn scaled_odd_pow<T: Real>(coef: T, x: T, p: T) -> T {
    if coef == T::zero() {
        T::zero()
    } else {
        coef * odd_pow(x, p)
    }
}
