//! Floating-point scalar abstraction.

use std::fmt::{Debug, Display};

use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used by the floating-point diagnostics: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to Real")
    }

    /// Nearest representable value of an exact rational.
    fn from_rational(r: &BigRational) -> Self {
        Self::of(r.to_f64().unwrap_or(f64::NAN))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Standard normal distribution function.
pub fn normal_cdf<F: Real>(x: F) -> F {
    let x = x.to_f64_lossy();
    F::of(0.5 * libm::erfc(-x / std::f64::consts::SQRT_2))
}

/// Standard normal density.
pub fn normal_pdf<F: Real>(x: F) -> F {
    let two = F::of(2.0);
    (-(x * x) / two).exp() / (two * F::PI()).sqrt()
}
