//! Scalar abstraction shared by every model in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the models are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or draw.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable in every Real")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Speed of light in vacuum (m/s).
pub fn speed_of_light<T: Real>() -> T {
    T::lit(299_792_458.0)
}

/// Boltzmann constant (J/K).
pub fn boltzmann<T: Real>() -> T {
    T::lit(1.380_649e-23)
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// dBm to watts.
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    db_to_linear(dbm) * T::lit(1e-3)
}

pub fn watts_to_dbm<T: Real>(w: T) -> T {
    linear_to_db(w * T::lit(1e3))
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::TAU();
    let mut w = a % two_pi;
    if w > T::PI() {
        w = w - two_pi;
    } else if w <= -T::PI() {
        w = w + two_pi;
    }
    w
}
