//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the library is generic over (`f32` or `f64`).
///
/// Special functions that have no portable closed form (`erfc`) are routed
/// through `libm` per concrete type.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Convert an `f64` literal. Values outside the type's range saturate.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| if v > 0.0 { Self::infinity() } else { Self::neg_infinity() })
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest positive value used in place of zero for generator floors.
    #[inline]
    fn positivity_floor() -> Self {
        Self::lit(1e-300).max(Self::min_positive_value())
    }

    /// Number of binary octaves `2^-k` that stay in the normal range.
    #[inline]
    fn octave_depth() -> usize {
        let e = -Self::min_positive_value().log2().as_f64();
        (e as usize).saturating_sub(3)
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

/// Point of `[0, 1]` stored together with its distance to 1.
///
/// Points near 1 keep `comp = 1 - x` exactly, points near 0 keep `x` exactly;
/// the other coordinate is derived. This lets flows and generators resolve both
/// endpoints to full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pos<F> {
    pub x: F,
    pub comp: F,
}

impl<F: Real> Pos<F> {
    #[inline]
    pub fn lower(x: F) -> Self {
        Pos { x, comp: F::one() - x }
    }

    #[inline]
    pub fn upper(comp: F) -> Self {
        Pos { x: F::one() - comp, comp }
    }

    /// Choose the precise representation for a plain coordinate.
    #[inline]
    pub fn from_x(x: F) -> Self {
        if x <= F::half() {
            Self::lower(x)
        } else {
            Self::upper(F::one() - x)
        }
    }

    #[inline]
    pub fn is_upper(&self) -> bool {
        self.x > F::half()
    }

    /// Reflection `x -> 1 - x`.
    #[inline]
    pub fn reflect(self) -> Self {
        Pos { x: self.comp, comp: self.x }
    }

    /// `self.x - other.x` computed from whichever coordinates are exact.
    #[inline]
    pub fn minus(self, other: Pos<F>) -> F {
        if self.is_upper() && other.is_upper() {
            other.comp - self.comp
        } else {
            self.x - other.x
        }
    }

    #[inline]
    pub fn zero() -> Self {
        Pos { x: F::zero(), comp: F::one() }
    }

    #[inline]
    pub fn one() -> Self {
        Pos { x: F::one(), comp: F::zero() }
    }
}
