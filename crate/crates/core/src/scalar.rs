use num::complex::Complex64;

use crate::error::Result;

/// Coefficient field for polynomials and recurrences. Implemented by
/// `Complex64` (floating) and [`crate::rational::GaussRational`] (exact).
///
/// The two implementations share every identity checked in this crate, so
/// generic code can be tested exactly in the rational field and then run in
/// doubles for the parts that need transcendental data.
pub trait Scalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    /// True when arithmetic in this field is exact (no rounding).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;

    /// The rational number `num/den` embedded in the field.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// The imaginary unit.
    fn i() -> Self;

    fn is_zero(&self) -> bool;

    /// Absolute value as f64 (modulus for complex entries). For exact types
    /// this is a rounded view used only for reporting and trimming.
    fn abs_f64(&self) -> f64;

    /// Real part as f64 (rounded view for exact types).
    fn re_f64(&self) -> f64;

    /// Imaginary part as f64 (rounded view for exact types).
    fn im_f64(&self) -> f64;

    fn conj(&self) -> Self;

    /// Multiplicative inverse; errors on zero in the exact field.
    fn try_inv(&self) -> Result<Self>;

    /// Square root. Always available for floating entries (principal
    /// branch); in the exact field only values with an exactly
    /// representable root succeed.
    fn try_sqrt(&self) -> Result<Self>;
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }

    fn re_f64(&self) -> f64 {
        self.re
    }

    fn im_f64(&self) -> f64 {
        self.im
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(crate::Error::DivisionByZero("Complex64::try_inv"));
        }
        Ok(Complex64::new(1.0, 0.0) / self)
    }

    fn try_sqrt(&self) -> Result<Self> {
        Ok(self.sqrt())
    }
}
