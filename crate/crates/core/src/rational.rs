use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::Result;
use crate::scalar::Scalar;

/// Gaussian rational `re + im*i` with arbitrary-precision rational parts.
/// The exact coefficient field used by the identity checks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// Real rational `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    /// Purely imaginary rational `(num/den) i`.
    pub fn imag_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::new(BigInt::from(num), BigInt::from(den)),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Squared modulus `re^2 + im^2`, an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Rounded view for reporting.
    pub fn to_complex_f64(&self) -> num::complex::Complex64 {
        num::complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl std::ops::Add for GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: GaussRational) -> GaussRational {
        GaussRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl std::ops::Sub for GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: GaussRational) -> GaussRational {
        GaussRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl std::ops::Mul for GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl std::ops::Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn one() -> Self {
        GaussRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        GaussRational::ratio(num, den)
    }

    fn i() -> Self {
        GaussRational::imag_ratio(1, 1)
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn abs_f64(&self) -> f64 {
        self.norm_sqr().to_f64().map(f64::sqrt).unwrap_or(f64::NAN)
    }

    fn re_f64(&self) -> f64 {
        self.re.to_f64().unwrap_or(f64::NAN)
    }

    fn im_f64(&self) -> f64 {
        self.im.to_f64().unwrap_or(f64::NAN)
    }

    fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn try_inv(&self) -> Result<Self> {
        if Scalar::is_zero(self) {
            return Err(crate::Error::DivisionByZero("GaussRational::try_inv"));
        }
        let n = self.norm_sqr();
        Ok(GaussRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    fn try_sqrt(&self) -> Result<Self> {
        if Scalar::is_zero(self) {
            return Ok(Scalar::zero());
        }
        if !self.im.is_zero() {
            return Err(crate::Error::InvalidParam(
                "exact square root of a non-real value".into(),
            ));
        }
        let mag = self.re.abs();
        match rational_sqrt(&mag) {
            Some(root) if self.re.is_positive() => Ok(GaussRational {
                re: root,
                im: BigRational::zero(),
            }),
            Some(root) => Ok(GaussRational {
                re: BigRational::zero(),
                im: root,
            }),
            None => Err(crate::Error::InvalidParam(format!(
                "{} has no exact rational square root",
                self.re
            ))),
        }
    }
}

/// Exact square root of a nonnegative rational, if one exists.
fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    let num = x.numer().sqrt();
    let den = x.denom().sqrt();
    if &(&num * &num) == x.numer() && &(&den * &den) == x.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

impl std::fmt::Display for GaussRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}
