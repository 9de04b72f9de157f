use num::complex::Complex64;

use crate::rational::GaussRational;
use crate::scalar::Scalar;

/// Dense univariate polynomial, coefficients in ascending degree order.
/// Kept in canonical form: no trailing zero coefficients, and the zero
/// polynomial is the empty coefficient vector.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T: Scalar> {
    coeffs: Vec<T>,
}

pub type CPoly = Poly<Complex64>;
pub type QPoly = Poly<GaussRational>;

/// Trailing coefficients at or below this fraction of the largest magnitude
/// are treated as artifacts of float cancellation and trimmed.
const TRIM_REL_TOL: f64 = 1e-14;

impl<T: Scalar> Poly<T> {
    /// Builds a polynomial from ascending coefficients and trims it to
    /// canonical form.
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![T::one()],
        }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly {
            coeffs: vec![T::zero(), T::one()],
        }
    }

    /// `x - c`.
    pub fn x_minus(c: T) -> Self {
        Poly::new(vec![-c, T::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// Leading coefficient, or None for the zero polynomial.
    pub fn leading(&self) -> Option<T> {
        self.coeffs.last().cloned()
    }

    fn trim(&mut self) {
        if T::EXACT {
            while self.coeffs.last().map_or(false, |c| c.is_zero()) {
                self.coeffs.pop();
            }
        } else {
            let max = self
                .coeffs
                .iter()
                .map(|c| c.abs_f64())
                .fold(0.0f64, f64::max);
            if max == 0.0 {
                self.coeffs.clear();
                return;
            }
            while self
                .coeffs
                .last()
                .map_or(false, |c| c.abs_f64() <= TRIM_REL_TOL * max)
            {
                self.coeffs.pop();
            }
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn add(&self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::new(out)
    }

    pub fn sub(&self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        Poly::new(out)
    }

    pub fn mul(&self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn derivative(&self) -> Poly<T> {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c.clone() * T::from_ratio(k as i64, 1));
        }
        Poly::new(out)
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs_f64())
            .fold(0.0f64, f64::max)
    }

    /// Largest coefficient-wise difference from `rhs`.
    pub fn max_abs_diff(&self, rhs: &Poly<T>) -> f64 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - rhs.coeff(k)).abs_f64())
            .fold(0.0f64, f64::max)
    }
}

impl Poly<Complex64> {
    /// Largest imaginary part across coefficients; a sequence that should be
    /// real up to roundoff reports its contamination here.
    pub fn max_imag_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0f64, f64::max)
    }
}

impl Poly<GaussRational> {
    /// Rounds each coefficient to a double once; the only rounding step when
    /// a polynomial is built in exact arithmetic.
    pub fn to_complex(&self) -> Poly<Complex64> {
        Poly::new(self.coeffs.iter().map(|c| c.to_complex_f64()).collect())
    }
}

/// Wronskian `p q' - q p'` of two polynomials.
pub fn wronskian<T: Scalar>(p: &Poly<T>, q: &Poly<T>) -> Poly<T> {
    p.mul(&q.derivative()).sub(&q.mul(&p.derivative()))
}

impl<T: Scalar> std::ops::Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        Poly::add(self, rhs)
    }
}

impl<T: Scalar> std::ops::Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        Poly::sub(self, rhs)
    }
}

impl<T: Scalar> std::ops::Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        Poly::mul(self, rhs)
    }
}

impl<T: Scalar> std::ops::Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}
