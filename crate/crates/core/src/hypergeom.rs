//! Terminating Gauss hypergeometric machinery: the closed forms for the
//! complementary Romanovski-Routh families and the second-order ODE check.
//!
//! Coefficient assembly runs in exact Gaussian-rational arithmetic on the
//! binary-exact rational images of the double inputs and rounds once per
//! coefficient at the end; the naive double summation loses ~6 digits to
//! cancellation near n = 20 and cannot meet the library's tolerances.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::Zero;

use crate::error::{Error, Result};
use crate::poly::{CPoly, QPoly};
use crate::rational::GaussRational;
use crate::recurrence::{gcrr_params, generate, GCRRSpec};
use crate::scalar::Scalar;

/// Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1.
pub fn pochhammer<T: Scalar>(a: T, n: usize) -> T {
    let mut out = T::one();
    for k in 0..n {
        out = out * (a.clone() + T::from_ratio(k as i64, 1));
    }
    out
}

/// Descriptor of a terminating series
/// `prefactor * sum_{k=0}^{n} (-n)_k (b)_k / ((c)_k k!) z^k`.
#[derive(Clone, Copy, Debug)]
pub struct HypSeriesSpec {
    pub n: usize,
    pub b: Complex64,
    pub c: Complex64,
    pub prefactor: Complex64,
}

impl HypSeriesSpec {
    /// Errors when a lower-parameter pole lands inside the terminating range.
    pub fn validate(&self) -> Result<()> {
        for k in 0..self.n {
            if (self.c + k as f64).norm() < 1e-100 {
                return Err(Error::SeriesPole {
                    name: "hyp2f1",
                    k,
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.prefactor * hyp2f1_terminating(self.n, self.b, self.c, z)?)
    }
}

/// 2F1(-n, b; c; z) summed in ascending k with the term ratio recursion.
/// Terms stop at k = n, so only c + k for k < n can pole.
pub fn hyp2f1_terminating(n: usize, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = k as f64;
        let den = c + kf;
        if den.norm() < 1e-100 {
            return Err(Error::SeriesPole {
                name: "hyp2f1",
                k,
            });
        }
        term *= (Complex64::new(kf - n as f64, 0.0) * (b + kf)) / (den * (kf + 1.0));
        term *= z;
        sum += term;
    }
    Ok(sum)
}

fn big_ratio(v: f64, name: &str) -> Result<BigRational> {
    BigRational::from_float(v)
        .ok_or_else(|| Error::InvalidParam(format!("{name} must be finite, got {v}")))
}

fn gq(re: BigRational, im: BigRational) -> GaussRational {
    GaussRational::new(re, im)
}

fn gq_int(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

fn gq_div(a: GaussRational, b: GaussRational) -> Result<GaussRational> {
    Ok(a * b.try_inv()?)
}

/// Exact 2F1(-n, b; c; zp(x)) with a polynomial argument.
fn hyp2f1_poly_exact(
    n: usize,
    b: GaussRational,
    c: GaussRational,
    zp: &QPoly,
) -> Result<QPoly> {
    for k in 0..n {
        if (c.clone() + gq_int(k as i64)).is_zero() {
            return Err(Error::SeriesPole {
                name: "hyp2f1",
                k,
            });
        }
    }
    let mut term = GaussRational::one();
    let mut zpow = QPoly::one();
    let mut sum = QPoly::one();
    for k in 0..n {
        let kq = gq_int(k as i64);
        let num = gq_int(k as i64 - n as i64) * (b.clone() + kq.clone());
        let den = (c.clone() + kq.clone()) * (kq + GaussRational::one());
        term = gq_div(term * num, den)?;
        zpow = zpow.mul(zp);
        sum = sum.add(&zpow.scale(term.clone()));
    }
    Ok(sum)
}

/// Exact closed form of P_n (or the rescaled P'_n) at omega = 1:
/// 2^{-n} [(2z)_n/(z)_n] sum_k (-n)_k (e)_k / ((2z)_k k!) (-2i)^k (x-i)^{n-k}
/// with e = zeta + i theta; the rescaled variant drops the Pochhammer ratio.
fn gcrr_closed_exact(
    zeta: &BigRational,
    theta: &BigRational,
    n: usize,
    scaled: bool,
) -> Result<QPoly> {
    let e = gq(zeta.clone(), theta.clone());
    let two_zeta = gq(zeta + zeta, BigRational::zero());
    let half_pow = GaussRational::new(
        BigRational::new(BigInt::from(1), BigInt::from(2u8).pow(n as u32)),
        BigRational::zero(),
    );
    let pref = if scaled {
        half_pow
    } else {
        let ratio = gq_div(
            pochhammer(two_zeta.clone(), n),
            pochhammer(gq(zeta.clone(), BigRational::zero()), n),
        )?;
        ratio * half_pow
    };
    // powers of (x - i)
    let base = QPoly::new(vec![-GaussRational::i(), GaussRational::one()]);
    let mut powers = Vec::with_capacity(n + 1);
    powers.push(QPoly::one());
    for k in 0..n {
        let next = powers[k].mul(&base);
        powers.push(next);
    }
    let minus_2i = GaussRational::imag_ratio(-2, 1);
    let mut term = GaussRational::one();
    let mut out = QPoly::zero();
    for k in 0..=n {
        out = out.add(&powers[n - k].scale(pref.clone() * term.clone()));
        if k < n {
            let kq = gq_int(k as i64);
            let num = gq_int(k as i64 - n as i64) * (e.clone() + kq.clone());
            let den = (two_zeta.clone() + kq.clone()) * (kq + GaussRational::one());
            term = gq_div(term * num, den)? * minus_2i.clone();
        }
    }
    Ok(out)
}

fn require_unit_omega(spec: &GCRRSpec) -> Result<()> {
    if spec.omega != 1.0 {
        return Err(Error::HypothesisViolation(format!(
            "closed form is validated only at omega = 1, got {}",
            spec.omega
        )));
    }
    Ok(())
}

/// Degree-n member of the family described by `spec` built from its
/// terminating hypergeometric series (omega = 1 only). The result is checked
/// coefficient-wise against the recurrence before being returned.
pub fn gcrr_closed_form(spec: &GCRRSpec, n: usize) -> Result<CPoly> {
    require_unit_omega(spec)?;
    let params = gcrr_params(spec)?; // validates zeta, theta
    let zeta = big_ratio(spec.zeta, "zeta")?;
    let theta = big_ratio(spec.theta, "theta")?;
    let closed = gcrr_closed_exact(&zeta, &theta, n, spec.scaled)?.to_complex();
    let rec = generate(&params, n)?;
    let dev = closed.max_abs_diff(&rec[n]);
    if dev > 1e-12 {
        return Err(Error::HypothesisViolation(format!(
            "closed form deviates from recurrence by {dev:.3e} at degree {n}"
        )));
    }
    Ok(closed)
}

/// Max coefficient deviation between the series construction and the
/// recurrence over all degrees k <= n.
pub fn closed_form_deviation(spec: &GCRRSpec, n: usize) -> Result<f64> {
    require_unit_omega(spec)?;
    let params = gcrr_params(spec)?;
    let zeta = big_ratio(spec.zeta, "zeta")?;
    let theta = big_ratio(spec.theta, "theta")?;
    let rec = generate(&params, n)?;
    let mut dev = 0.0f64;
    for k in 0..=n {
        let closed = gcrr_closed_exact(&zeta, &theta, k, spec.scaled)?.to_complex();
        dev = dev.max(closed.max_abs_diff(&rec[k]));
    }
    Ok(dev)
}

/// Series descriptor for Q_n: prefactor (-2 i omega)^n (beta - n + i alpha/2)_n,
/// parameters b = 2 beta - n - 1, c = beta - n + i alpha/2, argument
/// (omega - i x)/(2 omega).
pub fn qn_series_spec(alpha: f64, beta: f64, omega: f64, n: usize) -> HypSeriesSpec {
    let c = Complex64::new(beta - n as f64, alpha / 2.0);
    let pref = Complex64::new(0.0, -2.0 * omega).powu(n as u32)
        * pochhammer(c, n);
    HypSeriesSpec {
        n,
        b: Complex64::new(2.0 * beta - n as f64 - 1.0, 0.0),
        c,
        prefactor: pref,
    }
}

/// Q_n as a polynomial, assembled exactly. Errors when the Pochhammer
/// prefactor vanishes (degenerate degree) or a series pole occurs.
pub fn qn_closed_form(alpha: f64, beta: f64, omega: f64, n: usize) -> Result<CPoly> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParam(format!(
            "omega must be positive and finite, got {omega}"
        )));
    }
    let alpha_q = big_ratio(alpha, "alpha")?;
    let beta_q = big_ratio(beta, "beta")?;
    let omega_q = big_ratio(omega, "omega")?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let c = gq(
        &beta_q - BigRational::from_integer(BigInt::from(n)),
        &alpha_q * &half,
    );
    let poch = pochhammer(c.clone(), n);
    if Scalar::is_zero(&poch) {
        return Err(Error::InvalidParam(
            "vanishing Pochhammer prefactor: Q_n degenerates at these (alpha, beta, n)".into(),
        ));
    }
    let b = gq(
        &beta_q + &beta_q - BigRational::from_integer(BigInt::from(n as i64 + 1)),
        BigRational::zero(),
    );
    // argument (omega - i x)/(2 omega) = 1/2 - i x/(2 omega)
    let arg = QPoly::new(vec![
        GaussRational::new(half.clone(), BigRational::zero()),
        GaussRational::new(BigRational::zero(), -(&half / &omega_q)),
    ]);
    let series = hyp2f1_poly_exact(n, b, c, &arg)?;
    let minus_2i_omega = GaussRational::new(BigRational::zero(), -(&omega_q + &omega_q));
    let mut pref = poch;
    for _ in 0..n {
        pref = pref * minus_2i_omega.clone();
    }
    Ok(series.scale(pref).to_complex())
}

/// Max coefficient deviation of the map from Q_n^{(2 theta, -zeta+1)} down to
/// the unscaled P_n, i.e. P_n = (-1)^n / (2^n (zeta)_n) Q_n. The identity is
/// checked only where it holds: omega = 1, or theta = 0.
pub fn qn_connection_residual(spec: &GCRRSpec, n: usize) -> Result<f64> {
    if spec.omega != 1.0 && spec.theta != 0.0 {
        return Err(Error::HypothesisViolation(
            "Q_n connection is validated only for omega = 1 or theta = 0".into(),
        ));
    }
    let unscaled = GCRRSpec { scaled: false, ..*spec };
    let params = gcrr_params(&unscaled)?;
    let rec = generate(&params, n)?;
    let q = qn_closed_form(2.0 * spec.theta, -spec.zeta + 1.0, spec.omega, n)?;
    let zeta_poch = pochhammer(Complex64::new(spec.zeta, 0.0), n);
    if zeta_poch.norm() < 1e-100 {
        return Err(Error::InvalidParam("(zeta)_n vanished".into()));
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let scale = Complex64::new(sign / 2f64.powi(n as i32), 0.0) / zeta_poch;
    Ok(q.scale(scale).max_abs_diff(&rec[n]))
}

/// Residual of the second-order equation satisfied by the degree-n member:
/// (x^2 + w^2) y'' + (2 b x + a w) y' - n (n + 2 b - 1) y with a = 2 theta,
/// b = -zeta + 1 - n. Zero polynomial expected (validated at omega = 1, or
/// theta = 0, like the closed forms).
pub fn ode_residual(spec: &GCRRSpec, n: usize) -> Result<CPoly> {
    let params = gcrr_params(spec)?;
    let p = generate(&params, n)?.pop().unwrap();
    let a = 2.0 * spec.theta;
    let b = -spec.zeta + 1.0 - n as f64;
    let w = spec.omega;
    let quad = CPoly::new(vec![
        Complex64::new(w * w, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]);
    let first = CPoly::new(vec![
        Complex64::new(a * w, 0.0),
        Complex64::new(2.0 * b, 0.0),
    ]);
    let lambda = Complex64::new(n as f64 * (n as f64 + 2.0 * b - 1.0), 0.0);
    let out = quad
        .mul(&p.derivative().derivative())
        .add(&first.mul(&p.derivative()))
        .sub(&p.scale(lambda));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_values() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(pochhammer(one, 2).re, 2.0);
        assert_eq!(pochhammer(Complex64::new(2.0, 0.0), 2).re, 6.0);
        assert_eq!(pochhammer(Complex64::new(7.0, 3.0), 0).re, 1.0);
        assert_eq!(pochhammer(Complex64::new(-3.0, 0.0), 5).norm(), 0.0);
        assert_eq!(
            pochhammer(GaussRational::ratio(5, 2), 2),
            GaussRational::ratio(35, 4)
        );
    }

    #[test]
    fn terminating_series_small_cases() {
        let b = Complex64::new(3.0, 0.5);
        let c = Complex64::new(-2.5, 1.0);
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(hyp2f1_terminating(0, b, c, z).unwrap().re, 1.0);
        let one_term = hyp2f1_terminating(1, b, c, z).unwrap();
        assert!((one_term - (Complex64::new(1.0, 0.0) - b / c * z)).norm() < 1e-15);
        // b = c collapses to (1 - z)^2 at n = 2
        let collapse = hyp2f1_terminating(2, b, b, z).unwrap();
        let expect = (Complex64::new(1.0, 0.0) - z).powu(2);
        assert!((collapse - expect).norm() < 1e-15);
    }

    #[test]
    fn series_pole_is_reported() {
        // c = -1 poles at k = 1, reachable when n >= 2
        let c = Complex64::new(-1.0, 0.0);
        let b = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.5, 0.0);
        assert!(matches!(
            hyp2f1_terminating(3, b, c, z),
            Err(Error::SeriesPole { k: 1, .. })
        ));
        // but a series terminating before the pole is fine
        assert!(hyp2f1_terminating(1, b, c, z).is_ok());
        assert!(HypSeriesSpec {
            n: 3,
            b,
            c,
            prefactor: Complex64::new(1.0, 0.0)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn closed_form_matches_recurrence_anchors() {
        let spec = GCRRSpec::new(1.0, 0.0, 1.0, false);
        let p0 = gcrr_closed_form(&spec, 0).unwrap();
        assert_eq!(p0.coeffs(), &[Complex64::new(1.0, 0.0)]);
        let p1 = gcrr_closed_form(&spec, 1).unwrap();
        assert!((p1.coeff(1).re - 1.0).abs() < 1e-15 && p1.coeff(0).norm() < 1e-15);
        let p2 = gcrr_closed_form(&spec, 2).unwrap();
        assert!((p2.coeff(2).re - 0.75).abs() < 1e-15);
        assert!((p2.coeff(0).re + 0.25).abs() < 1e-15);
    }

    #[test]
    fn closed_form_deviation_over_grid() {
        for &(zeta, theta) in &[(1.0, 0.0), (1.0, 0.7), (2.5, 0.0), (2.5, 0.7)] {
            let spec = GCRRSpec::new(zeta, theta, 1.0, false);
            let dev = closed_form_deviation(&spec, 12).unwrap();
            assert!(dev < 1e-13, "dev {dev:.3e} at zeta={zeta} theta={theta}");
        }
        // scaled variant shares the kernel
        let dev = closed_form_deviation(&GCRRSpec::new(2.5, 0.7, 1.0, true), 10).unwrap();
        assert!(dev < 1e-13);
    }

    #[test]
    fn closed_form_rejects_other_omega() {
        let spec = GCRRSpec::new(1.0, 0.0, 2.0, false);
        assert!(matches!(
            gcrr_closed_form(&spec, 3),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn qn_anchor_value() {
        // alpha = 0, beta = 0, omega = 1, n = 1: Q_1 = -2x
        let q1 = qn_closed_form(0.0, 0.0, 1.0, 1).unwrap();
        assert!(q1.coeff(0).norm() < 1e-15);
        assert!((q1.coeff(1) - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        assert_eq!(qn_closed_form(0.0, 0.0, 1.0, 0).unwrap().coeff(0).re, 1.0);
        // beta = 1, n = 1 makes the prefactor (0)_1 vanish
        assert!(qn_closed_form(0.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn qn_series_spec_agrees_with_polynomial() {
        let (alpha, beta, omega, n) = (1.4, -1.5, 1.0, 5);
        let q = qn_closed_form(alpha, beta, omega, n).unwrap();
        let spec = qn_series_spec(alpha, beta, omega, n);
        for &x in &[0.3, -1.7, 2.2] {
            let z = Complex64::new(0.5, -x / (2.0 * omega));
            let via_series = spec.eval(z).unwrap();
            let via_poly = q.eval(Complex64::new(x, 0.0));
            assert!(
                (via_series - via_poly).norm() < 1e-10 * (1.0 + via_poly.norm()),
                "x={x}: {via_series} vs {via_poly}"
            );
        }
    }

    #[test]
    fn qn_connects_to_family() {
        for &(zeta, theta, omega) in &[(1.0, 0.0, 1.0), (2.5, 0.7, 1.0), (1.5, 0.0, 2.0)] {
            let spec = GCRRSpec::new(zeta, theta, omega, false);
            for n in 0..=8 {
                let dev = qn_connection_residual(&spec, n).unwrap();
                assert!(dev < 1e-12, "dev {dev:.3e} zeta={zeta} theta={theta} omega={omega} n={n}");
            }
        }
        // outside the validated scope the checker refuses
        assert!(qn_connection_residual(&GCRRSpec::new(1.0, 0.7, 2.0, false), 3).is_err());
    }

    #[test]
    fn ode_residual_vanishes_on_grid() {
        for &(zeta, theta) in &[(1.0, 0.0), (1.0, 0.7), (2.5, 0.7)] {
            let spec = GCRRSpec::new(zeta, theta, 1.0, false);
            for n in 0..=12 {
                let r = ode_residual(&spec, n).unwrap();
                assert!(
                    r.max_abs() < 1e-10,
                    "residual {:.3e} at zeta={zeta} theta={theta} n={n}",
                    r.max_abs()
                );
            }
        }
        // omega != 1 with theta = 0 also satisfies the equation
        let r = ode_residual(&GCRRSpec::new(1.5, 0.0, 2.0, false), 6).unwrap();
        assert!(r.max_abs() < 1e-10);
    }
}
