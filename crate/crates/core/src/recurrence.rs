use std::sync::Arc;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Lazily evaluated coefficient sequence indexed by recurrence step.
pub type Provider<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;

/// The monic quadratic factor (x - a_k)(x - b_k) multiplying the lagged term.
#[derive(Clone)]
pub enum QuadFactor<T: Scalar> {
    /// Fixed conjugate roots +-i*omega, i.e. the factor x^2 + omega^2.
    Special { omega: T },
    /// Per-index roots a_k, b_k.
    General { a: Provider<T>, b: Provider<T> },
}

/// Coefficients of the three-term relation
/// `P_{k+1} = rho_k (x - c_k) P_k - d_k (x - a_k)(x - b_k) P_{k-1}`
/// started from P_0 = 1 (so P_1 = rho_0 (x - c_0) and d_0 never enters).
///
/// Sequences are closures over the index, optionally bounded by `limit` when
/// the family is backed by finite tables.
#[derive(Clone)]
pub struct RIIParams<T: Scalar> {
    rho: Provider<T>,
    c: Provider<T>,
    d: Provider<T>,
    quad: QuadFactor<T>,
    limit: Option<usize>,
}

impl<T: Scalar> std::fmt::Debug for RIIParams<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // coefficient providers are closures; show the shape, not the values
        let kind = if self.is_special() { "special" } else { "general" };
        write!(f, "RIIParams {{ quad: {kind}, limit: {:?} }}", self.limit)
    }
}

impl<T: Scalar> RIIParams<T> {
    pub fn new(rho: Provider<T>, c: Provider<T>, d: Provider<T>, quad: QuadFactor<T>) -> Self {
        RIIParams {
            rho,
            c,
            d,
            quad,
            limit: None,
        }
    }

    /// Declares the largest index for which the sequences are defined.
    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    /// Family backed by finite tables: `rho[k]`, `c[k]` for k >= 0 and
    /// `d[i] = d_{i+1}` for the lagged coefficients, which start at index 1.
    pub fn from_tables(rho: Vec<T>, c: Vec<T>, d: Vec<T>, quad: QuadFactor<T>) -> Result<Self> {
        if rho.is_empty() || c.is_empty() {
            return Err(Error::InvalidParam(
                "coefficient tables must cover index 0".into(),
            ));
        }
        let limit = (rho.len() - 1).min(c.len() - 1).min(d.len());
        let rho = Arc::new(rho);
        let c = Arc::new(c);
        let d = Arc::new(d);
        Ok(RIIParams {
            rho: Arc::new(move |k| rho[k].clone()),
            c: Arc::new(move |k| c[k].clone()),
            d: Arc::new(move |k| {
                assert!(k >= 1, "d_0 is not part of the recurrence");
                d[k - 1].clone()
            }),
            quad,
            limit: Some(limit),
        })
    }

    /// Replaces the centers c_k, keeping rho, d and the quadratic factor.
    pub fn with_centers(&self, c: Provider<T>, limit: Option<usize>) -> Self {
        RIIParams {
            rho: self.rho.clone(),
            c,
            d: self.d.clone(),
            quad: self.quad.clone(),
            limit: match (self.limit, limit) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }

    /// Errors when the sequences are not defined up to index `n`.
    pub fn check_limit(&self, n: usize) -> Result<()> {
        match self.limit {
            Some(m) if n > m => Err(Error::InvalidParam(format!(
                "family defined up to index {m}, index {n} requested"
            ))),
            _ => Ok(()),
        }
    }

    pub fn rho(&self, k: usize) -> T {
        (self.rho)(k)
    }

    pub fn c(&self, k: usize) -> T {
        (self.c)(k)
    }

    /// d_k for k >= 1. d_0 does not exist in the recurrence; callers that
    /// need a value at index 0 must use [`RIIParams::d_ext`].
    pub fn d(&self, k: usize) -> T {
        assert!(k >= 1, "d_0 is not part of the recurrence");
        (self.d)(k)
    }

    /// d_k extended to index 0 by the convention d_0 := d_1, the choice that
    /// keeps the perturbation identities consistent at the bottom index.
    pub fn d_ext(&self, k: usize) -> T {
        if k == 0 {
            (self.d)(1)
        } else {
            (self.d)(k)
        }
    }

    pub fn is_special(&self) -> bool {
        matches!(self.quad, QuadFactor::Special { .. })
    }

    /// omega for the special form, None otherwise.
    pub fn omega(&self) -> Option<T> {
        match &self.quad {
            QuadFactor::Special { omega } => Some(omega.clone()),
            QuadFactor::General { .. } => None,
        }
    }

    /// (a_k + b_k, a_k * b_k) of the quadratic factor at index k.
    pub fn quad_sum_prod(&self, k: usize) -> (T, T) {
        match &self.quad {
            QuadFactor::Special { omega } => (T::zero(), omega.clone() * omega.clone()),
            QuadFactor::General { a, b } => {
                let (a, b) = (a(k), b(k));
                (a.clone() + b.clone(), a * b)
            }
        }
    }

    /// The monic quadratic (x - a_k)(x - b_k) as a polynomial.
    pub fn quad_poly(&self, k: usize) -> Poly<T> {
        let (s, p) = self.quad_sum_prod(k);
        Poly::new(vec![p, -s, T::one()])
    }

    pub fn quad_eval(&self, k: usize, x: T) -> T {
        let (s, p) = self.quad_sum_prod(k);
        (x.clone() - s) * x + p
    }

    /// The same family with the quadratic factor rewritten in per-index root
    /// form. For the special form this pins a_k = i*omega, b_k = -i*omega.
    pub fn as_general(&self) -> Self {
        let quad = match &self.quad {
            QuadFactor::Special { omega } => {
                let root = T::i() * omega.clone();
                let a = root.clone();
                let b = -root;
                QuadFactor::General {
                    a: Arc::new(move |_| a.clone()),
                    b: Arc::new(move |_| b.clone()),
                }
            }
            g @ QuadFactor::General { .. } => g.clone(),
        };
        RIIParams {
            rho: self.rho.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
            quad,
            limit: self.limit,
        }
    }
}

/// Parameter set for the complementary Romanovski-Routh family and its
/// rescaled variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GCRRSpec {
    pub zeta: f64,
    pub theta: f64,
    pub omega: f64,
    pub scaled: bool,
}

impl GCRRSpec {
    pub fn new(zeta: f64, theta: f64, omega: f64, scaled: bool) -> Self {
        GCRRSpec {
            zeta,
            theta,
            omega,
            scaled,
        }
    }
}

/// Recurrence coefficients of the family described by `spec`:
/// unscaled uses rho = 1, c_k = theta/(zeta+k),
/// d_k = k(2 zeta + k - 1) / (4 (zeta+k)(zeta+k-1));
/// scaled uses rho_k = (zeta+k)/(2 zeta+k), the same centers, and
/// d_k = k / (4 (2 zeta + k)).
pub fn gcrr_params(spec: &GCRRSpec) -> Result<RIIParams<Complex64>> {
    if !(spec.zeta > 0.0) || !spec.zeta.is_finite() {
        return Err(Error::InvalidParam(format!(
            "zeta must be positive and finite, got {}",
            spec.zeta
        )));
    }
    if !(spec.omega > 0.0) || !spec.omega.is_finite() {
        return Err(Error::InvalidParam(format!(
            "omega must be positive and finite, got {}",
            spec.omega
        )));
    }
    if !spec.theta.is_finite() {
        return Err(Error::InvalidParam("theta must be finite".into()));
    }
    let (zeta, theta) = (spec.zeta, spec.theta);
    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }
    let c: Provider<Complex64> = Arc::new(move |k| re(theta / (zeta + k as f64)));
    let (rho, d): (Provider<Complex64>, Provider<Complex64>) = if spec.scaled {
        (
            Arc::new(move |k| re((zeta + k as f64) / (2.0 * zeta + k as f64))),
            Arc::new(move |k| {
                let k = k as f64;
                re(k / (4.0 * (2.0 * zeta + k)))
            }),
        )
    } else {
        (
            Arc::new(|_| re(1.0)),
            Arc::new(move |k| {
                let k = k as f64;
                re(k * (2.0 * zeta + k - 1.0) / (4.0 * (zeta + k) * (zeta + k - 1.0)))
            }),
        )
    };
    Ok(RIIParams::new(
        rho,
        c,
        d,
        QuadFactor::Special {
            omega: re(spec.omega),
        },
    ))
}

/// The constant family rho = 1, c = 0, d = 1/4 on x^2 + 1. Exact in any
/// coefficient field.
pub fn constant_params<T: Scalar + 'static>() -> RIIParams<T> {
    RIIParams::new(
        Arc::new(|_| T::one()),
        Arc::new(|_| T::zero()),
        Arc::new(|_| T::from_ratio(1, 4)),
        QuadFactor::Special { omega: T::one() },
    )
}

/// The scaled family at zeta = 1, theta = 0, omega = 1, whose coefficients
/// rho_k = (k+1)/(k+2), c_k = 0, d_k = k/(4(k+2)) are rational. Exact in any
/// coefficient field.
pub fn scaled_zeta1<T: Scalar + 'static>() -> RIIParams<T> {
    RIIParams::new(
        Arc::new(|k| T::from_ratio(k as i64 + 1, k as i64 + 2)),
        Arc::new(|_| T::zero()),
        Arc::new(|k| T::from_ratio(k as i64, 4 * (k as i64 + 2))),
        QuadFactor::Special { omega: T::one() },
    )
}

/// Generates P_0..P_n. Each step is checked to raise the degree by one.
pub fn generate<T: Scalar>(params: &RIIParams<T>, n: usize) -> Result<Vec<Poly<T>>> {
    if n >= 1 {
        params.check_limit(n - 1)?;
    }
    let mut seq = Vec::with_capacity(n + 1);
    seq.push(Poly::one());
    if n == 0 {
        return Ok(seq);
    }
    let p1 = Poly::x_minus(params.c(0)).scale(params.rho(0));
    if p1.degree() != Some(1) {
        return Err(Error::DegreeCollapse { index: 1 });
    }
    seq.push(p1);
    for k in 1..n {
        let lead = Poly::x_minus(params.c(k))
            .mul(&seq[k])
            .scale(params.rho(k));
        let lag = params.quad_poly(k).mul(&seq[k - 1]).scale(params.d(k));
        let next = lead.sub(&lag);
        if next.degree() != Some(k + 1) {
            return Err(Error::DegreeCollapse { index: k + 1 });
        }
        seq.push(next);
    }
    Ok(seq)
}

/// Maximum coefficient deviation between the scaled family and the
/// Pochhammer-ratio rescaling prod_{j<k} (zeta+j)/(2 zeta+j) of the unscaled
/// one, over 0 <= k <= n.
pub fn rescale_check(spec: &GCRRSpec, n: usize) -> Result<f64> {
    let unscaled = gcrr_params(&GCRRSpec { scaled: false, ..*spec })?;
    let scaled = gcrr_params(&GCRRSpec { scaled: true, ..*spec })?;
    let p = generate(&unscaled, n)?;
    let q = generate(&scaled, n)?;
    let mut dev = 0.0f64;
    let mut ratio = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        dev = dev.max(q[k].max_abs_diff(&p[k].scale(ratio)));
        ratio *= Complex64::new(
            (spec.zeta + k as f64) / (2.0 * spec.zeta + k as f64),
            0.0,
        );
    }
    Ok(dev)
}

/// Minimal parameters of the chain sequence attached to `d`, where
/// `d[i] = d_{i+1}`: l_0 = 0 and l_k = d_k / (1 - l_{k-1}).
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSeqInfo {
    /// l[k] = l_k, length d.len() + 1.
    pub l: Vec<f64>,
    /// True when every l_k with k >= 1 lies strictly inside (0, 1).
    pub valid: bool,
}

pub fn minimal_params(d: &[f64]) -> ChainSeqInfo {
    let mut l = Vec::with_capacity(d.len() + 1);
    l.push(0.0);
    let mut valid = true;
    for &dk in d {
        let prev = *l.last().unwrap();
        let next = dk / (1.0 - prev);
        if !(next > 0.0 && next < 1.0) {
            valid = false;
        }
        l.push(next);
    }
    ChainSeqInfo { l, valid }
}

/// Leading coefficients of P_0..P_n via the order-two scalar recurrence
/// k_{j+1} = rho_j k_j - d_j k_{j-1}, k_0 = 1, k_1 = rho_0.
pub fn leading_coeffs<T: Scalar>(params: &RIIParams<T>, n: usize) -> Result<Vec<T>> {
    if n >= 1 {
        params.check_limit(n - 1)?;
    }
    let mut kappa = Vec::with_capacity(n + 1);
    kappa.push(T::one());
    if n == 0 {
        return Ok(kappa);
    }
    kappa.push(params.rho(0));
    for k in 1..n {
        let next =
            params.rho(k) * kappa[k].clone() - params.d(k) * kappa[k - 1].clone();
        kappa.push(next);
    }
    Ok(kappa)
}

/// Outcome of the leading-coefficient ratio law check
/// k_j / k_{j-1} = 1 - l_{j-1}.
#[derive(Clone, Debug)]
pub struct RatioLawReport<T: Scalar> {
    pub kappa: Vec<T>,
    pub chain: ChainSeqInfo,
    pub max_dev: f64,
}

/// Checks the ratio law for a special-form family with rho identically 1 and
/// d a positive chain sequence. The law fails for rho != 1 (the ratio becomes
/// rho_j - l_j), so any other rho is rejected rather than measured.
pub fn leading_ratio_law<T: Scalar>(params: &RIIParams<T>, n: usize) -> Result<RatioLawReport<T>> {
    if n >= 1 {
        params.check_limit(n - 1)?;
    }
    if !params.is_special() {
        return Err(Error::HypothesisViolation(
            "ratio law is stated for the special quadratic factor".into(),
        ));
    }
    for k in 0..n {
        if !(params.rho(k) - T::one()).is_zero() {
            return Err(Error::HypothesisViolation(format!(
                "ratio law needs rho identically 1, rho_{k} differs"
            )));
        }
    }
    let mut d_seq = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let dk = params.d(k);
        if !(dk.re_f64() > 0.0) || dk.im_f64() != 0.0 {
            return Err(Error::HypothesisViolation(format!(
                "ratio law needs d_{k} real and positive"
            )));
        }
        d_seq.push(dk.re_f64());
    }
    let chain = minimal_params(&d_seq);
    if !chain.valid {
        return Err(Error::HypothesisViolation(
            "d is not a chain sequence: some minimal parameter leaves (0, 1)".into(),
        ));
    }
    let kappa = leading_coeffs(params, n)?;
    let mut max_dev = 0.0f64;
    for k in 1..=n {
        let ratio = kappa[k].re_f64() / kappa[k - 1].re_f64();
        max_dev = max_dev.max((ratio - (1.0 - chain.l[k - 1])).abs());
    }
    Ok(RatioLawReport {
        kappa,
        chain,
        max_dev,
    })
}

/// n-th convergent (numerator, denominator) of the continued fraction built
/// on the recurrence coefficients. The denominator recursion reproduces
/// P_n(x); an intermediate denominator that is exactly zero makes the earlier
/// convergents undefined and is reported as an error.
pub fn cf_convergent<T: Scalar>(params: &RIIParams<T>, n: usize, x: T) -> Result<(T, T)> {
    if n == 0 {
        return Err(Error::InvalidParam(
            "convergents are indexed from 1".into(),
        ));
    }
    params.check_limit(n - 1)?;
    let mut num_prev = T::zero();
    let mut num = T::one();
    let mut den_prev = T::one();
    let mut den = params.rho(0) * (x.clone() - params.c(0));
    for k in 1..n {
        if den.is_zero() {
            return Err(Error::DivisionByZero(
                "cf_convergent: intermediate denominator vanished",
            ));
        }
        let xk = params.rho(k) * (x.clone() - params.c(k));
        let yk = params.d(k) * params.quad_eval(k, x.clone());
        let num_next = xk.clone() * num.clone() - yk.clone() * num_prev;
        let den_next = xk * den.clone() - yk * den_prev;
        num_prev = num;
        num = num_next;
        den_prev = den;
        den = den_next;
    }
    Ok((num, den))
}
