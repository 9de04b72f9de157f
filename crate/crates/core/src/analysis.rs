//! Zero-pattern checkers (consecutive, triple, and cross interlacing), the
//! Wronskian identity tying the two perturbed sequences together, and moment
//! integrals against the explicit measures on the real line.

use num::complex::Complex64;

use crate::eigen::{poly_roots, ZeroSet};
use crate::error::{Error, Result};
use crate::poly::{wronskian, CPoly};
use crate::quad;
use crate::recurrence::RIIParams;

/// Margins tighter than this are reported as inconclusive rather than
/// pass/fail: the pattern is genuinely decided only beyond roundoff.
const MARGIN_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterlaceOutcome {
    Pass,
    Fail,
    Inconclusive,
}

/// Result of one interlacing check. `witness` is the merged sorted value
/// list with a source tag per entry; `first_violation` is the 1-based
/// position (merged order for pairwise checks, bracket index for the triple
/// check) where the pattern first breaks.
#[derive(Clone, Debug)]
pub struct InterlaceReport {
    pub outcome: InterlaceOutcome,
    pub first_violation: Option<usize>,
    pub witness: Vec<(f64, &'static str)>,
    pub min_separation: f64,
}

fn require_real(set: &ZeroSet, what: &str) -> Result<Vec<f64>> {
    if !set.all_real(1e-8) {
        return Err(Error::HypothesisViolation(format!(
            "{what} zeros are not certified real"
        )));
    }
    Ok(set.real_values())
}

fn merge_tagged(
    a: &[f64],
    b: &[f64],
    ta: &'static str,
    tb: &'static str,
) -> Vec<(f64, &'static str)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            out.push((a[i], ta));
            i += 1;
        } else {
            out.push((b[j], tb));
            j += 1;
        }
    }
    out
}

fn outcome_from(first_violation: Option<usize>, min_separation: f64) -> InterlaceOutcome {
    match first_violation {
        Some(_) => InterlaceOutcome::Fail,
        None if min_separation < MARGIN_FLOOR => InterlaceOutcome::Inconclusive,
        None => InterlaceOutcome::Pass,
    }
}

/// Strict alternation of two real zero sets. Sizes |a| = |b| + 1 check the
/// consecutive-degree pattern a_1 < b_1 < a_2 < ... < a_{n+1}; equal sizes
/// check the cross-sequence pattern (either phase).
pub fn check_interlace(a: &ZeroSet, b: &ZeroSet) -> Result<InterlaceReport> {
    let av = require_real(a, "first-set")?;
    let bv = require_real(b, "second-set")?;
    if av.len() != bv.len() + 1 && av.len() != bv.len() {
        return Err(Error::InvalidParam(format!(
            "set sizes {} and {} fit neither the consecutive nor the cross pattern",
            av.len(),
            bv.len()
        )));
    }
    let witness = merge_tagged(&av, &bv, "a", "b");
    let mut min_separation = f64::INFINITY;
    let mut first_violation = None;
    for i in 0..witness.len().saturating_sub(1) {
        let gap = witness[i + 1].0 - witness[i].0;
        min_separation = min_separation.min(gap);
        if first_violation.is_none() && (!(gap > 0.0) || witness[i].1 == witness[i + 1].1) {
            first_violation = Some(i + 1);
        }
    }
    Ok(InterlaceReport {
        outcome: outcome_from(first_violation, min_separation),
        first_violation,
        witness,
        min_separation,
    })
}

/// Sign case for the triple pattern; determined by the perturbation
/// constants over the checked range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaSign {
    Positive,
    Negative,
}

/// Classify a perturbation-constant sequence by sign. Index 0 (the
/// synthesized extension slot) is ignored; mixed or complex sequences are
/// rejected since the triple pattern is stated per sign case.
pub fn uniform_sign(alphas: &[Complex64]) -> Result<AlphaSign> {
    if alphas.len() < 2 {
        return Err(Error::InvalidParam(
            "need at least one perturbation constant".into(),
        ));
    }
    let mut sign = 0i8;
    for (k, a) in alphas.iter().enumerate().skip(1) {
        if a.im.abs() > 1e-10 * (1.0 + a.re.abs()) {
            return Err(Error::HypothesisViolation(format!(
                "constant at index {k} is not real"
            )));
        }
        let s = if a.re > 0.0 {
            1
        } else if a.re < 0.0 {
            -1
        } else {
            return Err(Error::HypothesisViolation(format!(
                "constant at index {k} vanishes"
            )));
        };
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return Err(Error::HypothesisViolation(
                "constants change sign over the checked range".into(),
            ));
        }
    }
    Ok(if sign > 0 {
        AlphaSign::Positive
    } else {
        AlphaSign::Negative
    })
}

/// Triple pattern at degree n. With zeros x (degree n), x' (degree n-1) and
/// y (perturbed, degree n):
/// positive case: x_i < y_i < x'_i for i = 1..n-1 (the last y lies beyond);
/// negative case: x'_{i-1} < y_i < x_i for i = 1..n (no left bound at i=1).
pub fn triple_interlace(
    p_n: &ZeroSet,
    p_prev: &ZeroSet,
    l_n: &ZeroSet,
    sign: AlphaSign,
) -> Result<InterlaceReport> {
    let x = require_real(p_n, "base")?;
    let xp = require_real(p_prev, "previous-degree")?;
    let y = require_real(l_n, "perturbed")?;
    let n = x.len();
    if n == 0 || y.len() != n || xp.len() + 1 != n {
        return Err(Error::InvalidParam(format!(
            "triple check needs sizes n, n-1, n; got {}, {}, {}",
            x.len(),
            xp.len(),
            y.len()
        )));
    }
    let mut min_separation = f64::INFINITY;
    let mut first_violation = None;
    let mut check = |i: usize, lo: f64, hi: f64| {
        min_separation = min_separation.min(hi - lo);
        if first_violation.is_none() && !(lo < hi) {
            first_violation = Some(i);
        }
    };
    match sign {
        AlphaSign::Positive => {
            for i in 1..n {
                check(i, x[i - 1], y[i - 1]);
                check(i, y[i - 1], xp[i - 1]);
            }
        }
        AlphaSign::Negative => {
            for i in 1..=n {
                check(i, y[i - 1], x[i - 1]);
                if i >= 2 {
                    check(i, xp[i - 2], y[i - 1]);
                }
            }
        }
    }
    let mut witness = merge_tagged(&x, &xp, "p_n", "p_prev");
    witness = {
        let vals: Vec<f64> = witness.iter().map(|w| w.0).collect();
        let tags: Vec<&'static str> = witness.iter().map(|w| w.1).collect();
        let mut merged = Vec::with_capacity(vals.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < vals.len() || j < y.len() {
            if j >= y.len() || (i < vals.len() && vals[i] <= y[j]) {
                merged.push((vals[i], tags[i]));
                i += 1;
            } else {
                merged.push((y[j], "l_n"));
                j += 1;
            }
        }
        merged
    };
    Ok(InterlaceReport {
        outcome: outcome_from(first_violation, min_separation),
        first_violation,
        witness,
        min_separation,
    })
}

/// Max residual over a 64-point grid on [-1, 1] of the identity
/// W(L_n, T_n) = (beta_n - alpha_n) W(P_{n-1}, P_n), plus a common-zero
/// check: each sequence must be nonzero at the other's zeros.
pub fn wronskian_cross_check(
    l_n: &CPoly,
    t_n: &CPoly,
    alpha_n: Complex64,
    beta_n: Complex64,
    p_n: &CPoly,
    p_prev: &CPoly,
) -> Result<f64> {
    if (alpha_n - beta_n).norm() == 0.0 {
        return Err(Error::InvalidParam(
            "equal perturbation constants make the combination degenerate".into(),
        ));
    }
    let lhs = wronskian(l_n, t_n);
    let rhs = wronskian(p_prev, p_n).scale(beta_n - alpha_n);
    let mut residual = 0.0f64;
    for i in 0..64 {
        let x = Complex64::new(-1.0 + 2.0 * i as f64 / 63.0, 0.0);
        residual = residual.max((lhs.eval(x) - rhs.eval(x)).norm());
    }
    for (zeros_of, other, name) in [(l_n, t_n, "second"), (t_n, l_n, "first")] {
        let scale = other.max_abs();
        for z in poly_roots(zeros_of)?.values {
            if other.eval(z).norm() < 1e-8 * scale {
                return Err(Error::HypothesisViolation(format!(
                    "{name} sequence vanishes at a zero of the other near {z}"
                )));
            }
        }
    }
    Ok(residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Gcrr,
    Cauchy,
    CauchySquared,
}

/// A measure on the real line. The gcrr kind is used without its constant
/// normalization factor; orthogonality is invariant under positive scaling.
#[derive(Clone, Copy, Debug)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub zeta: f64,
    pub theta: f64,
    pub omega: f64,
    pub unnormalized: bool,
}

impl WeightSpec {
    /// exp(-2 theta arccot(x/omega)) / (omega^2 + x^2)^zeta, constant factor
    /// dropped. Integrable iff zeta > 1/2.
    pub fn gcrr(zeta: f64, theta: f64, omega: f64) -> Result<Self> {
        if !(zeta > 0.5) || !(omega > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParam(format!(
                "weight needs zeta > 1/2 and omega > 0; got zeta={zeta}, omega={omega}"
            )));
        }
        Ok(WeightSpec {
            kind: WeightKind::Gcrr,
            zeta,
            theta,
            omega,
            unnormalized: true,
        })
    }

    /// 1 / (pi (1 + x^2)).
    pub fn cauchy() -> Self {
        WeightSpec {
            kind: WeightKind::Cauchy,
            zeta: 1.0,
            theta: 0.0,
            omega: 1.0,
            unnormalized: false,
        }
    }

    /// 4 / (pi (1 + x^2)^2).
    pub fn cauchy_squared() -> Self {
        WeightSpec {
            kind: WeightKind::CauchySquared,
            zeta: 2.0,
            theta: 0.0,
            omega: 1.0,
            unnormalized: false,
        }
    }

    /// Power of 1/|x| the weight decays with at infinity.
    pub fn decay(&self) -> f64 {
        match self.kind {
            WeightKind::Gcrr => 2.0 * self.zeta,
            WeightKind::Cauchy => 2.0,
            WeightKind::CauchySquared => 4.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x * x + self.omega * self.omega;
        match self.kind {
            WeightKind::Gcrr => {
                (-2.0 * self.theta * arccot(x / self.omega)).exp() / t.powf(self.zeta)
            }
            WeightKind::Cauchy => 1.0 / (std::f64::consts::PI * t),
            WeightKind::CauchySquared => 4.0 / (std::f64::consts::PI * t * t),
        }
    }

    /// Bounded factor left after pulling (omega^2 + x^2)^(decay/2) out.
    fn prefactor(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Gcrr => (-2.0 * self.theta * arccot(x / self.omega)).exp(),
            WeightKind::Cauchy => 1.0 / std::f64::consts::PI,
            WeightKind::CauchySquared => 4.0 / std::f64::consts::PI,
        }
    }
}

/// Continuous branch mapping the real line onto (0, pi).
fn arccot(t: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 - t.atan()
}

/// x^k p(x) / (x^2 + omega^2)^s, evaluated through the reversed-coefficient
/// form for |x| > 1 so large arguments never overflow.
fn algebraic_part(p: &CPoly, k: usize, s: f64, omega: f64, x: f64) -> Complex64 {
    let deg = match p.degree() {
        Some(d) => d,
        None => return Complex64::new(0.0, 0.0),
    };
    if x.abs() <= 1.0 {
        let denom = (x * x + omega * omega).powf(s);
        return p.eval(Complex64::new(x, 0.0)) * x.powi(k as i32) / denom;
    }
    let t = 1.0 / x;
    let coeffs = p.coeffs();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=deg {
        acc = acc * t + coeffs[j];
    }
    let m = deg + k;
    let sgn = if m % 2 == 1 && x < 0.0 { -1.0 } else { 1.0 };
    let mag = x.abs().powf(m as f64 - 2.0 * s);
    acc * sgn * mag / (1.0 + omega * omega * t * t).powf(s)
}

/// Integral over the real line of x^k p(x) / (x^2 + omega^2)^n against the
/// weight, via the substitution x = omega tan(u). Absolute tolerance 1e-10.
pub fn rational_moment(
    weight: &WeightSpec,
    p: &CPoly,
    k: usize,
    n: usize,
) -> Result<Complex64> {
    let deg = match p.degree() {
        Some(d) => d,
        None => return Ok(Complex64::new(0.0, 0.0)),
    };
    let net = deg as f64 + k as f64 - 2.0 * n as f64 - weight.decay();
    if !(net < -1.0) {
        return Err(Error::InvalidParam(format!(
            "integrand decays like |x|^{net}; not integrable"
        )));
    }
    let omega = weight.omega;
    let s = n as f64 + 0.5 * weight.decay();
    let f = |u: f64| {
        let x = omega * u.tan();
        let jac = omega * (1.0 + (x / omega) * (x / omega));
        algebraic_part(p, k, s, omega, x) * (weight.prefactor(x) * jac)
    };
    quad::integrate(
        f,
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        1e-10,
    )
}

/// Moment magnitudes |m_{n,k}| for 0 <= k < n <= n_max. With a perturbation
/// rule the sweep is exploratory: magnitudes are reported but not judged.
#[derive(Clone, Debug)]
pub struct MomentReport {
    /// magnitudes[n-1][k] = |moment of order (n, k)|.
    pub magnitudes: Vec<Vec<f64>>,
    pub max_abs: f64,
    pub judged: bool,
    pub pass: bool,
}

pub fn orthogonality_suite(
    weight: &WeightSpec,
    params: &RIIParams<Complex64>,
    rule: Option<&crate::perturbation::PerturbRule<Complex64>>,
    n_max: usize,
) -> Result<MomentReport> {
    let omega_fam = params.omega().ok_or_else(|| {
        Error::InvalidParam("moment sweep needs the special quadratic form".into())
    })?;
    if (omega_fam - Complex64::new(weight.omega, 0.0)).norm() > 1e-12 {
        return Err(Error::InvalidParam(format!(
            "family quadratic (omega {}) does not match the weight (omega {})",
            omega_fam, weight.omega
        )));
    }
    if n_max == 0 {
        return Err(Error::InvalidParam("need n_max >= 1".into()));
    }
    let base = crate::recurrence::generate(params, n_max)?;
    let seq = match rule {
        None => base,
        Some(r) => crate::perturbation::perturb(params, &base, r)?,
    };
    let mut magnitudes = Vec::with_capacity(n_max);
    let mut max_abs = 0.0f64;
    for n in 1..=n_max {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let m = rational_moment(weight, &seq[n], k, n)?;
            max_abs = max_abs.max(m.norm());
            row.push(m.norm());
        }
        magnitudes.push(row);
    }
    let judged = rule.is_none();
    Ok(MomentReport {
        magnitudes,
        max_abs,
        judged,
        pass: judged && max_abs < 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::ZeroMethod;
    use crate::perturbation::{
        alpha_sequence, closed_form_examples, perturb, Branch, ClosedFamily, PerturbRule,
    };
    use crate::recurrence::{constant_params, gcrr_params, generate, scaled_zeta1, GCRRSpec};

    fn zero_set(values: &[f64]) -> ZeroSet {
        let vals: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut min_gap = f64::INFINITY;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                min_gap = min_gap.min((vals[i] - vals[j]).norm());
            }
        }
        ZeroSet {
            residuals: vec![0.0; vals.len()],
            method: ZeroMethod::Aberth,
            min_gap,
            values: vals,
        }
    }

    #[test]
    fn pairwise_interlace_modes() {
        let t3 = 3.0f64.sqrt();
        let consec = check_interlace(&zero_set(&[-1.0 / t3, 1.0 / t3]), &zero_set(&[0.0])).unwrap();
        assert_eq!(consec.outcome, InterlaceOutcome::Pass);
        let cross =
            check_interlace(&zero_set(&[-1.0 / 3.0, 1.0]), &zero_set(&[-1.0, 1.0 / 3.0])).unwrap();
        assert_eq!(cross.outcome, InterlaceOutcome::Pass);
        assert_eq!(
            cross.witness.iter().map(|w| w.1).collect::<Vec<_>>(),
            vec!["b", "a", "b", "a"]
        );
        let same = check_interlace(&zero_set(&[0.0, 1.0]), &zero_set(&[0.0, 1.0])).unwrap();
        assert_eq!(same.outcome, InterlaceOutcome::Fail);
        assert_eq!(same.first_violation, Some(1));
        assert!(check_interlace(&zero_set(&[0.0, 1.0, 2.0]), &zero_set(&[0.5])).is_err());
        let tight = check_interlace(&zero_set(&[0.0, 1.0]), &zero_set(&[5e-11])).unwrap();
        assert_eq!(tight.outcome, InterlaceOutcome::Inconclusive);
    }

    #[test]
    fn consecutive_interlacing_sweep() {
        for params in [constant_params::<Complex64>(), scaled_zeta1::<Complex64>()] {
            let p = generate(&params, 32).unwrap();
            for n in 1..=31usize {
                let a = poly_roots(&p[n + 1]).unwrap();
                let b = poly_roots(&p[n]).unwrap();
                let im = a.values.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
                let report = check_interlace(&a, &b)
                    .unwrap_or_else(|e| panic!("n={n}, max_im={im:.3e}: {e}"));
                assert_eq!(report.outcome, InterlaceOutcome::Pass, "degree {n}");
            }
        }
    }

    #[test]
    fn sign_classifier() {
        let pos: Vec<Complex64> = (0..4).map(|_| Complex64::new(0.5, 0.0)).collect();
        assert_eq!(uniform_sign(&pos).unwrap(), AlphaSign::Positive);
        let mut mixed = pos.clone();
        mixed[2] = Complex64::new(-0.5, 0.0);
        assert!(uniform_sign(&mixed).is_err());
        let complexed = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5)];
        assert!(uniform_sign(&complexed).is_err());
    }

    #[test]
    fn triple_pattern_closed_form_anchor() {
        let t3 = 3.0f64.sqrt();
        let p2 = zero_set(&[-1.0 / t3, 1.0 / t3]);
        let p1 = zero_set(&[0.0]);
        let l2 = zero_set(&[-1.0 / 3.0, 1.0]);
        let report = triple_interlace(&p2, &p1, &l2, AlphaSign::Positive).unwrap();
        assert_eq!(report.outcome, InterlaceOutcome::Pass);
        let t2 = zero_set(&[-1.0, 1.0 / 3.0]);
        let report = triple_interlace(&p2, &p1, &t2, AlphaSign::Negative).unwrap();
        assert_eq!(report.outcome, InterlaceOutcome::Pass);
        // swapped sign case must break
        let report = triple_interlace(&p2, &p1, &l2, AlphaSign::Negative).unwrap();
        assert_eq!(report.outcome, InterlaceOutcome::Fail);
    }

    #[test]
    fn triple_pattern_scaled_family_degree8() {
        let params = scaled_zeta1::<Complex64>();
        let p = generate(&params, 8).unwrap();
        let x = poly_roots(&p[8]).unwrap();
        let xp = poly_roots(&p[7]).unwrap();
        let alpha = PerturbRule::QuadraticRoot { branch: Branch::Plus };
        let l = perturb(&params, &p, &alpha).unwrap();
        let sign = uniform_sign(&alpha_sequence(&params, &alpha, 8).unwrap()).unwrap();
        assert_eq!(sign, AlphaSign::Positive);
        let report = triple_interlace(&x, &xp, &poly_roots(&l[8]).unwrap(), sign).unwrap();
        assert_eq!(report.outcome, InterlaceOutcome::Pass);

        let beta = PerturbRule::BetaRecursion {
            seed: Complex64::new(-0.25, 0.0),
        };
        let t = perturb(&params, &p, &beta).unwrap();
        let sign = uniform_sign(&alpha_sequence(&params, &beta, 8).unwrap()).unwrap();
        assert_eq!(sign, AlphaSign::Negative);
        let report = triple_interlace(&x, &xp, &poly_roots(&t[8]).unwrap(), sign).unwrap();
        assert_eq!(report.outcome, InterlaceOutcome::Pass);
    }

    #[test]
    fn wronskian_identity_and_cross_interlacing() {
        let params = constant_params::<Complex64>();
        let p = generate(&params, 16).unwrap();
        let alpha = Complex64::new(0.5, 0.0);
        let beta = Complex64::new(-0.5, 0.0);
        let l = perturb(&params, &p, &PerturbRule::Constant { value: alpha }).unwrap();
        let t = perturb(&params, &p, &PerturbRule::Constant { value: beta }).unwrap();
        for n in 2..=16usize {
            let res =
                wronskian_cross_check(&l[n], &t[n], alpha, beta, &p[n], &p[n - 1]).unwrap();
            assert!(res < 1e-10, "residual {res:.3e} at n={n}");
            let report =
                check_interlace(&poly_roots(&l[n]).unwrap(), &poly_roots(&t[n]).unwrap())
                    .unwrap();
            assert_eq!(report.outcome, InterlaceOutcome::Pass, "cross at n={n}");
        }
        assert!(wronskian_cross_check(&l[2], &t[2], alpha, alpha, &p[2], &p[1]).is_err());
    }

    #[test]
    fn closed_forms_cross_interlace() {
        let l = closed_form_examples(8, ClosedFamily::L, 1.0).unwrap();
        let t = closed_form_examples(8, ClosedFamily::T, 1.0).unwrap();
        let report =
            check_interlace(&poly_roots(&l[8]).unwrap(), &poly_roots(&t[8]).unwrap()).unwrap();
        assert_eq!(report.outcome, InterlaceOutcome::Pass);
    }

    #[test]
    fn moment_closed_form_anchors() {
        let params = constant_params::<Complex64>();
        let p = generate(&params, 2).unwrap();
        let w = WeightSpec::cauchy();
        let m0 = rational_moment(&w, &p[2], 0, 2).unwrap();
        assert!(m0.norm() < 1e-10, "k=0 moment {m0}");
        let m1 = rational_moment(&w, &p[2], 1, 2).unwrap();
        assert!(m1.norm() < 1e-10, "k=1 moment {m1}");
        let m2 = rational_moment(&w, &p[2], 2, 2).unwrap();
        assert!((m2.re - 0.25).abs() < 1e-10 && m2.im.abs() < 1e-12, "k=2 moment {m2}");
    }

    #[test]
    fn gcrr_weight_matches_cauchy_at_unit_parameters() {
        let g = WeightSpec::gcrr(1.0, 0.0, 1.0).unwrap();
        let c = WeightSpec::cauchy();
        for x in [-3.0, -0.4, 0.0, 1.7] {
            let ratio = g.eval(x) / c.eval(x);
            assert!((ratio - std::f64::consts::PI).abs() < 1e-12);
        }
        let params = constant_params::<Complex64>();
        let p = generate(&params, 2).unwrap();
        let m2 = rational_moment(&g, &p[2], 2, 2).unwrap();
        assert!((m2.re - std::f64::consts::PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn moment_rejects_nonintegrable_configurations() {
        let params = constant_params::<Complex64>();
        let p = generate(&params, 2).unwrap();
        let w = WeightSpec::cauchy();
        assert!(rational_moment(&w, &p[2], 2, 1).is_err());
        // boundary: decays exactly like 1/|x|
        assert!(rational_moment(&w, &p[2], 3, 2).is_err());
        assert!(WeightSpec::gcrr(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn orthogonality_constant_family() {
        let params = constant_params::<Complex64>();
        let report =
            orthogonality_suite(&WeightSpec::cauchy(), &params, None, 5).unwrap();
        assert!(report.judged && report.pass, "max moment {:.3e}", report.max_abs);
    }

    #[test]
    fn orthogonality_gcrr_families() {
        let scaled = scaled_zeta1::<Complex64>();
        let w = WeightSpec::gcrr(1.0, 0.0, 1.0).unwrap();
        let report = orthogonality_suite(&w, &scaled, None, 4).unwrap();
        assert!(report.pass, "scaled max moment {:.3e}", report.max_abs);

        let spec = GCRRSpec::new(2.0, 0.3, 1.0, false);
        let params = gcrr_params(&spec).unwrap();
        let w = WeightSpec::gcrr(2.0, 0.3, 1.0).unwrap();
        let report = orthogonality_suite(&w, &params, None, 4).unwrap();
        assert!(report.pass, "asymmetric max moment {:.3e}", report.max_abs);

        // off unit omega the exponent couples to theta/omega: the family
        // rescales to unit omega with centers theta/(omega (zeta+k))
        let spec = GCRRSpec::new(1.5, 0.4 * 1.3, 1.3, false);
        let params = gcrr_params(&spec).unwrap();
        let w = WeightSpec::gcrr(1.5, 0.4, 1.3).unwrap();
        let report = orthogonality_suite(&w, &params, None, 3).unwrap();
        assert!(report.pass, "off-unit-omega max moment {:.3e}", report.max_abs);
    }

    #[test]
    fn exploratory_sweep_is_not_judged() {
        let params = constant_params::<Complex64>();
        let rule = PerturbRule::Constant {
            value: Complex64::new(0.0, 0.5),
        };
        let report =
            orthogonality_suite(&WeightSpec::cauchy_squared(), &params, Some(&rule), 3).unwrap();
        assert!(!report.judged && !report.pass);
        assert_eq!(report.magnitudes.len(), 3);
    }

    #[test]
    fn weight_omega_mismatch_rejected() {
        let params = constant_params::<Complex64>();
        let w = WeightSpec::gcrr(1.0, 0.0, 2.0).unwrap();
        assert!(orthogonality_suite(&w, &params, None, 2).is_err());
    }
}
