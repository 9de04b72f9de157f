//! Self-perturbations L_n = P_n - alpha_n P_{n-1}: admissible constant
//! sequences, the order-(2,3,4) coefficient ledger linking three consecutive
//! L's, and the reductions back to three-term form when the admissibility
//! conditions hold.
//!
//! Index conventions: an alpha slice always satisfies `alphas[k] = alpha_k`,
//! with `alphas[0]` the bottom extension alpha_0 = alpha_1 rho_1 / rho_0.
//! Together with d_0 := d_1 this extension keeps both admissibility
//! conditions valid at n = 1 whenever alpha_1 is a root of the index-1
//! quadratic, and it feeds the ledger entries that reference index n-1 = 0.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{CPoly, Poly};
use crate::recurrence::RIIParams;
use crate::scalar::Scalar;

/// Root choice for the admissible-alpha quadratic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// How the perturbation constants are produced.
#[derive(Clone, Debug)]
pub enum PerturbRule<T: Scalar> {
    /// Constants given directly, `alphas[i] = alpha_{i+1}`.
    Explicit { alphas: Vec<T> },
    /// alpha_n = rho_{n-1}(1 - c_{n-1}) - w^2 d_{n-1} / alpha_{n-1}, from a
    /// seed alpha_1. Keeps the ledger's f_n = -g_n.
    AlphaRecursion { seed: T },
    /// beta_n = -rho_{n-1}(1 + c_{n-1}) - w^2 d_{n-1} / beta_{n-1}. Keeps
    /// f_n = g_n.
    BetaRecursion { seed: T },
    /// alpha_n = -(w^2 d_{n-1} / alpha_{n-1} + rho_{n-1} c_{n-1}). Keeps
    /// g_n = 0; fixed points are imaginary for centered families.
    InversionRecursion { seed: T },
    /// alpha_n = value for every n.
    Constant { value: T },
    /// alpha_n = chosen root of
    /// rho_n x^2 - rho_n rho_{n-1}(1 - c_{n-1}) x + w^2 d_n rho_{n-1} = 0.
    QuadraticRoot { branch: Branch },
}

fn omega_sq<T: Scalar>(params: &RIIParams<T>) -> Result<T> {
    let w = params.omega().ok_or_else(|| {
        Error::HypothesisViolation("operation needs the special quadratic factor x^2 + w^2".into())
    })?;
    Ok(w.clone() * w)
}

/// One step of the first admissibility condition:
/// alpha_n = rho_{n-1}(1 - c_{n-1}) - w^2 d_{n-1} / alpha_{n-1}.
pub fn alpha_condition1<T: Scalar>(
    params: &RIIParams<T>,
    alpha_prev: &T,
    n: usize,
) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParam("condition-1 step needs n >= 1".into()));
    }
    let w2 = omega_sq(params)?;
    let rho = params.rho(n - 1);
    let c = params.c(n - 1);
    Ok(rho.clone() * (T::one() - c) - w2 * params.d_ext(n - 1) * alpha_prev.try_inv()?)
}

/// Mirror-image step used for the beta sequences:
/// beta_n = -rho_{n-1}(1 + c_{n-1}) - w^2 d_{n-1} / beta_{n-1}.
pub fn beta_condition1<T: Scalar>(params: &RIIParams<T>, beta_prev: &T, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParam("condition-1 step needs n >= 1".into()));
    }
    let w2 = omega_sq(params)?;
    let rho = params.rho(n - 1);
    let c = params.c(n - 1);
    Ok(-(rho.clone() * (T::one() + c)) - w2 * params.d_ext(n - 1) * beta_prev.try_inv()?)
}

/// Inversion step alpha_n = -(w^2 d_{n-1} / alpha_{n-1} + rho_{n-1} c_{n-1}).
pub fn alpha_inversion<T: Scalar>(params: &RIIParams<T>, alpha_prev: &T, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParam("inversion step needs n >= 1".into()));
    }
    let w2 = omega_sq(params)?;
    Ok(-(w2 * params.d_ext(n - 1) * alpha_prev.try_inv()? + params.rho(n - 1) * params.c(n - 1)))
}

/// Second admissibility condition d_n alpha_{n-1} rho_{n-1} = d_{n-1} alpha_n rho_n
/// as (pass at 1e-12, residual).
pub fn check_condition2<T: Scalar>(
    params: &RIIParams<T>,
    alphas: &[T],
    n: usize,
) -> Result<(bool, f64)> {
    if n == 0 || n + 1 > alphas.len() {
        return Err(Error::InvalidParam(format!(
            "condition-2 check needs alpha_{{n-1}}, alpha_n with n >= 1, got n={n}"
        )));
    }
    let lhs = params.d(n) * alphas[n - 1].clone() * params.rho(n - 1);
    let rhs = params.d_ext(n - 1) * alphas[n].clone() * params.rho(n);
    let residual = (lhs - rhs).abs_f64();
    Ok((residual <= 1e-12, residual))
}

/// Chosen root of rho_n x^2 - rho_n rho_{n-1}(1 - c_{n-1}) x + w^2 d_n rho_{n-1}.
/// A zero discriminant short-circuits to -B/(2A), which keeps exact fields
/// exact; otherwise the root needs a square root in the coefficient field.
pub fn alpha_quadratic<T: Scalar>(params: &RIIParams<T>, n: usize, branch: Branch) -> Result<T> {
    admissible_root(params, n, branch, false)
}

/// Root of the companion quadratic
/// rho_n x^2 + rho_n rho_{n-1}(1 + c_{n-1}) x + w^2 d_n rho_{n-1} = 0,
/// producing the beta sequences.
pub fn beta_quadratic<T: Scalar>(params: &RIIParams<T>, n: usize, branch: Branch) -> Result<T> {
    admissible_root(params, n, branch, true)
}

fn admissible_root<T: Scalar>(
    params: &RIIParams<T>,
    n: usize,
    branch: Branch,
    beta: bool,
) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParam("admissible roots start at n = 1".into()));
    }
    let w2 = omega_sq(params)?;
    let a = params.rho(n);
    if a.is_zero() {
        return Err(Error::DegreeCollapse { index: n });
    }
    let rho_prev = params.rho(n - 1);
    let shift = if beta {
        T::one() + params.c(n - 1)
    } else {
        T::one() - params.c(n - 1)
    };
    let b = if beta {
        a.clone() * rho_prev.clone() * shift
    } else {
        -(a.clone() * rho_prev.clone() * shift)
    };
    let c = w2 * params.d(n) * rho_prev;
    let b_sq = b.clone() * b.clone();
    let four_ac = T::from_ratio(4, 1) * a.clone() * c;
    let disc = b_sq.clone() - four_ac.clone();
    let two_a_inv = (T::from_ratio(2, 1) * a).try_inv()?;
    // repeated roots: exact zero in the exact field; in doubles a
    // discriminant at round-off scale would otherwise leak a sqrt(eps)
    // error into the root
    let collapsed = disc.is_zero()
        || (!T::EXACT && disc.abs_f64() <= 1e-12 * (b_sq.abs_f64() + four_ac.abs_f64()));
    if collapsed {
        return Ok(-b * two_a_inv);
    }
    let root = disc.try_sqrt()?;
    let num = match branch {
        Branch::Plus => -b + root,
        Branch::Minus => -b - root,
    };
    Ok(num * two_a_inv)
}

/// Constant-family kappa = 1/2 +- sqrt(1 - w^2)/2 and a flag marking the
/// complex regime w > 1 (real-zero claims stop applying there).
pub fn constant_kappa(omega: f64, branch: Branch) -> (Complex64, bool) {
    let disc = Complex64::new(1.0 - omega * omega, 0.0).sqrt();
    let kappa = match branch {
        Branch::Plus => (Complex64::new(1.0, 0.0) + disc) * 0.5,
        Branch::Minus => (Complex64::new(1.0, 0.0) - disc) * 0.5,
    };
    (kappa, omega > 1.0)
}

/// Positive roots of z^2 + (2n(1 - w^2) - 1) z + (1 - w^2)(n^2 - n) = 0, the
/// zero-discriminant constraint for centered families. Stated for w >= 1;
/// w = 1 collapses to z = 1 for every n.
pub fn zeta_from_discriminant(n: usize, omega: f64) -> Result<Vec<f64>> {
    if !(omega >= 1.0) || !omega.is_finite() {
        return Err(Error::InvalidParam(format!(
            "zero-discriminant construction needs omega >= 1, got {omega}"
        )));
    }
    let nf = n as f64;
    let m = 1.0 - omega * omega;
    let b = 2.0 * nf * m - 1.0;
    let c = m * (nf * nf - nf);
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Err(Error::InvalidParam(
            "no real root: negative discriminant".into(),
        ));
    }
    let sq = disc.sqrt();
    let mut roots: Vec<f64> = [(-b + sq) / 2.0, (-b - sq) / 2.0]
        .into_iter()
        .filter(|z| *z > 0.0)
        .collect();
    roots.dedup();
    if roots.is_empty() {
        return Err(Error::InvalidParam("no positive root".into()));
    }
    Ok(roots)
}

/// alpha_0..alpha_{n_max} under `rule`, with the bottom extension
/// alpha_0 = alpha_1 rho_1 / rho_0. Every alpha_k with k >= 1 must be nonzero.
pub fn alpha_sequence<T: Scalar>(
    params: &RIIParams<T>,
    rule: &PerturbRule<T>,
    n_max: usize,
) -> Result<Vec<T>> {
    if n_max == 0 {
        return Err(Error::InvalidParam(
            "a perturbation sequence needs at least alpha_1".into(),
        ));
    }
    params.check_limit(n_max)?;
    let mut v = vec![T::zero(); n_max + 1];
    match rule {
        PerturbRule::Explicit { alphas } => {
            if alphas.len() < n_max {
                return Err(Error::InvalidParam(format!(
                    "explicit rule provides {} constants, {} needed",
                    alphas.len(),
                    n_max
                )));
            }
            for k in 1..=n_max {
                v[k] = alphas[k - 1].clone();
            }
        }
        PerturbRule::Constant { value } => {
            for k in 1..=n_max {
                v[k] = value.clone();
            }
        }
        PerturbRule::AlphaRecursion { seed } => {
            v[1] = seed.clone();
            for k in 2..=n_max {
                v[k] = alpha_condition1(params, &v[k - 1], k)?;
            }
        }
        PerturbRule::BetaRecursion { seed } => {
            v[1] = seed.clone();
            for k in 2..=n_max {
                v[k] = beta_condition1(params, &v[k - 1], k)?;
            }
        }
        PerturbRule::InversionRecursion { seed } => {
            v[1] = seed.clone();
            for k in 2..=n_max {
                v[k] = alpha_inversion(params, &v[k - 1], k)?;
            }
        }
        PerturbRule::QuadraticRoot { branch } => {
            for k in 1..=n_max {
                v[k] = alpha_quadratic(params, k, *branch)?;
            }
        }
    }
    for (k, a) in v.iter().enumerate().skip(1) {
        if a.is_zero() {
            return Err(Error::InvalidParam(format!(
                "perturbation constant alpha_{k} is zero"
            )));
        }
    }
    v[0] = v[1].clone() * params.rho(1) * params.rho(0).try_inv()?;
    Ok(v)
}

/// L_0 = P_0, L_n = P_n - alpha_n P_{n-1} for n >= 1.
pub fn perturb_with_alphas<T: Scalar>(p: &[Poly<T>], alphas: &[T]) -> Result<Vec<Poly<T>>> {
    if p.is_empty() {
        return Ok(Vec::new());
    }
    if alphas.len() < p.len() {
        return Err(Error::InvalidParam(format!(
            "{} perturbation constants for {} polynomials",
            alphas.len(),
            p.len()
        )));
    }
    let mut out = Vec::with_capacity(p.len());
    out.push(p[0].clone());
    for n in 1..p.len() {
        if alphas[n].is_zero() {
            return Err(Error::InvalidParam(format!(
                "perturbation constant alpha_{n} is zero"
            )));
        }
        out.push(p[n].sub(&p[n - 1].scale(alphas[n].clone())));
    }
    Ok(out)
}

/// Convenience composition: build the constants from `rule`, then apply them
/// to the given sequence.
pub fn perturb<T: Scalar>(
    params: &RIIParams<T>,
    p: &[Poly<T>],
    rule: &PerturbRule<T>,
) -> Result<Vec<Poly<T>>> {
    if p.len() <= 1 {
        return Ok(p.to_vec());
    }
    let alphas = alpha_sequence(params, rule, p.len() - 1)?;
    perturb_with_alphas(p, &alphas)
}

/// Coefficients of the identity
/// (e x^2 + f x + g) L_{n+1}
///   = (p x^3 + q x^2 + r x + s) L_n + (t x^4 + u x^3 + v x^2 + w x + z) L_{n-1},
/// which holds for every perturbation of a special-form family (and, in the
/// generalised per-index-root form, of any family).
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffLedger<T: Scalar> {
    pub e: T,
    pub f: T,
    pub g: T,
    pub p: T,
    pub q: T,
    pub r: T,
    pub s: T,
    pub t: T,
    pub u: T,
    pub v: T,
    pub w: T,
    pub z: T,
}

/// Ledger for the special form x^2 + w^2 at index n >= 1. Needs alpha at
/// n-1, n, n+1; index n-1 = 0 uses the extension values.
pub fn ledger_special<T: Scalar>(
    params: &RIIParams<T>,
    alphas: &[T],
    n: usize,
) -> Result<CoeffLedger<T>> {
    if n == 0 || n + 2 > alphas.len() {
        return Err(Error::InvalidParam(format!(
            "ledger at n needs alpha_{{n-1}}..alpha_{{n+1}} and n >= 1, got n={n}, len={}",
            alphas.len()
        )));
    }
    let w2 = omega_sq(params)?;
    let (d_prev, d_cur) = (params.d_ext(n - 1), params.d(n));
    let (rho_prev, rho_cur) = (params.rho(n - 1), params.rho(n));
    let (c_prev, c_cur) = (params.c(n - 1), params.c(n));
    let (al_prev, al_cur, al_next) = (
        alphas[n - 1].clone(),
        alphas[n].clone(),
        alphas[n + 1].clone(),
    );

    let e = d_prev.clone();
    let f = -(al_prev.clone() * rho_prev.clone());
    let g = d_prev.clone() * w2.clone()
        + al_prev.clone() * (al_cur.clone() + rho_prev.clone() * c_prev.clone());

    let p = rho_cur.clone() * e.clone();
    let q = al_prev.clone() * (d_cur.clone() - rho_cur.clone() * rho_prev.clone())
        - d_prev.clone() * (rho_cur.clone() * c_cur.clone() + al_next.clone());
    let r = al_prev.clone()
        * rho_prev.clone()
        * (al_next.clone() + rho_cur.clone() * (c_cur.clone() + c_prev.clone()))
        + rho_cur.clone() * d_prev.clone() * w2.clone();
    let s = -((al_prev.clone() * rho_prev.clone() * c_prev.clone()
        + d_prev.clone() * w2.clone())
        * (rho_cur.clone() * c_cur.clone() + al_next.clone()))
        + al_prev.clone() * d_cur.clone() * w2.clone();

    // shifted quadratic block (e, f, g at n+1) drives the quartic block
    let e1 = d_cur.clone();
    let f1 = -(al_cur.clone() * rho_cur.clone());
    let g1 = d_cur.clone() * w2.clone()
        + al_cur.clone() * (al_next.clone() + rho_cur.clone() * c_cur.clone());

    let t = -(e1.clone() * d_prev.clone());
    let u = -(d_prev.clone() * f1);
    let w = u.clone() * w2.clone();
    let v = -(d_prev.clone() * (g1.clone() + w2.clone() * e1));
    let z = -(d_prev * w2 * g1);

    Ok(CoeffLedger {
        e,
        f,
        g,
        p,
        q,
        r,
        s,
        t,
        u,
        v,
        w,
        z,
    })
}

/// Ledger for per-index roots a_k, b_k at index n >= 1, written through the
/// symmetric functions sb = a_{n-1}+b_{n-1}, pb = a_{n-1}b_{n-1} and
/// sc = a_n+b_n, pc = a_n b_n. Specializes entry-by-entry to the special
/// ledger when a = i w, b = -i w.
pub fn ledger_general<T: Scalar>(
    params: &RIIParams<T>,
    alphas: &[T],
    n: usize,
) -> Result<CoeffLedger<T>> {
    if n == 0 || n + 2 > alphas.len() {
        return Err(Error::InvalidParam(format!(
            "ledger at n needs alpha_{{n-1}}..alpha_{{n+1}} and n >= 1, got n={n}, len={}",
            alphas.len()
        )));
    }
    let (sb, pb) = params.quad_sum_prod(n - 1);
    let (sc, pc) = params.quad_sum_prod(n);
    let (d_prev, d_cur) = (params.d_ext(n - 1), params.d(n));
    let (rho_prev, rho_cur) = (params.rho(n - 1), params.rho(n));
    let (c_prev, c_cur) = (params.c(n - 1), params.c(n));
    let (al_prev, al_cur, al_next) = (
        alphas[n - 1].clone(),
        alphas[n].clone(),
        alphas[n + 1].clone(),
    );

    let e = d_prev.clone();
    let f = -(d_prev.clone() * sb.clone()) - al_prev.clone() * rho_prev.clone();
    let g = d_prev.clone() * pb.clone()
        + al_prev.clone() * (al_cur.clone() + rho_prev.clone() * c_prev.clone());

    let p = rho_cur.clone() * d_prev.clone();
    let q = al_prev.clone() * (d_cur.clone() - rho_cur.clone() * rho_prev.clone())
        - d_prev.clone()
            * (rho_cur.clone() * (sb.clone() + c_cur.clone()) + al_next.clone());
    let r = al_prev.clone()
        * rho_prev.clone()
        * (al_next.clone() + rho_cur.clone() * (c_cur.clone() + c_prev.clone()))
        + d_prev.clone()
            * sb.clone()
            * (al_next.clone() + rho_cur.clone() * c_cur.clone())
        - al_prev.clone() * d_cur.clone() * sc.clone()
        + rho_cur.clone() * d_prev.clone() * pb.clone();
    let s = -((al_prev.clone() * rho_prev.clone() * c_prev.clone()
        + d_prev.clone() * pb.clone())
        * (rho_cur.clone() * c_cur.clone() + al_next.clone()))
        + al_prev.clone() * d_cur.clone() * pc.clone();

    let t = -(d_cur.clone() * d_prev.clone());
    let u = d_prev.clone()
        * (d_cur.clone() * (sc.clone() + sb.clone()) + al_cur.clone() * rho_cur.clone());
    let g1 = al_cur.clone() * (al_next.clone() + rho_cur.clone() * c_cur.clone());
    let v = -(d_prev.clone()
        * (g1.clone()
            + d_cur.clone() * (pc.clone() + pb.clone())
            + sb.clone() * (d_cur.clone() * sc.clone() + al_cur.clone() * rho_cur.clone())));
    let w = -(d_prev.clone()
        * (pb.clone() * (-(d_cur.clone() * sc.clone()) - al_cur.clone() * rho_cur.clone())
            - sb.clone() * (g1.clone() + d_cur.clone() * pc.clone())));
    let z = -(d_prev * pb * (g1 + d_cur * pc));

    Ok(CoeffLedger {
        e,
        f,
        g,
        p,
        q,
        r,
        s,
        t,
        u,
        v,
        w,
        z,
    })
}

/// Max |coefficient| of
/// (e x^2 + f x + g) L_{n+1} - (cubic) L_n - (quartic) L_{n-1}.
pub fn verify_ledger_identity<T: Scalar>(
    seq: &[Poly<T>],
    ledger: &CoeffLedger<T>,
    n: usize,
) -> Result<f64> {
    if n == 0 || n + 2 > seq.len() {
        return Err(Error::InvalidParam(format!(
            "identity at n needs L_{{n-1}}..L_{{n+1}}, got n={n}, len={}",
            seq.len()
        )));
    }
    let quad = Poly::new(vec![ledger.g.clone(), ledger.f.clone(), ledger.e.clone()]);
    let cubic = Poly::new(vec![
        ledger.s.clone(),
        ledger.r.clone(),
        ledger.q.clone(),
        ledger.p.clone(),
    ]);
    let quartic = Poly::new(vec![
        ledger.z.clone(),
        ledger.w.clone(),
        ledger.v.clone(),
        ledger.u.clone(),
        ledger.t.clone(),
    ]);
    let residual = quad
        .mul(&seq[n + 1])
        .sub(&cubic.mul(&seq[n]))
        .sub(&quartic.mul(&seq[n - 1]));
    Ok(residual.max_abs())
}

/// Which admissibility condition backs a reduction, and so which ledger
/// entry supplies the reduced centers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceMode {
    /// alpha chains (f_n = -g_n): centers -s_n / (f_n rho_n).
    Alpha,
    /// beta chains (f_n = g_n): centers +s_n / (f_n rho_n).
    Beta,
    /// inversion chains (g_n = 0): centers -r_n / (f_n rho_n).
    Inversion,
}

/// Special-form parameter set generating the perturbed sequence directly:
/// same rho, d and quadratic factor, shifted centers. The constants must
/// satisfy the mode's admissibility condition and the symmetry condition to
/// 1e-12 at every index; violations are reported, not repaired.
///
/// `alphas[k] = alpha_k` must reach k = n+1 to shift center n, so the result
/// is limited to index alphas.len() - 2.
pub fn reduced_recurrence<T: Scalar>(
    params: &RIIParams<T>,
    alphas: &[T],
    mode: ReduceMode,
) -> Result<RIIParams<T>> {
    if alphas.len() < 3 {
        return Err(Error::InvalidParam(
            "reduction needs alpha_0, alpha_1, alpha_2 at least".into(),
        ));
    }
    let n_hi = alphas.len() - 2;
    params.check_limit(n_hi)?;
    let mut centers = Vec::with_capacity(n_hi + 1);
    centers.push(params.c(0) + alphas[1].clone() * params.rho(0).try_inv()?);
    for n in 1..=n_hi {
        let (ok2, res2) = check_condition2(params, alphas, n)?;
        if !ok2 {
            return Err(Error::HypothesisViolation(format!(
                "symmetry condition fails at n={n}: residual {res2:.3e}"
            )));
        }
        let predicted = match mode {
            ReduceMode::Alpha => alpha_condition1(params, &alphas[n - 1], n)?,
            ReduceMode::Beta => beta_condition1(params, &alphas[n - 1], n)?,
            ReduceMode::Inversion => alpha_inversion(params, &alphas[n - 1], n)?,
        };
        let res1 = (alphas[n].clone() - predicted).abs_f64();
        if res1 > 1e-12 {
            return Err(Error::HypothesisViolation(format!(
                "chain condition fails at n={n}: residual {res1:.3e}"
            )));
        }
        let ledger = ledger_special(params, alphas, n)?;
        let f_rho_inv = (ledger.f.clone() * params.rho(n)).try_inv()?;
        let center = match mode {
            ReduceMode::Alpha => -(ledger.s.clone() * f_rho_inv),
            ReduceMode::Beta => ledger.s.clone() * f_rho_inv,
            ReduceMode::Inversion => -(ledger.r.clone() * f_rho_inv),
        };
        centers.push(center);
    }
    let centers = std::sync::Arc::new(centers);
    Ok(params.with_centers(
        std::sync::Arc::new(move |k| centers[k].clone()),
        Some(n_hi),
    ))
}

/// Constant-family closed forms used as anchors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedFamily {
    /// The base sequence P_n.
    P,
    /// The kappa-perturbed sequence L_n (kappa from `constant_kappa`).
    L,
    /// The beta = -1/2 perturbed sequence T_n (w = 1 only).
    T,
    /// The printed single-series form for the inversion chain (w = 1 only).
    /// Evaluates to -(x+i)/2 * P_{n-1}, a rescaled lagged member, not the
    /// perturbation itself; kept as a display anchor.
    LInversion,
}

/// Closed forms for the constant family (rho = 1, c = 0, d = 1/4) at the
/// given omega, degrees 0..=n_max.
pub fn closed_form_examples(
    n_max: usize,
    which: ClosedFamily,
    omega: f64,
) -> Result<Vec<CPoly>> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParam(format!(
            "omega must be positive and finite, got {omega}"
        )));
    }
    if matches!(which, ClosedFamily::T | ClosedFamily::LInversion) && omega != 1.0 {
        return Err(Error::HypothesisViolation(
            "this closed form is stated only at omega = 1".into(),
        ));
    }
    let i = Complex64::new(0.0, 1.0);
    let iw = Complex64::new(0.0, omega);
    let minus = CPoly::x_minus(iw); // x - iw
    let plus = CPoly::x_minus(-iw); // x + iw
    let mut pow_minus = vec![CPoly::one()];
    let mut pow_plus = vec![CPoly::one()];
    for k in 0..=n_max {
        pow_minus.push(pow_minus[k].mul(&minus));
        pow_plus.push(pow_plus[k].mul(&plus));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    match which {
        ClosedFamily::P => {
            // (i/w) [((x-iw)/2)^{n+1} - ((x+iw)/2)^{n+1}]
            for n in 0..=n_max {
                let scale = i / omega / 2f64.powi(n as i32 + 1);
                out.push(pow_minus[n + 1].sub(&pow_plus[n + 1]).scale(scale));
            }
        }
        ClosedFamily::L => {
            let (kappa, _) = constant_kappa(omega, Branch::Plus);
            let two_kappa = kappa * 2.0;
            for n in 0..=n_max {
                let scale = i / omega / 2f64.powi(n as i32 + 1);
                let left = pow_minus[n].mul(&CPoly::x_minus(iw + two_kappa));
                let right = pow_plus[n].mul(&CPoly::x_minus(-iw + two_kappa));
                out.push(left.sub(&right).scale(scale));
            }
        }
        ClosedFamily::T => {
            // (i/2^{n+1}) [(x-i)^n (x-i+1) - (x+i)^n (x+i+1)]
            for n in 0..=n_max {
                let scale = i / 2f64.powi(n as i32 + 1);
                let left = pow_minus[n].mul(&CPoly::x_minus(iw - Complex64::new(1.0, 0.0)));
                let right = pow_plus[n].mul(&CPoly::x_minus(-iw - Complex64::new(1.0, 0.0)));
                out.push(left.sub(&right).scale(scale));
            }
        }
        ClosedFamily::LInversion => {
            // ((x+i)/(2 i^{n+1})) sum_{k<n} (-n)_k / k! * ((1-ix)/2)^k
            out.push(CPoly::one());
            let tau = CPoly::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.5)]);
            for n in 1..=n_max {
                let mut sum = CPoly::zero();
                let mut coef = Complex64::new(1.0, 0.0);
                let mut tau_pow = CPoly::one();
                for k in 0..n {
                    sum = sum.add(&tau_pow.scale(coef));
                    coef *= Complex64::new((k as f64 - n as f64) / (k as f64 + 1.0), 0.0);
                    tau_pow = tau_pow.mul(&tau);
                }
                let scale = (i.powu(n as u32 + 1) * 2.0).inv();
                out.push(plus.mul(&sum).scale(scale));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::GaussRational;
    use crate::recurrence::{
        constant_params, gcrr_params, generate, scaled_zeta1, GCRRSpec, QuadFactor,
    };
    use rand::prelude::*;

    fn q(num: i64, den: i64) -> GaussRational {
        GaussRational::ratio(num, den)
    }

    fn constant_alphas(n_max: usize) -> Vec<GaussRational> {
        let params = constant_params::<GaussRational>();
        alpha_sequence(
            &params,
            &PerturbRule::Constant { value: q(1, 2) },
            n_max,
        )
        .unwrap()
    }

    #[test]
    fn perturb_anchors() {
        let params = constant_params::<GaussRational>();
        let p = generate(&params, 3).unwrap();
        let l = perturb(&params, &p, &PerturbRule::Constant { value: q(1, 2) }).unwrap();
        assert_eq!(l[0], Poly::one());
        // L_1 = x - 1/2
        assert_eq!(l[1], Poly::new(vec![q(-1, 2), q(1, 1)]));
        // L_2 = (3x^2 - 2x - 1)/4
        assert_eq!(l[2], Poly::new(vec![q(-1, 4), q(-1, 2), q(3, 4)]));
    }

    #[test]
    fn zero_alpha_rejected() {
        let params = constant_params::<GaussRational>();
        let p = generate(&params, 2).unwrap();
        assert!(perturb(&params, &p, &PerturbRule::Constant { value: q(0, 1) }).is_err());
    }

    #[test]
    fn special_ledger_constant_example() {
        let params = constant_params::<GaussRational>();
        let alphas = constant_alphas(4);
        let led = ledger_special(&params, &alphas, 1).unwrap();
        assert_eq!(led.e, q(1, 4));
        assert_eq!(led.f, q(-1, 2));
        assert_eq!(led.g, q(1, 2));
        assert_eq!(led.p, q(1, 4));
        assert_eq!(led.q, q(-1, 2));
        // the x-coefficient of the cubic block is kappa^2 + w^2/4 = 1/2
        assert_eq!(led.r, q(1, 2));
        assert_eq!(led.s, q(0, 1));
        assert_eq!(led.t, q(-1, 16));
        assert_eq!(led.u, q(1, 8));
        assert_eq!(led.v, q(-3, 16));
        assert_eq!(led.w, q(1, 8));
        assert_eq!(led.z, q(-1, 8));
    }

    #[test]
    fn ledger_identity_exact_for_constant_example() {
        let params = constant_params::<GaussRational>();
        let p = generate(&params, 8).unwrap();
        let alphas = constant_alphas(8);
        let l = perturb_with_alphas(&p, &alphas).unwrap();
        for n in 1..=6 {
            let led = ledger_special(&params, &alphas, n).unwrap();
            assert_eq!(verify_ledger_identity(&l, &led, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn ledger_identity_numeric_random_draws() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..8 {
            let n_top = 8usize;
            let rho: Vec<Complex64> = (0..=n_top + 1)
                .map(|_| Complex64::new(rng.gen_range(0.5..1.5), 0.0))
                .collect();
            let c: Vec<Complex64> = (0..=n_top + 1)
                .map(|_| Complex64::new(rng.gen_range(-0.5..0.5), 0.0))
                .collect();
            let d: Vec<Complex64> = (0..=n_top)
                .map(|_| Complex64::new(rng.gen_range(0.1..0.5), 0.0))
                .collect();
            let omega = Complex64::new(rng.gen_range(0.8..1.6), 0.0);
            let params =
                RIIParams::from_tables(rho, c, d, QuadFactor::Special { omega }).unwrap();
            let alphas: Vec<Complex64> = (0..=n_top + 1)
                .map(|_| Complex64::new(rng.gen_range(0.3..1.3), 0.0))
                .collect();
            let p = generate(&params, n_top).unwrap();
            let l = perturb_with_alphas(&p, &alphas).unwrap();
            for n in 1..n_top - 1 {
                let led = ledger_special(&params, &alphas, n).unwrap();
                let res = verify_ledger_identity(&l, &led, n).unwrap();
                assert!(res < 1e-10, "residual {res:.3e} at n={n}");
            }
        }
    }

    #[test]
    fn general_ledger_specializes_exactly() {
        // rational family with varying coefficients, special roots +-i
        let rho: Vec<GaussRational> = (0..8).map(|k| q(k + 1, k + 2)).collect();
        let c: Vec<GaussRational> = (0..8).map(|k| q(k - 2, 7)).collect();
        let d: Vec<GaussRational> = (1..8).map(|k| q(1, 3 + k)).collect();
        let special = RIIParams::from_tables(
            rho,
            c,
            d,
            QuadFactor::Special { omega: q(1, 1) },
        )
        .unwrap();
        let general = special.as_general();
        let alphas: Vec<GaussRational> = (0..8).map(|k| q(2 * k + 1, 5)).collect();
        for n in 1..=5 {
            let a = ledger_special(&special, &alphas, n).unwrap();
            let b = ledger_general(&general, &alphas, n).unwrap();
            assert_eq!(a, b, "mismatch at n={n}");
        }
    }

    #[test]
    fn general_ledger_identity_with_distinct_roots() {
        // per-index real roots a_k, b_k
        let mut rng = StdRng::seed_from_u64(11);
        let n_top = 7usize;
        let rho: Vec<Complex64> = (0..=n_top + 1)
            .map(|_| Complex64::new(rng.gen_range(0.6..1.4), 0.0))
            .collect();
        let c: Vec<Complex64> = (0..=n_top + 1)
            .map(|_| Complex64::new(rng.gen_range(-0.4..0.4), 0.0))
            .collect();
        let d: Vec<Complex64> = (0..=n_top)
            .map(|_| Complex64::new(rng.gen_range(0.1..0.4), 0.0))
            .collect();
        let a_tab: Vec<Complex64> = (0..=n_top + 1)
            .map(|_| Complex64::new(rng.gen_range(1.2..2.2), 0.0))
            .collect();
        let b_tab: Vec<Complex64> = (0..=n_top + 1)
            .map(|_| Complex64::new(rng.gen_range(-2.2..-1.2), 0.0))
            .collect();
        let a_tab = std::sync::Arc::new(a_tab);
        let b_tab = std::sync::Arc::new(b_tab);
        let a_cl = a_tab.clone();
        let b_cl = b_tab.clone();
        let params = RIIParams::from_tables(
            rho,
            c,
            d,
            QuadFactor::General {
                a: std::sync::Arc::new(move |k| a_cl[k]),
                b: std::sync::Arc::new(move |k| b_cl[k]),
            },
        )
        .unwrap();
        let alphas: Vec<Complex64> = (0..=n_top + 1)
            .map(|_| Complex64::new(rng.gen_range(0.3..1.0), 0.0))
            .collect();
        let p = generate(&params, n_top).unwrap();
        let l = perturb_with_alphas(&p, &alphas).unwrap();
        for n in 1..n_top - 1 {
            let led = ledger_general(&params, &alphas, n).unwrap();
            let res = verify_ledger_identity(&l, &led, n).unwrap();
            assert!(res < 1e-10, "residual {res:.3e} at n={n}");
        }
    }

    #[test]
    fn condition1_fixed_point_and_chain() {
        let params = constant_params::<GaussRational>();
        let next = alpha_condition1(&params, &q(1, 2), 2).unwrap();
        assert_eq!(next, q(1, 2));
        // scaled family: seeded at 1/4 the chain reproduces n/(2(n+1))
        let scaled = scaled_zeta1::<GaussRational>();
        let alphas = alpha_sequence(
            &scaled,
            &PerturbRule::AlphaRecursion { seed: q(1, 4) },
            10,
        )
        .unwrap();
        assert_eq!(alphas[2], q(1, 3));
        for n in 1..=10 {
            assert_eq!(alphas[n], q(n as i64, 2 * (n as i64 + 1)), "n={n}");
        }
    }

    #[test]
    fn condition2_pass_and_fail() {
        let params = constant_params::<Complex64>();
        let alphas: Vec<Complex64> = (0..6).map(|_| Complex64::new(0.5, 0.0)).collect();
        let (ok, res) = check_condition2(&params, &alphas, 2).unwrap();
        assert!(ok && res == 0.0);
        let mut bad = alphas;
        bad[2] += Complex64::new(1e-3, 0.0);
        let (ok, res) = check_condition2(&params, &bad, 2).unwrap();
        assert!(!ok && res > 1e-4);
    }

    #[test]
    fn quadratic_roots_scaled_family_exact() {
        let scaled = scaled_zeta1::<GaussRational>();
        for n in 1..=10i64 {
            let plus = alpha_quadratic(&scaled, n as usize, Branch::Plus).unwrap();
            let minus = alpha_quadratic(&scaled, n as usize, Branch::Minus).unwrap();
            assert_eq!(plus, q(n, 2 * (n + 1)));
            assert_eq!(plus, minus); // discriminant is exactly zero
            let beta = beta_quadratic(&scaled, n as usize, Branch::Plus).unwrap();
            assert_eq!(beta, q(-n, 2 * (n + 1)));
        }
    }

    #[test]
    fn quadratic_roots_complex_regime() {
        // constant family at omega = 2: discriminant 1 - w^2 < 0
        let rho = vec![Complex64::new(1.0, 0.0); 6];
        let c = vec![Complex64::new(0.0, 0.0); 6];
        let d = vec![Complex64::new(0.25, 0.0); 5];
        let params = RIIParams::from_tables(
            rho,
            c,
            d,
            QuadFactor::Special {
                omega: Complex64::new(2.0, 0.0),
            },
        )
        .unwrap();
        let root = alpha_quadratic(&params, 1, Branch::Plus).unwrap();
        assert!(root.im.abs() > 0.5);
        assert!((root.norm_sqr() - 1.0).abs() < 1e-14); // |root|^2 = C/A = 1
    }

    #[test]
    fn kappa_branches_and_flag() {
        let (k, flagged) = constant_kappa(1.0, Branch::Plus);
        assert_eq!((k.re, k.im, flagged), (0.5, 0.0, false));
        let (k2, _) = constant_kappa(1.0, Branch::Minus);
        assert_eq!(k2.re, 0.5);
        let (kp, f1) = constant_kappa(0.8, Branch::Plus);
        let (km, f2) = constant_kappa(0.8, Branch::Minus);
        assert!((kp.re - 0.8).abs() < 1e-15 && (km.re - 0.2).abs() < 1e-15);
        assert!(!f1 && !f2);
        let (kc, flagged) = constant_kappa(2.0, Branch::Plus);
        assert!(flagged && kc.im.abs() > 0.5);
    }

    #[test]
    fn discriminant_zeta_roots() {
        assert_eq!(zeta_from_discriminant(5, 1.0).unwrap(), vec![1.0]);
        let roots = zeta_from_discriminant(2, 1.2).unwrap();
        assert!(roots
            .iter()
            .any(|z| (z - 3.048652150689292).abs() < 1e-12));
        assert!(zeta_from_discriminant(2, 0.9).is_err());
    }

    #[test]
    fn inversion_fixed_point() {
        let params = constant_params::<GaussRational>();
        let i_half = GaussRational::imag_ratio(1, 2);
        let next = alpha_inversion(&params, &i_half, 3).unwrap();
        assert_eq!(next, i_half);
    }

    #[test]
    fn reductions_regenerate_perturbations() {
        // alpha chain, constant family, kappa = 1/2
        let params = constant_params::<GaussRational>();
        let p = generate(&params, 8).unwrap();
        let alphas = constant_alphas(9);
        let l = perturb_with_alphas(&p, &alphas).unwrap();
        let reduced = reduced_recurrence(&params, &alphas, ReduceMode::Alpha).unwrap();
        let regen = generate(&reduced, 8).unwrap();
        assert_eq!(l, regen);

        // beta chain with beta = -1/2
        let betas = alpha_sequence(
            &params,
            &PerturbRule::Constant { value: q(-1, 2) },
            9,
        )
        .unwrap();
        let t = perturb_with_alphas(&p, &betas).unwrap();
        assert_eq!(t[1], Poly::new(vec![q(1, 2), q(1, 1)])); // x + 1/2
        let reduced_t = reduced_recurrence(&params, &betas, ReduceMode::Beta).unwrap();
        assert_eq!(t, generate(&reduced_t, 8).unwrap());

        // inversion chain with alpha = i/2
        let iv = alpha_sequence(
            &params,
            &PerturbRule::Constant {
                value: GaussRational::imag_ratio(1, 2),
            },
            9,
        )
        .unwrap();
        let li = perturb_with_alphas(&p, &iv).unwrap();
        let reduced_i = reduced_recurrence(&params, &iv, ReduceMode::Inversion).unwrap();
        assert_eq!(li, generate(&reduced_i, 8).unwrap());
        // centers: c'_0 = i/2, c'_n = 0 for n >= 1
        assert_eq!(reduced_i.c(0), GaussRational::imag_ratio(1, 2));
        assert!(Scalar::is_zero(&reduced_i.c(3)));
    }

    #[test]
    fn reduction_rejects_inadmissible_constants() {
        let params = constant_params::<Complex64>();
        let alphas: Vec<Complex64> = (0..6).map(|_| Complex64::new(0.37, 0.0)).collect();
        assert!(matches!(
            reduced_recurrence(&params, &alphas, ReduceMode::Alpha),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn scaled_family_quadratic_chain_reduces() {
        let scaled = scaled_zeta1::<GaussRational>();
        let alphas = alpha_sequence(
            &scaled,
            &PerturbRule::QuadraticRoot {
                branch: Branch::Plus,
            },
            9,
        )
        .unwrap();
        let p = generate(&scaled, 8).unwrap();
        let l = perturb_with_alphas(&p, &alphas).unwrap();
        let reduced = reduced_recurrence(&scaled, &alphas, ReduceMode::Alpha).unwrap();
        assert_eq!(l, generate(&reduced, 8).unwrap());
        // the perturbed centers stay at zero for this family
        assert!(Scalar::is_zero(&reduced.c(1)));
    }

    #[test]
    fn closed_forms_match_generated_families() {
        let params = constant_params::<Complex64>();
        let p = generate(&params, 8).unwrap();
        let closed_p = closed_form_examples(8, ClosedFamily::P, 1.0).unwrap();
        for n in 0..=8 {
            assert!(p[n].max_abs_diff(&closed_p[n]) < 1e-13, "P_{n}");
        }
        let alphas: Vec<Complex64> = (0..10).map(|_| Complex64::new(0.5, 0.0)).collect();
        let l = perturb_with_alphas(&p, &alphas).unwrap();
        let closed_l = closed_form_examples(8, ClosedFamily::L, 1.0).unwrap();
        for n in 0..=8 {
            assert!(l[n].max_abs_diff(&closed_l[n]) < 1e-13, "L_{n}");
        }
        let betas: Vec<Complex64> = (0..10).map(|_| Complex64::new(-0.5, 0.0)).collect();
        let t = perturb_with_alphas(&p, &betas).unwrap();
        let closed_t = closed_form_examples(8, ClosedFamily::T, 1.0).unwrap();
        for n in 0..=8 {
            assert!(t[n].max_abs_diff(&closed_t[n]) < 1e-13, "T_{n}");
        }
        // anchor zeros: L_2 = (3x+1)(x-1)/4, T_2 = (3x-1)(x+1)/4
        let l2 = &closed_l[2];
        assert!(l2.eval(Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(l2.eval(Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-14);
        let t2 = &closed_t[2];
        assert!(t2.eval(Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!(t2.eval(Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn inversion_series_is_rescaled_lag() {
        let params = constant_params::<Complex64>();
        let p = generate(&params, 6).unwrap();
        let series = closed_form_examples(6, ClosedFamily::LInversion, 1.0).unwrap();
        let half_shift = CPoly::new(vec![
            Complex64::new(0.0, -0.5),
            Complex64::new(-0.5, 0.0),
        ]); // -(x+i)/2
        for n in 1..=6 {
            let expect = half_shift.mul(&p[n - 1]);
            assert!(series[n].max_abs_diff(&expect) < 1e-13, "n={n}");
        }
        // and it differs from the true perturbation
        let iv: Vec<Complex64> = (0..8).map(|_| Complex64::new(0.0, 0.5)).collect();
        let li = perturb_with_alphas(&p, &iv).unwrap();
        assert!(series[3].max_abs_diff(&li[3]) > 0.1);
    }

    #[test]
    fn ledger_identity_holds_for_gcrr_draws() {
        let spec = GCRRSpec::new(2.5, 0.7, 1.0, false);
        let params = gcrr_params(&spec).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let alphas: Vec<Complex64> = (0..12)
            .map(|_| Complex64::new(rng.gen_range(0.2..1.2), rng.gen_range(-0.3..0.3)))
            .collect();
        let p = generate(&params, 10).unwrap();
        let l = perturb_with_alphas(&p, &alphas).unwrap();
        for n in 1..=9 {
            let led = ledger_special(&params, &alphas, n).unwrap();
            let res = verify_ledger_identity(&l, &led, n).unwrap();
            assert!(res < 1e-10, "residual {res:.3e} at n={n}");
        }
    }
}
