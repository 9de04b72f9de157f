//! Zeros of the generated sequences along two independent routes: as
//! generalized eigenvalues of the (K, J) / (G, J) pencils, and as polynomial
//! roots by Aberth iteration. Agreement between the routes certifies both.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::pencil::{build_pencil, cholesky_lu, HermTridiagPencil, PencilKind};
use crate::perturbation::{
    alpha_sequence, perturb_with_alphas, reduced_recurrence, PerturbRule, ReduceMode,
};
use crate::poly::CPoly;
use crate::recurrence::{generate, RIIParams};

const ABERTH_CAP: usize = 200;

/// How a zero set was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroMethod {
    Pencil,
    Aberth,
}

/// Zeros sorted by real part (ties by imaginary part) with per-zero
/// residuals: |p(z)| / max|coeff| on the polynomial route, the infinity norm
/// of K v - x J v on the pencil route.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub values: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub method: ZeroMethod,
    pub min_gap: f64,
}

impl ZeroSet {
    fn assemble(mut pairs: Vec<(Complex64, f64)>, method: ZeroMethod) -> ZeroSet {
        pairs.sort_by(|a, b| {
            (a.0.re, a.0.im)
                .partial_cmp(&(b.0.re, b.0.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
        let residuals: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mut min_gap = f64::INFINITY;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                min_gap = min_gap.min((values[i] - values[j]).norm());
            }
        }
        ZeroSet {
            values,
            residuals,
            method,
            min_gap,
        }
    }

    /// True when every zero is within `tol` of the real axis.
    pub fn all_real(&self, tol: f64) -> bool {
        self.values.iter().all(|z| z.im.abs() < tol)
    }

    /// Real parts, in the stored order.
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

/// All complex roots of p by Aberth iteration from a perturbed-circle start,
/// finished with a few Newton steps per root.
pub fn poly_roots(p: &CPoly) -> Result<ZeroSet> {
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::InvalidParam(
                "root finding needs degree >= 1".into(),
            ))
        }
    };
    let scale = p.max_abs();
    let lead_inv = p.leading().unwrap().inv();
    let monic: Vec<Complex64> = p.coeffs().iter().map(|c| c * lead_inv).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        // Horner for value and derivative on the monic coefficients
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            dv = dv * z + v;
            v = v * z + c;
        }
        (v, dv)
    };
    // Fujiwara root bound: tighter than 1 + max|c|, which balloons the
    // starting circle for high-degree members and overflows the iteration
    let radius = 2.0
        * monic[..deg]
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(j, c)| c.norm().powf(1.0 / (deg - j) as f64))
            .fold(0.5, f64::max);
    let start = |j: usize, round: usize| {
        let angle = 2.0 * std::f64::consts::PI * (j as f64 + 0.31 * round as f64) / deg as f64
            + 0.4;
        Complex64::from_polar(radius, angle)
    };
    let mut z: Vec<Complex64> = (0..deg).map(|j| start(j, 0)).collect();
    let mut restarts = vec![0usize; deg];
    let mut converged = false;
    for _ in 0..ABERTH_CAP {
        let mut worst = 0.0f64;
        for i in 0..deg {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            if !v.is_finite() || !dv.is_finite() || dv.norm() == 0.0 {
                // iterate left the basin (overflow or a flat spot); restart
                restarts[i] += 1;
                z[i] = start(i, restarts[i]);
                worst = worst.max(1.0);
                continue;
            }
            let newton = v / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let gap = z[i] - z[j];
                    if gap.norm() == 0.0 {
                        continue;
                    }
                    s += gap.inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * s;
            let mut w = if denom.norm() > 1e-300 { newton / denom } else { newton };
            // near-singular corrections can fling the iterate far out;
            // cap the step at the current scale
            let cap = 1.0 + z[i].norm();
            if !w.is_finite() {
                w = Complex64::new(cap, 0.0);
            } else if w.norm() > cap {
                w *= cap / w.norm();
            }
            z[i] -= w;
            worst = worst.max(w.norm() / (1.0 + z[i].norm()));
        }
        if worst <= 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "Aberth iteration did not settle within {ABERTH_CAP} sweeps for degree {deg}"
        )));
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = eval(*zi);
            if dv.norm() > 1e-300 {
                *zi -= v / dv;
            }
        }
    }
    let pairs: Vec<(Complex64, f64)> = z
        .into_iter()
        .map(|zi| (zi, p.eval(zi).norm() / scale))
        .collect();
    Ok(ZeroSet::assemble(pairs, ZeroMethod::Aberth))
}

/// det(x J - M) for the pencil, via the leading-minor recurrence. The
/// super/sub product contributes d_k (x^2 + w^2), so the determinant equals
/// the sequence member the pencil encodes.
pub fn charpoly(pencil: &HermTridiagPencil) -> CPoly {
    let n = pencil.n();
    let mut prev = CPoly::one();
    let mut cur = CPoly::new(vec![-pencil.k_diag[0], Complex64::new(pencil.j_diag[0], 0.0)]);
    for k in 1..n {
        let lin = CPoly::new(vec![-pencil.k_diag[k], Complex64::new(pencil.j_diag[k], 0.0)]);
        let sup = CPoly::new(vec![
            -pencil.k_super[k - 1],
            Complex64::new(pencil.j_off[k - 1], 0.0),
        ]);
        let sub = CPoly::new(vec![
            -pencil.k_sub[k - 1],
            Complex64::new(pencil.j_off[k - 1], 0.0),
        ]);
        let next = lin.mul(&cur).sub(&sup.mul(&sub).mul(&prev));
        prev = cur;
        cur = next;
    }
    cur
}

fn dense_k(pencil: &HermTridiagPencil) -> Vec<Vec<Complex64>> {
    let n = pencil.n();
    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        k[i][i] = pencil.k_diag[i];
        if i + 1 < n {
            k[i][i + 1] = pencil.k_super[i];
            k[i + 1][i] = pencil.k_sub[i];
        }
    }
    k
}

/// Cyclic complex Hermitian Jacobi; returns (eigenvalues, eigenvector
/// columns). `a` is destroyed.
fn hermitian_jacobi(mut a: Vec<Vec<Complex64>>) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = a.len();
    let mut v = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    let norm_f = |m: &Vec<Vec<Complex64>>| -> f64 {
        m.iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let total = norm_f(&a).max(f64::MIN_POSITIVE);
    for _sweep in 0..50 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * a[p][q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-13 * total {
            let eigs: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
            return Ok((eigs, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                let phi = apq / b;
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // unitary U: U[p][p]=c, U[p][q]=s*phi, U[q][p]=-s*conj(phi), U[q][q]=c
                let upq = phi * s;
                let uqp = -phi.conj() * s;
                // A <- U^H A U: columns first, then rows
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = aip * c + aiq * uqp;
                    a[i][q] = aip * upq + aiq * c;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = apj * c + aqj * uqp.conj();
                    a[q][j] = apj * upq.conj() + aqj * c;
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = vip * c + viq * uqp;
                    row[q] = vip * upq + viq * c;
                }
            }
        }
    }
    Err(Error::NonConvergence(
        "Jacobi sweeps did not reduce the off-diagonal norm".into(),
    ))
}

/// Generalized eigenvalues of (K, J). A Hermitian K is reduced with the
/// Cholesky factor of J to a standard Hermitian problem and solved by Jacobi
/// rotations, with eigenvector residuals ||K v - x J v||_inf reported. A
/// non-Hermitian K (complex perturbation constants) is routed to the
/// polynomial-root path through the characteristic polynomial; the returned
/// method field records the switch.
pub fn generalized_eigs(pencil: &HermTridiagPencil) -> Result<ZeroSet> {
    let n = pencil.n();
    if n == 0 {
        return Err(Error::InvalidParam("empty pencil".into()));
    }
    if n > 64 {
        return Err(Error::InvalidParam(
            "dense eigensolver capped at n = 64".into(),
        ));
    }
    if !pencil.is_hermitian() {
        return poly_roots(&charpoly(pencil));
    }
    let (m, l) = cholesky_lu(&pencil.j_diag, &pencil.j_off)?;
    // M = C^{-1} K by forward substitution, column by column
    let k = dense_k(pencil);
    let mut mm = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        for i in 0..n {
            let mut rhs = k[i][j];
            if i > 0 {
                rhs -= mm[i - 1][j] * l[i - 1];
            }
            mm[i][j] = rhs / m[i];
        }
    }
    // A = M C^{-T}: solve A C^T = M along each row, ascending column
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut rhs = mm[i][j];
            if j > 0 {
                rhs -= a[i][j - 1] * l[j - 1];
            }
            a[i][j] = rhs / m[j];
        }
    }
    // symmetrize away the substitution round-off
    for i in 0..n {
        for j in i..n {
            let avg = (a[i][j] + a[j][i].conj()) * 0.5;
            a[i][j] = avg;
            a[j][i] = avg.conj();
        }
    }
    let (eigs, vecs) = hermitian_jacobi(a)?;
    let mut pairs = Vec::with_capacity(n);
    for (idx, lambda) in eigs.iter().enumerate() {
        // pencil eigenvector v = C^{-T} u by back substitution
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let mut rhs = vecs[i][idx];
            if i + 1 < n {
                rhs -= v[i + 1] * l[i];
            }
            v[i] = rhs / m[i];
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= nrm;
        }
        let kv = pencil.k_apply(&v);
        let jv = pencil.j_apply(&v);
        let residual = kv
            .iter()
            .zip(&jv)
            .map(|(a, b)| (a - b * *lambda).norm())
            .fold(0.0, f64::max);
        pairs.push((Complex64::new(*lambda, 0.0), residual));
    }
    Ok(ZeroSet::assemble(pairs, ZeroMethod::Pencil))
}

/// Pair two zero sets and return the largest matched distance. Sets that are
/// real to 1e-8 are paired in sorted order; otherwise pairs are formed
/// greedily by ascending distance.
pub fn match_deviation(a: &ZeroSet, b: &ZeroSet) -> Result<f64> {
    if a.values.len() != b.values.len() {
        return Err(Error::InvalidParam(format!(
            "zero sets of different size: {} vs {}",
            a.values.len(),
            b.values.len()
        )));
    }
    let n = a.values.len();
    if a.all_real(1e-8) && b.all_real(1e-8) {
        // both already sorted by real part
        let dev = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        return Ok(dev);
    }
    let mut edges = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            edges.push(((a.values[i] - b.values[j]).norm(), i, j));
        }
    }
    edges.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut dev = 0.0f64;
    let mut matched = 0;
    for (dist, i, j) in edges {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            dev = dev.max(dist);
            matched += 1;
            if matched == n {
                break;
            }
        }
    }
    Ok(dev)
}

fn infer_mode(params: &RIIParams<Complex64>, alphas: &[Complex64]) -> Result<ReduceMode> {
    for mode in [ReduceMode::Alpha, ReduceMode::Beta, ReduceMode::Inversion] {
        if reduced_recurrence(params, alphas, mode).is_ok() {
            return Ok(mode);
        }
    }
    Err(Error::HypothesisViolation(
        "perturbation constants satisfy no admissibility condition; no pencil applies".into(),
    ))
}

/// The pencil whose generalized eigenvalues are the degree-n zeros:
/// (G, J) for the base sequence, (K, J) for a perturbed one, with the
/// admissibility mode inferred from the constants.
pub fn pencil_for(
    params: &RIIParams<Complex64>,
    rule: Option<&PerturbRule<Complex64>>,
    n: usize,
) -> Result<HermTridiagPencil> {
    if n == 0 {
        return Err(Error::InvalidParam("pencils are indexed from 1".into()));
    }
    match rule {
        None => build_pencil(params, Complex64::new(0.0, 0.0), &[], n, PencilKind::G),
        Some(rule) => {
            let alphas = alpha_sequence(params, rule, n)?;
            // the 1x1 pencil needs no perturbed centers and no admissibility
            let centers: Vec<Complex64> = if n == 1 {
                Vec::new()
            } else {
                let mode = infer_mode(params, &alphas)?;
                let reduced = reduced_recurrence(params, &alphas, mode)?;
                (0..n).map(|k| reduced.c(k)).collect()
            };
            build_pencil(params, alphas[1], &centers, n, PencilKind::K)
        }
    }
}

/// Max distance between the pencil zeros and the polynomial-root oracle for
/// degree n, under matching. `rule = None` compares (G, J) against the base
/// sequence; a rule compares (K, J) against the perturbed sequence.
pub fn cross_check(
    params: &RIIParams<Complex64>,
    rule: Option<&PerturbRule<Complex64>>,
    n: usize,
) -> Result<f64> {
    let pencil = pencil_for(params, rule, n)?;
    let p = generate(params, n)?;
    let target = match rule {
        None => p[n].clone(),
        Some(rule) => {
            let alphas = alpha_sequence(params, rule, n)?;
            let l = perturb_with_alphas(&p, &alphas)?;
            l[n].clone()
        }
    };
    let spectral = generalized_eigs(&pencil)?;
    let oracle = poly_roots(&target)?;
    match_deviation(&spectral, &oracle)
}
