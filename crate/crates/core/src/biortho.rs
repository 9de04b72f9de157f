//! Rational eigenvector components u^R/u^L of the pencils, the zero-indexed
//! weight table pairing them, the chi/Y/Z sequences induced by the three
//! factorizations of J, and the resulting delta-matrix biorthogonality and
//! kernel checks.

use num::complex::Complex64;

use crate::eigen::poly_roots;
use crate::error::{Error, Result};
use crate::pencil::{build_pencil, factor_all, FactorSet, HermTridiagPencil, PencilKind};
use crate::perturbation::{alpha_sequence, perturb_with_alphas, PerturbRule};
use crate::poly::CPoly;
use crate::recurrence::{generate, RIIParams};

/// Which of the conjugate component families to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Right components, built on powers of (x - i w).
    R,
    /// Left components, built on powers of (x + i w).
    L,
}

/// Which factorization of J feeds the rational sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Cholesky,
    Ul,
    Ldu,
}

impl std::fmt::Display for Decomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Decomposition::Cholesky => "cholesky",
            Decomposition::Ul => "ul",
            Decomposition::Ldu => "ldu",
        };
        write!(f, "{name}")
    }
}

/// u_k(x) = (-1)^k L_k(x) / ((x -+ i w)^k prod_{j<=k} sqrt(d_j)) for
/// k = 0..=upto. `d[j]` holds d_{j+1}.
pub fn u_components(
    l: &[CPoly],
    d: &[f64],
    omega: f64,
    x: Complex64,
    side: Side,
    upto: usize,
) -> Result<Vec<Complex64>> {
    if upto >= l.len() || upto > d.len() {
        return Err(Error::InvalidParam(format!(
            "u components to index {upto} need {} polynomials and {} d values",
            upto + 1,
            upto
        )));
    }
    let pole = match side {
        Side::R => Complex64::new(0.0, omega),
        Side::L => Complex64::new(0.0, -omega),
    };
    let base = x - pole;
    if base.norm() == 0.0 {
        return Err(Error::DivisionByZero("u components at x = +-i omega"));
    }
    let mut out = Vec::with_capacity(upto + 1);
    let mut denom = Complex64::new(1.0, 0.0);
    let mut sign = 1.0;
    out.push(l[0].eval(x));
    for k in 1..=upto {
        denom *= base * d[k - 1].sqrt();
        sign = -sign;
        out.push(l[k].eval(x) * sign / denom);
    }
    Ok(out)
}

/// d/dx of u_n^R at x, by the quotient rule:
/// (-1)^n [(x - i w) L_n'(x) - n L_n(x)] / ((x - i w)^{n+1} prod sqrt(d_j)).
fn u_r_derivative(l: &[CPoly], d: &[f64], omega: f64, x: Complex64, n: usize) -> Complex64 {
    let iw = Complex64::new(0.0, omega);
    let base = x - iw;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut denom = base.powu(n as u32 + 1);
    for dj in d.iter().take(n) {
        denom *= dj.sqrt();
    }
    let numer = base * l[n].derivative().eval(x) - l[n].eval(x) * n as f64;
    numer * sign / denom
}

/// Weight table over pairs of zeros of L_n:
/// w[j][k] = 1 / ( -sqrt(d_n) (x_k - i w) [u_n^R]'(x_k) u_{n-1}^L(x_j) ).
pub fn weights(
    l: &[CPoly],
    d: &[f64],
    omega: f64,
    zeros: &[Complex64],
) -> Result<Vec<Vec<Complex64>>> {
    let n = zeros.len();
    if n == 0 || n >= l.len() || d.len() < n {
        return Err(Error::InvalidParam(format!(
            "weights for n={n} need L_0..L_n and d_1..d_n"
        )));
    }
    let iw = Complex64::new(0.0, omega);
    let sqrt_dn = d[n - 1].sqrt();
    let mut right: Vec<Complex64> = Vec::with_capacity(n);
    for &xk in zeros {
        right.push((xk - iw) * u_r_derivative(l, d, omega, xk, n) * sqrt_dn);
    }
    let mut left: Vec<Complex64> = Vec::with_capacity(n);
    for &xj in zeros {
        let comps = u_components(l, d, omega, xj, Side::L, n - 1)?;
        left.push(comps[n - 1]);
    }
    let mut table = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        for k in 0..n {
            let inv = -right[k] * left[j];
            if inv.norm() == 0.0 {
                return Err(Error::HypothesisViolation(format!(
                    "weight inverse vanishes at (j,k) = ({j},{k})"
                )));
            }
            table[j][k] = inv.inv();
        }
    }
    Ok(table)
}

/// chi = C^T u for the forward Cholesky factor:
/// chi_i = m_i u_i + l_{i+1} u_{i+1}, chi_{n-1} = m_{n-1} u_{n-1}.
pub fn chi_values(chol_m: &[f64], chol_l: &[f64], u: &[Complex64]) -> Vec<Complex64> {
    let n = chol_m.len();
    (0..n)
        .map(|i| {
            let mut v = u[i] * chol_m[i];
            if i + 1 < n {
                v += u[i + 1] * chol_l[i];
            }
            v
        })
        .collect()
}

/// Y = C u for the backward UL factor: Y_0 = m_0 u_0,
/// Y_i = l_i u_{i-1} + m_i u_i.
pub fn y_values(ul_m: &[f64], ul_l: &[f64], u: &[Complex64]) -> Vec<Complex64> {
    let n = ul_m.len();
    (0..n)
        .map(|i| {
            let mut v = u[i] * ul_m[i];
            if i > 0 {
                v += u[i - 1] * ul_l[i - 1];
            }
            v
        })
        .collect()
}

/// Z = (S D^{1/2})^T u for the square-root-free factor:
/// Z_i = sqrt(e_i) (u_i + l_{i+1} u_{i+1}), Z_{n-1} = sqrt(e_{n-1}) u_{n-1}.
pub fn z_values(ldu_e: &[f64], ldu_l: &[f64], u: &[Complex64]) -> Vec<Complex64> {
    let n = ldu_e.len();
    (0..n)
        .map(|i| {
            let mut v = u[i];
            if i + 1 < n {
                v += u[i + 1] * ldu_l[i];
            }
            v * ldu_e[i].sqrt()
        })
        .collect()
}

fn sequence_values(
    fs: &FactorSet,
    u: &[Complex64],
    decomposition: Decomposition,
) -> Vec<Complex64> {
    match decomposition {
        Decomposition::Cholesky => chi_values(&fs.chol_m, &fs.chol_l, u),
        Decomposition::Ul => y_values(&fs.ul_m, &fs.ul_l, u),
        Decomposition::Ldu => z_values(&fs.ldu_e, &fs.ldu_l, u),
    }
}

/// Delta-structure statistics for one factorization at dimension n.
#[derive(Clone, Debug)]
pub struct BiorthoReport {
    pub n: usize,
    pub decomposition: Decomposition,
    pub gram: Vec<Vec<Complex64>>,
    pub max_offdiag: f64,
    pub max_diag_dev: f64,
    pub weights: Vec<Vec<Complex64>>,
    /// max |u^L(x_j) J u^R(x_k)| over j != k (should vanish).
    pub unfactored_offdiag: f64,
    /// max relative deviation of u^L(x_j) J u^R(x_j) from the weight inverse.
    pub unfactored_diag_rel: f64,
}

struct USystem {
    l: Vec<CPoly>,
    d: Vec<f64>,
    omega: f64,
    zeros: Vec<Complex64>,
    pencil: HermTridiagPencil,
}

fn build_u_system(
    params: &RIIParams<Complex64>,
    rule: &PerturbRule<Complex64>,
    n: usize,
) -> Result<USystem> {
    if n == 0 {
        return Err(Error::InvalidParam("dimension must be >= 1".into()));
    }
    let p = generate(params, n)?;
    let alphas = alpha_sequence(params, rule, n)?;
    let l = perturb_with_alphas(&p, &alphas)?;
    let zero_set = poly_roots(&l[n])?;
    if !zero_set.all_real(1e-8) {
        return Err(Error::HypothesisViolation(
            "zeros are not certified real; the weight system is stated for real simple zeros"
                .into(),
        ));
    }
    if n > 1 && zero_set.min_gap < 1e-8 {
        return Err(Error::HypothesisViolation(format!(
            "zeros are not well separated (min gap {:.3e})",
            zero_set.min_gap
        )));
    }
    let pencil = build_pencil(params, Complex64::new(0.0, 0.0), &[], n, PencilKind::G)?;
    let omega = params.omega().expect("special form checked by build_pencil").re;
    let mut d = Vec::with_capacity(n);
    for k in 1..=n {
        d.push(params.d(k).re);
    }
    Ok(USystem {
        l,
        d,
        omega,
        zeros: zero_set.values,
        pencil,
    })
}

fn bilinear_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Assemble the weighted gram matrix for one factorization and check the
/// delta structure, along with the unfactored relation
/// u^L(x_j) J u^R(x_k) = delta_{jk} / w[j][k].
pub fn gram_check(
    params: &RIIParams<Complex64>,
    rule: &PerturbRule<Complex64>,
    n: usize,
    decomposition: Decomposition,
) -> Result<BiorthoReport> {
    let sys = build_u_system(params, rule, n)?;
    let fs = factor_all(&sys.pencil.j_diag, &sys.pencil.j_off)?;
    let w = weights(&sys.l, &sys.d, sys.omega, &sys.zeros)?;
    let mut u_right = Vec::with_capacity(n);
    let mut u_left = Vec::with_capacity(n);
    for &x in &sys.zeros {
        u_right.push(u_components(&sys.l, &sys.d, sys.omega, x, Side::R, n - 1)?);
        u_left.push(u_components(&sys.l, &sys.d, sys.omega, x, Side::L, n - 1)?);
    }
    let vals_right: Vec<Vec<Complex64>> = u_right
        .iter()
        .map(|u| sequence_values(&fs, u, decomposition))
        .collect();
    let vals_left: Vec<Vec<Complex64>> = u_left
        .iter()
        .map(|u| sequence_values(&fs, u, decomposition))
        .collect();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut max_offdiag = 0.0f64;
    let mut max_diag_dev = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let entry = bilinear_dot(&vals_left[j], &vals_right[k]) * w[j][k];
            gram[j][k] = entry;
            if j == k {
                max_diag_dev = max_diag_dev.max((entry - Complex64::new(1.0, 0.0)).norm());
            } else {
                max_offdiag = max_offdiag.max(entry.norm());
            }
        }
    }
    let mut unf_off = 0.0f64;
    let mut unf_diag = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let form = bilinear_dot(&u_left[j], &sys.pencil.j_apply(&u_right[k]));
            if j == k {
                let inv = w[j][j].inv();
                unf_diag = unf_diag.max((form - inv).norm() / inv.norm());
            } else {
                unf_off = unf_off.max(form.norm());
            }
        }
    }
    Ok(BiorthoReport {
        n,
        decomposition,
        gram,
        max_offdiag,
        max_diag_dev,
        weights: w,
        unfactored_offdiag: unf_off,
        unfactored_diag_rel: unf_diag,
    })
}

/// Residual of the kernel identity
/// u^L(x) J u^R(y) = sqrt(d_n) [(y - iw) u_n^R(y) u_{n-1}^L(x)
///                              - (x + iw) u_{n-1}^R(y) u_n^L(x)] / (x - y).
pub fn cd_kernel(
    params: &RIIParams<Complex64>,
    rule: &PerturbRule<Complex64>,
    n: usize,
    x: Complex64,
    y: Complex64,
) -> Result<f64> {
    if (x - y).norm() == 0.0 {
        return Err(Error::InvalidParam(
            "kernel identity needs distinct arguments".into(),
        ));
    }
    let sys = build_u_system(params, rule, n)?;
    let ul = u_components(&sys.l, &sys.d, sys.omega, x, Side::L, n)?;
    let ur = u_components(&sys.l, &sys.d, sys.omega, y, Side::R, n)?;
    let lhs = bilinear_dot(&ul[..n], &sys.pencil.j_apply(&ur[..n]));
    let iw = Complex64::new(0.0, sys.omega);
    let rhs = sys.d[n - 1].sqrt() * ((y - iw) * ur[n] * ul[n - 1] - (x + iw) * ur[n - 1] * ul[n])
        / (x - y);
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{constant_params, scaled_zeta1};
    use rand::prelude::*;

    fn constant_l(n: usize) -> (Vec<CPoly>, Vec<f64>) {
        let params = constant_params::<Complex64>();
        let p = generate(&params, n).unwrap();
        let alphas: Vec<Complex64> = (0..=n).map(|_| Complex64::new(0.5, 0.0)).collect();
        (perturb_with_alphas(&p, &alphas).unwrap(), vec![0.25; n])
    }

    #[test]
    fn u_component_anchors() {
        let (l, d) = constant_l(3);
        let x = Complex64::new(0.3, 0.0);
        let ur = u_components(&l, &d, 1.0, x, Side::R, 2).unwrap();
        assert_eq!(ur[0], Complex64::new(1.0, 0.0));
        // u_1^R = -2 (x - 1/2) / (x - i)
        let expect = Complex64::new(-2.0, 0.0) * (x - Complex64::new(0.5, 0.0))
            / (x - Complex64::new(0.0, 1.0));
        assert!((ur[1] - expect).norm() < 1e-14);
        // left components conjugate the right ones at real x (L_k real)
        let ul = u_components(&l, &d, 1.0, x, Side::L, 2).unwrap();
        for k in 0..=2 {
            assert!((ul[k] - ur[k].conj()).norm() < 1e-14, "k={k}");
        }
        assert!(u_components(&l, &d, 1.0, Complex64::new(0.0, 1.0), Side::R, 2).is_err());
    }

    #[test]
    fn weight_table_finite_and_nonzero() {
        for n in 1..=10usize {
            let (l, d) = constant_l(n);
            let zeros = poly_roots(&l[n]).unwrap().values;
            let w = weights(&l, &d, 1.0, &zeros).unwrap();
            for row in &w {
                for entry in row {
                    assert!(entry.norm() > 0.0 && entry.norm().is_finite());
                }
            }
        }
    }

    #[test]
    fn chi_matches_matrix_product() {
        let n = 5;
        let (l, d) = constant_l(n);
        let params = constant_params::<Complex64>();
        let pencil =
            build_pencil(&params, Complex64::new(0.0, 0.0), &[], n, PencilKind::G).unwrap();
        let fs = factor_all(&pencil.j_diag, &pencil.j_off).unwrap();
        let x = Complex64::new(0.7, 0.0);
        let u = u_components(&l, &d, 1.0, x, Side::R, n - 1).unwrap();
        let chi = chi_values(&fs.chol_m, &fs.chol_l, &u);
        // dense C^T u
        for i in 0..n {
            let mut expect = u[i] * fs.chol_m[i];
            if i + 1 < n {
                expect += u[i + 1] * fs.chol_l[i];
            }
            assert!((chi[i] - expect).norm() < 1e-15);
        }
        // boundary rows
        assert!((chi[n - 1] - u[n - 1] * fs.chol_m[n - 1]).norm() < 1e-15);
        let yv = y_values(&fs.ul_m, &fs.ul_l, &u);
        assert!((yv[0] - u[0] * fs.ul_m[0]).norm() < 1e-15);
        let zv = z_values(&fs.ldu_e, &fs.ldu_l, &u);
        assert!((zv[n - 1] - u[n - 1] * fs.ldu_e[n - 1].sqrt()).norm() < 1e-15);
    }

    #[test]
    fn gram_delta_structure_constant_family() {
        let params = constant_params::<Complex64>();
        let rule = PerturbRule::Constant {
            value: Complex64::new(0.5, 0.0),
        };
        for decomposition in [Decomposition::Cholesky, Decomposition::Ul, Decomposition::Ldu] {
            let report = gram_check(&params, &rule, 4, decomposition).unwrap();
            assert!(
                report.max_offdiag < 1e-10,
                "offdiag {} for {decomposition}",
                report.max_offdiag
            );
            assert!(
                report.max_diag_dev < 1e-10,
                "diag {} for {decomposition}",
                report.max_diag_dev
            );
            assert!(report.unfactored_offdiag < 1e-9);
            assert!(report.unfactored_diag_rel < 1e-9);
        }
    }

    #[test]
    fn gram_trivial_dimension() {
        let params = constant_params::<Complex64>();
        let rule = PerturbRule::Constant {
            value: Complex64::new(0.5, 0.0),
        };
        let report = gram_check(&params, &rule, 1, Decomposition::Cholesky).unwrap();
        assert_eq!(report.gram.len(), 1);
        assert!((report.gram[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gram_scaled_family() {
        let scaled = scaled_zeta1::<Complex64>();
        let rule = PerturbRule::QuadraticRoot {
            branch: crate::perturbation::Branch::Plus,
        };
        for n in [2usize, 6, 10] {
            let report = gram_check(&scaled, &rule, n, Decomposition::Cholesky).unwrap();
            assert!(report.max_offdiag < 1e-8, "offdiag at n={n}");
            assert!(report.max_diag_dev < 1e-8, "diag at n={n}");
        }
    }

    #[test]
    fn complex_rule_rejected() {
        let params = constant_params::<Complex64>();
        let rule = PerturbRule::Constant {
            value: Complex64::new(0.0, 0.5),
        };
        assert!(matches!(
            gram_check(&params, &rule, 4, Decomposition::Cholesky),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn kernel_identity_random_pairs() {
        let params = constant_params::<Complex64>();
        let rule = PerturbRule::Constant {
            value: Complex64::new(0.5, 0.0),
        };
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..25 {
            let x = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
            let mut y = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
            if (x - y).norm() < 1e-3 {
                y += Complex64::new(0.5, 0.0);
            }
            let res = cd_kernel(&params, &rule, 4, x, y).unwrap();
            assert!(res < 1e-10, "residual {res:.3e} at ({x}, {y})");
            let swapped = cd_kernel(&params, &rule, 4, y, x).unwrap();
            assert!(swapped < 1e-10);
        }
        assert!(cd_kernel(&params, &rule, 4, Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0))
            .is_err());
    }
}
