//! Tridiagonal linear pencils attached to a special-form family: the real
//! symmetric J_n (diagonal rho_k, off-diagonal sqrt(d_k)) paired with K_n
//! (perturbed sequences) or G_n (the base sequence), plus the three
//! bidiagonal factorizations of J_n used by the biorthogonality checks.
//!
//! det(x J_n - K_n) runs the same three-term recurrence as the perturbed
//! sequence itself, so the pencil eigenvalues are its zeros; see the eigen
//! module for the solvers.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::recurrence::RIIParams;

/// Which matrix sits opposite J in the pencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PencilKind {
    /// Perturbed-sequence matrix: diag (rho_0 c_0 + alpha_1, rho_1 c'_1, ...).
    K,
    /// Base-sequence matrix: diag (rho_0 c_0, ..., rho_{n-1} c_{n-1}).
    G,
}

/// J_n together with K_n or G_n, stored as diagonals. The off-diagonals of
/// the complex member are i w sqrt(d_k) above and -i w sqrt(d_k) below, so
/// each super entry is the conjugate of its sub partner and the matrix is
/// Hermitian exactly when the diagonal is real.
#[derive(Clone, Debug)]
pub struct HermTridiagPencil {
    pub j_diag: Vec<f64>,
    pub j_off: Vec<f64>,
    pub k_diag: Vec<Complex64>,
    pub k_super: Vec<Complex64>,
    pub k_sub: Vec<Complex64>,
    pub kind: PencilKind,
}

impl HermTridiagPencil {
    pub fn n(&self) -> usize {
        self.j_diag.len()
    }

    /// True when the complex member is Hermitian: its diagonal is real (the
    /// off-diagonals are conjugate by construction).
    pub fn is_hermitian(&self) -> bool {
        self.k_diag.iter().all(|z| z.im == 0.0)
    }

    /// Tridiagonal product (K v) without densifying.
    pub fn k_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.k_diag[i] * v[i];
            if i + 1 < n {
                acc += self.k_super[i] * v[i + 1];
            }
            if i > 0 {
                acc += self.k_sub[i - 1] * v[i - 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Tridiagonal product (J v).
    pub fn j_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = v[i] * self.j_diag[i];
            if i + 1 < n {
                acc += v[i + 1] * self.j_off[i];
            }
            if i > 0 {
                acc += v[i - 1] * self.j_off[i - 1];
            }
            out[i] = acc;
        }
        out
    }
}

fn real_positive(z: Complex64, what: &str, k: usize) -> Result<f64> {
    if z.im != 0.0 || !(z.re > 0.0) {
        return Err(Error::InvalidParam(format!(
            "{what}_{k} = {z} must be real and positive for the pencil"
        )));
    }
    Ok(z.re)
}

/// Build the (K_n, J_n) or (G_n, J_n) pencil for a special-form family.
/// For kind K the diagonal is rho_0 c_0 + alpha_1 followed by
/// rho_k centers[k] for k = 1..n-1, where `centers` are the perturbed
/// centers (ledger ratios -s_k/(f_k rho_k) for the alpha chains); for kind G
/// the `alpha_1` and `centers` arguments are not read.
pub fn build_pencil(
    params: &RIIParams<Complex64>,
    alpha_1: Complex64,
    centers: &[Complex64],
    n: usize,
    kind: PencilKind,
) -> Result<HermTridiagPencil> {
    if n == 0 {
        return Err(Error::InvalidParam("pencil dimension must be >= 1".into()));
    }
    params.check_limit(n - 1)?;
    let omega = params.omega().ok_or_else(|| {
        Error::HypothesisViolation("pencils need the special quadratic factor x^2 + w^2".into())
    })?;
    let omega = real_positive(omega, "omega", 0)?;
    let mut j_diag = Vec::with_capacity(n);
    for k in 0..n {
        j_diag.push(real_positive(params.rho(k), "rho", k)?);
    }
    let mut j_off = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        j_off.push(real_positive(params.d(k), "d", k)?.sqrt());
    }
    let k_diag = match kind {
        PencilKind::G => (0..n).map(|k| params.rho(k) * params.c(k)).collect(),
        PencilKind::K => {
            if n > 1 && centers.len() < n {
                return Err(Error::InvalidParam(format!(
                    "kind K needs {n} perturbed centers, got {}",
                    centers.len()
                )));
            }
            let mut diag = Vec::with_capacity(n);
            diag.push(params.rho(0) * params.c(0) + alpha_1);
            for k in 1..n {
                diag.push(params.rho(k) * centers[k]);
            }
            diag
        }
    };
    let k_super: Vec<Complex64> = j_off
        .iter()
        .map(|&s| Complex64::new(0.0, omega * s))
        .collect();
    let k_sub: Vec<Complex64> = k_super.iter().map(|z| z.conj()).collect();
    Ok(HermTridiagPencil {
        j_diag,
        j_off,
        k_diag,
        k_super,
        k_sub,
        kind,
    })
}

/// Forward Cholesky of a symmetric positive definite tridiagonal matrix
/// given as (diag, off): J = C C^T with C lower bidiagonal, diagonal m_i and
/// subdiagonal l_{i+1} = off_i / m_i, m_i = sqrt(diag_i - l_i^2).
pub fn cholesky_lu(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length mismatch");
    let mut m = Vec::with_capacity(n);
    let mut l = Vec::with_capacity(n - 1);
    for i in 0..n {
        let lsq = if i == 0 {
            0.0
        } else {
            let li = off[i - 1] / m[i - 1];
            l.push(li);
            li * li
        };
        let pivot = diag[i] - lsq;
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { index: i });
        }
        m.push(pivot.sqrt());
    }
    Ok((m, l))
}

/// Backward UL factorization J = C^T C with the same bidiagonal shape and
/// the top corner forced to close (no free tail entry): m_{n-1}^2 = diag_{n-1},
/// m_i^2 = diag_i - off_i^2 / m_{i+1}^2, l_{i+1} = off_i / m_{i+1}. Returns
/// (m, l, s_0) where s_0 = m_0 is the induced value of the free parameter.
pub fn factor_ul(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length mismatch");
    let mut m = vec![0.0; n];
    let mut l = vec![0.0; n - 1];
    for i in (0..n).rev() {
        let deficit = if i + 1 < n {
            let t = off[i] / m[i + 1];
            l[i] = t;
            t * t
        } else {
            0.0
        };
        let pivot = diag[i] - deficit;
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { index: i });
        }
        m[i] = pivot.sqrt();
    }
    let s0 = m[0];
    Ok((m, l, s0))
}

/// Square-root-free factorization J = S D S^T with S unit lower bidiagonal,
/// pivots e_0 = diag_0, e_i = diag_i - off_{i-1}^2 / e_{i-1}, subdiagonal
/// l_{i+1} = off_i / e_i. The scaled factor S D^{1/2} equals the Cholesky
/// factor entrywise (e_i = m_i^2).
pub fn factor_ldu(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length mismatch");
    let mut e = Vec::with_capacity(n);
    let mut l = Vec::with_capacity(n - 1);
    for i in 0..n {
        let pivot = if i == 0 {
            diag[0]
        } else {
            diag[i] - off[i - 1] * off[i - 1] / e[i - 1]
        };
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { index: i });
        }
        if i > 0 {
            l.push(off[i - 1] / e[i - 1]);
        }
        e.push(pivot);
    }
    Ok((e, l))
}

/// True iff the forward Cholesky succeeds with strictly positive pivots.
pub fn is_positive_definite(diag: &[f64], off: &[f64]) -> bool {
    cholesky_lu(diag, off).is_ok()
}

/// All three factorizations of one J, with the matrix kept alongside so the
/// reconstruction residuals need no extra arguments.
#[derive(Clone, Debug)]
pub struct FactorSet {
    pub j_diag: Vec<f64>,
    pub j_off: Vec<f64>,
    pub chol_m: Vec<f64>,
    pub chol_l: Vec<f64>,
    pub ul_m: Vec<f64>,
    pub ul_l: Vec<f64>,
    pub s0: f64,
    pub ldu_e: Vec<f64>,
    pub ldu_l: Vec<f64>,
}

pub fn factor_all(diag: &[f64], off: &[f64]) -> Result<FactorSet> {
    let (chol_m, chol_l) = cholesky_lu(diag, off)?;
    let (ul_m, ul_l, s0) = factor_ul(diag, off)?;
    let (ldu_e, ldu_l) = factor_ldu(diag, off)?;
    Ok(FactorSet {
        j_diag: diag.to_vec(),
        j_off: off.to_vec(),
        chol_m,
        chol_l,
        ul_m,
        ul_l,
        s0,
        ldu_e,
        ldu_l,
    })
}

fn max3(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

impl FactorSet {
    pub fn n(&self) -> usize {
        self.j_diag.len()
    }

    /// max-entry residual of C C^T - J (forward Cholesky).
    pub fn residual_llt(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let lsq = if i == 0 {
                0.0
            } else {
                self.chol_l[i - 1] * self.chol_l[i - 1]
            };
            worst = max3(
                worst,
                (self.chol_m[i] * self.chol_m[i] + lsq - self.j_diag[i]).abs(),
            );
            if i + 1 < n {
                worst = max3(
                    worst,
                    (self.chol_l[i] * self.chol_m[i] - self.j_off[i]).abs(),
                );
            }
        }
        worst
    }

    /// max-entry residual of C^T C - J (backward UL, tail entry closed).
    pub fn residual_ult(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let lsq = if i + 1 < n {
                self.ul_l[i] * self.ul_l[i]
            } else {
                0.0
            };
            worst = max3(
                worst,
                (self.ul_m[i] * self.ul_m[i] + lsq - self.j_diag[i]).abs(),
            );
            if i + 1 < n {
                worst = max3(
                    worst,
                    (self.ul_l[i] * self.ul_m[i + 1] - self.j_off[i]).abs(),
                );
            }
        }
        worst
    }

    /// max-entry residual of S D S^T - J (square-root-free form).
    pub fn residual_ldu(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let lsq = if i == 0 {
                0.0
            } else {
                self.ldu_l[i - 1] * self.ldu_l[i - 1] * self.ldu_e[i - 1]
            };
            worst = max3(worst, (self.ldu_e[i] + lsq - self.j_diag[i]).abs());
            if i + 1 < n {
                worst = max3(
                    worst,
                    (self.ldu_l[i] * self.ldu_e[i] - self.j_off[i]).abs(),
                );
            }
        }
        worst
    }

    /// max |e_i - m_i^2|: consistency between the pivot sequence and the
    /// Cholesky diagonal.
    pub fn pivot_consistency(&self) -> f64 {
        self.ldu_e
            .iter()
            .zip(&self.chol_m)
            .map(|(e, m)| (e - m * m).abs())
            .fold(0.0, max3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{constant_params, gcrr_params, scaled_zeta1, GCRRSpec};

    fn constant_j(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![1.0; n], vec![0.5; n - 1])
    }

    #[test]
    fn constant_k_pencil_anchor() {
        let params = constant_params::<Complex64>();
        // centers for the kappa = 1/2 chain: c'_k = 0 for k >= 1
        let centers = vec![Complex64::new(0.0, 0.0); 2];
        let pencil = build_pencil(
            &params,
            Complex64::new(0.5, 0.0),
            &centers,
            2,
            PencilKind::K,
        )
        .unwrap();
        assert_eq!(pencil.k_diag, vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(pencil.k_super, vec![Complex64::new(0.0, 0.5)]);
        assert_eq!(pencil.k_sub, vec![Complex64::new(0.0, -0.5)]);
        assert_eq!(pencil.j_diag, vec![1.0, 1.0]);
        assert_eq!(pencil.j_off, vec![0.5]);
        assert!(pencil.is_hermitian());
    }

    #[test]
    fn gcrr_g_pencil_anchor() {
        let spec = GCRRSpec::new(1.0, 0.0, 1.0, false);
        let params = gcrr_params(&spec).unwrap();
        let pencil = build_pencil(
            &params,
            Complex64::new(0.0, 0.0),
            &[],
            2,
            PencilKind::G,
        )
        .unwrap();
        assert_eq!(pencil.k_diag, vec![Complex64::new(0.0, 0.0); 2]);
        assert_eq!(pencil.k_super, vec![Complex64::new(0.0, 0.5)]);
    }

    #[test]
    fn complex_alpha_breaks_hermitian_structure() {
        let params = constant_params::<Complex64>();
        let centers = vec![Complex64::new(0.0, 0.0); 3];
        let pencil = build_pencil(
            &params,
            Complex64::new(0.0, 0.5),
            &centers,
            3,
            PencilKind::K,
        )
        .unwrap();
        assert!(!pencil.is_hermitian());
    }

    #[test]
    fn cholesky_constant_anchor() {
        let (diag, off) = constant_j(3);
        let (m, l) = cholesky_lu(&diag, &off).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-15);
        assert!((l[0] - 0.5).abs() < 1e-15);
        assert!((m[1] - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((l[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((m[2] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ul_constant_anchor() {
        let (diag, off) = constant_j(2);
        let (m, l, s0) = factor_ul(&diag, &off).unwrap();
        assert!((m[1] - 1.0).abs() < 1e-15);
        assert!((m[0] * m[0] - 0.75).abs() < 1e-15);
        assert!((l[0] - 0.5).abs() < 1e-15);
        assert_eq!(s0, m[0]);
    }

    #[test]
    fn ldu_constant_anchor() {
        let (diag, off) = constant_j(3);
        let (e, _l) = factor_ldu(&diag, &off).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15);
        assert!((e[1] - 0.75).abs() < 1e-15);
        assert!((e[2] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reconstructions_and_consistency() {
        let spec = GCRRSpec::new(1.0, 0.0, 1.0, true);
        let params = gcrr_params(&spec).unwrap();
        for n in [2usize, 8, 16, 32] {
            let pencil = build_pencil(
                &params,
                Complex64::new(0.0, 0.0),
                &[],
                n,
                PencilKind::G,
            )
            .unwrap();
            let fs = factor_all(&pencil.j_diag, &pencil.j_off).unwrap();
            assert!(fs.residual_llt() < 1e-14, "llt at n={n}");
            assert!(fs.residual_ult() < 1e-12, "ult at n={n}");
            assert!(fs.residual_ldu() < 1e-12, "ldu at n={n}");
            assert!(fs.pivot_consistency() < 1e-13, "pivots at n={n}");
            // scaled-factor consistency: both products rebuild the
            // off-diagonal entry, and S D^{1/2} matches C entrywise
            for i in 0..n - 1 {
                let lhs = fs.ldu_l[i] * fs.ldu_e[i];
                let rhs = fs.chol_l[i] * fs.chol_m[i];
                assert!((lhs - rhs).abs() < 1e-13);
                let scaled = fs.ldu_l[i] * fs.ldu_e[i].sqrt();
                assert!((scaled - fs.chol_l[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn positive_definiteness_detection() {
        let (diag, off) = constant_j(32);
        assert!(is_positive_definite(&diag, &off));
        assert!(is_positive_definite(&[1.0], &[]));
        // d_1 = 1 with rho = 1 zeroes the second pivot
        assert!(!is_positive_definite(&[1.0, 1.0], &[1.0]));
        match cholesky_lu(&[1.0, 1.0], &[1.0]) {
            Err(Error::NotPositiveDefinite { index }) => assert_eq!(index, 1),
            other => panic!("expected pivot failure, got {other:?}"),
        }
    }

    #[test]
    fn near_diagonal_limit() {
        let eps = 1e-9;
        let diag = vec![1.3, 0.9, 1.1];
        let off = vec![eps, eps];
        let (m, _) = cholesky_lu(&diag, &off).unwrap();
        for (mi, di) in m.iter().zip(&diag) {
            assert!((mi - di.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_family_ul_residual() {
        let params = scaled_zeta1::<Complex64>();
        let pencil = build_pencil(
            &params,
            Complex64::new(0.0, 0.0),
            &[],
            16,
            PencilKind::G,
        )
        .unwrap();
        let fs = factor_all(&pencil.j_diag, &pencil.j_off).unwrap();
        assert!(fs.residual_ult() < 1e-12);
    }

    #[test]
    fn pencil_rejects_bad_parameters() {
        let params = constant_params::<Complex64>();
        assert!(build_pencil(&params, Complex64::new(0.0, 0.0), &[], 0, PencilKind::G).is_err());
        // negative d via tables
        let bad = RIIParams::from_tables(
            vec![Complex64::new(1.0, 0.0); 4],
            vec![Complex64::new(0.0, 0.0); 4],
            vec![Complex64::new(-0.25, 0.0); 3],
            crate::recurrence::QuadFactor::Special {
                omega: Complex64::new(1.0, 0.0),
            },
        )
        .unwrap();
        assert!(build_pencil(&bad, Complex64::new(0.0, 0.0), &[], 3, PencilKind::G).is_err());
    }
}
