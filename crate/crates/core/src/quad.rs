//! Adaptive Gauss-Legendre quadrature for complex-valued integrands on a
//! real interval. Panels are bisected until the whole-panel estimate agrees
//! with the sum of its halves.

use std::sync::OnceLock;

use num::complex::Complex64;

use crate::error::{Error, Result};

const NODES: usize = 10;
/// Total panel evaluations allowed before giving up.
const PANEL_BUDGET: usize = 1 << 14;

fn legendre_rule() -> &'static ([f64; NODES], [f64; NODES]) {
    static RULE: OnceLock<([f64; NODES], [f64; NODES])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut nodes = [0.0; NODES];
        let mut weights = [0.0; NODES];
        for j in 0..n {
            let mut x = (std::f64::consts::PI * (j as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // P_n(x) and P_n'(x) by the three-term recurrence
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            nodes[j] = x;
            weights[j] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (nodes, weights) = legendre_rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Integrate f over [a, b] to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    if !(a.is_finite() && b.is_finite()) || a >= b || !(tol > 0.0) {
        return Err(Error::InvalidParam(
            "integration needs a finite interval a < b and a positive tolerance".into(),
        ));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, tol)];
    let mut used = 0usize;
    while let Some((lo, hi, budget)) = stack.pop() {
        used += 3;
        if used > PANEL_BUDGET {
            return Err(Error::NonConvergence(
                "panel budget exhausted; integrand refines without settling".into(),
            ));
        }
        let whole = panel(&f, lo, hi);
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let err = (whole - (left + right)).norm();
        if err <= budget || (hi - lo) < 1e-14 * (b - a) {
            total += left + right;
        } else {
            stack.push((lo, mid, 0.5 * budget));
            stack.push((mid, hi, 0.5 * budget));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // GL10 is exact to degree 19; x^12 over [0, 1] forces one level of work
        let val = integrate(|x| Complex64::new(x.powi(12), 0.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((val.re - 1.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let val = integrate(|x| Complex64::new((10.0 * x).cos(), 0.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((val.re - 10.0f64.sin() / 10.0).abs() < 1e-11);
        // narrow Lorentzian peak
        let val = integrate(
            |x| Complex64::new(1.0 / (1e-4 + x * x), 0.0),
            -1.0,
            1.0,
            1e-8,
        )
        .unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((val.re - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn complex_integrand() {
        let val = integrate(
            |x| Complex64::new(0.0, 1.0) * Complex64::new(x, 0.0).exp(),
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((val - Complex64::new(0.0, 1.0f64.exp() - 1.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(integrate(|_| Complex64::new(1.0, 0.0), 1.0, 0.0, 1e-10).is_err());
        assert!(integrate(|_| Complex64::new(1.0, 0.0), 0.0, f64::INFINITY, 1e-10).is_err());
    }
}
