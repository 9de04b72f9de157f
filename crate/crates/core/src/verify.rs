//! The numbered acceptance checks. Each check exercises one documented
//! tolerance end to end and reports a single pass/fail line; `run_all`
//! distributes the checks over a small worker pool.

use std::collections::VecDeque;
use std::sync::Mutex;

use num::complex::Complex64;
use rand::prelude::*;

use crate::analysis::{
    check_interlace, rational_moment, orthogonality_suite, triple_interlace, uniform_sign,
    wronskian_cross_check, InterlaceOutcome, WeightSpec,
};
use crate::biortho::{cd_kernel, gram_check, Decomposition};
use crate::eigen::{cross_check, generalized_eigs, poly_roots};
use crate::error::Result;
use crate::hypergeom::closed_form_deviation;
use crate::pencil::{build_pencil, factor_all, PencilKind};
use crate::perturbation::{
    alpha_quadratic, alpha_sequence, beta_quadratic, check_condition2, closed_form_examples,
    ledger_general, ledger_special, perturb_with_alphas, reduced_recurrence, verify_ledger_identity,
    zeta_from_discriminant, Branch, ClosedFamily, PerturbRule, ReduceMode,
};
use crate::rational::GaussRational;
use crate::recurrence::{
    constant_params, gcrr_params, generate, leading_ratio_law, scaled_zeta1, GCRRSpec,
    QuadFactor, RIIParams,
};

pub const CHECK_COUNT: usize = 11;

pub const CHECK_NAMES: [&str; CHECK_COUNT] = [
    "closed form vs recurrence",
    "coefficient-ledger identity",
    "general ledger specialization",
    "reduced recurrences and closed families",
    "unique admissible sequences",
    "pencil spectra vs polynomial zeros",
    "factorization residuals",
    "biorthogonality and kernel identity",
    "interlacing patterns",
    "moment integrals",
    "leading-coefficient ratio law",
];

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(
            f,
            "check {:>2} ({}): {} - {}",
            self.index, self.name, status, self.detail
        )
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn q(num: i64, den: i64) -> GaussRational {
    GaussRational::ratio(num, den)
}

/// Hypergeometric construction against recurrence generation at unit omega:
/// max coefficient deviation < 1e-12 for n <= 20 over the parameter grid.
fn check_closed_form() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for zeta in [1.0, 2.5] {
        for theta in [0.0, 0.7] {
            let spec = GCRRSpec::new(zeta, theta, 1.0, false);
            for n in 0..=20 {
                worst = worst.max(closed_form_deviation(&spec, n)?);
            }
        }
    }
    Ok((
        worst < 1e-12,
        format!("max coefficient deviation {worst:.3e} (tolerance 1e-12)"),
    ))
}

/// Polynomial-coefficient recurrence for the perturbed sequence: the twelve
/// constants of the worked constant-family example reproduced in exact
/// arithmetic with a residual of exactly zero, then a 50-draw random sweep
/// in doubles with residual < 1e-10 for identity index <= 12.
fn check_ledger(seed: u64) -> Result<(bool, String)> {
    let params = constant_params::<GaussRational>();
    let alphas: Vec<GaussRational> = (0..4).map(|_| q(1, 2)).collect();
    let led = ledger_special(&params, &alphas, 1)?;
    // the printed x-coefficient of the cubic block in the source table is
    // 1/4; expanding the identity gives 1/2, and only 1/2 closes it exactly
    let expected = [
        (led.e.clone(), q(1, 4), "e"),
        (led.f.clone(), q(-1, 2), "f"),
        (led.g.clone(), q(1, 2), "g"),
        (led.p.clone(), q(1, 4), "p"),
        (led.q.clone(), q(-1, 2), "q"),
        (led.r.clone(), q(1, 2), "r"),
        (led.s.clone(), q(0, 1), "s"),
        (led.t.clone(), q(-1, 16), "t"),
        (led.u.clone(), q(1, 8), "u"),
        (led.v.clone(), q(-3, 16), "v"),
        (led.w.clone(), q(1, 8), "w"),
        (led.z.clone(), q(-1, 8), "z"),
    ];
    for (got, want, name) in &expected {
        if got != want {
            return Ok((false, format!("constant {name} deviates from the table")));
        }
    }
    let p = generate(&params, 2)?;
    let l = perturb_with_alphas(&p, &alphas[..3])?;
    let exact = verify_ledger_identity(&l, &led, 1)?;
    if exact != 0.0 {
        return Ok((false, format!("exact-arithmetic residual {exact:.3e} != 0")));
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(1..=12usize);
        let len = n + 2;
        let omega = rng.gen_range(0.5..2.0);
        let rho: Vec<Complex64> = (0..len).map(|_| c(rng.gen_range(0.5..1.5))).collect();
        let cen: Vec<Complex64> = (0..len).map(|_| c(rng.gen_range(-0.5..0.5))).collect();
        let d: Vec<Complex64> = (0..len).map(|_| c(rng.gen_range(0.1..0.6))).collect();
        let fam = RIIParams::from_tables(rho, cen, d, QuadFactor::Special { omega: c(omega) })?;
        let alphas: Vec<Complex64> = (0..len)
            .map(|_| {
                let mag = rng.gen_range(0.2..1.2);
                c(if rng.gen_bool(0.5) { mag } else { -mag })
            })
            .collect();
        let p = generate(&fam, n + 1)?;
        let l = perturb_with_alphas(&p, &alphas)?;
        let led = ledger_special(&fam, &alphas, n)?;
        worst = worst.max(verify_ledger_identity(&l, &led, n)?);
    }
    Ok((
        worst < 1e-10,
        format!("exact residual 0, random-draw residual {worst:.3e} (tolerance 1e-10)"),
    ))
}

/// The per-index-root ledger collapses entry-by-entry to the quadratic-form
/// ledger when the roots sit at +-i omega, in exact arithmetic.
fn check_specialization() -> Result<(bool, String)> {
    let params = constant_params::<GaussRational>();
    let general = params.as_general();
    let alphas: Vec<GaussRational> = (0..8).map(|k| q(2 * k as i64 + 1, 3)).collect();
    for n in 1..=6usize {
        let a = ledger_special(&params, &alphas, n)?;
        let b = ledger_general(&general, &alphas, n)?;
        let pairs = [
            (&a.e, &b.e),
            (&a.f, &b.f),
            (&a.g, &b.g),
            (&a.p, &b.p),
            (&a.q, &b.q),
            (&a.r, &b.r),
            (&a.s, &b.s),
            (&a.t, &b.t),
            (&a.u, &b.u),
            (&a.v, &b.v),
            (&a.w, &b.w),
            (&a.z, &b.z),
        ];
        if pairs.iter().any(|(x, y)| x != y) {
            return Ok((false, format!("ledgers differ at index {n}")));
        }
    }
    Ok((true, "exact entry-by-entry agreement for indices 1..=6".into()))
}

/// The three admissible perturbations of the constant family satisfy their
/// reduced recurrences (residual < 1e-10, n <= 16) and the closed forms for
/// the base and both real perturbed families match to 1e-12.
fn check_reductions() -> Result<(bool, String)> {
    let params = constant_params::<Complex64>();
    let p = generate(&params, 16)?;
    let cases = [
        (PerturbRule::Constant { value: c(0.5) }, ReduceMode::Alpha),
        (PerturbRule::Constant { value: c(-0.5) }, ReduceMode::Beta),
        (
            PerturbRule::Constant {
                value: Complex64::new(0.0, 0.5),
            },
            ReduceMode::Inversion,
        ),
    ];
    let mut recur_worst = 0.0f64;
    let mut closed_worst = 0.0f64;
    for (rule, mode) in &cases {
        let alphas = alpha_sequence(&params, rule, 17)?;
        let l = perturb_with_alphas(&p, &alphas[..17])?;
        let reduced = reduced_recurrence(&params, &alphas, *mode)?;
        let regen = generate(&reduced, 16)?;
        for n in 0..=16 {
            recur_worst = recur_worst.max(regen[n].max_abs_diff(&l[n]));
        }
        let closed = match mode {
            ReduceMode::Alpha => Some(closed_form_examples(16, ClosedFamily::L, 1.0)?),
            ReduceMode::Beta => Some(closed_form_examples(16, ClosedFamily::T, 1.0)?),
            ReduceMode::Inversion => None,
        };
        if let Some(closed) = closed {
            for n in 0..=16 {
                closed_worst = closed_worst.max(closed[n].max_abs_diff(&l[n]));
            }
        }
    }
    let base_closed = closed_form_examples(16, ClosedFamily::P, 1.0)?;
    for n in 0..=16 {
        closed_worst = closed_worst.max(base_closed[n].max_abs_diff(&p[n]));
    }
    Ok((
        recur_worst < 1e-10 && closed_worst < 1e-12,
        format!(
            "reduced-recurrence residual {recur_worst:.3e}, closed-form deviation {closed_worst:.3e}"
        ),
    ))
}

/// At unit omega the discriminant pins the shape parameter at 1, and the
/// quadratic roots give alpha_n = n/(2(n+1)), beta_n = -n/(2(n+1)) exactly;
/// the symmetry condition holds to 1e-14 in doubles.
fn check_unique_sequences(_seed: u64) -> Result<(bool, String)> {
    for n in 1..=8usize {
        let roots = zeta_from_discriminant(n, 1.0)?;
        if !roots.iter().any(|z| (z - 1.0).abs() < 1e-12) {
            return Ok((false, format!("discriminant roots at index {n} miss 1")));
        }
    }
    let exact = scaled_zeta1::<GaussRational>();
    for n in 1..=16usize {
        let alpha = alpha_quadratic(&exact, n, Branch::Plus)?;
        let beta = beta_quadratic(&exact, n, Branch::Plus)?;
        if alpha != q(n as i64, 2 * (n as i64 + 1)) || beta != q(-(n as i64), 2 * (n as i64 + 1))
        {
            return Ok((false, format!("quadratic root at index {n} is not n/(2(n+1))")));
        }
    }
    let params = scaled_zeta1::<Complex64>();
    let alphas = alpha_sequence(
        &params,
        &PerturbRule::QuadraticRoot { branch: Branch::Plus },
        17,
    )?;
    let mut worst = 0.0f64;
    for n in 1..=16usize {
        let (_, residual) = check_condition2(&params, &alphas, n)?;
        worst = worst.max(residual);
    }
    Ok((
        worst < 1e-14,
        format!("sequences exact, symmetry-condition residual {worst:.3e} (tolerance 1e-14)"),
    ))
}

/// Pencil eigenvalues against direct polynomial roots for both pencil kinds,
/// n <= 32, plus the dimension-2 hand anchors to 1e-12.
fn check_spectra() -> Result<(bool, String)> {
    let constant = constant_params::<Complex64>();
    let scaled = scaled_zeta1::<Complex64>();
    let rule_c = PerturbRule::Constant { value: c(0.5) };
    let rule_s = PerturbRule::QuadraticRoot { branch: Branch::Plus };
    let mut worst = 0.0f64;
    for n in 1..=32usize {
        worst = worst.max(cross_check(&constant, None, n)?);
        worst = worst.max(cross_check(&constant, Some(&rule_c), n)?);
    }
    for n in [4usize, 8, 16, 24, 32] {
        worst = worst.max(cross_check(&scaled, None, n)?);
        worst = worst.max(cross_check(&scaled, Some(&rule_s), n)?);
    }
    let g2 = generalized_eigs(&build_pencil(&constant, c(0.0), &[], 2, PencilKind::G)?)?;
    let t3 = 1.0 / 3.0f64.sqrt();
    let mut anchor = (g2.values[0] - c(-t3)).norm().max((g2.values[1] - c(t3)).norm());
    let alphas = alpha_sequence(&constant, &rule_c, 3)?;
    let reduced = reduced_recurrence(&constant, &alphas, ReduceMode::Alpha)?;
    let centers: Vec<Complex64> = (0..2).map(|k| reduced.c(k)).collect();
    let k2 = generalized_eigs(&build_pencil(&constant, alphas[1], &centers, 2, PencilKind::K)?)?;
    anchor = anchor
        .max((k2.values[0] - c(-1.0 / 3.0)).norm())
        .max((k2.values[1] - c(1.0)).norm());
    Ok((
        worst < 1e-9 && anchor < 1e-12,
        format!("max spectral deviation {worst:.3e}, anchor deviation {anchor:.3e}"),
    ))
}

/// Reconstruction residuals of all three factorizations < 1e-12 and pivot
/// consistency e_i = m_i^2 to 1e-13, n <= 32.
fn check_factorizations() -> Result<(bool, String)> {
    let mut recon = 0.0f64;
    let mut pivots = 0.0f64;
    for params in [constant_params::<Complex64>(), scaled_zeta1::<Complex64>()] {
        for n in [1usize, 2, 4, 8, 16, 32] {
            let pencil = build_pencil(&params, c(0.0), &[], n, PencilKind::G)?;
            let fs = factor_all(&pencil.j_diag, &pencil.j_off)?;
            recon = recon
                .max(fs.residual_llt())
                .max(fs.residual_ult())
                .max(fs.residual_ldu());
            pivots = pivots.max(fs.pivot_consistency());
        }
    }
    Ok((
        recon < 1e-12 && pivots < 1e-13,
        format!("max reconstruction residual {recon:.3e}, pivot consistency {pivots:.3e}"),
    ))
}

/// Weighted gram matrices hit the delta structure (< 1e-8) for all three
/// factorizations, the unfactored pairing does so to 1e-9, and the kernel
/// identity holds to 1e-9 over 100 random argument pairs.
fn check_biortho(seed: u64) -> Result<(bool, String)> {
    let constant = constant_params::<Complex64>();
    let scaled = scaled_zeta1::<Complex64>();
    let rule_c = PerturbRule::Constant { value: c(0.5) };
    let rule_s = PerturbRule::QuadraticRoot { branch: Branch::Plus };
    let mut gram = 0.0f64;
    let mut unfactored = 0.0f64;
    for (params, rule) in [(&constant, &rule_c), (&scaled, &rule_s)] {
        for n in 1..=10usize {
            for dec in [Decomposition::Cholesky, Decomposition::Ul, Decomposition::Ldu] {
                let rep = gram_check(params, rule, n, dec)?;
                gram = gram.max(rep.max_offdiag).max(rep.max_diag_dev);
                unfactored = unfactored
                    .max(rep.unfactored_offdiag)
                    .max(rep.unfactored_diag_rel);
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut kernel = 0.0f64;
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-2.5..2.5);
        let mut y: f64 = rng.gen_range(-2.5..2.5);
        if (x - y).abs() < 1e-2 {
            y += 1.0;
        }
        kernel = kernel.max(cd_kernel(&constant, &rule_c, 6, c(x), c(y))?);
    }
    Ok((
        gram < 1e-8 && unfactored < 1e-9 && kernel < 1e-9,
        format!(
            "gram deviation {gram:.3e}, unfactored {unfactored:.3e}, kernel residual {kernel:.3e}"
        ),
    ))
}

/// Consecutive-degree alternation for n <= 31 on both base families, the
/// triple patterns at n = 8 for both sign cases, cross interlacing of the
/// two perturbed closed families at n = 8, and the Wronskian identity.
fn check_interlacing() -> Result<(bool, String)> {
    for params in [constant_params::<Complex64>(), scaled_zeta1::<Complex64>()] {
        let p = generate(&params, 32)?;
        for n in 1..=31usize {
            let rep = check_interlace(&poly_roots(&p[n + 1])?, &poly_roots(&p[n])?)?;
            if rep.outcome != InterlaceOutcome::Pass {
                return Ok((false, format!("consecutive alternation breaks at degree {n}")));
            }
        }
    }
    let scaled = scaled_zeta1::<Complex64>();
    let p = generate(&scaled, 8)?;
    let x = poly_roots(&p[8])?;
    let xp = poly_roots(&p[7])?;
    for rule in [
        PerturbRule::QuadraticRoot { branch: Branch::Plus },
        PerturbRule::BetaRecursion { seed: c(-0.25) },
    ] {
        let alphas = alpha_sequence(&scaled, &rule, 8)?;
        let l = perturb_with_alphas(&p, &alphas)?;
        let sign = uniform_sign(&alphas)?;
        let rep = triple_interlace(&x, &xp, &poly_roots(&l[8])?, sign)?;
        if rep.outcome != InterlaceOutcome::Pass {
            return Ok((false, format!("triple pattern fails for the {sign:?} case")));
        }
    }
    let l = closed_form_examples(8, ClosedFamily::L, 1.0)?;
    let t = closed_form_examples(8, ClosedFamily::T, 1.0)?;
    let rep = check_interlace(&poly_roots(&l[8])?, &poly_roots(&t[8])?)?;
    if rep.outcome != InterlaceOutcome::Pass {
        return Ok((false, "cross interlacing of the perturbed pair fails".into()));
    }
    let constant = constant_params::<Complex64>();
    let p = generate(&constant, 16)?;
    let alpha = c(0.5);
    let beta = c(-0.5);
    let la = perturb_with_alphas(&p, &vec![alpha; 17])?;
    let tb = perturb_with_alphas(&p, &vec![beta; 17])?;
    let mut wronskian = 0.0f64;
    for n in 2..=16usize {
        wronskian =
            wronskian.max(wronskian_cross_check(&la[n], &tb[n], alpha, beta, &p[n], &p[n - 1])?);
    }
    Ok((
        wronskian < 1e-10,
        format!("all patterns pass, Wronskian identity residual {wronskian:.3e}"),
    ))
}

/// The vanishing anchor integral to 1e-10 and the full moment sweep against
/// the unnormalized weight at unit omega for both exponent offsets.
fn check_moments() -> Result<(bool, String)> {
    let constant = constant_params::<Complex64>();
    let p = generate(&constant, 2)?;
    let anchor = rational_moment(&WeightSpec::cauchy(), &p[2], 0, 2)?.norm();
    if anchor > 1e-10 {
        return Ok((false, format!("anchor integral {anchor:.3e} exceeds 1e-10")));
    }
    let mut worst = 0.0f64;
    for theta in [0.0, 0.5] {
        let fam = gcrr_params(&GCRRSpec::new(1.0, theta, 1.0, false))?;
        let weight = WeightSpec::gcrr(1.0, theta, 1.0)?;
        let report = orthogonality_suite(&weight, &fam, None, 5)?;
        worst = worst.max(report.max_abs);
        if !report.pass {
            return Ok((
                false,
                format!("moment sweep at theta={theta} peaks at {:.3e}", report.max_abs),
            ));
        }
    }
    Ok((
        true,
        format!("anchor {anchor:.3e}, max sweep moment {worst:.3e} (tolerance 1e-8)"),
    ))
}

/// Leading-coefficient ratio law with the minimal chain parameters
/// l_n = n/(2(n+1)) on the constant family, to 1e-12 for n <= 16.
fn check_ratio_law() -> Result<(bool, String)> {
    let report = leading_ratio_law(&constant_params::<Complex64>(), 16)?;
    let mut chain_dev = 0.0f64;
    for (k, l) in report.chain.l.iter().enumerate() {
        chain_dev = chain_dev.max((l - k as f64 / (2.0 * (k as f64 + 1.0))).abs());
    }
    Ok((
        report.max_dev < 1e-12 && chain_dev < 1e-12,
        format!(
            "ratio-law deviation {:.3e}, chain-parameter deviation {chain_dev:.3e}",
            report.max_dev
        ),
    ))
}

/// Run one numbered check. `seed` feeds the randomized sweeps so runs are
/// reproducible.
pub fn run_check(index: usize, seed: u64) -> CheckResult {
    let name = CHECK_NAMES[index - 1];
    let outcome = match index {
        1 => check_closed_form(),
        2 => check_ledger(seed),
        3 => check_specialization(),
        4 => check_reductions(),
        5 => check_unique_sequences(seed),
        6 => check_spectra(),
        7 => check_factorizations(),
        8 => check_biortho(seed),
        9 => check_interlacing(),
        10 => check_moments(),
        11 => check_ratio_law(),
        _ => panic!("check index {index} out of range"),
    };
    let (pass, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("errored: {e}")),
    };
    CheckResult {
        index,
        name,
        pass,
        detail,
    }
}

/// Worker count from the R2KIT_THREADS cap, defaulting to the machine
/// parallelism, never more than the number of checks.
pub fn default_threads() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let capped = match std::env::var("R2KIT_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).unwrap_or(avail),
        Err(_) => avail,
    };
    capped.min(CHECK_COUNT)
}

/// Run every check on a shared work queue with `threads` workers. Results
/// come back ordered by index regardless of scheduling.
pub fn run_all(seed: u64, threads: usize) -> Vec<CheckResult> {
    let queue: Mutex<VecDeque<usize>> = Mutex::new((1..=CHECK_COUNT).collect());
    let results: Mutex<Vec<Option<CheckResult>>> = Mutex::new(vec![None; CHECK_COUNT]);
    let workers = threads.clamp(1, CHECK_COUNT);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let next = queue.lock().unwrap().pop_front();
                match next {
                    Some(index) => {
                        let result = run_check(index, seed);
                        results.lock().unwrap()[index - 1] = Some(result);
                    }
                    None => break,
                }
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every check ran"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_pool_covers_every_check() {
        // the checks themselves run in the acceptance suite; here only the
        // queue plumbing is exercised, on the two cheapest checks
        let a = run_check(11, 42);
        assert_eq!(a.index, 11);
        assert!(a.pass, "{a}");
        let b = run_check(3, 42);
        assert!(b.pass, "{b}");
    }

    #[test]
    fn thread_cap_is_sane() {
        let t = default_threads();
        assert!(t >= 1 && t <= CHECK_COUNT);
    }
}
