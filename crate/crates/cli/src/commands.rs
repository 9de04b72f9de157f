//! The eight subcommands. Each one resolves its inputs from the merged
//! configuration, runs the corresponding core routines, and returns a
//! `Report` for the output layer.

use r2kit_core::analysis::{check_interlace, triple_interlace, uniform_sign, AlphaSign, InterlaceOutcome, InterlaceReport};
use r2kit_core::biortho::{gram_check, Decomposition};
use r2kit_core::eigen::{generalized_eigs, pencil_for, poly_roots, ZeroSet};
use r2kit_core::hypergeom::gcrr_closed_form;
use r2kit_core::pencil::factor_all;
use r2kit_core::perturbation::{
    alpha_sequence, closed_form_examples, perturb_with_alphas, Branch, ClosedFamily, PerturbRule,
};
use r2kit_core::recurrence::{generate, scaled_zeta1, RIIParams};
use r2kit_core::verify::{default_threads, run_all};
use r2kit_core::{CPoly, Complex64, Error};

use crate::config::{DecompKind, FamilySpec, InterlaceMode, RuleSpec, ZerosMethod};
use crate::table::{complex_columns, Cell, Report};
use crate::CliError;

/// Everything a command needs after config resolution.
pub struct Ctx {
    pub family: FamilySpec,
    pub params: RIIParams<Complex64>,
    pub rule: Option<PerturbRule<Complex64>>,
    pub second_rule: Option<RuleSpec>,
    pub n: usize,
    pub seed: u64,
}

impl Ctx {
    /// Commands that always perturb fall back to the positive chain.
    fn rule_or_alpha(&self) -> PerturbRule<Complex64> {
        self.rule.clone().unwrap_or(PerturbRule::QuadraticRoot {
            branch: Branch::Plus,
        })
    }

    fn require_degree(&self, min: usize) -> Result<(), CliError> {
        if self.n < min {
            return Err(CliError::Config(format!(
                "this command needs n >= {min}, got {}",
                self.n
            )));
        }
        Ok(())
    }
}

fn push_coeffs(row: &mut Vec<Cell>, p: &CPoly, width: usize) {
    for k in 0..width {
        let c = p.coeff(k);
        row.push(Cell::Num(c.re));
        row.push(Cell::Num(c.im));
    }
}

fn coeff_columns(prefix: &str, width: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * width);
    for k in 0..width {
        cols.extend(complex_columns(&format!("{prefix}{k}")));
    }
    cols
}

/// Coefficient table of P_0..P_n, with a closed-form delta column when the
/// family has an independent construction to compare against.
pub fn cmd_gen(ctx: &Ctx) -> Result<Report, CliError> {
    let p = generate(&ctx.params, ctx.n)?;
    let closed: Option<Vec<CPoly>> = if ctx.family.is_constant() {
        Some(closed_form_examples(ctx.n, ClosedFamily::P, 1.0)?)
    } else if let Some(spec) = ctx.family.gcrr_spec().filter(|s| s.omega == 1.0) {
        let mut v = Vec::with_capacity(ctx.n + 1);
        for k in 0..=ctx.n {
            v.push(gcrr_closed_form(&spec, k)?);
        }
        Some(v)
    } else {
        None
    };
    let mut columns = vec!["degree".to_string()];
    columns.extend(coeff_columns("c", ctx.n + 1));
    if closed.is_some() {
        columns.push("closed_form_delta".into());
    }
    let mut report = Report::new("gen", columns);
    let mut max_delta = 0.0f64;
    for k in 0..=ctx.n {
        let mut row = vec![Cell::Int(k as i64)];
        push_coeffs(&mut row, &p[k], ctx.n + 1);
        if let Some(closed) = &closed {
            let delta = closed[k].max_abs_diff(&p[k]);
            max_delta = max_delta.max(delta);
            row.push(Cell::Num(delta));
        }
        report.rows.push(row);
    }
    if closed.is_some() {
        report.summary.push(("max_closed_form_delta", Cell::Num(max_delta)));
    }
    Ok(report)
}

/// Coefficient table of the perturbed sequence L_0..L_n together with the
/// constants used at each degree.
pub fn cmd_perturb(ctx: &Ctx) -> Result<Report, CliError> {
    let rule = ctx.rule_or_alpha();
    let p = generate(&ctx.params, ctx.n)?;
    let alphas = alpha_sequence(&ctx.params, &rule, ctx.n)?;
    let l = perturb_with_alphas(&p, &alphas)?;
    let mut columns = vec!["degree".to_string()];
    columns.extend(complex_columns("alpha"));
    columns.extend(coeff_columns("c", ctx.n + 1));
    let mut report = Report::new("perturb", columns);
    for k in 0..=ctx.n {
        // L_0 = P_0 carries no constant
        let alpha = if k == 0 { Complex64::new(0.0, 0.0) } else { alphas[k] };
        let mut row = vec![Cell::Int(k as i64), Cell::Num(alpha.re), Cell::Num(alpha.im)];
        push_coeffs(&mut row, &l[k], ctx.n + 1);
        report.rows.push(row);
    }
    Ok(report)
}

fn target_poly(ctx: &Ctx, degree: usize) -> Result<CPoly, CliError> {
    let p = generate(&ctx.params, degree)?;
    match &ctx.rule {
        None => Ok(p[degree].clone()),
        Some(rule) => {
            let alphas = alpha_sequence(&ctx.params, rule, degree)?;
            Ok(perturb_with_alphas(&p, &alphas)?[degree].clone())
        }
    }
}

fn zero_rows(report: &mut Report, zs: &ZeroSet) {
    for (i, z) in zs.values.iter().enumerate() {
        report.rows.push(vec![
            Cell::Int(i as i64),
            Cell::Num(z.re),
            Cell::Num(z.im),
        ]);
    }
}

/// Zeros of the degree-n member, by direct root finding, by the pencil, or
/// both with a per-zero cross-check delta.
pub fn cmd_zeros(ctx: &Ctx, method: ZerosMethod) -> Result<Report, CliError> {
    ctx.require_degree(1)?;
    let target = target_poly(ctx, ctx.n)?;
    match method {
        ZerosMethod::Aberth => {
            let zs = poly_roots(&target)?;
            let mut report = Report::new(
                "zeros",
                vec!["index".into(), "re".into(), "im".into()],
            );
            zero_rows(&mut report, &zs);
            report.summary.push(("method", Cell::Text("aberth".into())));
            report.summary.push(("min_gap", Cell::Num(zs.min_gap)));
            report.summary.push(("all_real", Cell::Flag(zs.all_real(1e-8))));
            Ok(report)
        }
        ZerosMethod::Pencil => {
            let zs = generalized_eigs(&pencil_for(&ctx.params, ctx.rule.as_ref(), ctx.n)?)?;
            let mut report = Report::new(
                "zeros",
                vec!["index".into(), "re".into(), "im".into()],
            );
            zero_rows(&mut report, &zs);
            report.summary.push(("method", Cell::Text("pencil".into())));
            report.summary.push(("min_gap", Cell::Num(zs.min_gap)));
            report.summary.push(("all_real", Cell::Flag(zs.all_real(1e-8))));
            Ok(report)
        }
        ZerosMethod::Both => {
            let spectral = generalized_eigs(&pencil_for(&ctx.params, ctx.rule.as_ref(), ctx.n)?)?;
            let direct = poly_roots(&target)?;
            let mut columns = vec!["index".to_string()];
            columns.extend(complex_columns("pencil"));
            columns.extend(complex_columns("aberth"));
            columns.push("delta".into());
            let mut report = Report::new("zeros", columns);
            let mut max_delta = 0.0f64;
            // both sets come back sorted by (re, im); pair them index-wise
            for (i, (a, b)) in spectral.values.iter().zip(&direct.values).enumerate() {
                let delta = (a - b).norm();
                max_delta = max_delta.max(delta);
                report.rows.push(vec![
                    Cell::Int(i as i64),
                    Cell::Num(a.re),
                    Cell::Num(a.im),
                    Cell::Num(b.re),
                    Cell::Num(b.im),
                    Cell::Num(delta),
                ]);
            }
            report.summary.push(("method", Cell::Text("both".into())));
            report.summary.push(("max_delta", Cell::Num(max_delta)));
            report
                .summary
                .push(("all_real", Cell::Flag(direct.all_real(1e-8))));
            report.pass = Some(max_delta < 1e-9);
            Ok(report)
        }
    }
}

fn witness_rows(report: &mut Report, rep: &InterlaceReport) {
    for (value, tag) in &rep.witness {
        report
            .rows
            .push(vec![Cell::Num(*value), Cell::Text((*tag).to_string())]);
    }
}

fn outcome_cells(report: &mut Report, rep: &InterlaceReport) {
    let outcome = match rep.outcome {
        InterlaceOutcome::Pass => "pass",
        InterlaceOutcome::Fail => "fail",
        InterlaceOutcome::Inconclusive => "inconclusive",
    };
    report.summary.push(("outcome", Cell::Text(outcome.into())));
    report
        .summary
        .push(("min_separation", Cell::Num(rep.min_separation)));
    report.summary.push((
        "first_violation",
        Cell::Int(rep.first_violation.map(|i| i as i64).unwrap_or(-1)),
    ));
    report.pass = Some(rep.outcome == InterlaceOutcome::Pass);
}

/// Interlacing checks: consecutive degrees of one sequence, the triple
/// pattern of base and perturbed zeros, or two perturbed sequences crossed.
pub fn cmd_interlace(
    ctx: &Ctx,
    mode: InterlaceMode,
    sign: Option<&str>,
) -> Result<Report, CliError> {
    let columns = vec!["value".to_string(), "source_tag".to_string()];
    match mode {
        InterlaceMode::Consecutive => {
            ctx.require_degree(2)?;
            let hi = target_poly(ctx, ctx.n)?;
            let lo = target_poly(ctx, ctx.n - 1)?;
            let rep = check_interlace(&poly_roots(&hi)?, &poly_roots(&lo)?)?;
            let mut report = Report::new("interlace", columns);
            witness_rows(&mut report, &rep);
            report.summary.push(("mode", Cell::Text("consecutive".into())));
            report
                .summary
                .push(("series_a", Cell::Text(format!("degree {}", ctx.n))));
            report
                .summary
                .push(("series_b", Cell::Text(format!("degree {}", ctx.n - 1))));
            outcome_cells(&mut report, &rep);
            Ok(report)
        }
        InterlaceMode::Triple => {
            ctx.require_degree(2)?;
            let rule = ctx.rule_or_alpha();
            let p = generate(&ctx.params, ctx.n)?;
            let alphas = alpha_sequence(&ctx.params, &rule, ctx.n)?;
            let l = perturb_with_alphas(&p, &alphas)?;
            let expected = match sign {
                Some("+") => AlphaSign::Positive,
                Some("-") => AlphaSign::Negative,
                Some(other) => {
                    return Err(CliError::Config(format!(
                        "sign must be + or -, got {other}"
                    )))
                }
                None => uniform_sign(&alphas)?,
            };
            let rep = triple_interlace(
                &poly_roots(&p[ctx.n])?,
                &poly_roots(&p[ctx.n - 1])?,
                &poly_roots(&l[ctx.n])?,
                expected,
            )?;
            let mut report = Report::new("interlace", columns);
            witness_rows(&mut report, &rep);
            report.summary.push(("mode", Cell::Text("triple".into())));
            let sign_text = match expected {
                AlphaSign::Positive => "+",
                AlphaSign::Negative => "-",
            };
            report.summary.push(("sign", Cell::Text(sign_text.into())));
            outcome_cells(&mut report, &rep);
            Ok(report)
        }
        InterlaceMode::Cross => {
            ctx.require_degree(1)?;
            let first = ctx.rule_or_alpha();
            let second = ctx
                .second_rule
                .clone()
                .unwrap_or(RuleSpec::BetaGcrr)
                .resolve(&ctx.params)?;
            let p = generate(&ctx.params, ctx.n)?;
            let l = perturb_with_alphas(&p, &alpha_sequence(&ctx.params, &first, ctx.n)?)?;
            let t = perturb_with_alphas(&p, &alpha_sequence(&ctx.params, &second, ctx.n)?)?;
            let rep = check_interlace(&poly_roots(&l[ctx.n])?, &poly_roots(&t[ctx.n])?)?;
            let mut report = Report::new("interlace", columns);
            witness_rows(&mut report, &rep);
            report.summary.push(("mode", Cell::Text("cross".into())));
            report
                .summary
                .push(("series_a", Cell::Text("first rule".into())));
            report
                .summary
                .push(("series_b", Cell::Text("second rule".into())));
            outcome_cells(&mut report, &rep);
            Ok(report)
        }
    }
}

/// Weighted gram matrix of the biorthogonal rational systems under the
/// chosen factorization, plus the unfactored pairing deviations.
pub fn cmd_biortho(ctx: &Ctx, decomp: DecompKind) -> Result<Report, CliError> {
    ctx.require_degree(1)?;
    let rule = ctx.rule_or_alpha();
    let decomposition = match decomp {
        DecompKind::Cholesky => Decomposition::Cholesky,
        DecompKind::Ul => Decomposition::Ul,
        DecompKind::Ldu => Decomposition::Ldu,
    };
    let rep = gram_check(&ctx.params, &rule, ctx.n, decomposition)?;
    let mut columns = vec!["row".to_string(), "col".to_string()];
    columns.extend(complex_columns("gram"));
    let mut report = Report::new("biortho", columns);
    for (j, grow) in rep.gram.iter().enumerate() {
        for (k, g) in grow.iter().enumerate() {
            report.rows.push(vec![
                Cell::Int(j as i64),
                Cell::Int(k as i64),
                Cell::Num(g.re),
                Cell::Num(g.im),
            ]);
        }
    }
    report
        .summary
        .push(("decomposition", Cell::Text(decomposition.to_string())));
    report.summary.push(("max_offdiag", Cell::Num(rep.max_offdiag)));
    report
        .summary
        .push(("max_diag_dev", Cell::Num(rep.max_diag_dev)));
    report
        .summary
        .push(("unfactored_offdiag", Cell::Num(rep.unfactored_offdiag)));
    report
        .summary
        .push(("unfactored_diag_rel", Cell::Num(rep.unfactored_diag_rel)));
    report.pass = Some(
        rep.max_offdiag < 1e-8
            && rep.max_diag_dev < 1e-8
            && rep.unfactored_offdiag < 1e-9
            && rep.unfactored_diag_rel < 1e-9,
    );
    Ok(report)
}

/// The three factorizations of the positive definite tridiagonal matrix,
/// entry tables and reconstruction residuals.
pub fn cmd_factor(ctx: &Ctx) -> Result<Report, CliError> {
    ctx.require_degree(1)?;
    let pencil = pencil_for(&ctx.params, None, ctx.n)?;
    let fs = factor_all(&pencil.j_diag, &pencil.j_off)?;
    let columns: Vec<String> = [
        "index", "j_diag", "j_sub", "chol_m", "chol_sub", "ul_m", "ul_super", "ldu_e", "ldu_sub",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut report = Report::new("factor", columns);
    let n = fs.j_diag.len();
    // off-diagonal entries couple rows i-1 and i; row 0 has none
    let sub = |v: &[f64], i: usize| if i == 0 { 0.0 } else { v[i - 1] };
    for i in 0..n {
        report.rows.push(vec![
            Cell::Int(i as i64),
            Cell::Num(fs.j_diag[i]),
            Cell::Num(sub(&fs.j_off, i)),
            Cell::Num(fs.chol_m[i]),
            Cell::Num(sub(&fs.chol_l, i)),
            Cell::Num(fs.ul_m[i]),
            Cell::Num(sub(&fs.ul_l, i)),
            Cell::Num(fs.ldu_e[i]),
            Cell::Num(sub(&fs.ldu_l, i)),
        ]);
    }
    let llt = fs.residual_llt();
    let ult = fs.residual_ult();
    let ldu = fs.residual_ldu();
    let pivots = fs.pivot_consistency();
    report.summary.push(("residual_llt", Cell::Num(llt)));
    report.summary.push(("residual_ult", Cell::Num(ult)));
    report.summary.push(("residual_ldu", Cell::Num(ldu)));
    report.summary.push(("pivot_consistency", Cell::Num(pivots)));
    report.summary.push(("ul_s0", Cell::Num(fs.s0)));
    report.pass = Some(llt < 1e-12 && ult < 1e-12 && ldu < 1e-12 && pivots < 1e-13);
    Ok(report)
}

/// Full invariant suite; one row per check and exit 0 only when all pass.
pub fn cmd_verify(ctx: &Ctx) -> Result<Report, CliError> {
    let results = run_all(ctx.seed, default_threads());
    let mut report = Report::new(
        "verify",
        vec!["index".into(), "name".into(), "pass".into(), "detail".into()],
    );
    let mut passed = 0i64;
    for r in &results {
        if r.pass {
            passed += 1;
        }
        report.rows.push(vec![
            Cell::Int(r.index as i64),
            Cell::Text(r.name.to_string()),
            Cell::Flag(r.pass),
            Cell::Text(r.detail.clone()),
        ]);
    }
    let failed = results.len() as i64 - passed;
    report.summary.push(("checks_passed", Cell::Int(passed)));
    report.summary.push(("checks_failed", Cell::Int(failed)));
    report.summary.push(("seed", Cell::Int(ctx.seed as i64)));
    report.pass = Some(failed == 0);
    Ok(report)
}

fn certified_real_zeros(p: &CPoly) -> Result<Vec<f64>, CliError> {
    let zs = poly_roots(p)?;
    if !zs.all_real(1e-8) {
        return Err(CliError::from(Error::HypothesisViolation(
            "figure series has zeros off the real line".into(),
        )));
    }
    Ok(zs.real_values())
}

/// Zero tables behind the three illustration figures: the rescaled family at
/// zeta = 1 with its positive (l) and negative (t) perturbation chains.
pub fn cmd_plotdata(figure: u8) -> Result<Report, CliError> {
    let params = scaled_zeta1::<Complex64>();
    let p = generate(&params, 8)?;
    let alpha_rule = PerturbRule::QuadraticRoot {
        branch: Branch::Plus,
    };
    let beta_rule = RuleSpec::BetaGcrr.resolve(&params)?;
    let l = perturb_with_alphas(&p, &alpha_sequence(&params, &alpha_rule, 8)?)?;
    let t = perturb_with_alphas(&p, &alpha_sequence(&params, &beta_rule, 8)?)?;
    let series: Vec<(&str, &CPoly)> = match figure {
        1 => vec![("p7", &p[7]), ("p8", &p[8]), ("l8", &l[8])],
        2 => vec![("p7", &p[7]), ("p8", &p[8]), ("t8", &t[8])],
        3 => vec![("l8", &l[8]), ("t8", &t[8])],
        other => {
            return Err(CliError::Config(format!(
                "figure must be 1, 2 or 3, got {other}"
            )))
        }
    };
    let mut report = Report::new(
        "plot-data",
        vec!["value".into(), "source_tag".into()],
    );
    for (tag, poly) in series {
        for value in certified_real_zeros(poly)? {
            report
                .rows
                .push(vec![Cell::Num(value), Cell::Text(tag.to_string())]);
        }
    }
    report
        .summary
        .push(("figure", Cell::Int(figure as i64)));
    Ok(report)
}
