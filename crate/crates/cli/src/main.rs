//! r2kit: command-line surface for R_II polynomial families. Generation,
//! perturbation, zeros and spectra, factorizations, biorthogonality,
//! interlacing, the invariant suite, and figure data.
//!
//! Exit codes: 0 ok, 1 check failure, 2 config error, 3 numerical error.

mod commands;
mod config;
mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::Ctx;
use config::{
    merge_family, merge_rule, DecompKind, FamilyFlags, FamilyKind, InterlaceMode, OutputFormat,
    RuleKind, RunConfig, ZerosMethod,
};
use table::Report;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical: {msg}"),
        }
    }
}

impl From<r2kit_core::Error> for CliError {
    fn from(e: r2kit_core::Error) -> Self {
        match e {
            r2kit_core::Error::InvalidParam(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "r2kit",
    version,
    about = "R_II polynomial families: generation, perturbation, spectra, \
             factorizations, biorthogonality, interlacing, figure data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON config file; flags override its values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base family (per-index tables only via the config file)
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    /// Shape parameter of the gcrr family
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    /// Center parameter of the gcrr family
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Quadratic-factor scale
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Use the rescaled gcrr recurrence
    #[arg(long)]
    scaled: Option<bool>,
    /// Perturbation rule
    #[arg(long, value_enum)]
    rule: Option<RuleKind>,
    /// Real part of the rule constant or seed
    #[arg(long, allow_negative_numbers = true)]
    rule_re: Option<f64>,
    /// Imaginary part of the rule constant or seed
    #[arg(long, allow_negative_numbers = true)]
    rule_im: Option<f64>,
    /// Top degree
    #[arg(long)]
    n: Option<usize>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output path (stdout when absent)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Seed for randomized sweeps
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient table of the base sequence P_0..P_n
    Gen(CommonArgs),
    /// Coefficient table of a perturbed sequence L_0..L_n
    Perturb(CommonArgs),
    /// Zeros of the degree-n member, by root finding and/or the pencil
    Zeros {
        #[command(flatten)]
        common: CommonArgs,
        /// pencil, aberth, or both (with cross-check deltas)
        #[arg(long, value_enum)]
        method: Option<ZerosMethod>,
    },
    /// Zero interlacing checks
    Interlace {
        #[command(flatten)]
        common: CommonArgs,
        /// consecutive, triple, or cross
        #[arg(long, value_enum)]
        mode: Option<InterlaceMode>,
        /// Asserted sign pattern for the triple mode: + or -
        #[arg(long, allow_hyphen_values = true)]
        sign: Option<String>,
        /// Second rule for the cross mode (seeded kinds via config file)
        #[arg(long, value_enum)]
        second_rule: Option<RuleKind>,
    },
    /// Biorthogonality gram check for one factorization
    Biortho {
        #[command(flatten)]
        common: CommonArgs,
        /// cholesky, ul, or ldu
        #[arg(long, value_enum)]
        decomp: Option<DecompKind>,
    },
    /// Factorization entries and reconstruction residuals
    Factor(CommonArgs),
    /// Run the full invariant suite; exit 0 only when every check passes
    Verify(CommonArgs),
    /// Zero tables behind the illustration figures (1, 2, or 3)
    PlotData {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        figure: Option<u8>,
    },
}

/// Merge file and flags into the command context plus output settings.
fn resolve(
    common: &CommonArgs,
) -> Result<(Ctx, OutputFormat, Option<PathBuf>, RunConfig), CliError> {
    let file = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let family = merge_family(
        &FamilyFlags {
            family: common.family,
            zeta: common.zeta,
            theta: common.theta,
            omega: common.omega,
            scaled: common.scaled,
        },
        file.family.as_ref(),
    );
    let params = family.resolve()?;
    let rule_spec = merge_rule(common.rule, common.rule_re, common.rule_im, file.rule.as_ref())?;
    let rule = match &rule_spec {
        Some(spec) => Some(spec.resolve(&params)?),
        None => None,
    };
    let ctx = Ctx {
        family,
        params,
        rule,
        second_rule: file.second_rule.clone(),
        n: common.n.or(file.n).unwrap_or(8),
        seed: common.seed.or(file.seed).unwrap_or(42),
    };
    let format = common.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let output = common.output.clone().or_else(|| file.output.clone());
    Ok((ctx, format, output, file))
}

fn emit(
    report: Report,
    format: OutputFormat,
    output: Option<PathBuf>,
) -> Result<bool, CliError> {
    let text = match format {
        OutputFormat::Csv => report.render_csv(),
        OutputFormat::Json => report.render_json(),
    };
    match output {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.pass.unwrap_or(true))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Gen(common) => {
            let (ctx, format, output, _) = resolve(&common)?;
            emit(commands::cmd_gen(&ctx)?, format, output)
        }
        Command::Perturb(common) => {
            let (ctx, format, output, _) = resolve(&common)?;
            emit(commands::cmd_perturb(&ctx)?, format, output)
        }
        Command::Zeros { common, method } => {
            let (ctx, format, output, file) = resolve(&common)?;
            let method = method.or(file.method).unwrap_or(ZerosMethod::Aberth);
            emit(commands::cmd_zeros(&ctx, method)?, format, output)
        }
        Command::Interlace {
            common,
            mode,
            sign,
            second_rule,
        } => {
            let (mut ctx, format, output, file) = resolve(&common)?;
            let mode = mode.or(file.mode).unwrap_or(InterlaceMode::Consecutive);
            let sign = sign.or_else(|| file.sign.clone());
            if let Some(kind) = second_rule {
                ctx.second_rule =
                    merge_rule(Some(kind), None, None, file.second_rule.as_ref())?;
            }
            emit(
                commands::cmd_interlace(&ctx, mode, sign.as_deref())?,
                format,
                output,
            )
        }
        Command::Biortho { common, decomp } => {
            let (ctx, format, output, file) = resolve(&common)?;
            let decomp = decomp.or(file.decomp).unwrap_or(DecompKind::Cholesky);
            emit(commands::cmd_biortho(&ctx, decomp)?, format, output)
        }
        Command::Factor(common) => {
            let (ctx, format, output, _) = resolve(&common)?;
            emit(commands::cmd_factor(&ctx)?, format, output)
        }
        Command::Verify(common) => {
            let (ctx, format, output, _) = resolve(&common)?;
            emit(commands::cmd_verify(&ctx)?, format, output)
        }
        Command::PlotData { common, figure } => {
            let (_, format, output, file) = resolve(&common)?;
            let figure = figure.or(file.figure).unwrap_or(1);
            emit(commands::cmd_plotdata(figure)?, format, output)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    };
    std::process::exit(code);
}
