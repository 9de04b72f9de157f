//! Run configuration: a JSON config file, command-line flags overriding it,
//! and resolution into the core parameter types.

use std::path::PathBuf;

use serde::Deserialize;

use r2kit_core::perturbation::{beta_quadratic, Branch, PerturbRule};
use r2kit_core::recurrence::{
    constant_params, gcrr_params, scaled_zeta1, GCRRSpec, QuadFactor, RIIParams,
};
use r2kit_core::Complex64;

use crate::CliError;

fn default_one() -> f64 {
    1.0
}

/// Base family selection. `tables` is only reachable through the config
/// file; the other kinds map onto flags.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Gcrr {
        #[serde(default = "default_one")]
        zeta: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default = "default_one")]
        omega: f64,
        #[serde(default)]
        scaled: bool,
    },
    /// rho = 1, c = 0, d = 1/4, omega = 1.
    Constant,
    /// The rescaled family at zeta = 1: rho_k = (k+1)/(k+2), d_k = k/(4(k+2)).
    ScaledZeta1,
    Tables {
        rho: Vec<f64>,
        c: Vec<f64>,
        d: Vec<f64>,
        omega: f64,
    },
}

impl FamilySpec {
    pub fn resolve(&self) -> Result<RIIParams<Complex64>, CliError> {
        match self {
            FamilySpec::Gcrr {
                zeta,
                theta,
                omega,
                scaled,
            } => Ok(gcrr_params(&GCRRSpec::new(*zeta, *theta, *omega, *scaled))?),
            FamilySpec::Constant => Ok(constant_params()),
            FamilySpec::ScaledZeta1 => Ok(scaled_zeta1()),
            FamilySpec::Tables { rho, c, d, omega } => {
                let lift = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                Ok(RIIParams::from_tables(
                    lift(rho),
                    lift(c),
                    lift(d),
                    QuadFactor::Special {
                        omega: Complex64::new(*omega, 0.0),
                    },
                )?)
            }
        }
    }

    /// The GCRR description when this family has one, for closed-form columns.
    pub fn gcrr_spec(&self) -> Option<GCRRSpec> {
        match self {
            FamilySpec::Gcrr {
                zeta,
                theta,
                omega,
                scaled,
            } => Some(GCRRSpec::new(*zeta, *theta, *omega, *scaled)),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, FamilySpec::Constant)
    }
}

/// Perturbation rule selection. The `-gcrr` kinds take their constants from
/// the admissibility quadratic; the seeded kinds take a complex seed value.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleSpec {
    /// Positive chain from the quadratic, upper branch.
    AlphaGcrr,
    /// Negative chain seeded by the degree-1 root of the mirrored quadratic.
    BetaGcrr,
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    AlphaSeed {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    BetaSeed {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    InversionSeed {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl RuleSpec {
    pub fn resolve(
        &self,
        params: &RIIParams<Complex64>,
    ) -> Result<PerturbRule<Complex64>, CliError> {
        let value = |re: f64, im: f64| Complex64::new(re, im);
        Ok(match self {
            RuleSpec::AlphaGcrr => PerturbRule::QuadraticRoot {
                branch: Branch::Plus,
            },
            RuleSpec::BetaGcrr => PerturbRule::BetaRecursion {
                seed: beta_quadratic(params, 1, Branch::Plus)?,
            },
            RuleSpec::Constant { re, im } => PerturbRule::Constant {
                value: value(*re, *im),
            },
            RuleSpec::AlphaSeed { re, im } => PerturbRule::AlphaRecursion {
                seed: value(*re, *im),
            },
            RuleSpec::BetaSeed { re, im } => PerturbRule::BetaRecursion {
                seed: value(*re, *im),
            },
            RuleSpec::InversionSeed { re, im } => PerturbRule::InversionRecursion {
                seed: value(*re, *im),
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ZerosMethod {
    Pencil,
    Aberth,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InterlaceMode {
    Consecutive,
    Triple,
    Cross,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DecompKind {
    Cholesky,
    Ul,
    Ldu,
}

/// File-level configuration; every field is optional and flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Option<FamilySpec>,
    pub rule: Option<RuleSpec>,
    pub second_rule: Option<RuleSpec>,
    pub n: Option<usize>,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub method: Option<ZerosMethod>,
    pub mode: Option<InterlaceMode>,
    pub sign: Option<String>,
    pub decomp: Option<DecompKind>,
    pub figure: Option<u8>,
}

impl RunConfig {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }
}

/// Family flags merged over the file value. A `--family` flag replaces the
/// file's kind; the numeric flags then override field by field, falling back
/// to the file's values only when the kinds agree.
pub struct FamilyFlags {
    pub family: Option<FamilyKind>,
    pub zeta: Option<f64>,
    pub theta: Option<f64>,
    pub omega: Option<f64>,
    pub scaled: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyKind {
    Gcrr,
    Constant,
    ScaledZeta1,
}

pub fn merge_family(flags: &FamilyFlags, file: Option<&FamilySpec>) -> FamilySpec {
    let file_gcrr = match file {
        Some(FamilySpec::Gcrr {
            zeta,
            theta,
            omega,
            scaled,
        }) => Some((*zeta, *theta, *omega, *scaled)),
        _ => None,
    };
    let gcrr_from_flags = |base: Option<(f64, f64, f64, bool)>| {
        let (z, t, o, s) = base.unwrap_or((1.0, 0.0, 1.0, false));
        FamilySpec::Gcrr {
            zeta: flags.zeta.unwrap_or(z),
            theta: flags.theta.unwrap_or(t),
            omega: flags.omega.unwrap_or(o),
            scaled: flags.scaled.unwrap_or(s),
        }
    };
    match flags.family {
        Some(FamilyKind::Constant) => FamilySpec::Constant,
        Some(FamilyKind::ScaledZeta1) => FamilySpec::ScaledZeta1,
        Some(FamilyKind::Gcrr) => gcrr_from_flags(file_gcrr),
        None => match file {
            Some(FamilySpec::Gcrr { .. }) => gcrr_from_flags(file_gcrr),
            Some(other) => other.clone(),
            None if flags.zeta.is_some()
                || flags.theta.is_some()
                || flags.omega.is_some()
                || flags.scaled.is_some() =>
            {
                gcrr_from_flags(None)
            }
            None => FamilySpec::Gcrr {
                zeta: 1.0,
                theta: 0.0,
                omega: 1.0,
                scaled: false,
            },
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RuleKind {
    AlphaGcrr,
    BetaGcrr,
    Constant,
    AlphaSeed,
    BetaSeed,
    InversionSeed,
}

/// Rule flags merged over the file value. Seeded kinds require a real part,
/// taken from `--rule-re` or (when the kind is unchanged) the file.
pub fn merge_rule(
    kind: Option<RuleKind>,
    re: Option<f64>,
    im: Option<f64>,
    file: Option<&RuleSpec>,
) -> Result<Option<RuleSpec>, CliError> {
    let file_value = match file {
        Some(RuleSpec::Constant { re, im })
        | Some(RuleSpec::AlphaSeed { re, im })
        | Some(RuleSpec::BetaSeed { re, im })
        | Some(RuleSpec::InversionSeed { re, im }) => Some((*re, *im)),
        _ => None,
    };
    let seeded = |kind: RuleKind, base: Option<(f64, f64)>| -> Result<RuleSpec, CliError> {
        let (fre, fim) = (
            re.or(base.map(|b| b.0)),
            im.or(base.map(|b| b.1)).unwrap_or(0.0),
        );
        let fre = fre.ok_or_else(|| {
            CliError::Config(format!("rule {kind:?} needs --rule-re (or a config value)"))
        })?;
        Ok(match kind {
            RuleKind::Constant => RuleSpec::Constant { re: fre, im: fim },
            RuleKind::AlphaSeed => RuleSpec::AlphaSeed { re: fre, im: fim },
            RuleKind::BetaSeed => RuleSpec::BetaSeed { re: fre, im: fim },
            RuleKind::InversionSeed => RuleSpec::InversionSeed { re: fre, im: fim },
            _ => unreachable!(),
        })
    };
    match kind {
        Some(RuleKind::AlphaGcrr) => Ok(Some(RuleSpec::AlphaGcrr)),
        Some(RuleKind::BetaGcrr) => Ok(Some(RuleSpec::BetaGcrr)),
        Some(k) => {
            // keep file values only when the file already used this kind
            let same = matches!(
                (k, file),
                (RuleKind::Constant, Some(RuleSpec::Constant { .. }))
                    | (RuleKind::AlphaSeed, Some(RuleSpec::AlphaSeed { .. }))
                    | (RuleKind::BetaSeed, Some(RuleSpec::BetaSeed { .. }))
                    | (RuleKind::InversionSeed, Some(RuleSpec::InversionSeed { .. }))
            );
            Ok(Some(seeded(k, if same { file_value } else { None })?))
        }
        None => match file {
            Some(spec) => Ok(Some(spec.clone())),
            None => Ok(None),
        },
    }
}
