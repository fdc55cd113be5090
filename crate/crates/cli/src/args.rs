use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmnb::dist::{CmbParams, CmnbParams, CmnhgParams, CmpParams, Family, NbParams};
use cmnb::estimation::ModelKind;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cmnb",
    version,
    about = "COM-negative binomial modeling of count data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit models to a frequency table and report goodness of fit.
    Fit(FitArgs),
    /// Draw a seeded sample and print it as a value,count table.
    Sample(SampleArgs),
    /// Structural report for CMNB parameters.
    Analyze(AnalyzeArgs),
    /// Total-variation distances along a limit grid.
    Limits(LimitsArgs),
    /// Pmf and cdf columns for plotting.
    Pmf(PmfArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct InputSource {
    /// Embedded dataset: willmot, car_cn, sim_nb or sim_cmnb.
    #[arg(long, group = "source")]
    pub data: Option<String>,

    /// CSV of value,count rows or one observation per line.
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BootstrapModeArg {
    RefitFree,
    Refit,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: InputSource,

    /// Comma-separated subset of cmnb, nb, cmp.
    #[arg(long, default_value = "cmnb,nb,cmp")]
    pub models: String,

    #[arg(long, env = "CMNB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Bootstrap replicates for the KS p-value; 0 disables it.
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,

    #[arg(long, value_enum, default_value_t = BootstrapModeArg::RefitFree)]
    pub bootstrap_mode: BootstrapModeArg,

    /// Relative truncation tolerance of the normalizing series during fitting.
    #[arg(long)]
    pub rel_tol: Option<f64>,

    /// Merge chi-squared classes until each expects at least this many.
    #[arg(long)]
    pub pool: Option<f64>,
}

impl FitArgs {
    pub fn model_list(&self) -> Result<Vec<ModelKind>, CliError> {
        let mut out = Vec::new();
        for name in self
            .models
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let kind = ModelKind::parse(name).ok_or_else(|| {
                CliError::Usage(format!("unknown model {name:?}; use cmnb, nb or cmp"))
            })?;
            if !out.contains(&kind) {
                out.push(kind);
            }
        }
        if out.is_empty() {
            return Err(CliError::Usage(
                "--models must name at least one of cmnb, nb, cmp".into(),
            ));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Cmnb,
    Nb,
    Cmp,
    Cmb,
    Cmnhg,
}

/// Parameters of any supported family; each family reads the flags it needs.
#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(value_enum)]
    pub family: FamilyName,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Number of trials (cmb) or first shape (cmnhg).
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Second shape of cmnhg.
    #[arg(long, allow_hyphen_values = true)]
    pub hg_n: Option<f64>,
    /// Total of cmnhg.
    #[arg(long)]
    pub z: Option<u64>,
}

fn need<T: Copy>(v: Option<T>, family: &str, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{family} needs --{flag}")))
}

impl FamilyArgs {
    pub fn family(&self) -> Result<Family, CliError> {
        let f = match self.family {
            FamilyName::Cmnb => Family::Cmnb(CmnbParams::new(
                need(self.r, "cmnb", "r")?,
                need(self.nu, "cmnb", "nu")?,
                need(self.p, "cmnb", "p")?,
            )?),
            FamilyName::Nb => Family::Nb(NbParams::new(
                need(self.r, "nb", "r")?,
                need(self.p, "nb", "p")?,
            )?),
            FamilyName::Cmp => Family::Cmp(CmpParams::new(
                need(self.lambda, "cmp", "lambda")?,
                need(self.nu, "cmp", "nu")?,
            )?),
            FamilyName::Cmb => {
                let m = need(self.m, "cmb", "m")?;
                if !(m >= 1.0 && m.fract() == 0.0 && m < u64::MAX as f64) {
                    return Err(CliError::Usage(format!(
                        "cmb needs an integer --m >= 1, got {m}"
                    )));
                }
                Family::Cmb(CmbParams::new(
                    m as u64,
                    need(self.p, "cmb", "p")?,
                    need(self.nu, "cmb", "nu")?,
                )?)
            }
            FamilyName::Cmnhg => Family::Cmnhg(CmnhgParams::new(
                need(self.z, "cmnhg", "z")?,
                need(self.nu, "cmnhg", "nu")?,
                need(self.m, "cmnhg", "m")?,
                need(self.hg_n, "cmnhg", "hg-n")?,
            )?),
        };
        Ok(f)
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,

    /// Sample size.
    #[arg(long)]
    pub n: u64,

    #[arg(long, env = "CMNB_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    /// Number of compound-Poisson coefficients to list.
    #[arg(long, default_value_t = 10)]
    pub n_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitKind {
    /// CMNB(r, ν, λ/(r^ν + λ)) → CMP(λ, ν) as r grows.
    CmnbCmp,
    /// CMNHG → CMNB(m, ν, p) as the second shape n grows.
    CmnhgCmnb,
    /// CMB(m, λ/m^ν, ν) → CMP(λ, ν) as m grows.
    CmbCmp,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(value_enum)]
    pub kind: LimitKind,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// Comma-separated grid of the growing index.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub family: FamilyArgs,

    /// Largest value listed.
    #[arg(long, default_value_t = 20)]
    pub k_max: u64,
}
