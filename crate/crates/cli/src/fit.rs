//! The `fit` subcommand: estimation and goodness of fit for each requested
//! model, rendered as a frequency table with fitted columns and a footer.

use std::fmt::Write as _;

use cmnb::datasets;
use cmnb::dist::TruncationPolicy;
use cmnb::estimation::{FitConfig, FitResult, FitStatus, ModelKind};
use cmnb::gof::{gof_report, BootstrapConfig, BootstrapMode, GofReport};
use cmnb::table::FrequencyTable;
use serde::Serialize;

use crate::args::{BootstrapModeArg, FitArgs};
use crate::error::CliError;
use crate::ingest::ingest;

/// Series terms allowed when the user overrides the tolerance.
const MAX_TERMS: u64 = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub source: String,
    pub n: u64,
    pub table: FrequencyTable,
    pub seed: u64,
    pub bootstrap: Option<BootstrapConfig>,
    pub models: Vec<ModelReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: ModelKind,
    #[serde(flatten)]
    pub outcome: ModelOutcome,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelOutcome {
    Fitted {
        fit: Box<FitResult>,
        gof: Box<GofReport>,
    },
    Failed {
        error: String,
    },
}

impl FitReport {
    /// Whether every model converged with a complete goodness-of-fit report.
    pub fn all_converged(&self) -> bool {
        self.models.iter().all(|m| match &m.outcome {
            ModelOutcome::Fitted { fit, .. } => fit.status == FitStatus::Converged,
            ModelOutcome::Failed { .. } => false,
        })
    }
}

fn load(args: &FitArgs) -> Result<(String, FrequencyTable), CliError> {
    match (&args.source.data, &args.source.input) {
        (Some(name), None) => {
            let d = datasets::by_name(name).ok_or_else(|| {
                let known: Vec<&str> = datasets::ALL.iter().map(|d| d.name).collect();
                CliError::Usage(format!(
                    "unknown dataset {name:?}; known: {}",
                    known.join(", ")
                ))
            })?;
            Ok((d.name.to_string(), d.table()))
        }
        (None, Some(path)) => Ok((path.display().to_string(), ingest(path)?)),
        _ => Err(CliError::Usage(
            "give exactly one of --data or --input".into(),
        )),
    }
}

pub fn run_fit(args: &FitArgs) -> Result<FitReport, CliError> {
    let models = args.model_list()?;
    let (source, table) = load(args)?;
    let mut config = FitConfig::default();
    if let Some(tol) = args.rel_tol {
        config.policy = TruncationPolicy::new(tol, MAX_TERMS)?;
    }
    if let Some(pool) = args.pool {
        if !(pool > 0.0 && pool.is_finite()) {
            return Err(CliError::Usage(format!(
                "--pool must be positive, got {pool}"
            )));
        }
    }
    let bootstrap = (args.bootstrap > 0).then_some(BootstrapConfig {
        replicates: args.bootstrap,
        seed: args.seed,
        mode: match args.bootstrap_mode {
            BootstrapModeArg::RefitFree => BootstrapMode::RefitFree,
            BootstrapModeArg::Refit => BootstrapMode::Refit,
        },
    });
    let models = models
        .into_iter()
        .map(|kind| {
            let outcome = kind
                .fit(&table, &config)
                .and_then(|fit| {
                    let gof = gof_report(&table, fit.model, args.pool, bootstrap.as_ref())?;
                    Ok(ModelOutcome::Fitted {
                        fit: Box::new(fit),
                        gof: Box::new(gof),
                    })
                })
                .unwrap_or_else(|e| ModelOutcome::Failed {
                    error: e.to_string(),
                });
            ModelReport {
                model: kind,
                outcome,
            }
        })
        .collect();
    Ok(FitReport {
        source,
        n: table.n(),
        table,
        seed: args.seed,
        bootstrap,
        models,
    })
}

fn header(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Cmnb => "CMNB",
        ModelKind::Nb => "NB",
        ModelKind::Cmp => "CMP",
    }
}

fn legend(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Cmnb => "CMNB (r, nu, p): pmf ~ (Gamma(k+r)/(k! Gamma(r)))^nu p^k",
        ModelKind::Nb => "NB (r, p): pmf ~ Gamma(k+r)/(k! Gamma(r)) p^k (1-p)^r",
        ModelKind::Cmp => "CMP (lambda, nu): pmf ~ lambda^k / (k!)^nu",
    }
}

fn status_name(status: FitStatus) -> &'static str {
    match status {
        FitStatus::Converged => "converged",
        FitStatus::MaxIterations => "iteration limit reached",
        FitStatus::Boundary => "ran to the parameter boundary",
        FitStatus::StepFailure => "no ascent step found",
    }
}

fn opt(v: Option<f64>, dp: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.dp$}"))
}

/// Text layout: one row per value from 0 to the largest observed, fitted
/// counts rounded to integers, and a Total row summing the rounded column.
pub fn render_text(report: &FitReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "data: {} (n = {})", report.source, report.n);
    let w = 12;
    let _ = write!(out, "{:<8}{:>w$}", "value", "frequency");
    for m in &report.models {
        let _ = write!(out, "{:>w$}", header(m.model));
    }
    out.push('\n');

    let k_max = report.table.k_max();
    let mut totals = vec![0u64; report.models.len()];
    for k in 0..=k_max {
        let _ = write!(out, "{:<8}{:>w$}", k, report.table.count_at(k));
        for (i, m) in report.models.iter().enumerate() {
            match &m.outcome {
                ModelOutcome::Fitted { gof, .. } => {
                    let e = gof.expected[k as usize].round() as u64;
                    totals[i] += e;
                    let _ = write!(out, "{e:>w$}");
                }
                ModelOutcome::Failed { .. } => {
                    let _ = write!(out, "{:>w$}", "-");
                }
            }
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<8}{:>w$}", "Total", report.n);
    for (i, m) in report.models.iter().enumerate() {
        match m.outcome {
            ModelOutcome::Fitted { .. } => {
                let _ = write!(out, "{:>w$}", totals[i]);
            }
            ModelOutcome::Failed { .. } => {
                let _ = write!(out, "{:>w$}", "-");
            }
        }
    }
    out.push('\n');

    let row = |out: &mut String, label: &str, cell: &dyn Fn(&FitResult, &GofReport) -> String| {
        let _ = write!(out, "{:<8}{:>w$}", label, "");
        for m in &report.models {
            let s = match &m.outcome {
                ModelOutcome::Fitted { fit, gof } => cell(fit, gof),
                ModelOutcome::Failed { .. } => "-".into(),
            };
            let _ = write!(out, "{s:>w$}");
        }
        out.push('\n');
    };
    for j in 0..3 {
        row(&mut out, &format!("par{}", j + 1), &|f, _| {
            f.model
                .values()
                .get(j)
                .map_or_else(String::new, |v| format!("{v:.2}"))
        });
    }
    row(&mut out, "loglik", &|f, _| {
        format!("{:.4}", f.log_likelihood)
    });
    row(&mut out, "chi2", &|_, g| format!("{:.2}", g.chi2));
    row(&mut out, "df", &|_, g| g.df.to_string());
    row(&mut out, "p-value", &|_, g| opt(g.chi2_pvalue, 6));
    row(&mut out, "K-S", &|_, g| format!("{:.6}", g.ks_stat));
    if report.bootstrap.is_some() {
        row(&mut out, "K-S-p", &|_, g| opt(g.ks_pvalue, 6));
    }

    out.push('\n');
    for m in &report.models {
        let _ = writeln!(out, "{}", legend(m.model));
    }
    for m in &report.models {
        match &m.outcome {
            ModelOutcome::Fitted { fit, .. } => {
                let _ = writeln!(
                    out,
                    "{}: {} after {} iterations",
                    header(m.model),
                    status_name(fit.status),
                    fit.iterations
                );
            }
            ModelOutcome::Failed { error } => {
                let _ = writeln!(out, "{}: failed: {error}", header(m.model));
            }
        }
    }
    if let Some(b) = &report.bootstrap {
        let _ = writeln!(
            out,
            "K-S p-values from {} bootstrap replicates, seed {}",
            b.replicates, b.seed
        );
    }
    out
}
