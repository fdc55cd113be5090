//! The `sample`, `analyze`, `limits` and `pmf` subcommands.

use std::fmt::Write as _;

use cmnb::analysis::{
    classify_dispersion, classify_shape, dpcp_parametrization, is_dpcp, limit_cmb_to_cmp,
    limit_cmnb_to_cmp, limit_cmnhg_to_cmnb, limit_grid, renyi_entropy, stein_residual,
    strictly_decreasing, tsallis_entropy, Dispersion, DpcpMembership, DpcpParams, LimitPoint,
    ShapeClass, ShapeReport,
};
use cmnb::dist::{
    cmnb_dist, nb_zero_inflation_ratio, zero_inflation_ratio, CmnbParams, NbParams, NormalizedPmf,
};
use cmnb::sampling::{sample_batch, RngState};
use cmnb::table::FrequencyTable;
use serde::Serialize;

use crate::args::{AnalyzeArgs, LimitKind, LimitsArgs, PmfArgs, SampleArgs};
use crate::error::CliError;
use crate::ingest::emit_csv;

/// A named bounded test function for the Stein identity.
type SteinTest = (&'static str, fn(u64) -> f64);

/// `None` for `n = 0`.
pub fn run_sample(args: &SampleArgs) -> Result<Option<FrequencyTable>, CliError> {
    let dist = NormalizedPmf::with_defaults(args.family.family()?)?;
    if args.n == 0 {
        return Ok(None);
    }
    Ok(Some(sample_batch(
        &dist,
        &mut RngState::new(args.seed),
        args.n,
    )?))
}

pub fn render_sample(table: Option<&FrequencyTable>) -> String {
    emit_csv(table)
}

#[derive(Debug, Clone, Serialize)]
pub struct PmfRow {
    pub k: u64,
    pub pmf: f64,
    pub cdf: f64,
}

pub fn run_pmf(args: &PmfArgs) -> Result<Vec<PmfRow>, CliError> {
    let dist = NormalizedPmf::with_defaults(args.family.family()?)?;
    Ok((0..=args.k_max)
        .map(|k| PmfRow {
            k,
            pmf: dist.pmf(k),
            cdf: dist.cdf(k),
        })
        .collect())
}

pub fn render_pmf(rows: &[PmfRow]) -> String {
    let mut out = String::from("k,pmf,cdf\n");
    for r in rows {
        let _ = writeln!(out, "{},{:e},{:e}", r.k, r.pmf, r.cdf);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionSummary {
    pub classification: Dispersion,
    pub mean: f64,
    pub variance: f64,
    /// `Δ_0..Δ_4`.
    pub first_deltas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroInflation {
    /// `P(0)/P(1)` of the CMNB law.
    pub cmnb: f64,
    /// `1/(p r)`, the same ratio for NB with the same `r` and `p`.
    pub nb: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteinCheck {
    pub function: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub params: CmnbParams,
    pub shape: ShapeReport,
    pub dispersion: DispersionSummary,
    pub dpcp_membership: DpcpMembership,
    /// Absent when `P(0)` underflows.
    pub dpcp: Option<DpcpParams>,
    pub zero_inflation: ZeroInflation,
    pub stein: Vec<SteinCheck>,
    pub renyi2: Option<f64>,
    pub tsallis2: Option<f64>,
}

pub fn run_analyze(args: &AnalyzeArgs) -> Result<AnalyzeReport, CliError> {
    let params = CmnbParams::new(args.r, args.nu, args.p)?;
    let dist = cmnb_dist(params)?;
    let disp = classify_dispersion(params)?;
    let end = dist.effective_support_end() + 1;
    let tests: [SteinTest; 3] = [
        ("g(w) = 1", |_| 1.0),
        ("g(w) = [w = 0]", |w| if w == 0 { 1.0 } else { 0.0 }),
        ("g(w) = 1/(1+w)", |w| 1.0 / (1.0 + w as f64)),
    ];
    let stein = tests
        .iter()
        .map(|&(function, g)| {
            Ok(SteinCheck {
                function,
                residual: stein_residual(params, g, end)?,
            })
        })
        .collect::<Result<Vec<_>, cmnb::Error>>()?;
    Ok(AnalyzeReport {
        params,
        shape: classify_shape(params)?,
        dispersion: DispersionSummary {
            classification: disp.classification,
            mean: disp.mean,
            variance: disp.variance,
            first_deltas: disp.delta_values.iter().take(5).copied().collect(),
        },
        dpcp_membership: is_dpcp(params),
        dpcp: dpcp_parametrization(params, args.n_max).ok(),
        zero_inflation: ZeroInflation {
            cmnb: zero_inflation_ratio(params),
            nb: nb_zero_inflation_ratio(NbParams::new(params.r(), params.p())?),
        },
        stein,
        renyi2: renyi_entropy(&dist, 2.0).ok(),
        tsallis2: tsallis_entropy(&dist, 2.0).ok(),
    })
}

fn shape_name(c: ShapeClass) -> &'static str {
    match c {
        ShapeClass::LogConcave => "log-concave",
        ShapeClass::LogConvex => "log-convex",
        ShapeClass::Boundary => "geometric (r = 1)",
    }
}

pub fn render_analyze(a: &AnalyzeReport) -> String {
    let mut out = String::new();
    let (r, nu, p) = (a.params.r(), a.params.nu(), a.params.p());
    let _ = writeln!(out, "CMNB(r = {r}, nu = {nu}, p = {p})");
    if nu == 1.0 {
        let _ = writeln!(out, "  nu = 1: negative binomial slice");
    }
    let _ = writeln!(
        out,
        "shape: {}{}{}",
        shape_name(a.shape.class),
        if a.shape.infinitely_divisible {
            ", infinitely divisible"
        } else {
            ""
        },
        if a.shape.verified {
            ""
        } else {
            " (numerical check disagrees)"
        }
    );
    let d = &a.dispersion;
    let _ = writeln!(out, "dispersion: {:?}", d.classification);
    let _ = writeln!(out, "  mean {:.6}, variance {:.6}", d.mean, d.variance);
    let deltas: Vec<String> = d.first_deltas.iter().map(|v| format!("{v:.6}")).collect();
    let _ = writeln!(out, "  Delta_0..4: {}", deltas.join(" "));
    let _ = writeln!(
        out,
        "compound Poisson: {} ({:?})",
        if a.dpcp_membership.member {
            "yes"
        } else {
            "undetermined"
        },
        a.dpcp_membership.reason
    );
    match &a.dpcp {
        Some(dp) => {
            let _ = writeln!(out, "  lambda = {:.6}", dp.lambda);
            for (i, al) in dp.alpha.iter().enumerate() {
                let _ = writeln!(out, "  alpha_{} = {al:.6e}", i + 1);
            }
        }
        None => out.push_str("  parametrization unavailable: P(0) underflows\n"),
    }
    let z = &a.zero_inflation;
    let _ = writeln!(
        out,
        "zero inflation P(0)/P(1): {:.6} (NB with same r, p: {:.6})",
        z.cmnb, z.nb
    );
    out.push_str("Stein residuals:\n");
    for s in &a.stein {
        let _ = writeln!(out, "  {:<16} {:.3e}", s.function, s.residual);
    }
    if let (Some(re), Some(ts)) = (a.renyi2, a.tsallis2) {
        let _ = writeln!(out, "order-2 entropies: Renyi {re:.6}, Tsallis {ts:.6}");
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitsReport {
    pub kind: &'static str,
    /// Fixed parameters as `(name, value)`.
    pub fixed: Vec<(&'static str, f64)>,
    pub index: &'static str,
    pub points: Vec<LimitPoint>,
    pub strictly_decreasing: bool,
}

const DEFAULT_GRID: [f64; 4] = [10.0, 100.0, 1000.0, 10000.0];

pub fn run_limits(args: &LimitsArgs) -> Result<LimitsReport, CliError> {
    let grid = if args.grid.is_empty() {
        DEFAULT_GRID.to_vec()
    } else {
        args.grid.clone()
    };
    if grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(CliError::Usage(
            "--grid values must be finite and positive".into(),
        ));
    }
    let (kind, index, fixed, points) = match args.kind {
        LimitKind::CmnbCmp => {
            let (nu, lambda) = (args.nu.unwrap_or(1.5), args.lambda.unwrap_or(2.0));
            let pts = limit_grid(&grid, |r| limit_cmnb_to_cmp(r, nu, lambda))?;
            ("cmnb-cmp", "r", vec![("nu", nu), ("lambda", lambda)], pts)
        }
        LimitKind::CmnhgCmnb => {
            let (m, nu, p) = (
                args.m.unwrap_or(0.8),
                args.nu.unwrap_or(2.0),
                args.p.unwrap_or(0.4),
            );
            let pts = limit_grid(&grid, |n| limit_cmnhg_to_cmnb(m, nu, p, n))?;
            ("cmnhg-cmnb", "n", vec![("m", m), ("nu", nu), ("p", p)], pts)
        }
        LimitKind::CmbCmp => {
            if grid.iter().any(|g| g.fract() != 0.0) {
                return Err(CliError::Usage(
                    "cmb-cmp needs integer m values in --grid".into(),
                ));
            }
            let (nu, lambda) = (args.nu.unwrap_or(1.5), args.lambda.unwrap_or(2.0));
            let pts = limit_grid(&grid, |m| limit_cmb_to_cmp(m as u64, nu, lambda))?;
            ("cmb-cmp", "m", vec![("nu", nu), ("lambda", lambda)], pts)
        }
    };
    Ok(LimitsReport {
        kind,
        fixed,
        index,
        strictly_decreasing: strictly_decreasing(&points),
        points,
    })
}

pub fn render_limits(l: &LimitsReport) -> String {
    let mut out = String::new();
    let fixed: Vec<String> = l.fixed.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    let _ = writeln!(out, "{} ({})", l.kind, fixed.join(", "));
    let _ = writeln!(out, "{:>12}  {:>14}", l.index, "TV distance");
    for pt in &l.points {
        let _ = writeln!(out, "{:>12}  {:>14.6e}", pt.index, pt.distance);
    }
    let _ = writeln!(
        out,
        "verdict: {}",
        if l.strictly_decreasing {
            "strictly decreasing"
        } else {
            "not monotone"
        }
    );
    out
}
