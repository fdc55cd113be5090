//! Per-family likelihoods, scores and coordinate maps.

use serde::Serialize;

use crate::dist::{CmnbParams, CmpParams, Family, NbParams, NormalizedPmf, TruncationPolicy};
use crate::error::{Error, Result};
use crate::special::{lgamma, ln_binom_gen, psi};
use crate::table::FrequencyTable;

/// The count models that can be fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cmnb,
    Nb,
    Cmp,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Cmnb => "cmnb",
            ModelKind::Nb => "nb",
            ModelKind::Cmp => "cmp",
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            ModelKind::Cmnb => 3,
            ModelKind::Nb | ModelKind::Cmp => 2,
        }
    }

    /// Parameter names in the order of [`ModelParams::values`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelKind::Cmnb => &["r", "nu", "p"],
            ModelKind::Nb => &["r", "p"],
            ModelKind::Cmp => &["lambda", "nu"],
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "cmnb" => Some(ModelKind::Cmnb),
            "nb" => Some(ModelKind::Nb),
            "cmp" => Some(ModelKind::Cmp),
            _ => None,
        }
    }

    /// Parameters from working coordinates.
    pub(crate) fn params_from_theta(&self, theta: &[f64]) -> Result<ModelParams> {
        match self {
            ModelKind::Cmnb => Ok(ModelParams::Cmnb(CmnbParams::new(
                theta[0].exp(),
                theta[1].exp(),
                logistic(theta[2]),
            )?)),
            ModelKind::Nb => Ok(ModelParams::Nb(NbParams::new(
                theta[0].exp(),
                logistic(theta[1]),
            )?)),
            ModelKind::Cmp => Ok(ModelParams::Cmp(CmpParams::new(theta[0].exp(), theta[1])?)),
        }
    }

    /// Componentwise derivative of each parameter with respect to its
    /// working coordinate.
    pub(crate) fn param_jacobian(&self, params: &ModelParams) -> Vec<f64> {
        match params {
            ModelParams::Cmnb(c) => vec![c.r(), c.nu(), c.p() * (1.0 - c.p())],
            ModelParams::Nb(c) => vec![c.r(), c.p() * (1.0 - c.p())],
            ModelParams::Cmp(c) => vec![c.lambda(), 1.0],
        }
    }

    /// Lower bound on a working coordinate, enforced by projection.
    pub(crate) fn lower_bound(&self, j: usize) -> Option<f64> {
        match (self, j) {
            (ModelKind::Cmp, 1) => Some(0.0),
            _ => None,
        }
    }

    /// Whether the iterate has run off toward the edge of the parameter
    /// space, where the likelihood has no interior maximum.
    pub(crate) fn at_boundary(&self, params: &ModelParams) -> bool {
        let r_out = |r: f64| !(1e-8..=1e6).contains(&r);
        let p_out = |p: f64| logit(p).abs() > 36.0;
        match params {
            ModelParams::Cmnb(c) => r_out(c.r()) || c.nu() > 1e4 || c.nu() < 1e-8 || p_out(c.p()),
            ModelParams::Nb(c) => r_out(c.r()) || p_out(c.p()),
            ModelParams::Cmp(c) => c.lambda() > 1e8 || c.lambda() < 1e-12 || c.nu() > 1e4,
        }
    }
}

/// Parameters of a fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Cmnb(CmnbParams),
    Nb(NbParams),
    Cmp(CmpParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Cmnb(_) => ModelKind::Cmnb,
            ModelParams::Nb(_) => ModelKind::Nb,
            ModelParams::Cmp(_) => ModelKind::Cmp,
        }
    }

    pub fn family(&self) -> Family {
        match *self {
            ModelParams::Cmnb(c) => c.into(),
            ModelParams::Nb(c) => c.into(),
            ModelParams::Cmp(c) => c.into(),
        }
    }

    /// Values in the order of [`ModelKind::param_names`].
    pub fn values(&self) -> Vec<f64> {
        match self {
            ModelParams::Cmnb(c) => c.to_array().to_vec(),
            ModelParams::Nb(c) => vec![c.r(), c.p()],
            ModelParams::Cmp(c) => vec![c.lambda(), c.nu()],
        }
    }

    pub(crate) fn theta(&self) -> Vec<f64> {
        match self {
            ModelParams::Cmnb(c) => vec![c.r().ln(), c.nu().ln(), logit(c.p())],
            ModelParams::Nb(c) => vec![c.r().ln(), logit(c.p())],
            ModelParams::Cmp(c) => vec![c.lambda().ln(), c.nu()],
        }
    }
}

impl From<CmnbParams> for ModelParams {
    fn from(p: CmnbParams) -> Self {
        ModelParams::Cmnb(p)
    }
}

impl From<NbParams> for ModelParams {
    fn from(p: NbParams) -> Self {
        ModelParams::Nb(p)
    }
}

impl From<CmpParams> for ModelParams {
    fn from(p: CmpParams) -> Self {
        ModelParams::Cmp(p)
    }
}

impl From<ModelParams> for Family {
    fn from(p: ModelParams) -> Self {
        p.family()
    }
}

pub(crate) fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Log-likelihood `Σ n_k ln pmf(k)` under `policy`.
pub fn loglik_with(
    table: &FrequencyTable,
    family: impl Into<Family>,
    policy: TruncationPolicy,
) -> Result<f64> {
    let family = family.into();
    let dist = NormalizedPmf::new(family, policy)?;
    Ok(table.weighted_sum(|k| family.log_term(k)) - table.n() as f64 * dist.log_normalizer())
}

/// Log-likelihood under the fitting truncation policy.
pub fn loglik(table: &FrequencyTable, family: impl Into<Family>) -> Result<f64> {
    loglik_with(table, family, fit_policy())
}

/// Truncation used throughout fitting: tight enough that the normalizer's
/// truncation error, multiplied by `n`, stays below the step-acceptance
/// resolution of the log-likelihood.
pub fn fit_policy() -> TruncationPolicy {
    TruncationPolicy::new(1e-15, 1_000_000).expect("valid constants")
}

/// Score `∂ ln L / ∂(parameters)` in the natural coordinates of `params`.
///
/// Normalizer derivatives are expectations under the current model.
pub fn score(table: &FrequencyTable, params: impl Into<ModelParams>) -> Result<Vec<f64>> {
    score_with(table, &params.into(), fit_policy())
}

pub(crate) fn score_with(
    table: &FrequencyTable,
    params: &ModelParams,
    policy: TruncationPolicy,
) -> Result<Vec<f64>> {
    let n = table.n() as f64;
    let sum_k = table.weighted_sum(|k| k as f64);
    match *params {
        ModelParams::Cmnb(c) => {
            let (r, nu, p) = (c.r(), c.nu(), c.p());
            let dist = NormalizedPmf::new(c, policy)?;
            let e_psi = dist.expectation(|k| psi(r + k as f64));
            let e_g = dist.expectation(|k| ln_binom_gen(r, k));
            let e_x = dist.expectation(|k| k as f64);
            let f1 = nu * (table.weighted_sum(|k| psi(r + k as f64)) - n * e_psi);
            let f2 = table.weighted_sum(|k| ln_binom_gen(r, k)) - n * e_g;
            let f3 = (sum_k - n * e_x) / p;
            check_finite(vec![f1, f2, f3])
        }
        ModelParams::Nb(c) => {
            let (r, p) = (c.r(), c.p());
            let fr = table.weighted_sum(|k| psi(r + k as f64)) - n * psi(r) + n * (-p).ln_1p();
            let fp = sum_k / p - n * r / (1.0 - p);
            check_finite(vec![fr, fp])
        }
        ModelParams::Cmp(c) => {
            let dist = NormalizedPmf::new(c, policy)?;
            let e_x = dist.expectation(|k| k as f64);
            let e_lf = dist.expectation(|k| lgamma(k as f64 + 1.0));
            let fl = (sum_k - n * e_x) / c.lambda();
            let fnu = -table.weighted_sum(|k| lgamma(k as f64 + 1.0)) + n * e_lf;
            check_finite(vec![fl, fnu])
        }
    }
}

fn check_finite(v: Vec<f64>) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(
            "score is not finite at these parameters".into(),
        ))
    }
}

/// `n·pmf(k)` for `k = 0..=k_max`.
pub fn expected_frequencies(family: impl Into<Family>, n: u64, k_max: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(vec![0.0; k_max as usize + 1]);
    }
    let dist = NormalizedPmf::with_defaults(family)?;
    Ok((0..=k_max).map(|k| n as f64 * dist.pmf(k)).collect())
}
