use serde::Serialize;

use crate::dist::{cmnb_dist, CmnbParams, NormalizedPmf};
use crate::error::{Error, Result};
use crate::special::{psi1, LogSumAccumulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dispersion {
    Overdispersed,
    Underdispersed,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionReport {
    pub classification: Dispersion,
    pub delta_values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// `Δ_k = (1 − ν) ψ′(k + 1) + ν ψ′(k + r)`, the second derivative of the log
/// weight function at `k`.
pub fn dispersion_delta(params: CmnbParams, k: u64) -> f64 {
    let kf = k as f64;
    (1.0 - params.nu()) * psi1(kf + 1.0) + params.nu() * psi1(kf + params.r())
}

pub fn classify_dispersion(params: CmnbParams) -> Result<DispersionReport> {
    classify_dispersion_scan(params, 1000)
}

/// Scans `Δ_0..=Δ_{k_max}`.
///
/// `Δ_k ~ 1/k > 0` as `k → ∞` whatever `r` and `ν`, so a uniformly positive
/// scan agrees with the tail and gives `Overdispersed`. A uniformly negative
/// scan contradicts the tail sign and, like a mixed one, is reported as
/// `Indeterminate`.
pub fn classify_dispersion_scan(params: CmnbParams, k_max: u64) -> Result<DispersionReport> {
    let delta_values: Vec<f64> = (0..=k_max).map(|k| dispersion_delta(params, k)).collect();
    let classification = if delta_values.iter().all(|&d| d > 0.0) {
        Dispersion::Overdispersed
    } else {
        Dispersion::Indeterminate
    };
    let Moments { mean, variance } = moments(&cmnb_dist(params)?)?;
    Ok(DispersionReport {
        classification,
        delta_values,
        mean,
        variance,
    })
}

/// Mean and variance over the effective support of `dist`.
pub fn moments(dist: &NormalizedPmf) -> Result<Moments> {
    let mean = dist.expectation(|k| k as f64);
    let variance = dist.expectation(|k| {
        let d = k as f64 - mean;
        d * d
    });
    if !(mean.is_finite() && variance.is_finite()) {
        return Err(Error::TruncationBudget {
            max_terms: dist.policy().max_terms(),
        });
    }
    Ok(Moments { mean, variance })
}

/// `ln Σ_k pmf(k)^α`, summed until the geometric tail bound of the powered
/// terms falls below the policy's relative tolerance.
pub fn log_power_sum(dist: &NormalizedPmf, alpha: f64) -> Result<f64> {
    let family = dist.family();
    if let Some(m) = family.support_max() {
        let acc: LogSumAccumulator = (0..=m).map(|k| alpha * dist.log_pmf(k)).collect();
        return Ok(acc.value());
    }
    let policy = dist.policy();
    let ln_tol = policy.rel_tol().ln();
    let mut acc = LogSumAccumulator::new();
    for k in 0..policy.max_terms() {
        let t = alpha * dist.log_pmf(k);
        acc.add(t);
        let rho = family.ratio_bound(k).powf(alpha);
        if k >= dist.truncation_index() && rho < 1.0 {
            let threshold = ln_tol + acc.value();
            if t < threshold && t + rho.ln() - (-rho).ln_1p() < threshold {
                return Ok(acc.value());
            }
        }
    }
    Err(Error::TruncationBudget {
        max_terms: policy.max_terms(),
    })
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha != 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function: "entropy",
            value: alpha,
            requirement: "alpha > 0 and alpha != 1",
        })
    }
}

/// Rényi entropy `(1/(1 − α)) ln Σ pmf^α`.
pub fn renyi_entropy(dist: &NormalizedPmf, alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    Ok(log_power_sum(dist, alpha)? / (1.0 - alpha))
}

/// Tsallis entropy `(1/(1 − α)) (Σ pmf^α − 1)`.
pub fn tsallis_entropy(dist: &NormalizedPmf, alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    Ok(log_power_sum(dist, alpha)?.exp_m1() / (1.0 - alpha))
}
