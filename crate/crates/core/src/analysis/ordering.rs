use serde::Serialize;

use crate::dist::{cmnb_dist, CmnbParams, NormalizedPmf};
use crate::error::{Error, Result};

/// Which ordering hypothesis applies to a pair of parameter records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LrHypothesis {
    /// Same `r ≥ 1` and `p`, `ν₁ ≤ ν₂`.
    NuOrdered,
    /// Same `r` and `ν`, `p₁ ≤ p₂`, with `ν ≤ 1` or `r ≥ 1`.
    POrdered,
    /// Identical records.
    Identical,
    /// Comparable records outside both hypotheses.
    NotCovered,
}

/// Classifies the pair; errors when `r` differs or both `ν` and `p` differ.
pub fn lr_hypothesis(first: CmnbParams, second: CmnbParams) -> Result<LrHypothesis> {
    if first.r() != second.r() || (first.nu() != second.nu() && first.p() != second.p()) {
        return Err(Error::IncomparableParameters);
    }
    let r = first.r();
    Ok(if first == second {
        LrHypothesis::Identical
    } else if first.nu() != second.nu() {
        if r >= 1.0 && first.nu() <= second.nu() {
            LrHypothesis::NuOrdered
        } else {
            LrHypothesis::NotCovered
        }
    } else if first.p() <= second.p() && (first.nu() <= 1.0 || r >= 1.0) {
        LrHypothesis::POrdered
    } else {
        LrHypothesis::NotCovered
    })
}

/// Whether `pmf₂(n) / pmf₁(n)` is nondecreasing on `n = 0..=n_max`, i.e.
/// whether the first variable is smaller in likelihood-ratio order on that
/// range.
///
/// The check runs on log-ratios; a decrease smaller than `1e-12` relative to
/// the log-ratio magnitude is attributed to rounding.
pub fn lr_order_check(first: CmnbParams, second: CmnbParams, n_max: u64) -> Result<bool> {
    lr_hypothesis(first, second)?;
    let a = cmnb_dist(first)?;
    let b = cmnb_dist(second)?;
    let log_ratio = |n: u64| b.log_pmf(n) - a.log_pmf(n);
    let mut prev = log_ratio(0);
    for n in 1..=n_max {
        let cur = log_ratio(n);
        let tol = 1e-12 * prev.abs().max(cur.abs()).max(1.0);
        if cur < prev - tol {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(true)
}

/// `Σ_{w=0}^{k_max} pmf(w)·[w^ν g(w) − p (w + r)^ν g(w + 1)]` under the law
/// `law`, with the operator built from `operator`.
pub fn stein_operator_residual<G: Fn(u64) -> f64>(
    law: &NormalizedPmf,
    operator: CmnbParams,
    g: G,
    k_max: u64,
) -> f64 {
    let (r, nu, p) = (operator.r(), operator.nu(), operator.p());
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for w in 0..=k_max {
        let pw = law.pmf(w);
        if pw == 0.0 {
            continue;
        }
        let wf = w as f64;
        let lead = if w == 0 { 0.0 } else { wf.powf(nu) * g(w) };
        let v = pw * (lead - p * (wf + r).powf(nu) * g(w + 1));
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Stein residual of `g` under CMNB(`params`) itself; zero for bounded `g`
/// up to truncation.
pub fn stein_residual<G: Fn(u64) -> f64>(params: CmnbParams, g: G, k_max: u64) -> Result<f64> {
    let law = cmnb_dist(params)?;
    Ok(stein_operator_residual(&law, params, g, k_max))
}
