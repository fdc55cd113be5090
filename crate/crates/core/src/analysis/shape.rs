use serde::Serialize;

use crate::dist::{cmnb_dist, CmnbParams, NormalizedPmf};
use crate::error::{Error, Result};

/// Log-concavity class of a CMNB pmf, decided by the sign of `r − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeClass {
    LogConcave,
    LogConvex,
    /// `r = 1`: geometric, both inequalities hold with equality.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeReport {
    pub class: ShapeClass,
    /// Log-convex pmfs on the nonnegative integers are infinitely divisible.
    pub infinitely_divisible: bool,
    /// Largest `|ln M_k|` over the scanned range.
    pub max_abs_log_m: f64,
    /// Whether every scanned `M_k = p_{k+1} p_{k−1} / p_k²` has the sign the
    /// class requires, within `1e-12`.
    pub verified: bool,
}

/// Tolerance on `ln M_k` when checking the class numerically.
const SHAPE_TOL: f64 = 1e-12;

/// `ln M_k` for `k = 1..=k_max`, from log-pmf values.
pub fn log_second_ratios(dist: &NormalizedPmf, k_max: u64) -> Vec<f64> {
    (1..=k_max)
        .map(|k| dist.log_pmf(k + 1) - 2.0 * dist.log_pmf(k) + dist.log_pmf(k - 1))
        .collect()
}

pub fn classify_shape(params: CmnbParams) -> Result<ShapeReport> {
    classify_shape_scan(params, 100)
}

pub fn classify_shape_scan(params: CmnbParams, k_max: u64) -> Result<ShapeReport> {
    let class = if params.r() > 1.0 {
        ShapeClass::LogConcave
    } else if params.r() < 1.0 {
        ShapeClass::LogConvex
    } else {
        ShapeClass::Boundary
    };
    let dist = cmnb_dist(params)?;
    let logs = log_second_ratios(&dist, k_max);
    let max_abs_log_m = logs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let verified = logs.iter().all(|&l| match class {
        ShapeClass::LogConcave => l <= SHAPE_TOL,
        ShapeClass::LogConvex => l >= -SHAPE_TOL,
        ShapeClass::Boundary => l.abs() <= SHAPE_TOL,
    });
    Ok(ShapeReport {
        class,
        infinitely_divisible: class != ShapeClass::LogConcave,
        max_abs_log_m,
        verified,
    })
}

/// Which sufficient condition for discrete pseudo compound Poisson
/// membership applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DpcpReason {
    /// `r ≤ 1`: log-convex, hence compound Poisson.
    ShapeAtMostOne,
    /// `r > 1` and `p·r^ν < 1`: strictly decreasing pmf.
    DecreasingPmf,
    /// Neither sufficient condition holds; membership is not decided.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpcpMembership {
    pub member: bool,
    pub reason: DpcpReason,
}

pub fn is_dpcp(params: CmnbParams) -> DpcpMembership {
    let reason = if params.r() <= 1.0 {
        DpcpReason::ShapeAtMostOne
    } else if params.p() * params.r().powf(params.nu()) < 1.0 {
        DpcpReason::DecreasingPmf
    } else {
        DpcpReason::Undetermined
    };
    DpcpMembership {
        member: reason != DpcpReason::Undetermined,
        reason,
    }
}

/// Compound-Poisson parametrization `(λ, α_1, …, α_n)`, with pgf
/// `exp(λ Σ α_i (z^i − 1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpcpParams {
    pub lambda: f64,
    pub alpha: Vec<f64>,
    pub n_max: u64,
    pub alpha_abs_sum: f64,
    pub membership: DpcpMembership,
}

impl DpcpParams {
    /// Runs the compound-Poisson recursion
    /// `P_{n+1} = λ/(n+1) Σ_{i=0}^{n} (i+1) α_{i+1} P_{n−i}` from
    /// `P_0 = e^{−λ}` for `n + 1 ≤ n_max`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.n_max as usize;
        let mut p = Vec::with_capacity(n + 1);
        p.push((-self.lambda).exp());
        for m in 0..n {
            let s: f64 = (0..=m)
                .map(|i| (i + 1) as f64 * self.alpha[i] * p[m - i])
                .sum();
            p.push(self.lambda / (m + 1) as f64 * s);
        }
        p
    }
}

/// Solves the triangular system linking the CMNB pmf to `(λ, α_i)`,
/// with `λ = −ln P_0`.
///
/// Works with `q_j = P_j / P_0` so that no pmf value underflows; fails
/// only when `P_0` itself is not representable.
pub fn dpcp_parametrization(params: CmnbParams, n_max: u64) -> Result<DpcpParams> {
    let dist = cmnb_dist(params)?;
    let log_p0 = dist.log_pmf(0);
    if log_p0 < f64::MIN_POSITIVE.ln() {
        return Err(Error::SingularDpcp { log_p0 });
    }
    let lambda = -log_p0;
    let n = n_max as usize;
    let q: Vec<f64> = (0..=n_max)
        .map(|j| (dist.log_pmf(j) - log_p0).exp())
        .collect();
    let mut alpha = vec![0.0; n];
    for m in 0..n {
        // (m+1) q_{m+1} / λ = Σ_{i=0}^{m} (i+1) α_{i+1} q_{m−i}, with q_0 = 1.
        let known: f64 = (0..m).map(|i| (i + 1) as f64 * alpha[i] * q[m - i]).sum();
        alpha[m] = ((m + 1) as f64 * q[m + 1] / lambda - known) / (m + 1) as f64;
    }
    let alpha_abs_sum = alpha.iter().map(|a| a.abs()).sum();
    Ok(DpcpParams {
        lambda,
        alpha,
        n_max,
        alpha_abs_sum,
        membership: is_dpcp(params),
    })
}
