use crate::dist::{CmnbParams, CmpParams, NbParams};
use crate::error::{Error, Result};
use crate::table::FrequencyTable;

const R_LO: f64 = 1e-6;
const R_HI: f64 = 1e3;
const NU_LO: f64 = 1e-6;
const NU_HI: f64 = 1e3;
const P_EDGE: f64 = 1e-8;

/// `ln((r + 1)/(2r))`, the log second-ratio factor at `k = 0` per unit `ν`.
fn second_ratio_k0(r: f64) -> f64 {
    ((1.0 - r) / (2.0 * r)).ln_1p()
}

/// `ln(2(r + 2)/(3(r + 1)))`, the same factor at `k = 1`.
fn second_ratio_k1(r: f64) -> f64 {
    ((1.0 - r) / (3.0 * (r + 1.0))).ln_1p()
}

/// Ratio of the two factors; decreasing in `r` from `∞` to `ln 2 / ln 1.5`,
/// with the removable value 3 at `r = 1`.
fn factor_ratio(r: f64) -> f64 {
    if r == 1.0 {
        3.0
    } else {
        second_ratio_k0(r) / second_ratio_k1(r)
    }
}

/// Crude `(r, ν, p)` from the first four empirical probabilities.
///
/// With `L0 = ln(P0 P2 / P1²)` and `L1 = ln(P1 P3 / P2²)`, `r` solves
/// `factor_ratio(r) = L0 / L1` by bisection on `ln r`, then `ν = L0 /
/// second_ratio_k0(r)` and `p = (P1/P0) / r^ν`. The result is clamped into the
/// parameter space.
pub fn ratio_regression_init(table: &FrequencyTable) -> Result<CmnbParams> {
    let mut probs = [0.0; 4];
    for (k, slot) in probs.iter_mut().enumerate() {
        let v = table.proportion(k as u64);
        if v <= 0.0 {
            return Err(Error::InsufficientSupport { value: k as u64 });
        }
        *slot = v;
    }
    ratio_regression_from_probs(probs)
}

/// As [`ratio_regression_init`] from given `P0..P3`.
pub fn ratio_regression_from_probs(probs: [f64; 4]) -> Result<CmnbParams> {
    let ln = probs.map(f64::ln);
    let l0 = ln[0] + ln[2] - 2.0 * ln[1];
    let l1 = ln[1] + ln[3] - 2.0 * ln[2];
    if !(l0.is_finite() && l1.is_finite()) || l1 == 0.0 {
        return Err(Error::RatioRegression("degenerate second ratios"));
    }
    let target = l0 / l1;
    let (mut lo, mut hi) = (R_LO.ln(), R_HI.ln());
    if !(factor_ratio(lo.exp()) >= target && target >= factor_ratio(hi.exp())) {
        return Err(Error::RatioRegression(
            "second-ratio quotient outside the attainable range",
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if factor_ratio(mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let r = (0.5 * (lo + hi)).exp();
    let (f0, f1) = (second_ratio_k0(r), second_ratio_k1(r));
    let nu = if f0.abs() >= f1.abs() && f0 != 0.0 {
        l0 / f0
    } else if f1 != 0.0 {
        l1 / f1
    } else {
        return Err(Error::RatioRegression("nu is not identified at r = 1"));
    };
    if !(nu > 0.0) {
        return Err(Error::RatioRegression("second ratios imply nu <= 0"));
    }
    let nu = nu.clamp(NU_LO, NU_HI);
    let p = ((ln[1] - ln[0]) - nu * r.ln())
        .exp()
        .clamp(P_EDGE, 1.0 - P_EDGE);
    CmnbParams::new(r, nu, p)
}

fn mean_and_variance(table: &FrequencyTable) -> (f64, f64) {
    let m = table.mean();
    let v = table.weighted_sum(|k| (k as f64 - m).powi(2)) / table.n() as f64;
    (m, v)
}

/// Method-of-moments negative binomial; a nearly-Poisson NB when the data
/// are not overdispersed.
pub fn nb_moment_init(table: &FrequencyTable) -> Result<NbParams> {
    let (m, v) = mean_and_variance(table);
    if m <= 0.0 {
        return Err(Error::InvalidTable("all observations are zero".into()));
    }
    if v > m {
        let p = 1.0 - m / v;
        NbParams::new(m * (1.0 - p) / p, p)
    } else {
        let r = 10.0;
        NbParams::new(r, m / (r + m))
    }
}

/// CMNB start when ratio regression is unavailable: the moment NB with `ν = 1`.
pub fn cmnb_fallback_init(table: &FrequencyTable) -> Result<CmnbParams> {
    Ok(nb_moment_init(table)?.as_cmnb())
}

/// COM-Poisson start from `P1/P0 = λ` and `P2/P1 = λ/2^ν`; Poisson at the
/// sample mean when a ratio is unavailable.
pub fn cmp_init(table: &FrequencyTable) -> Result<CmpParams> {
    let p: Vec<f64> = (0..3).map(|k| table.proportion(k)).collect();
    if p.iter().all(|&x| x > 0.0) {
        let lambda = p[1] / p[0];
        let nu = ((p[1] / p[0]).ln() - (p[2] / p[1]).ln()) / std::f64::consts::LN_2;
        let nu = nu.max(0.0);
        let lambda = if nu == 0.0 { lambda.min(0.99) } else { lambda };
        return CmpParams::new(lambda, nu);
    }
    let m = table.mean();
    if m <= 0.0 {
        return Err(Error::InvalidTable("all observations are zero".into()));
    }
    CmpParams::new(m, 1.0)
}
