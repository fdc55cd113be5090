use serde::Serialize;

use crate::dist::{CmbParams, CmnbParams, CmnhgParams, CmpParams, NormalizedPmf};
use crate::error::{Error, Result};

/// Level at which the default total-variation cutoff is placed.
const TV_CDF_LEVEL: f64 = 1.0 - 1e-10;

/// Total-variation distance over `0..=k_max` plus the bound
/// `(tail_a + tail_b)/2` on the mass beyond it.
pub fn tv_distance_to(a: &NormalizedPmf, b: &NormalizedPmf, k_max: u64) -> f64 {
    let head: f64 = (0..=k_max).map(|k| (a.pmf(k) - b.pmf(k)).abs()).sum();
    let tail = (1.0 - a.cdf(k_max)).max(0.0) + (1.0 - b.cdf(k_max)).max(0.0);
    0.5 * (head + tail)
}

/// Total-variation distance with the cutoff where both cdfs exceed
/// `1 − 1e-10`.
pub fn tv_distance(a: &NormalizedPmf, b: &NormalizedPmf) -> Result<f64> {
    let k_max = a.quantile(TV_CDF_LEVEL)?.max(b.quantile(TV_CDF_LEVEL)?);
    Ok(tv_distance_to(a, b, k_max))
}

/// One point of a limit grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPoint {
    pub index: f64,
    pub distance: f64,
}

/// Whether the distances strictly decrease along the grid.
pub fn strictly_decreasing(points: &[LimitPoint]) -> bool {
    points.windows(2).all(|w| w[1].distance < w[0].distance)
}

/// TV distance between CMNB(r, ν, λ/(r^ν + λ)) and CMP(λ, ν).
pub fn limit_cmnb_to_cmp(r: f64, nu: f64, lambda: f64) -> Result<f64> {
    let p = lambda / (r.powf(nu) + lambda);
    let cmnb = NormalizedPmf::with_defaults(CmnbParams::new(r, nu, p)?)?;
    let cmp = NormalizedPmf::with_defaults(CmpParams::new(lambda, nu)?)?;
    tv_distance(&cmnb, &cmp)
}

/// TV distance between CMNHG(z, ν, m, n) and CMNB(m, ν, p), where
/// `z = round(n p̃ / (1 − p̃))` and `p̃ = p^{1/ν}`.
pub fn limit_cmnhg_to_cmnb(m: f64, nu: f64, p: f64, n: f64) -> Result<f64> {
    let target = CmnbParams::new(m, nu, p)?;
    let p_tilde = p.powf(1.0 / nu);
    let z = (n * p_tilde / (1.0 - p_tilde)).round();
    if !(z.is_finite() && z >= 0.0 && z < u64::MAX as f64) {
        return Err(Error::InvalidParameter(format!(
            "derived total z = {z} is not representable"
        )));
    }
    let hg = NormalizedPmf::with_defaults(CmnhgParams::new(z as u64, nu, m, n)?)?;
    let cmnb = NormalizedPmf::with_defaults(target)?;
    tv_distance(&hg, &cmnb)
}

/// TV distance between CMB(m, λ/m^ν, ν) and CMP(λ, ν).
pub fn limit_cmb_to_cmp(m: u64, nu: f64, lambda: f64) -> Result<f64> {
    let p = lambda / (m as f64).powf(nu);
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            function: "limit_cmb_to_cmp",
            value: p,
            requirement: "lambda / m^nu in (0, 1)",
        });
    }
    let cmb = NormalizedPmf::with_defaults(CmbParams::new(m, p, nu)?)?;
    let cmp = NormalizedPmf::with_defaults(CmpParams::new(lambda, nu)?)?;
    tv_distance(&cmb, &cmp)
}

/// Evaluates `f` along `grid`.
pub fn limit_grid<F: Fn(f64) -> Result<f64>>(grid: &[f64], f: F) -> Result<Vec<LimitPoint>> {
    grid.iter()
        .map(|&index| f(index).map(|distance| LimitPoint { index, distance }))
        .collect()
}
