//! Pearson chi-squared, the discrete Kolmogorov-Smirnov distance and its
//! parametric-bootstrap p-value.

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{Family, NormalizedPmf};
use crate::error::{Error, Result};
use crate::estimation::{FitConfig, ModelParams};
use crate::sampling::{sample_batch, RngState};
use crate::special::chi2_sf;
use crate::table::FrequencyTable;

/// One class of a chi-squared partition: the values `lo..=hi` (with
/// `hi = None` for an open upper tail).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi2Class {
    pub lo: u64,
    pub hi: Option<u64>,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chi2Test {
    /// `Σ (n_i − e_i)² / e_i`.
    pub statistic: f64,
    /// `Σ n_i² / e_i − n`. Differs from `statistic` by exactly `n − Σ e_i`.
    pub handy_statistic: f64,
    pub df: i64,
    /// Upper tail of `χ²_df`; absent when `df < 1`.
    pub p_value: Option<f64>,
    pub classes: Vec<Chi2Class>,
}

impl Chi2Test {
    /// `n − Σ e_i`, the expected mass outside the classes.
    pub fn missing_mass(&self, n: u64) -> f64 {
        n as f64 - self.classes.iter().map(|c| c.expected).sum::<f64>()
    }
}

fn chi2_from_classes(n: u64, classes: Vec<Chi2Class>, n_params: usize) -> Result<Chi2Test> {
    let mut statistic = 0.0;
    let mut handy = 0.0;
    for c in &classes {
        if !(c.expected > 0.0) {
            return Err(Error::ZeroExpected { class: c.lo });
        }
        let o = c.observed as f64;
        statistic += (o - c.expected).powi(2) / c.expected;
        handy += o * o / c.expected;
    }
    handy -= n as f64;
    let df = classes.len() as i64 - 1 - n_params as i64;
    let p_value = if df >= 1 {
        Some(chi2_sf(statistic, df as u32)?)
    } else {
        None
    };
    Ok(Chi2Test {
        statistic,
        handy_statistic: handy,
        df,
        p_value,
        classes,
    })
}

/// Chi-squared over the classes `0, 1, …, k_max` with no pooling and no
/// tail class; `df = (k_max + 1) − 1 − n_params`.
pub fn chi2_test(
    table: &FrequencyTable,
    family: impl Into<Family>,
    n_params: usize,
) -> Result<Chi2Test> {
    let dist = NormalizedPmf::with_defaults(family)?;
    let n = table.n();
    let classes = (0..=table.k_max())
        .map(|k| Chi2Class {
            lo: k,
            hi: Some(k),
            observed: table.count_at(k),
            expected: n as f64 * dist.pmf(k),
        })
        .collect();
    chi2_from_classes(n, classes, n_params)
}

/// Chi-squared with adjacent classes merged until each expected count is
/// at least `min_expected`; the last class is the open tail `≥ lo`.
pub fn chi2_test_pooled(
    table: &FrequencyTable,
    family: impl Into<Family>,
    n_params: usize,
    min_expected: f64,
) -> Result<Chi2Test> {
    let dist = NormalizedPmf::with_defaults(family)?;
    let n = table.n();
    let nf = n as f64;
    let k_max = table.k_max();
    let mut classes: Vec<Chi2Class> = Vec::new();
    let mut open: Option<Chi2Class> = None;
    for k in 0..=k_max {
        let cell = Chi2Class {
            lo: k,
            hi: Some(k),
            observed: table.count_at(k),
            expected: nf * dist.pmf(k),
        };
        let cur = match open.take() {
            Some(mut c) => {
                c.hi = Some(k);
                c.observed += cell.observed;
                c.expected += cell.expected;
                c
            }
            None => cell,
        };
        if cur.expected >= min_expected {
            classes.push(cur);
        } else {
            open = Some(cur);
        }
    }
    let tail_expected = nf * (1.0 - dist.cdf(k_max)).max(0.0);
    match (open, classes.last_mut()) {
        (Some(mut c), _) => {
            c.hi = None;
            c.expected += tail_expected;
            if c.expected >= min_expected || classes.is_empty() {
                classes.push(c);
            } else {
                let last = classes.last_mut().expect("nonempty");
                last.hi = None;
                last.observed += c.observed;
                last.expected += c.expected;
            }
        }
        (None, Some(last)) => {
            last.hi = None;
            last.expected += tail_expected;
        }
        (None, None) => unreachable!("at least one class is formed"),
    }
    chi2_from_classes(n, classes, n_params)
}

/// `sup_x |F̂_n(x) − F₀(x)|` over the integers, which also covers the left
/// limits at every jump. Beyond the largest observation `F̂_n = 1` and the
/// distance only shrinks, so the scan stops there.
pub fn ks_statistic_discrete(table: &FrequencyTable, dist: &NormalizedPmf) -> f64 {
    let n = table.n() as f64;
    let mut cum = 0u64;
    let mut d = 0.0f64;
    for k in 0..=table.k_max() {
        cum += table.count_at(k);
        d = d.max((cum as f64 / n - dist.cdf(k)).abs());
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BootstrapMode {
    /// Replicates are compared with the same fitted law.
    RefitFree,
    /// Each replicate is refitted and compared with its own fit.
    Refit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    pub mode: BootstrapMode,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            seed: 0,
            mode: BootstrapMode::RefitFree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub p_value: f64,
    pub observed: f64,
    /// Replicate statistics in replicate order; `None` where a refit failed.
    pub replicates: Vec<Option<f64>>,
}

impl BootstrapResult {
    pub fn failures(&self) -> usize {
        self.replicates.iter().filter(|d| d.is_none()).count()
    }
}

/// `(1 + #{D_b ≥ d_obs}) / (B + 1)` over the successful replicates.
pub fn bootstrap_p_value(d_obs: f64, replicates: &[Option<f64>]) -> f64 {
    let ok: Vec<f64> = replicates.iter().flatten().copied().collect();
    let exceed = ok.iter().filter(|&&d| d >= d_obs).count();
    (1 + exceed) as f64 / (ok.len() + 1) as f64
}

/// Parametric-bootstrap p-value of the discrete KS statistic.
///
/// Replicate `b` draws `n` values with the RNG state derived from
/// `(seed, b + 1)`; results are gathered in replicate order, so the value is
/// independent of thread scheduling.
pub fn ks_pvalue_bootstrap(
    table: &FrequencyTable,
    model: ModelParams,
    config: &BootstrapConfig,
) -> Result<BootstrapResult> {
    if config.replicates < 100 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 100 replicates, got {}",
            config.replicates
        )));
    }
    let dist = NormalizedPmf::with_defaults(model.family())?;
    let observed = ks_statistic_discrete(table, &dist);
    let n = table.n();
    let kind = model.kind();
    let replicates: Vec<Option<f64>> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|b| -> Result<Option<f64>> {
            let mut rng = RngState::derived(config.seed, b + 1);
            let sample = sample_batch(&dist, &mut rng, n)?;
            Ok(match config.mode {
                BootstrapMode::RefitFree => Some(ks_statistic_discrete(&sample, &dist)),
                BootstrapMode::Refit => kind
                    .fit(&sample, &FitConfig::default())
                    .and_then(|fit| NormalizedPmf::with_defaults(fit.model.family()))
                    .ok()
                    .map(|refit| ks_statistic_discrete(&sample, &refit)),
            })
        })
        .collect::<Result<_>>()?;
    Ok(BootstrapResult {
        p_value: bootstrap_p_value(observed, &replicates),
        observed,
        replicates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub chi2: f64,
    pub chi2_handy: f64,
    pub df: i64,
    pub chi2_pvalue: Option<f64>,
    pub ks_stat: f64,
    pub ks_pvalue: Option<f64>,
    pub class_count: usize,
    pub expected: Vec<f64>,
}

/// Chi-squared (unpooled unless `pool_min_expected` is set), KS, and an
/// optional bootstrap p-value for a fitted model.
pub fn gof_report(
    table: &FrequencyTable,
    model: ModelParams,
    pool_min_expected: Option<f64>,
    bootstrap: Option<&BootstrapConfig>,
) -> Result<GofReport> {
    let n_params = model.kind().n_params();
    let chi = match pool_min_expected {
        Some(m) => chi2_test_pooled(table, model, n_params, m)?,
        None => chi2_test(table, model, n_params)?,
    };
    let dist = NormalizedPmf::with_defaults(model.family())?;
    let ks_stat = ks_statistic_discrete(table, &dist);
    let ks_pvalue = match bootstrap {
        Some(cfg) => Some(ks_pvalue_bootstrap(table, model, cfg)?.p_value),
        None => None,
    };
    let expected = (0..=table.k_max())
        .map(|k| table.n() as f64 * dist.pmf(k))
        .collect();
    Ok(GofReport {
        chi2: chi.statistic,
        chi2_handy: chi.handy_statistic,
        df: chi.df,
        chi2_pvalue: chi.p_value,
        ks_stat,
        ks_pvalue,
        class_count: chi.classes.len(),
        expected,
    })
}
