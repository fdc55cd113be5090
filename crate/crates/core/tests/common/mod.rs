//! Oracles and random parameter generators shared by the integration tests.
#![allow(dead_code)]

use cmnb::dist::{CmbParams, CmnbParams, CmnhgParams, CmpParams, Family, NbParams, NormalizedPmf};
use cmnb::estimation::{loglik, ModelParams};
use cmnb::table::FrequencyTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    uniform(rng, lo.ln(), hi.ln()).exp()
}

/// CMNB parameters with a moderate effective support.
pub fn random_cmnb(rng: &mut ChaCha8Rng) -> CmnbParams {
    let r = log_uniform(rng, 0.1, 8.0);
    let nu = log_uniform(rng, 0.2, 4.0);
    let p = uniform(rng, 0.02, 0.8);
    CmnbParams::new(r, nu, p).unwrap()
}

pub fn random_family(rng: &mut ChaCha8Rng, which: usize) -> Family {
    match which {
        0 => Family::Cmnb(random_cmnb(rng)),
        1 => {
            Family::Nb(NbParams::new(log_uniform(rng, 0.2, 10.0), uniform(rng, 0.05, 0.8)).unwrap())
        }
        2 => Family::Cmp(
            CmpParams::new(log_uniform(rng, 0.2, 10.0), uniform(rng, 0.3, 2.5)).unwrap(),
        ),
        3 => Family::Cmb(
            CmbParams::new(
                rng.random_range(1..=30),
                uniform(rng, 0.05, 0.95),
                uniform(rng, 0.3, 3.0),
            )
            .unwrap(),
        ),
        _ => Family::Cmnhg(
            CmnhgParams::new(
                rng.random_range(1..=40),
                uniform(rng, 0.3, 3.0),
                log_uniform(rng, 0.3, 5.0),
                log_uniform(rng, 0.3, 5.0),
            )
            .unwrap(),
        ),
    }
}

pub const FAMILY_NAMES: [&str; 5] = ["cmnb", "nb", "cmp", "cmb", "cmnhg"];

/// `P(X = k | X + Y = s)` for independent `X ~ CMNB(rx, ν, p)` and
/// `Y ~ CMNB(ry, ν, p)`, from the two marginal pmfs.
pub fn brute_conditional(rx: f64, ry: f64, nu: f64, p: f64, s: u64) -> Vec<f64> {
    let x = NormalizedPmf::with_defaults(CmnbParams::new(rx, nu, p).unwrap()).unwrap();
    let y = NormalizedPmf::with_defaults(CmnbParams::new(ry, nu, p).unwrap()).unwrap();
    let joint: Vec<f64> = (0..=s).map(|k| x.log_pmf(k) + y.log_pmf(s - k)).collect();
    let top = joint.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = joint.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// Multinomial counts over `probs` (the last cell absorbs the rest), by
/// sequential conditional binomials. Independent of the crate's sampler.
pub fn multinomial(rng: &mut ChaCha8Rng, probs: &[f64], n: u64) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut left = n;
    let mut mass = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() || mass <= p {
            counts[i] = left;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let x = Binomial::new(left, q).unwrap().sample(rng);
        counts[i] = x;
        left -= x;
        mass -= p;
    }
    counts
}

/// Central differences of the log-likelihood in the natural coordinates.
pub fn fd_score(table: &FrequencyTable, params: ModelParams) -> Vec<f64> {
    let x = params.values();
    (0..x.len())
        .map(|j| {
            let h = 1e-6 * x[j].abs().max(1.0);
            let at = |d: f64| {
                let mut y = x.clone();
                y[j] += d;
                let q: ModelParams = match params {
                    ModelParams::Cmnb(_) => CmnbParams::new(y[0], y[1], y[2]).unwrap().into(),
                    ModelParams::Nb(_) => NbParams::new(y[0], y[1]).unwrap().into(),
                    ModelParams::Cmp(_) => CmpParams::new(y[0], y[1]).unwrap().into(),
                };
                loglik(table, q).unwrap()
            };
            (at(h) - at(-h)) / (2.0 * h)
        })
        .collect()
}

/// A table of `n` multinomial draws from `family`.
pub fn simulated_table(rng: &mut ChaCha8Rng, family: impl Into<Family>, n: u64) -> FrequencyTable {
    let dist = NormalizedPmf::with_defaults(family).unwrap();
    let counts = multinomial(rng, &dist.support_pmf(), n);
    FrequencyTable::from_counts(&counts).unwrap()
}
