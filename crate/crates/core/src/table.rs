//! Observed count data as `(value, frequency)` pairs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// A frequency table with strictly increasing values and at least one
/// observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyTable {
    entries: Vec<(u64, u64)>,
    n: u64,
}

impl FrequencyTable {
    /// Builds from arbitrary `(value, count)` pairs, summing duplicates.
    /// Zero counts are kept as explicit rows.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut merged: BTreeMap<u64, u64> = BTreeMap::new();
        for (value, count) in pairs {
            let slot = merged.entry(value).or_insert(0);
            *slot = slot
                .checked_add(count)
                .ok_or_else(|| Error::InvalidTable(format!("count overflow at value {value}")))?;
        }
        let entries: Vec<(u64, u64)> = merged.into_iter().collect();
        let n = entries
            .iter()
            .try_fold(0u64, |acc, &(_, c)| acc.checked_add(c))
            .ok_or_else(|| Error::InvalidTable("total count overflows".into()))?;
        if n == 0 {
            return Err(Error::InvalidTable("table holds no observations".into()));
        }
        Ok(Self { entries, n })
    }

    /// Counts for the consecutive values `0, 1, 2, …`.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        Self::from_pairs(counts.iter().enumerate().map(|(v, &c)| (v as u64, c)))
    }

    /// Tabulates raw observations.
    pub fn from_observations<I: IntoIterator<Item = u64>>(obs: I) -> Result<Self> {
        Self::from_pairs(obs.into_iter().map(|v| (v, 1)))
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    /// Total number of observations.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Largest value with a positive count.
    pub fn k_max(&self) -> u64 {
        self.entries
            .iter()
            .rev()
            .find(|&&(_, c)| c > 0)
            .map(|&(v, _)| v)
            .expect("n >= 1 guarantees a positive count")
    }

    pub fn count_at(&self, value: u64) -> u64 {
        self.entries
            .binary_search_by_key(&value, |&(v, _)| v)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Counts for `0..=k_max`, zeros filled in.
    pub fn dense_counts(&self) -> Vec<u64> {
        let mut dense = vec![0u64; self.k_max() as usize + 1];
        for &(v, c) in &self.entries {
            if let Some(slot) = dense.get_mut(v as usize) {
                *slot += c;
            }
        }
        dense
    }

    pub fn mean(&self) -> f64 {
        self.weighted_sum(|k| k as f64) / self.n as f64
    }

    /// `Σ_k n_k f(k)` over rows with positive count.
    pub fn weighted_sum<F: FnMut(u64) -> f64>(&self, mut f: F) -> f64 {
        self.entries
            .iter()
            .filter(|&&(_, c)| c > 0)
            .map(|&(v, c)| c as f64 * f(v))
            .sum()
    }

    /// Empirical probability of `value`.
    pub fn proportion(&self, value: u64) -> f64 {
        self.count_at(value) as f64 / self.n as f64
    }
}
