//! Means and normal-approximation 95% confidence intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::runner::RunRecord;

pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("no records to aggregate")]
pub struct EmptyInput;

/// Mean with its 95% interval. A single sample gives a zero-width interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self, EmptyInput> {
        let n = values.len();
        if n == 0 {
            return Err(EmptyInput);
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let half = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Z95 * (var / n as f64).sqrt()
        };
        Ok(Self {
            mean,
            lo: mean - half,
            hi: mean + half,
            n,
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.n < 2
    }

    pub fn overlaps(&self, other: &Summary) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// One row of the stats CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub episode: usize,
    pub mean_return: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub n: usize,
}

/// Mean return and interval per episode index, across runs.
pub fn aggregate_stats(records: &[RunRecord]) -> Result<Vec<EpisodeStats>, EmptyInput> {
    if records.is_empty() {
        return Err(EmptyInput);
    }
    let mut by_episode: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        by_episode.entry(r.episode).or_default().push(r.ret);
    }
    by_episode
        .into_iter()
        .map(|(episode, v)| {
            let s = Summary::of(&v)?;
            Ok(EpisodeStats {
                episode,
                mean_return: s.mean,
                ci95_lo: s.lo,
                ci95_hi: s.hi,
                n: s.n,
            })
        })
        .collect()
}

/// Each run's mean return over episodes in `episodes`.
pub fn per_run_means(records: &[RunRecord], episodes: std::ops::Range<usize>) -> Vec<f64> {
    let mut by_run: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| episodes.contains(&r.episode)) {
        let e = by_run.entry(r.run).or_default();
        e.0 += r.ret;
        e.1 += 1;
    }
    by_run.into_values().map(|(s, n)| s / n as f64).collect()
}

/// Mean plan time per call across records.
pub fn mean_action_time(records: &[RunRecord]) -> Result<f64, EmptyInput> {
    if records.is_empty() {
        return Err(EmptyInput);
    }
    Ok(records.iter().map(|r| r.mean_action_time_s).sum::<f64>() / records.len() as f64)
}
