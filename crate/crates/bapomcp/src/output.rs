//! CSV output for run records and per-episode statistics.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::runner::RunRecord;
use crate::stats::EpisodeStats;

pub const RECORD_HEADER: [&str; 7] = ["run", "episode", "return", "mean_action_time_s", "capped", "deprived", "seed"];
pub const STATS_HEADER: [&str; 5] = ["episode", "mean_return", "ci95_lo", "ci95_hi", "n"];

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct CsvError {
    pub path: PathBuf,
    #[source]
    pub source: csv::Error,
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CsvError> {
    let wrap = |source| CsvError {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(wrap)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.serialize(row).map_err(wrap)?;
    }
    w.flush().map_err(|e| wrap(e.into()))
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CsvError> {
    let wrap = |source| CsvError {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    r.deserialize().collect::<Result<_, _>>().map_err(wrap)
}

/// Writes records sorted by `(run, episode)`.
pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), CsvError> {
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| (r.run, r.episode));
    write_rows(path, &RECORD_HEADER, &sorted)
}

pub fn write_stats(path: &Path, stats: &[EpisodeStats]) -> Result<(), CsvError> {
    write_rows(path, &STATS_HEADER, stats)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, CsvError> {
    read_rows(path)
}

pub fn read_stats(path: &Path) -> Result<Vec<EpisodeStats>, CsvError> {
    read_rows(path)
}
