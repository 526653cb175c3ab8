//! `timestamp,power_kw` demand profiles.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDateTime;
use ebess_core::{DemandProfile, DemandSample, ModelError};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DemandCsvError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Profile(#[from] ModelError),
}

#[derive(Deserialize)]
struct Record {
    timestamp: String,
    power_kw: f64,
}

const FORMATS: &[&str] = &["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"];

pub(crate) fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    let text = text.trim();
    FORMATS.iter().find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
}

/// Rows are numbered from 1 for the first data row after the header.
pub fn parse_demand_csv<R: Read>(reader: R) -> Result<DemandProfile, DemandCsvError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut samples = Vec::new();
    for (i, record) in rdr.deserialize::<Record>().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| DemandCsvError::Row { row, message: e.to_string() })?;
        let timestamp = parse_timestamp(&record.timestamp).ok_or_else(|| DemandCsvError::Row {
            row,
            message: format!("`{}` is not an ISO-8601 local date-time", record.timestamp),
        })?;
        samples.push(DemandSample { timestamp, power_kw: record.power_kw });
    }
    Ok(DemandProfile::new(samples)?)
}

pub fn read_demand_csv(path: &Path) -> Result<DemandProfile, DemandCsvError> {
    let file = File::open(path).map_err(|source| DemandCsvError::Io { path: path.display().to_string(), source })?;
    parse_demand_csv(file)
}
