use std::io::Write;
use std::path::Path;

use chrono::{Duration, NaiveDateTime};

use crate::{Error, Result};

/// Hourly load history in chronological order.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSeries {
    /// Timestamp of the first sample; subsequent samples follow hourly.
    pub start: NaiveDateTime,
    /// Load magnitudes, one per hour.
    pub values: Vec<f64>,
    /// Opaque unit label (e.g. "kW"); not interpreted anywhere.
    pub unit: Option<String>,
}

impl LoadSeries {
    pub fn new(start: NaiveDateTime, values: Vec<f64>) -> Self {
        Self {
            start,
            values,
            unit: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Timestamp of sample `i`.
    pub fn timestamp(&self, i: usize) -> NaiveDateTime {
        self.start + Duration::hours(i as i64)
    }
}

/// Column names expected in an input CSV.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub timestamp_col: String,
    pub load_col: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            timestamp_col: "timestamp".into(),
            load_col: "load".into(),
        }
    }
}

const TIMESTAMP_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
}

/// Reads an hourly load series from a headered CSV file.
///
/// Rows must be chronological with exact one-hour spacing. Gaps, reordered
/// rows and duplicated timestamps are rejected with the offending line
/// number rather than silently repaired.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<LoadSeries> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::BadRow {
                line: 1,
                message: format!("missing column `{name}` in header"),
            })
    };
    let ts_idx = col(&schema.timestamp_col)?;
    let load_idx = col(&schema.load_col)?;

    let mut start: Option<NaiveDateTime> = None;
    let mut prev: Option<NaiveDateTime> = None;
    let mut values = Vec::new();

    for (row_no, record) in reader.records().enumerate() {
        let line = row_no + 2; // header is line 1
        let record = record?;
        let ts_str = record.get(ts_idx).ok_or_else(|| Error::BadRow {
            line,
            message: "missing timestamp field".into(),
        })?;
        let ts = parse_timestamp(ts_str).ok_or_else(|| Error::BadRow {
            line,
            message: format!("unparseable timestamp `{ts_str}`"),
        })?;
        let load_str = record.get(load_idx).ok_or_else(|| Error::BadRow {
            line,
            message: "missing load field".into(),
        })?;
        let load: f64 = load_str.parse().map_err(|_| Error::BadRow {
            line,
            message: format!("unparseable load `{load_str}`"),
        })?;
        if !load.is_finite() {
            return Err(Error::BadRow {
                line,
                message: format!("non-finite load `{load_str}`"),
            });
        }

        if let Some(p) = prev {
            if ts == p {
                return Err(Error::DuplicateTimestamp {
                    line,
                    timestamp: ts_str.to_string(),
                });
            }
            if ts != p + Duration::hours(1) {
                return Err(Error::NonHourlyGap {
                    line,
                    timestamp: ts_str.to_string(),
                });
            }
        } else {
            start = Some(ts);
        }
        prev = Some(ts);
        values.push(load);
    }

    match start {
        None => Err(Error::NoDataRows),
        Some(start) => Ok(LoadSeries::new(start, values)),
    }
}

/// Writes a series back out in the input schema (`timestamp,load`).
pub fn write_series_csv<W: Write>(mut w: W, series: &LoadSeries) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    writeln!(w, "timestamp,load").map_err(io_err)?;
    for (i, v) in series.values.iter().enumerate() {
        writeln!(w, "{},{}", series.timestamp(i).format("%Y-%m-%dT%H:%M:%S"), v).map_err(io_err)?;
    }
    Ok(())
}
