//! Telemetry CSV files.
//!
//! One header line `timestamp_s,station_id,channel,value`, then one row per
//! sample, LF line endings. The simulator writes one file per station and
//! channel named `{station}_{channel}.csv`; the reader accepts any split of
//! rows across files as long as each station/channel series is uniformly
//! sampled and appears in only one file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use leakline_core::domain::{Channel, TimeSeries};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const HEADER: [&str; 4] = ["timestamp_s", "station_id", "channel", "value"];

/// Allowed deviation of a timestamp from the uniform grid, in sample intervals.
const GRID_TOLERANCE: f64 = 1e-6;

pub fn file_name(station_id: &str, channel: Channel) -> String {
    format!("{station_id}_{}.csv", channel.as_str())
}

fn check_station_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "station id '{id}' must be non-empty and use only ASCII letters, digits, '-', '_' or '.'"
        )))
    }
}

/// Renders a series as CSV text. Numbers use the shortest representation
/// that parses back to the same `f64`.
pub fn format_series(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(32 * (series.len() + 1));
    out.push_str(&HEADER.join(","));
    out.push('\n');
    let (station, channel) = (series.station_id(), series.channel().as_str());
    for (i, v) in series.values().iter().enumerate() {
        writeln!(out, "{},{station},{channel},{v}", series.time_at(i)).expect("writing to a String");
    }
    out
}

pub fn write_series(dir: &Path, series: &TimeSeries) -> Result<PathBuf> {
    check_station_id(series.station_id())?;
    let path = dir.join(file_name(series.station_id(), series.channel()));
    fs::write(&path, format_series(series)).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[derive(Debug, Deserialize)]
struct Row {
    timestamp_s: f64,
    station_id: String,
    channel: String,
    value: f64,
}

struct Pending {
    file: PathBuf,
    first_line: u64,
    times: Vec<(f64, u64)>,
    values: Vec<f64>,
}

/// Every series found in a telemetry directory, keyed by station and channel.
#[derive(Debug, Default)]
pub struct Telemetry {
    series: BTreeMap<(String, &'static str), TimeSeries>,
}

impl Telemetry {
    pub fn get(&self, station_id: &str, channel: Channel) -> Option<&TimeSeries> {
        self.series.get(&(station_id.to_string(), channel.as_str()))
    }

    pub fn require(&self, station_id: &str, channel: Channel) -> Result<&TimeSeries> {
        self.get(station_id, channel).ok_or_else(|| {
            CliError::Input(format!("telemetry has no {} series for station '{station_id}'", channel.as_str()))
        })
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TimeSeries> {
        self.series.values()
    }
}

fn located(file: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}:{line}: {msg}", file.display()))
}

fn read_file(path: &Path, pending: &mut BTreeMap<(String, &'static str), Pending>) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let header = reader.headers().map_err(|e| located(path, 1, e))?;
    if header.iter().ne(HEADER) {
        return Err(located(
            path,
            1,
            format!("header must be '{}' (got '{}')", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            located(path, line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row: Row = record.deserialize(None).map_err(|e| located(path, line, e))?;
        let channel: Channel = row.channel.parse().map_err(|e| located(path, line, e))?;
        channel.check_value(row.value).map_err(|e| located(path, line, e))?;
        if !row.timestamp_s.is_finite() {
            return Err(located(path, line, "timestamp_s is not finite"));
        }
        check_station_id(&row.station_id).map_err(|e| located(path, line, e))?;
        let entry = pending
            .entry((row.station_id.clone(), channel.as_str()))
            .or_insert_with(|| Pending {
                file: path.to_path_buf(),
                first_line: line,
                times: Vec::new(),
                values: Vec::new(),
            });
        if entry.file != path {
            return Err(located(
                path,
                line,
                format!(
                    "series {}/{} already started in {}:{}",
                    row.station_id,
                    channel.as_str(),
                    entry.file.display(),
                    entry.first_line
                ),
            ));
        }
        if let Some(&(prev, _)) = entry.times.last() {
            if row.timestamp_s <= prev {
                return Err(located(
                    path,
                    line,
                    format!("timestamp {} does not increase (previous {prev})", row.timestamp_s),
                ));
            }
        }
        entry.times.push((row.timestamp_s, line));
        entry.values.push(row.value);
    }
    Ok(())
}

fn into_series(station: &str, channel: &str, p: Pending) -> Result<TimeSeries> {
    let channel: Channel = channel.parse().expect("key came from Channel::as_str");
    let n = p.times.len();
    let t0 = p.times[0].0;
    let dt = if n > 1 {
        (p.times[n - 1].0 - t0) / (n - 1) as f64
    } else {
        1.0
    };
    for (i, &(t, line)) in p.times.iter().enumerate() {
        let expected = t0 + i as f64 * dt;
        if (t - expected).abs() > GRID_TOLERANCE * dt {
            return Err(located(
                &p.file,
                line,
                format!("timestamp {t} is off the uniform {dt} s grid of {station}/{}", channel.as_str()),
            ));
        }
    }
    Ok(TimeSeries::new(station, channel, t0, dt, p.values)?)
}

/// Reads every `*.csv` file in `dir`, in file-name order.
pub fn read_dir(dir: &Path) -> Result<Telemetry> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "csv") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Input(format!("no .csv telemetry files in {}", dir.display())));
    }
    let mut pending = BTreeMap::new();
    for f in &files {
        read_file(f, &mut pending)?;
    }
    let mut telemetry = Telemetry::default();
    for ((station, channel), p) in pending {
        let series = into_series(&station, channel, p)?;
        telemetry.series.insert((station, series.channel().as_str()), series);
    }
    Ok(telemetry)
}
