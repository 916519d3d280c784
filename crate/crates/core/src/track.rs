//! ENF tracks and their CSV / JSON file formats.
//!
//! CSV: header `frame_index,time_s,freq_hz`, one row per frame. A frame
//! without an estimate has an empty `freq_hz` field. JSON: an array of
//! objects with the same three keys, `null` for a missing estimate.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, EnfError, Result};

pub const CSV_HEADER: &str = "frame_index,time_s,freq_hz";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackEntry {
    pub frame_index: usize,
    pub time_s: f64,
    /// `None` for frames without a usable estimate.
    pub freq_hz: Option<f64>,
}

impl TrackEntry {
    pub fn is_valid(&self) -> bool {
        self.freq_hz.is_some()
    }
}

/// Per-frame frequency estimates at a fixed cadence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnfTrack {
    pub entries: Vec<TrackEntry>,
    pub frame_len_s: f64,
    pub shift_s: f64,
    /// Harmonic the frequencies refer to; 1 once mapped to the fundamental.
    pub harmonic: u32,
    pub nominal_hz: f64,
}

impl EnfTrack {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequencies(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.freq_hz).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_valid()).count()
    }

    /// A bare sequence with 1 s cadence and unknown provenance, e.g. a reference log.
    pub fn from_values(values: &[f64], nominal_hz: f64) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .map(|(k, &f)| TrackEntry {
                    frame_index: k,
                    time_s: k as f64,
                    freq_hz: Some(f),
                })
                .collect(),
            frame_len_s: 1.0,
            shift_s: 1.0,
            harmonic: 1,
            nominal_hz,
        }
    }
}

/// Divides every valid frequency by the harmonic number.
pub fn to_fundamental(track: &EnfTrack) -> EnfTrack {
    let k = f64::from(track.harmonic.max(1));
    EnfTrack {
        entries: track
            .entries
            .iter()
            .map(|e| TrackEntry {
                freq_hz: e.freq_hz.map(|f| f / k),
                ..*e
            })
            .collect(),
        harmonic: 1,
        ..track.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackFormat {
    Csv,
    Json,
}

impl TrackFormat {
    /// Picks JSON for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => TrackFormat::Json,
            _ => TrackFormat::Csv,
        }
    }
}

impl FromStr for TrackFormat {
    type Err = EnfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TrackFormat::Csv),
            "json" => Ok(TrackFormat::Json),
            other => Err(invalid(format!("unknown track format `{other}`"))),
        }
    }
}

pub fn write_track(track: &EnfTrack, path: impl AsRef<Path>, format: TrackFormat) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| EnfError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    match format {
        TrackFormat::Csv => write_csv(track, &mut out).map_err(io_err)?,
        TrackFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &track.entries)
                .map_err(|e| io_err(e.into()))?;
            out.write_all(b"\n").map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

/// Serializes the CSV form. `{}` on f64 prints the shortest string that
/// parses back to the same value.
pub fn write_csv(track: &EnfTrack, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for e in &track.entries {
        match e.freq_hz {
            Some(f) => writeln!(out, "{},{:?},{:?}", e.frame_index, e.time_s, f)?,
            None => writeln!(out, "{},{:?},", e.frame_index, e.time_s)?,
        }
    }
    Ok(())
}

/// Reads a track, choosing the parser from the file extension.
pub fn read_track(path: impl AsRef<Path>) -> Result<EnfTrack> {
    let path = path.as_ref();
    let io_err = |source| EnfError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let entries = match TrackFormat::from_path(path) {
        TrackFormat::Json => {
            let entries: Vec<TrackEntry> = serde_json::from_reader(BufReader::new(file))
                .map_err(|e| EnfError::Parse {
                    path: path.to_path_buf(),
                    line: e.line(),
                    reason: e.to_string(),
                })?;
            entries
        }
        TrackFormat::Csv => parse_csv(BufReader::new(file), path)?,
    };
    Ok(track_from_entries(entries))
}

fn parse_field<T: FromStr>(field: &str, name: &str, path: &Path, line: usize) -> Result<T> {
    field.trim().parse().map_err(|_| EnfError::Parse {
        path: path.to_path_buf(),
        line,
        reason: format!("invalid {name} `{field}`"),
    })
}

pub fn parse_csv(reader: impl std::io::Read, path: &Path) -> Result<Vec<TrackEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| EnfError::Parse {
        path: path.to_path_buf(),
        line: 1,
        reason: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != ["frame_index", "time_s", "freq_hz"] {
        return Err(EnfError::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header `{CSV_HEADER}`"),
        });
    }
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| EnfError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(EnfError::Parse {
                path: path.to_path_buf(),
                line,
                reason: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let frame_index = parse_field(&record[0], "frame_index", path, line)?;
        let time_s: f64 = parse_field(&record[1], "time_s", path, line)?;
        let freq_hz = if record[2].is_empty() {
            None
        } else {
            let f: f64 = parse_field(&record[2], "freq_hz", path, line)?;
            if !f.is_finite() {
                return Err(EnfError::Parse {
                    path: path.to_path_buf(),
                    line,
                    reason: format!("non-finite freq_hz `{}`", &record[2]),
                });
            }
            Some(f)
        };
        entries.push(TrackEntry {
            frame_index,
            time_s,
            freq_hz,
        });
    }
    Ok(entries)
}

/// Files carry no metadata; cadence is inferred from the time column.
fn track_from_entries(entries: Vec<TrackEntry>) -> EnfTrack {
    let shift_s = match entries.as_slice() {
        [a, b, ..] if b.frame_index > a.frame_index => {
            (b.time_s - a.time_s) / (b.frame_index - a.frame_index) as f64
        }
        _ => 1.0,
    };
    let nominal_hz = entries
        .iter()
        .find_map(|e| e.freq_hz)
        .map_or(60.0, |f| if (f - 50.0).abs() < (f - 60.0).abs() { 50.0 } else { 60.0 });
    EnfTrack {
        entries,
        frame_len_s: shift_s,
        shift_s,
        harmonic: 1,
        nominal_hz,
    }
}
