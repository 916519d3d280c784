//! Window/frame-length sweeps: one extraction and one lag search per cell.

use std::path::Path;

use enf_core::matching::best_lag;
use enf_core::pipeline::{estimate_track, prepare, PipelineConfig};
use enf_core::track::to_fundamental;
use enf_core::window::{WindowKind, WindowSpec};
use enf_core::{EnfError, MatchResult, Result, SampledSignal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStudy {
    pub windows: Vec<WindowKind>,
    pub frame_lengths_s: Vec<f64>,
    /// `cells[w][l]` for window `w` and frame length `l`.
    pub cells: Vec<Vec<MatchResult>>,
}

impl WindowStudy {
    pub fn cell(&self, window: WindowKind, frame_len_s: f64) -> Option<&MatchResult> {
        let w = self.windows.iter().position(|&k| k == window)?;
        let l = self.frame_lengths_s.iter().position(|&f| f == frame_len_s)?;
        Some(&self.cells[w][l])
    }

    /// Matrix form, one row per window and one column per frame length.
    pub fn write_matrix(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        let mut header = vec!["window".to_string()];
        header.extend(self.frame_lengths_s.iter().map(|l| format!("{l}")));
        w.write_record(&header).map_err(|e| csv_err(path, e))?;
        for (kind, row) in self.windows.iter().zip(&self.cells) {
            let mut record = vec![kind.to_string()];
            record.extend(row.iter().map(|c| format!("{:?}", c.correlation)));
            w.write_record(&record).map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))
    }

    /// Long form for plotting: x = frame length, y = correlation, series = window.
    pub fn write_plot_data(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        w.write_record(["frame_len_s", "window", "correlation", "lag"])
            .map_err(|e| csv_err(path, e))?;
        for (kind, row) in self.windows.iter().zip(&self.cells) {
            for (l, c) in self.frame_lengths_s.iter().zip(row) {
                w.write_record([
                    format!("{l}"),
                    kind.to_string(),
                    format!("{:?}", c.correlation),
                    c.reported_lag().to_string(),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
        w.flush().map_err(|e| io_err(path, e))
    }
}

fn io_err(path: &Path, source: std::io::Error) -> EnfError {
    EnfError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> EnfError {
    io_err(path, e.into())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

/// The recording is decimated and band-passed once; only framing, windowing
/// and estimation are repeated per cell.
pub fn cmd_compare_windows(
    signal: &SampledSignal,
    base: &PipelineConfig,
    windows: &[WindowKind],
    frame_lengths_s: &[f64],
    reference: &[Option<f64>],
    centered: bool,
) -> Result<WindowStudy> {
    if windows.is_empty() || frame_lengths_s.is_empty() {
        return Err(EnfError::InvalidArgument(
            "need at least one window and one frame length".into(),
        ));
    }
    let prepared = prepare(signal, base)?;
    let cells = windows
        .iter()
        .map(|&kind| {
            frame_lengths_s
                .iter()
                .map(|&l| {
                    let config = PipelineConfig {
                        window: WindowSpec {
                            kind,
                            ..base.window
                        },
                        frame_len_s: l,
                        ..base.clone()
                    };
                    let track = to_fundamental(&estimate_track(&prepared, &config)?);
                    best_lag(&track.frequencies(), reference, centered)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindowStudy {
        windows: windows.to_vec(),
        frame_lengths_s: frame_lengths_s.to_vec(),
        cells,
    })
}
