//! Command-line front end for ENF extraction, matching and benchmarks.
//!
//! Exit codes: 0 on success, 2 for bad arguments or unreadable inputs,
//! 3 for inputs that are well-formed but degenerate (too short, silent,
//! constant tracks).

pub mod args;
pub mod bench;
pub mod compare;
pub mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};

use enf_core::pipeline::{estimate_track, prepare};
use enf_core::track::{to_fundamental, TrackFormat};
use enf_core::{
    best_lag, fisher_test, generate, read_track, read_wav, write_track, write_wav, EnfError,
    EnfTrack, Result, SampledSignal,
};
use serde::Serialize;

pub use args::{Cli, Command};
pub use bench::{cmd_bench, BenchReport, BenchRow};
pub use compare::{cmd_compare_windows, WindowStudy};
pub use manifest::{sidecar_path, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

pub fn exit_code(err: &EnfError) -> i32 {
    match err {
        EnfError::InvalidArgument(_)
        | EnfError::UnsupportedFormat { .. }
        | EnfError::Wav { .. }
        | EnfError::Io { .. }
        | EnfError::Parse { .. } => EXIT_BAD_ARGS,
        EnfError::SignalTooShort { .. }
        | EnfError::NoFrames { .. }
        | EnfError::NotPositiveDefinite { .. }
        | EnfError::DegenerateDenominator { .. }
        | EnfError::UndefinedCorrelation(_) => EXIT_DEGENERATE,
    }
}

/// Runs one command inside a pool capped at `--threads` / `ENF_THREADS`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(EnfError::InvalidArgument("--threads must be >= 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| EnfError::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let json = cli.json;
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(cli.command, json, &mut buf));
    out.write_all(&buf).map_err(stdout_err)?;
    result
}

fn dispatch(command: Command, json: bool, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Extract(a) => extract(a, json, out),
        Command::Match(a) => match_tracks(a, out),
        Command::Fisher(a) => emit_json(out, &fisher_test(a.c1, a.c2, a.n, a.alpha)?),
        Command::CompareWindows(a) => compare_windows(a, json, out),
        Command::Bench(a) => {
            let report = cmd_bench(a.order, &a.grid, a.trials, a.seed)?;
            if json {
                emit_json(out, &report)
            } else {
                print_bench(&report, out)
            }
        }
        Command::Synth(a) => synth(a, json, out),
    }
}

fn stdout_err(e: std::io::Error) -> EnfError {
    EnfError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| stdout_err(e.into()))?;
    writeln!(out, "{text}").map_err(stdout_err)
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

#[derive(Serialize)]
struct ExtractSummary<'a> {
    output: &'a Path,
    manifest: &'a Path,
    frames: usize,
    valid: usize,
    frame_len_s: f64,
    shift_s: f64,
    harmonic: u32,
    first_time_s: Option<f64>,
}

fn extract(a: args::ExtractArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let config = a.pipeline.resolve()?;
    let format = a.format.unwrap_or_else(|| TrackFormat::from_path(&a.output));
    let manifest_path = a.manifest.clone().unwrap_or_else(|| sidecar_path(&a.output));
    let mut manifest = RunManifest::new("extract", to_json(&config));

    let digest = manifest.time("hash_input", || manifest::digest_file(&a.wav))?;
    manifest.inputs.push(digest);
    let signal = manifest.time("read", || read_wav(&a.wav))?;
    let prepared = manifest.time("decimate_and_filter", || prepare(&signal, &config))?;
    let track = manifest.time("estimate", || {
        estimate_track(&prepared, &config).map(|t| to_fundamental(&t))
    })?;
    manifest.time("write", || write_track(&track, &a.output, format))?;
    manifest.outputs.push(a.output.clone());
    manifest.write(&manifest_path)?;

    let summary = ExtractSummary {
        output: &a.output,
        manifest: &manifest_path,
        frames: track.len(),
        valid: track.valid_count(),
        frame_len_s: track.frame_len_s,
        shift_s: track.shift_s,
        harmonic: config.harmonic,
        first_time_s: track.entries.first().map(|e| e.time_s),
    };
    if json {
        emit_json(out, &summary)
    } else {
        writeln!(
            out,
            "{} frames ({} valid) -> {}",
            summary.frames,
            summary.valid,
            a.output.display()
        )
        .map_err(stdout_err)
    }
}

/// `match` output; `lag` counts from 1.
#[derive(Debug, Serialize)]
pub struct MatchReport {
    pub lag: usize,
    pub correlation: f64,
    pub centered: bool,
    pub n_used: usize,
    pub track_len: usize,
    pub reference_len: usize,
}

pub fn match_report(track: &EnfTrack, reference: &EnfTrack, centered: bool) -> Result<MatchReport> {
    let r = best_lag(&track.frequencies(), &reference.frequencies(), centered)?;
    Ok(MatchReport {
        lag: r.reported_lag(),
        correlation: r.correlation,
        centered: r.centered,
        n_used: r.n_used,
        track_len: track.len(),
        reference_len: reference.len(),
    })
}

fn match_tracks(a: args::MatchArgs, out: &mut dyn Write) -> Result<()> {
    let track = read_track(&a.extracted)?;
    let reference = read_track(&a.reference)?;
    emit_json(out, &match_report(&track, &reference, a.centered)?)
}

fn compare_windows(a: args::CompareArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let config = a.pipeline.resolve()?;
    let mut manifest = RunManifest::new(
        "compare-windows",
        serde_json::json!({
            "pipeline": to_json(&config),
            "windows": to_json(&a.windows),
            "frame_lengths_s": to_json(&a.frame_lengths),
            "centered": a.centered,
            "synthetic": a.input.is_none().then(|| to_json(&a.synth.config(config.harmonic, config.nominal_hz))),
        }),
    );
    let (signal, reference): (SampledSignal, Vec<Option<f64>>) = match (&a.input, &a.reference) {
        (Some(input), Some(reference)) => {
            manifest.add_input(input)?;
            manifest.add_input(reference)?;
            let signal = manifest.time("read", || read_wav(input))?;
            let reference = read_track(reference)?.frequencies();
            (signal, reference)
        }
        (Some(_), None) => {
            return Err(EnfError::InvalidArgument("--input needs --reference".into()));
        }
        (None, _) => {
            let rec = manifest.time("synthesize", || {
                generate(&a.synth.config(config.harmonic, config.nominal_hz))
            })?;
            let reference = rec.enf.reference_log().into_iter().map(Some).collect();
            (rec.signal, reference)
        }
    };
    let study = manifest.time("sweep", || {
        cmd_compare_windows(&signal, &config, &a.windows, &a.frame_lengths, &reference, a.centered)
    })?;
    study.write_matrix(&a.output)?;
    manifest.outputs.push(a.output.clone());
    if let Some(plot) = &a.plot_data {
        study.write_plot_data(plot)?;
        manifest.outputs.push(plot.clone());
    }
    for output in manifest.outputs.clone() {
        manifest.write(&sidecar_path(&output))?;
    }
    if json {
        return emit_json(out, &study);
    }
    write!(out, "{:>8}", "window").map_err(stdout_err)?;
    for l in &study.frame_lengths_s {
        write!(out, " {:>10}", format!("L={l}s")).map_err(stdout_err)?;
    }
    writeln!(out).map_err(stdout_err)?;
    for (kind, row) in study.windows.iter().zip(&study.cells) {
        write!(out, "{:>8}", kind.to_string()).map_err(stdout_err)?;
        for c in row {
            write!(out, " {:>10.4}", c.correlation).map_err(stdout_err)?;
        }
        writeln!(out).map_err(stdout_err)?;
    }
    Ok(())
}

fn print_bench(report: &BenchReport, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "M = {}, {} trials", report.order, report.trials).map_err(stdout_err)?;
    writeln!(out, "{:>8} {:>14} {:>14} {:>9}", "Q", "fast [us]", "dense [us]", "speedup")
        .map_err(stdout_err)?;
    for r in &report.rows {
        writeln!(
            out,
            "{:>8} {:>14.2} {:>14.2} {:>9.2}",
            r.grid_len,
            r.fast_median_s * 1e6,
            r.dense_median_s * 1e6,
            r.speedup
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn synth(a: args::SynthArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let config = enf_core::SyntheticConfig {
        harmonic_amplitude: a.amplitude,
        ..a.params.config(a.harmonic, a.nominal_hz)
    };
    let mut manifest = RunManifest::new("synth", to_json(&config));
    let rec = manifest.time("synthesize", || generate(&config))?;
    manifest.time("write", || write_wav(&rec.signal, &a.output))?;
    manifest.outputs.push(a.output.clone());
    if let Some(path) = &a.reference_out {
        let log = EnfTrack::from_values(&rec.enf.reference_log(), config.nominal_hz);
        write_track(&log, path, TrackFormat::from_path(path))?;
        manifest.outputs.push(path.clone());
    }
    for output in manifest.outputs.clone() {
        manifest.write(&sidecar_path(&output))?;
    }
    if json {
        emit_json(out, &manifest)
    } else {
        writeln!(
            out,
            "{} samples at {} Hz -> {}",
            rec.signal.len(),
            rec.signal.sample_rate_hz(),
            a.output.display()
        )
        .map_err(stdout_err)
    }
}
