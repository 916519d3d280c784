use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use enf_core::pipeline::{EstimatorKind, PipelineConfig, RecordingMode};
use enf_core::track::TrackFormat;
use enf_core::window::{WindowKind, WindowSpec};
use enf_core::{EnfError, Result};

#[derive(Debug, Parser)]
#[command(name = "enf", version, about = "Electric network frequency extraction and matching")]
pub struct Cli {
    /// Worker threads for frame-level parallelism [default: all cores]
    #[arg(long, global = true, env = "ENF_THREADS")]
    pub threads: Option<usize>,

    /// Print machine-readable JSON on stdout
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract an ENF track from a 16-bit PCM WAV recording
    Extract(ExtractArgs),
    /// Align an extracted track against a reference log
    Match(MatchArgs),
    /// Fisher z test between two correlation coefficients
    #[command(allow_negative_numbers = true)]
    Fisher(FisherArgs),
    /// Correlation table over temporal windows and frame lengths
    CompareWindows(CompareArgs),
    /// Time the fast Capon grid against per-bin quadratic forms
    Bench(BenchArgs),
    /// Write a seeded synthetic power-mains recording and its reference log
    Synth(SynthArgs),
}

/// Estimation settings. Unset values follow the recording mode.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long, default_value = "power")]
    pub mode: RecordingMode,
    /// parzen, hamming, kaiser or rect
    #[arg(long)]
    pub window: Option<WindowKind>,
    #[arg(long)]
    pub kaiser_beta: Option<f64>,
    #[arg(long)]
    pub harmonic: Option<u32>,
    /// 50 or 60
    #[arg(long)]
    pub nominal_hz: Option<f64>,
    /// Band-pass length (odd)
    #[arg(long)]
    pub taps: Option<usize>,
    /// Total pass-band width around the harmonic
    #[arg(long)]
    pub passband_hz: Option<f64>,
    #[arg(long)]
    pub frame_seconds: Option<f64>,
    #[arg(long)]
    pub shift_seconds: Option<f64>,
    /// capon or stft
    #[arg(long)]
    pub estimator: Option<EstimatorKind>,
    /// Capon order m (covariance size m + 1)
    #[arg(long)]
    pub capon_order: Option<usize>,
    /// Spectral grid size as a multiple of the frame length
    #[arg(long)]
    pub pad_factor: Option<usize>,
    /// Seconds dropped from the start of the recording
    #[arg(long)]
    pub skip_seconds: Option<f64>,
    /// Relative diagonal loading of the Capon covariance
    #[arg(long)]
    pub diagonal_loading: Option<f64>,
    /// Rate the recording is decimated to
    #[arg(long)]
    pub working_rate_hz: Option<f64>,
    /// Report raw grid peaks without log-parabolic refinement
    #[arg(long)]
    pub no_interpolate: bool,
}

fn bad(msg: impl Into<String>) -> EnfError {
    EnfError::InvalidArgument(msg.into())
}

impl PipelineArgs {
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut c = PipelineConfig::for_mode(self.mode);
        if let Some(hz) = self.nominal_hz {
            if hz != 50.0 && hz != 60.0 {
                return Err(bad(format!("--nominal-hz must be 50 or 60, got {hz}")));
            }
            c.nominal_hz = hz;
        }
        if let Some(kind) = self.window {
            c.window = WindowSpec::new(kind);
        }
        if let Some(beta) = self.kaiser_beta {
            c.window.kaiser_beta = beta;
        }
        if let Some(k) = self.harmonic {
            c.harmonic = k;
        }
        if let Some(taps) = self.taps {
            c.taps = taps;
        }
        if let Some(pb) = self.passband_hz {
            c.passband_hz = pb;
        }
        if let Some(l) = self.frame_seconds {
            c.frame_len_s = l;
        }
        if let Some(s) = self.shift_seconds {
            c.shift_s = s;
        }
        if let Some(e) = self.estimator {
            c.estimator = e;
        }
        if let Some(m) = self.capon_order {
            c.capon_order = m;
        }
        if let Some(p) = self.pad_factor {
            c.pad_factor = p;
        }
        if let Some(s) = self.skip_seconds {
            c.skip_seconds = s;
        }
        if let Some(d) = self.diagonal_loading {
            c.diagonal_loading = d;
        }
        if let Some(r) = self.working_rate_hz {
            c.working_rate_hz = r;
        }
        c.interpolate = !self.no_interpolate;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    pub wav: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// csv or json [default: from the output extension]
    #[arg(long)]
    pub format: Option<TrackFormat>,
    /// Manifest path [default: <output>.manifest.json]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    pub extracted: PathBuf,
    pub reference: PathBuf,
    /// Subtract means before correlating (Pearson)
    #[arg(long)]
    pub centered: bool,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    pub c1: f64,
    pub c2: f64,
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

/// Parameters of the seeded synthetic recording.
#[derive(Debug, Clone, Args)]
pub struct SynthParams {
    #[arg(long, default_value_t = 2019)]
    pub seed: u64,
    #[arg(long, default_value_t = 1800.0)]
    pub duration_seconds: f64,
    #[arg(long, default_value_t = 441.0)]
    pub sample_rate_hz: f64,
    /// Power of the harmonic over white noise
    #[arg(long, default_value_t = 10.0)]
    pub snr_db: f64,
    #[arg(long, default_value_t = 0.02)]
    pub walk_bound_hz: f64,
    #[arg(long, default_value_t = 0.002)]
    pub walk_step_hz: f64,
}

impl SynthParams {
    pub fn config(&self, harmonic: u32, nominal_hz: f64) -> enf_core::SyntheticConfig {
        enf_core::SyntheticConfig {
            duration_s: self.duration_seconds,
            sample_rate_hz: self.sample_rate_hz,
            nominal_hz,
            harmonic,
            walk_bound_hz: self.walk_bound_hz,
            walk_step_hz: self.walk_step_hz,
            snr_db: self.snr_db,
            seed: self.seed,
            ..enf_core::SyntheticConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Recording to analyse; without it a synthetic fixture is generated
    #[arg(long, requires = "reference")]
    pub input: Option<PathBuf>,
    /// Reference track for --input
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "parzen,hamming,kaiser,rect")]
    pub windows: Vec<WindowKind>,
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,20")]
    pub frame_lengths: Vec<f64>,
    #[arg(long)]
    pub centered: bool,
    /// Correlation matrix, one row per window
    #[arg(short, long)]
    pub output: PathBuf,
    /// Long-format series for plotting: frame_len_s,window,correlation
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    #[command(flatten)]
    pub synth: SynthParams,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Covariance size M
    #[arg(long, default_value_t = 11)]
    pub order: usize,
    /// Grid sizes Q
    #[arg(long, value_delimiter = ',', default_value = "1764")]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(short, long)]
    pub output: PathBuf,
    /// Per-second reference log of the ground-truth ENF
    #[arg(long)]
    pub reference_out: Option<PathBuf>,
    /// Peak amplitude of the harmonic
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 3)]
    pub harmonic: u32,
    #[arg(long, default_value_t = 60.0)]
    pub nominal_hz: f64,
    #[command(flatten)]
    pub params: SynthParams,
}
