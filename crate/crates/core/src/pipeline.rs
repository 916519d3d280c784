//! End-to-end ENF extraction: decimate, isolate one harmonic, frame, window,
//! estimate per frame, map back to the fundamental.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandpass::{apply_zero_phase, design_bandpass, FirFilter};
use crate::capon::{CaponEstimator, CaponSettings, DEFAULT_DIAGONAL_LOADING, DEFAULT_ORDER};
use crate::error::{invalid, EnfError, Result};
use crate::framing::{plan_frames, FramePlan};
use crate::signal_io::{decimate, SampledSignal};
use crate::stft::{locate_peak, Periodogram, DEFAULT_PAD_FACTOR};
use crate::track::{to_fundamental, EnfTrack, TrackEntry};
use crate::window::{WindowKind, WindowSpec};

/// Valid fundamental estimates must lie within this distance of nominal.
pub const SANITY_ENVELOPE_HZ: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Capon,
    Stft,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Capon => "capon",
            EstimatorKind::Stft => "stft",
        })
    }
}

impl FromStr for EstimatorKind {
    type Err = EnfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "capon" => Ok(EstimatorKind::Capon),
            "stft" | "periodogram" => Ok(EstimatorKind::Stft),
            other => Err(invalid(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordingMode {
    /// Direct power-mains capture: 3rd harmonic, 1001 taps.
    Power,
    /// Microphone capture: 2nd harmonic, 4801 taps.
    Speech,
}

impl FromStr for RecordingMode {
    type Err = EnfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "power" => Ok(RecordingMode::Power),
            "speech" | "audio" => Ok(RecordingMode::Speech),
            other => Err(invalid(format!("unknown mode `{other}`"))),
        }
    }
}

fn default_loading() -> f64 {
    DEFAULT_DIAGONAL_LOADING
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub nominal_hz: f64,
    pub harmonic: u32,
    pub frame_len_s: f64,
    pub shift_s: f64,
    pub window: WindowSpec,
    pub estimator: EstimatorKind,
    pub taps: usize,
    pub passband_hz: f64,
    pub capon_order: usize,
    pub pad_factor: usize,
    pub interpolate: bool,
    #[serde(default = "default_loading")]
    pub diagonal_loading: f64,
    /// Rate the recording is decimated to before filtering.
    pub working_rate_hz: f64,
    pub skip_seconds: f64,
}

impl PipelineConfig {
    pub fn for_mode(mode: RecordingMode) -> Self {
        let (harmonic, taps) = match mode {
            RecordingMode::Power => (3, 1001),
            RecordingMode::Speech => (2, 4801),
        };
        Self {
            nominal_hz: 60.0,
            harmonic,
            frame_len_s: 1.0,
            shift_s: 1.0,
            window: WindowSpec::new(WindowKind::Parzen),
            estimator: EstimatorKind::Capon,
            taps,
            passband_hz: 0.1,
            capon_order: DEFAULT_ORDER,
            pad_factor: DEFAULT_PAD_FACTOR,
            interpolate: true,
            diagonal_loading: DEFAULT_DIAGONAL_LOADING,
            working_rate_hz: 441.0,
            skip_seconds: 0.0,
        }
    }

    pub fn power() -> Self {
        Self::for_mode(RecordingMode::Power)
    }

    pub fn speech() -> Self {
        Self::for_mode(RecordingMode::Speech)
    }

    pub fn band_center_hz(&self) -> f64 {
        f64::from(self.harmonic) * self.nominal_hz
    }

    pub fn validate(&self) -> Result<()> {
        if self.harmonic == 0 {
            return Err(invalid("harmonic must be >= 1"));
        }
        if !(self.nominal_hz > 0.0) {
            return Err(invalid("nominal frequency must be positive"));
        }
        if !(self.working_rate_hz > 0.0) {
            return Err(invalid("working rate must be positive"));
        }
        let nyquist = self.working_rate_hz / 2.0;
        if self.band_center_hz() + self.passband_hz / 2.0 >= nyquist {
            return Err(invalid(format!(
                "harmonic {} of {} Hz is not below the working Nyquist {nyquist} Hz",
                self.harmonic, self.nominal_hz
            )));
        }
        if self.pad_factor == 0 {
            return Err(invalid("pad factor must be >= 1"));
        }
        Ok(())
    }

    /// Peak search range at the analysed harmonic: the filter's search band
    /// clipped to the sanity envelope scaled by the harmonic.
    pub fn search_band(&self, filter: &FirFilter) -> (f64, f64) {
        let k = f64::from(self.harmonic);
        let (lo, hi) = filter.search_band();
        (
            lo.max(k * (self.nominal_hz - SANITY_ENVELOPE_HZ)),
            hi.min(k * (self.nominal_hz + SANITY_ENVELOPE_HZ)),
        )
    }
}

/// The band-passed signal at the working rate, ready for framing.
#[derive(Debug, Clone)]
pub struct PreparedSignal {
    pub filtered: SampledSignal,
    pub filter: FirFilter,
}

/// Decimation to the working rate, optional head skip, band-pass.
pub fn prepare(signal: &SampledSignal, config: &PipelineConfig) -> Result<PreparedSignal> {
    config.validate()?;
    let ratio = signal.sample_rate_hz() / config.working_rate_hz;
    let factor = ratio.round();
    if factor < 1.0 || (ratio - factor).abs() > 1e-9 * ratio {
        return Err(invalid(format!(
            "input rate {} Hz is not an integer multiple of the working rate {} Hz",
            signal.sample_rate_hz(),
            config.working_rate_hz
        )));
    }
    let working = decimate(signal, factor as usize)?;
    let working = if config.skip_seconds > 0.0 {
        working.skip_seconds(config.skip_seconds)?
    } else {
        working
    };
    let filter = design_bandpass(
        working.sample_rate_hz(),
        config.band_center_hz(),
        config.passband_hz,
        config.taps,
    )?;
    let filtered = apply_zero_phase(&filter, &working)?;
    Ok(PreparedSignal { filtered, filter })
}

enum FrameEstimator {
    Capon(CaponEstimator),
    Stft(Periodogram),
}

/// Per-frame estimation on a prepared signal. Frequencies refer to the
/// analysed harmonic.
pub fn estimate_track(prepared: &PreparedSignal, config: &PipelineConfig) -> Result<EnfTrack> {
    let signal = &prepared.filtered;
    let fs = signal.sample_rate_hz();
    let plan: FramePlan = plan_frames(signal.len(), config.frame_len_s, config.shift_s, fs)?;
    if plan.frame_count == 0 {
        return Err(EnfError::NoFrames {
            samples: signal.len(),
            frame_len: plan.frame_len,
        });
    }
    let window = config.window.build(plan.frame_len)?;
    let band = config.search_band(&prepared.filter);
    let estimator = match config.estimator {
        EstimatorKind::Capon => FrameEstimator::Capon(CaponEstimator::new(
            plan.frame_len,
            CaponSettings {
                order: config.capon_order,
                pad_factor: config.pad_factor,
                interpolate: config.interpolate,
                diagonal_loading: config.diagonal_loading,
            },
        )?),
        EstimatorKind::Stft => FrameEstimator::Stft(Periodogram::new(plan.frame_len, config.pad_factor)?),
    };
    let k = f64::from(config.harmonic);
    let envelope = (
        k * (config.nominal_hz - SANITY_ENVELOPE_HZ),
        k * (config.nominal_hz + SANITY_ENVELOPE_HZ),
    );

    let estimates: Vec<Option<f64>> = (0..plan.frame_count)
        .into_par_iter()
        .map(|idx| -> Result<Option<f64>> {
            let frame = window.apply(&signal.samples()[plan.span(idx)])?;
            let peak = match &estimator {
                FrameEstimator::Capon(est) => est.estimate_frame(&frame, fs, band)?,
                FrameEstimator::Stft(est) => {
                    if frame.iter().all(|&v| v == 0.0) {
                        None
                    } else {
                        Some(locate_peak(&est.estimate(&frame, fs)?, band, config.interpolate)?)
                    }
                }
            };
            Ok(peak
                .map(|p| p.freq_hz)
                .filter(|f| (envelope.0..=envelope.1).contains(f)))
        })
        .collect::<Result<_>>()?;

    let origin = signal.origin_offset_s();
    let entries = estimates
        .into_iter()
        .enumerate()
        .map(|(idx, freq_hz)| TrackEntry {
            frame_index: idx,
            time_s: origin + (idx * plan.shift) as f64 / fs,
            freq_hz,
        })
        .collect();

    Ok(EnfTrack {
        entries,
        frame_len_s: plan.frame_len as f64 / fs,
        shift_s: plan.shift as f64 / fs,
        harmonic: config.harmonic,
        nominal_hz: config.nominal_hz,
    })
}

/// Full extraction; the returned track is at the fundamental.
pub fn extract_enf(signal: &SampledSignal, config: &PipelineConfig) -> Result<EnfTrack> {
    let prepared = prepare(signal, config)?;
    Ok(to_fundamental(&estimate_track(&prepared, config)?))
}
