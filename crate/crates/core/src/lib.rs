//! Electric network frequency (ENF) estimation.
//!
//! A recording is decimated to a working rate, one mains harmonic is
//! isolated with a narrow linear-phase band-pass, and the result is cut
//! into windowed frames at a 1 s cadence. Each frame yields one frequency
//! estimate, either from a fast Capon (minimum-variance) spectrum built on
//! a Toeplitz autocovariance or from a zero-padded periodogram. Tracks are
//! compared with reference logs by maximum-correlation lag search.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandpass;
pub mod capon;
pub mod error;
pub mod framing;
pub mod matching;
pub mod pipeline;
pub mod signal_io;
pub mod stft;
pub mod synth;
pub mod track;
pub mod window;

pub use bandpass::{apply_zero_phase, design_bandpass, FirFilter};
pub use capon::{
    capon_estimate_frame, capon_psd, denom_coeffs, estimate_autocovariance, gs_factors,
    inverse_from_gs, levinson_solve, CaponDenomCoeffs, CaponEstimator, CaponSettings, GsFactors,
    LevinsonSolution, ToeplitzCovariance,
};
pub use error::{EnfError, Result};
pub use framing::{plan_frames, windowed_frame, FramePlan};
pub use matching::{best_lag, correlation, fisher_test, FisherTest, MatchResult};
pub use pipeline::{extract_enf, EstimatorKind, PipelineConfig, RecordingMode};
pub use signal_io::{decimate, read_wav, write_wav, SampledSignal};
pub use stft::{peak_search, periodogram, refine_quadratic, PeakEstimate, PsdEstimate};
pub use synth::{generate, random_covariance, EnfCurve, SyntheticConfig, SyntheticRecording};
pub use track::{read_track, to_fundamental, write_track, EnfTrack, TrackEntry, TrackFormat};
pub use window::{make_window, WindowKind, WindowSpec, WindowVector};
