//! Zero-padded periodogram, in-band peak picking and log-parabolic
//! sub-bin refinement. The peak machinery is shared with the Capon path.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};

pub const DEFAULT_PAD_FACTOR: usize = 4;

/// Power spectrum sampled on `ω_q = 2πq/Q`, `q = 0..Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    values: Vec<f64>,
    sample_rate_hz: f64,
}

impl PsdEstimate {
    pub fn new(values: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("spectrum needs at least one bin"));
        }
        if !(sample_rate_hz > 0.0) {
            return Err(invalid("sample rate must be positive"));
        }
        Ok(Self {
            values,
            sample_rate_hz,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid size Q.
    pub fn grid_len(&self) -> usize {
        self.values.len()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn bin_hz(&self) -> f64 {
        self.sample_rate_hz / self.values.len() as f64
    }

    pub fn frequency_of(&self, bin: f64) -> f64 {
        bin * self.bin_hz()
    }
}

/// Periodogram with a cached FFT plan for one frame length and pad factor.
pub struct Periodogram {
    frame_len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Periodogram {
    pub fn new(frame_len: usize, pad_factor: usize) -> Result<Self> {
        if frame_len == 0 {
            return Err(invalid("empty frame"));
        }
        if pad_factor == 0 {
            return Err(invalid("pad factor must be >= 1"));
        }
        let fft = FftPlanner::new().plan_fft_forward(frame_len * pad_factor);
        Ok(Self { frame_len, fft })
    }

    pub fn grid_len(&self) -> usize {
        self.fft.len()
    }

    /// `|DFT(frame zero-padded to Q)|² / N`.
    pub fn estimate(&self, frame: &[f64], sample_rate_hz: f64) -> Result<PsdEstimate> {
        if frame.len() != self.frame_len {
            return Err(invalid(format!(
                "frame has {} samples, plan expects {}",
                frame.len(),
                self.frame_len
            )));
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft.len()];
        for (b, &x) in buf.iter_mut().zip(frame) {
            b.re = x;
        }
        self.fft.process(&mut buf);
        let n = self.frame_len as f64;
        PsdEstimate::new(buf.iter().map(|c| c.norm_sqr() / n).collect(), sample_rate_hz)
    }
}

pub fn periodogram(frame: &[f64], pad_factor: usize, sample_rate_hz: f64) -> Result<PsdEstimate> {
    Periodogram::new(frame.len(), pad_factor)?.estimate(frame, sample_rate_hz)
}

/// Index of the largest value among bins `q ≤ Q/2 − 1` whose frequency lies
/// in `[lo, hi]` Hz. Ties go to the lowest index.
pub fn peak_search(psd: &PsdEstimate, band: (f64, f64)) -> Result<usize> {
    let (lo, hi) = band;
    let nyquist = psd.sample_rate_hz() / 2.0;
    if !(lo >= 0.0 && lo < hi && hi <= nyquist) {
        return Err(invalid(format!(
            "search band [{lo}, {hi}] Hz must lie within [0, {nyquist}] Hz"
        )));
    }
    let bin = psd.bin_hz();
    let first = (lo / bin).ceil() as usize;
    let last = ((hi / bin).floor() as usize).min((psd.grid_len() / 2).saturating_sub(1));
    if last < first || last - first + 1 < 3 {
        return Err(invalid(format!(
            "search band [{lo}, {hi}] Hz covers fewer than 3 grid points"
        )));
    }
    let values = psd.values();
    let mut best = first;
    for q in first + 1..=last {
        if values[q] > values[best] {
            best = q;
        }
    }
    Ok(best)
}

/// Vertex offset of the parabola through `(−1, left)`, `(0, center)`,
/// `(1, right)`, clamped to ±0.5. A flat or degenerate fit gives 0.
pub fn parabolic_offset(left: f64, center: f64, right: f64) -> f64 {
    let denom = left - 2.0 * center + right;
    if denom == 0.0 || !denom.is_finite() {
        return 0.0;
    }
    let delta = 0.5 * (left - right) / denom;
    if delta.is_finite() {
        delta.clamp(-0.5, 0.5)
    } else {
        0.0
    }
}

/// Peak location after optional refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakEstimate {
    pub bin: usize,
    pub offset: f64,
    pub freq_hz: f64,
    /// False when the log-parabola could not be fitted and the raw bin
    /// frequency was returned.
    pub refined: bool,
}

/// Fits a parabola to the log power at `q_max − 1, q_max, q_max + 1`.
pub fn refine_quadratic(psd: &PsdEstimate, q_max: usize) -> Result<PeakEstimate> {
    let q = psd.grid_len();
    if q_max < 1 || q_max + 2 > q / 2 {
        return Err(invalid(format!(
            "peak bin {q_max} too close to the grid edge for interpolation (Q = {q})"
        )));
    }
    let v = psd.values();
    let unrefined = PeakEstimate {
        bin: q_max,
        offset: 0.0,
        freq_hz: psd.frequency_of(q_max as f64),
        refined: false,
    };
    let (a, b, c) = (v[q_max - 1], v[q_max], v[q_max + 1]);
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Ok(unrefined);
    }
    let offset = parabolic_offset(a.ln(), b.ln(), c.ln());
    Ok(PeakEstimate {
        offset,
        freq_hz: psd.frequency_of(q_max as f64 + offset),
        refined: true,
        ..unrefined
    })
}

/// In-band argmax followed, when `interpolate` is set, by log-parabolic refinement.
pub fn locate_peak(psd: &PsdEstimate, band: (f64, f64), interpolate: bool) -> Result<PeakEstimate> {
    let q_max = peak_search(psd, band)?;
    if interpolate {
        refine_quadratic(psd, q_max)
    } else {
        Ok(PeakEstimate {
            bin: q_max,
            offset: 0.0,
            freq_hz: psd.frequency_of(q_max as f64),
            refined: false,
        })
    }
}
