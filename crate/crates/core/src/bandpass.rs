//! Window-method linear-phase FIR design and delay-compensated filtering.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, EnfError, Result};
use crate::signal_io::SampledSignal;
use crate::window::{make_window, WindowKind};

/// Approximate Hamming-design transition width in units of `fs / taps`.
const HAMMING_TRANSITION: f64 = 3.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirFilter {
    coeffs: Vec<f64>,
    center_hz: f64,
    passband_hz: f64,
    sample_rate_hz: f64,
}

impl FirFilter {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn taps(&self) -> usize {
        self.coeffs.len()
    }

    pub fn center_hz(&self) -> f64 {
        self.center_hz
    }

    pub fn passband_hz(&self) -> f64 {
        self.passband_hz
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    /// Group delay in samples.
    pub fn delay(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    /// Nominal width of each transition band.
    pub fn transition_width_hz(&self) -> f64 {
        HAMMING_TRANSITION * self.sample_rate_hz / self.coeffs.len() as f64
    }

    /// Magnitude response at `freq_hz`, by direct summation.
    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        zero_phase_response(&self.coeffs, freq_hz / self.sample_rate_hz).abs()
    }

    /// Frequency range where the output may carry the component of interest:
    /// the passband widened by two transition widths on each side.
    pub fn search_band(&self) -> (f64, f64) {
        let half = self.passband_hz / 2.0 + 2.0 * self.transition_width_hz();
        (
            (self.center_hz - half).max(0.0),
            (self.center_hz + half).min(self.sample_rate_hz / 2.0),
        )
    }
}

/// Amplitude of a symmetric odd-length filter at normalized frequency
/// `f` (cycles/sample), with the linear phase term removed.
fn zero_phase_response(coeffs: &[f64], f: f64) -> f64 {
    let d = ((coeffs.len() - 1) / 2) as f64;
    coeffs
        .iter()
        .enumerate()
        .map(|(k, h)| h * (2.0 * PI * f * (k as f64 - d)).cos())
        .sum()
}

/// `2 f sinc(2 f m)`: ideal low-pass impulse response at offset `m`, cutoff `f` cycles/sample.
fn ideal_lowpass(f: f64, m: f64) -> f64 {
    if m == 0.0 {
        2.0 * f
    } else {
        (2.0 * PI * f * m).sin() / (PI * m)
    }
}

fn check_taps(taps: usize) -> Result<()> {
    if taps < 3 || taps.is_multiple_of(2) {
        return Err(invalid(format!("tap count must be odd and >= 3, got {taps}")));
    }
    Ok(())
}

/// Band-pass with edges `center ± passband/2`, Hamming design window,
/// scaled to unit gain at `center_hz`.
pub fn design_bandpass(
    sample_rate_hz: f64,
    center_hz: f64,
    passband_hz: f64,
    taps: usize,
) -> Result<FirFilter> {
    check_taps(taps)?;
    let nyquist = sample_rate_hz / 2.0;
    if !(sample_rate_hz > 0.0) || !(passband_hz > 0.0) {
        return Err(invalid("sample rate and passband must be positive"));
    }
    let lo = center_hz - passband_hz / 2.0;
    let hi = center_hz + passband_hz / 2.0;
    if !(lo > 0.0 && hi < nyquist) {
        return Err(invalid(format!(
            "band [{lo}, {hi}] Hz lies outside (0, {nyquist}) Hz"
        )));
    }
    let (lo, hi) = (lo / sample_rate_hz, hi / sample_rate_hz);
    let window = make_window(WindowKind::Hamming, taps, None)?;
    let d = ((taps - 1) / 2) as f64;
    let mut coeffs: Vec<f64> = window
        .taps()
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let m = k as f64 - d;
            w * (ideal_lowpass(hi, m) - ideal_lowpass(lo, m))
        })
        .collect();
    let gain = zero_phase_response(&coeffs, center_hz / sample_rate_hz);
    if gain.abs() < f64::EPSILON {
        return Err(invalid("designed filter has no gain at the band centre"));
    }
    coeffs.iter_mut().for_each(|c| *c /= gain);

    Ok(FirFilter {
        coeffs,
        center_hz,
        passband_hz,
        sample_rate_hz,
    })
}

/// Low-pass with cutoff `cutoff` in cycles/sample, Hamming design window,
/// unit DC gain.
pub fn design_lowpass(cutoff: f64, taps: usize) -> Result<Vec<f64>> {
    check_taps(taps)?;
    if !(cutoff > 0.0 && cutoff < 0.5) {
        return Err(invalid(format!("cutoff must be in (0, 0.5), got {cutoff}")));
    }
    let window = make_window(WindowKind::Hamming, taps, None)?;
    let d = ((taps - 1) / 2) as f64;
    let mut coeffs: Vec<f64> = window
        .taps()
        .iter()
        .enumerate()
        .map(|(k, w)| w * ideal_lowpass(cutoff, k as f64 - d))
        .collect();
    let dc: f64 = coeffs.iter().sum();
    coeffs.iter_mut().for_each(|c| *c /= dc);
    Ok(coeffs)
}

/// Four-accumulator dot product; the fixed summation order keeps results
/// identical regardless of how outputs are split across threads.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Filters `signal` and removes the group delay by trimming `(C-1)/2`
/// samples from each end, so output sample `t` lines up with input sample
/// `t + (C-1)/2`. The origin offset advances accordingly.
pub fn apply_zero_phase(filter: &FirFilter, signal: &SampledSignal) -> Result<SampledSignal> {
    let c = filter.taps();
    let x = signal.samples();
    if x.len() <= c {
        return Err(EnfError::SignalTooShort {
            needed: c,
            got: x.len(),
        });
    }
    // Symmetric taps: correlation equals convolution.
    let h = filter.coeffs();
    let out_len = x.len() - c + 1;
    let mut out = vec![0.0; out_len];
    out.par_chunks_mut(4096)
        .enumerate()
        .for_each(|(chunk, ys)| {
            let base = chunk * 4096;
            for (i, y) in ys.iter_mut().enumerate() {
                let start = base + i;
                *y = dot(h, &x[start..start + c]);
            }
        });
    let offset = signal.origin_offset_s() + filter.delay() as f64 / signal.sample_rate_hz();
    SampledSignal::with_offset(out, signal.sample_rate_hz(), offset)
}
