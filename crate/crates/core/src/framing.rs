//! Fixed-cadence framing of a filtered signal.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::signal_io::SampledSignal;
use crate::window::WindowVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramePlan {
    pub frame_len: usize,
    pub shift: usize,
    pub frame_count: usize,
}

impl FramePlan {
    /// Sample range covered by frame `k`.
    pub fn span(&self, k: usize) -> std::ops::Range<usize> {
        let start = k * self.shift;
        start..start + self.frame_len
    }
}

/// Frames of `round(L·Fs)` samples every `round(shift·Fs)` samples. A
/// trailing partial frame is dropped; a signal shorter than one frame yields
/// zero frames.
pub fn plan_frames(
    signal_len: usize,
    frame_len_s: f64,
    shift_s: f64,
    sample_rate_hz: f64,
) -> Result<FramePlan> {
    if !(frame_len_s > 0.0) || !(shift_s > 0.0) || !(sample_rate_hz > 0.0) {
        return Err(invalid(format!(
            "frame length ({frame_len_s} s), shift ({shift_s} s) and rate ({sample_rate_hz} Hz) must be positive"
        )));
    }
    let frame_len = (frame_len_s * sample_rate_hz).round() as usize;
    let shift = (shift_s * sample_rate_hz).round() as usize;
    if frame_len == 0 || shift == 0 {
        return Err(invalid("frame length and shift must each cover at least one sample"));
    }
    let frame_count = if signal_len >= frame_len {
        (signal_len - frame_len) / shift + 1
    } else {
        0
    };
    Ok(FramePlan {
        frame_len,
        shift,
        frame_count,
    })
}

/// Raw samples of frame `k`.
pub fn frame<'a>(signal: &'a SampledSignal, plan: &FramePlan, k: usize) -> Result<&'a [f64]> {
    if k >= plan.frame_count {
        return Err(invalid(format!(
            "frame {k} out of range (plan has {} frames)",
            plan.frame_count
        )));
    }
    signal
        .samples()
        .get(plan.span(k))
        .ok_or_else(|| invalid(format!("frame {k} extends past the end of the signal")))
}

/// Frame `k` multiplied by `window`.
pub fn windowed_frame(
    signal: &SampledSignal,
    plan: &FramePlan,
    k: usize,
    window: &WindowVector,
) -> Result<Vec<f64>> {
    if window.len() != plan.frame_len {
        return Err(invalid(format!(
            "window has {} taps but frames have {} samples",
            window.len(),
            plan.frame_len
        )));
    }
    window.apply(frame(signal, plan, k)?)
}
