//! Sampled recordings: WAV ingest and anti-aliased integer decimation.

use std::path::Path;

use rayon::prelude::*;

use crate::bandpass::{design_lowpass, dot};
use crate::error::{invalid, EnfError, Result};

/// Low-pass cutoff as a fraction of the output sample rate.
pub const DECIMATION_CUTOFF: f64 = 0.45;

/// A uniformly sampled real-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    sample_rate_hz: f64,
    origin_offset_s: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        Self::with_offset(samples, sample_rate_hz, 0.0)
    }

    /// `origin_offset_s` is the time of sample 0 relative to the start of the
    /// original recording.
    pub fn with_offset(samples: Vec<f64>, sample_rate_hz: f64, origin_offset_s: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(invalid(format!("sample rate must be positive, got {sample_rate_hz}")));
        }
        if samples.is_empty() {
            return Err(invalid("signal must contain at least one sample"));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            origin_offset_s,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn origin_offset_s(&self) -> f64 {
        self.origin_offset_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Drops the first `seconds` of the signal.
    pub fn skip_seconds(&self, seconds: f64) -> Result<Self> {
        if !(seconds >= 0.0) {
            return Err(invalid(format!("cannot skip {seconds} s")));
        }
        let skip = (seconds * self.sample_rate_hz).round() as usize;
        if skip >= self.samples.len() {
            return Err(EnfError::SignalTooShort {
                needed: skip + 1,
                got: self.samples.len(),
            });
        }
        Self::with_offset(
            self.samples[skip..].to_vec(),
            self.sample_rate_hz,
            self.origin_offset_s + skip as f64 / self.sample_rate_hz,
        )
    }
}

/// Reads a 16-bit PCM WAV file. Multi-channel audio is averaged to mono and
/// amplitudes are scaled by 1/32768.
pub fn read_wav(path: impl AsRef<Path>) -> Result<SampledSignal> {
    let path = path.as_ref();
    let wav_err = |source| EnfError::Wav {
        path: path.to_path_buf(),
        source,
    };
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(source) => EnfError::Io {
            path: path.to_path_buf(),
            source,
        },
        hound::Error::Unsupported => EnfError::UnsupportedFormat {
            path: path.to_path_buf(),
            reason: "unsupported WAV encoding".into(),
        },
        other => wav_err(other),
    })?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(EnfError::UnsupportedFormat {
            path: path.to_path_buf(),
            reason: format!(
                "expected 16-bit integer PCM, found {}-bit {:?}",
                spec.bits_per_sample, spec.sample_format
            ),
        });
    }
    let channels = usize::from(spec.channels);
    if channels == 0 {
        return Err(EnfError::UnsupportedFormat {
            path: path.to_path_buf(),
            reason: "zero channels".into(),
        });
    }
    let raw: Vec<i16> = reader
        .into_samples::<i16>()
        .collect::<std::result::Result<_, _>>()
        .map_err(wav_err)?;
    let scale = 1.0 / (32768.0 * channels as f64);
    let samples: Vec<f64> = raw
        .chunks_exact(channels)
        .map(|frame| frame.iter().map(|&s| f64::from(s)).sum::<f64>() * scale)
        .collect();
    SampledSignal::new(samples, f64::from(spec.sample_rate))
}

/// Writes a mono 16-bit PCM WAV. Samples are clipped to [-1, 1).
pub fn write_wav(signal: &SampledSignal, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let rate = signal.sample_rate_hz();
    if rate.fract() != 0.0 || rate > f64::from(u32::MAX) {
        return Err(invalid(format!("WAV needs an integer sample rate, got {rate}")));
    }
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: rate as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let wav_err = |source| EnfError::Wav {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in signal.samples() {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(q).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

/// Anti-alias filter length used for a given decimation factor.
pub fn decimation_filter_len(factor: usize) -> usize {
    10 * factor + 1
}

/// Low-pass filters at `0.45 × output rate` and keeps every `factor`-th
/// sample. Output sample `j` is time-aligned with input sample `j·factor`;
/// edges see the filter's zero-padded transient.
pub fn decimate(signal: &SampledSignal, factor: usize) -> Result<SampledSignal> {
    if factor == 0 {
        return Err(invalid("decimation factor must be >= 1"));
    }
    if factor == 1 {
        return Ok(signal.clone());
    }
    let taps = decimation_filter_len(factor);
    let x = signal.samples();
    if x.len() <= taps {
        return Err(EnfError::SignalTooShort {
            needed: taps,
            got: x.len(),
        });
    }
    let h = design_lowpass(DECIMATION_CUTOFF / factor as f64, taps)?;
    let delay = (taps - 1) / 2;
    let out_len = x.len().div_ceil(factor);

    let out: Vec<f64> = (0..out_len)
        .into_par_iter()
        .map(|j| {
            // y[j] = Σ_k h[k] x[j·factor + delay − k]; taps are symmetric.
            let center = j * factor;
            let start = center as isize - delay as isize;
            let end = start + taps as isize;
            if start >= 0 && end as usize <= x.len() {
                dot(&h, &x[start as usize..end as usize])
            } else {
                let lo = start.max(0) as usize;
                let hi = (end as usize).min(x.len());
                let k0 = (lo as isize - start) as usize;
                dot(&h[k0..k0 + (hi - lo)], &x[lo..hi])
            }
        })
        .collect();

    SampledSignal::with_offset(
        out,
        signal.sample_rate_hz() / factor as f64,
        signal.origin_offset_s(),
    )
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn tone(freq: f64, amp: f64, fs: f64, len: usize) -> Vec<f64> {
        (0..len)
            .map(|n| amp * (2.0 * PI * freq * n as f64 / fs).sin())
            .collect()
    }

    #[test]
    fn constructor_validates() {
        assert!(SampledSignal::new(vec![], 10.0).is_err());
        assert!(SampledSignal::new(vec![1.0], 0.0).is_err());
        assert!(SampledSignal::new(vec![1.0], f64::NAN).is_err());
    }

    #[test]
    fn factor_one_is_identity() {
        let s = SampledSignal::new(tone(3.0, 1.0, 100.0, 50), 100.0).unwrap();
        assert_eq!(decimate(&s, 1).unwrap(), s);
        assert!(decimate(&s, 0).is_err());
    }

    #[test]
    fn decimates_44100_to_441() {
        let s = SampledSignal::new(tone(60.0, 0.5, 44100.0, 44100 * 2), 44100.0).unwrap();
        let d = decimate(&s, 100).unwrap();
        assert_eq!(d.sample_rate_hz(), 441.0);
        assert_eq!(d.len(), 882);
    }

    #[test]
    fn sixty_hz_tone_survives_decimation() {
        let fs = 44100.0;
        let s = SampledSignal::new(tone(60.0, 0.5, fs, 44100 * 3), fs).unwrap();
        let d = decimate(&s, 100).unwrap();
        let expected = tone(60.0, 0.5, 441.0, d.len());
        // Skip the edge transients (filter half-length is 5 output samples).
        let n = d.len();
        for (j, (got, want)) in d.samples()[10..n - 10].iter().zip(&expected[10..n - 10]).enumerate() {
            let err = (got - want).abs();
            assert!(err <= 0.01 * 0.5, "sample {j}: error {err}");
        }
    }

    #[test]
    fn too_short_for_filter() {
        let s = SampledSignal::new(vec![0.0; 1001], 44100.0).unwrap();
        assert!(matches!(
            decimate(&s, 100),
            Err(EnfError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn skip_seconds_moves_origin() {
        let s = SampledSignal::new(vec![0.0; 100], 10.0).unwrap();
        let t = s.skip_seconds(2.5).unwrap();
        assert_eq!(t.len(), 75);
        assert_eq!(t.origin_offset_s(), 2.5);
        assert!(s.skip_seconds(10.0).is_err());
    }
}
