//! Seeded synthetic power-mains recordings with a known ENF ground truth.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::capon::ToeplitzCovariance;
use crate::error::{invalid, Result};
use crate::signal_io::SampledSignal;
use crate::track::EnfTrack;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub nominal_hz: f64,
    /// Harmonic carrying the observable ENF component.
    pub harmonic: u32,
    pub harmonic_amplitude: f64,
    /// Amplitude of an additional component at the fundamental (0 to omit).
    pub fundamental_amplitude: f64,
    /// Random-walk deviation bound around nominal (reflecting).
    pub walk_bound_hz: f64,
    /// Standard deviation of the per-second walk increment.
    pub walk_step_hz: f64,
    /// Power of the harmonic component over white-noise power.
    pub snr_db: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            duration_s: 1800.0,
            sample_rate_hz: 441.0,
            nominal_hz: 60.0,
            harmonic: 3,
            harmonic_amplitude: 0.5,
            fundamental_amplitude: 0.0,
            walk_bound_hz: 0.02,
            walk_step_hz: 0.002,
            snr_db: 10.0,
            seed: 2019,
        }
    }
}

/// Piecewise-linear ENF curve with knots every second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnfCurve {
    pub nominal_hz: f64,
    /// Deviation from nominal at `t = 0, 1, 2, …` s.
    pub knots: Vec<f64>,
    /// `∫₀^j deviation dt` at each knot.
    cumulative: Vec<f64>,
}

impl EnfCurve {
    pub fn new(nominal_hz: f64, knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("curve needs at least two knots"));
        }
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for pair in knots.windows(2) {
            acc += 0.5 * (pair[0] + pair[1]);
            cumulative.push(acc);
        }
        Ok(Self {
            nominal_hz,
            knots,
            cumulative,
        })
    }

    pub fn span_s(&self) -> f64 {
        (self.knots.len() - 1) as f64
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let t = t.clamp(0.0, self.span_s());
        let j = (t.floor() as usize).min(self.knots.len() - 2);
        (j, t - j as f64)
    }

    pub fn frequency_at(&self, t: f64) -> f64 {
        let (j, tau) = self.locate(t);
        self.nominal_hz + self.knots[j] + (self.knots[j + 1] - self.knots[j]) * tau
    }

    /// `∫₀^t deviation`, exact for the piecewise-linear curve.
    fn deviation_integral(&self, t: f64) -> f64 {
        let (j, tau) = self.locate(t);
        let slope = self.knots[j + 1] - self.knots[j];
        self.cumulative[j] + self.knots[j] * tau + 0.5 * slope * tau * tau
    }

    /// Instantaneous phase of the fundamental in cycles.
    pub fn cycles_at(&self, t: f64) -> f64 {
        self.nominal_hz * t + self.deviation_integral(t)
    }

    /// Mean frequency over `[t0, t1]`.
    pub fn mean_frequency(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return self.frequency_at(t0);
        }
        self.nominal_hz + (self.deviation_integral(t1) - self.deviation_integral(t0)) / (t1 - t0)
    }

    /// One value per second: the mean over `[j, j + 1)`, like a grid logger.
    pub fn reference_log(&self) -> Vec<f64> {
        (0..self.knots.len() - 1)
            .map(|j| self.mean_frequency(j as f64, j as f64 + 1.0))
            .collect()
    }

    /// Mean frequency over each frame of `track`.
    pub fn truth_for(&self, track: &EnfTrack) -> Vec<f64> {
        track
            .entries
            .iter()
            .map(|e| self.mean_frequency(e.time_s, e.time_s + track.frame_len_s))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticRecording {
    pub signal: SampledSignal,
    pub enf: EnfCurve,
    pub config: SyntheticConfig,
}

/// Reflecting random walk of per-second deviations within ±`bound`.
pub fn random_walk(len: usize, step: f64, bound: f64, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, step).map_err(|e| invalid(e.to_string()))?;
    let mut v = 0.0f64;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v);
        v += normal.sample(rng);
        // Fold back into [-bound, bound].
        while v.abs() > bound {
            v = v.signum() * 2.0 * bound - v;
        }
    }
    Ok(out)
}

/// Random positive-definite Toeplitz covariance of order `order`: one to
/// three sinusoids of random frequency and power over a white floor in
/// `[0.01, 1]`. The floor bounds the condition number by roughly `300·order`.
pub fn random_covariance(order: usize, rng: &mut impl Rng) -> Result<ToeplitzCovariance> {
    if order == 0 {
        return Err(invalid("order must be >= 1"));
    }
    let floor = rng.random_range(0.01..1.0);
    let tones: Vec<(f64, f64)> = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(0.0..PI), rng.random_range(0.1..5.0)))
        .collect();
    let rho = (0..order)
        .map(|k| {
            let lag = k as f64;
            let periodic: f64 = tones.iter().map(|(w, p)| p * (w * lag).cos()).sum();
            periodic + if k == 0 { floor } else { 0.0 }
        })
        .collect();
    ToeplitzCovariance::new(rho)
}

pub fn generate(config: &SyntheticConfig) -> Result<SyntheticRecording> {
    if !(config.duration_s > 0.0 && config.sample_rate_hz > 0.0) {
        return Err(invalid("duration and sample rate must be positive"));
    }
    if config.harmonic == 0 {
        return Err(invalid("harmonic must be >= 1"));
    }
    let top = f64::from(config.harmonic) * (config.nominal_hz + config.walk_bound_hz);
    if top >= config.sample_rate_hz / 2.0 {
        return Err(invalid(format!(
            "harmonic at {top} Hz does not fit below Nyquist"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let knots = random_walk(
        config.duration_s.ceil() as usize + 1,
        config.walk_step_hz,
        config.walk_bound_hz,
        &mut rng,
    )?;
    let enf = EnfCurve::new(config.nominal_hz, knots)?;

    let signal_power = config.harmonic_amplitude.powi(2) / 2.0;
    let noise_sigma = (signal_power / 10f64.powf(config.snr_db / 10.0)).sqrt();
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| invalid(e.to_string()))?;
    let phase_h: f64 = rng.random::<f64>();
    let phase_1: f64 = rng.random::<f64>();
    let h = f64::from(config.harmonic);

    let n = (config.duration_s * config.sample_rate_hz).round() as usize;
    let samples = (0..n)
        .map(|i| {
            let cycles = enf.cycles_at(i as f64 / config.sample_rate_hz);
            let tone = |k: f64, phase: f64| (2.0 * PI * (k * cycles + phase).fract()).cos();
            config.harmonic_amplitude * tone(h, phase_h)
                + config.fundamental_amplitude * tone(1.0, phase_1)
                + noise.sample(&mut rng)
        })
        .collect();

    Ok(SyntheticRecording {
        signal: SampledSignal::new(samples, config.sample_rate_hz)?,
        enf,
        config: config.clone(),
    })
}
