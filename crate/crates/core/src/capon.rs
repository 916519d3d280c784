//! Filter-bank Capon spectrum from a Toeplitz autocovariance.
//!
//! The inverse covariance is never formed. Levinson-Durbin yields the
//! order-`M−1` predictor `w` and its error power `α`, from which the
//! Gohberg-Semencul generators
//!
//! ```text
//! γ = (1, w)ᵀ / √α        δ = (0, reverse(w))ᵀ / √α
//! R⁻¹ = L(γ) L(γ)ᵀ − L(δ) L(δ)ᵀ
//! ```
//!
//! follow, with `L(v)` the lower-triangular Toeplitz (Krylov) matrix
//! `[v, Dv, …, D^{M−1}v]` of the lag-1 shift `D`. The Capon denominator
//! `a*(ω) R⁻¹ a(ω) = Σ_i x_i e^{jωi}` only needs the diagonal sums `x_i` of
//! `R⁻¹`, which are weighted autocorrelations of the generators; one FFT
//! of length `Q` then evaluates it on the whole grid.

use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, EnfError, Result};
use crate::stft::{locate_peak, PeakEstimate, PsdEstimate, DEFAULT_PAD_FACTOR};

pub const DEFAULT_ORDER: usize = 10;

/// Relative diagonal loading added to `ρ₀` before inversion.
pub const DEFAULT_DIAGONAL_LOADING: f64 = 1e-6;

/// First column `ρ₀ … ρ_m` of a real symmetric Toeplitz covariance of order `M = m + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCovariance {
    rho: Vec<f64>,
}

impl ToeplitzCovariance {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(invalid("covariance needs at least one lag"));
        }
        Ok(Self { rho })
    }

    pub fn first_column(&self) -> &[f64] {
        &self.rho
    }

    /// Matrix order `M`.
    pub fn order(&self) -> usize {
        self.rho.len()
    }

    /// True for an all-zero frame (`ρ₀ = 0`).
    pub fn is_degenerate(&self) -> bool {
        !(self.rho[0] > 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.order();
        DMatrix::from_fn(m, m, |i, j| self.rho[i.abs_diff(j)])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rho: self.rho.iter().map(|r| r * factor).collect(),
        }
    }

    /// Adds `loading · ρ₀` to the diagonal. Keeps the matrix Toeplitz.
    pub fn loaded(&self, loading: f64) -> Self {
        let mut rho = self.rho.clone();
        rho[0] *= 1.0 + loading;
        Self { rho }
    }
}

/// Biased autocorrelation `ρ_k = (1/N) Σ_{t=k}^{N−1} y(t) y(t−k)`, `k = 0..=m`,
/// of an already-windowed frame.
pub fn estimate_autocovariance(frame: &[f64], m: usize) -> Result<ToeplitzCovariance> {
    if m == 0 {
        return Err(invalid("Capon order m must be >= 1"));
    }
    if frame.len() <= m {
        return Err(invalid(format!(
            "frame of {} samples is too short for order {m}",
            frame.len()
        )));
    }
    let n = frame.len() as f64;
    let rho = (0..=m)
        .map(|k| {
            frame[k..]
                .iter()
                .zip(frame)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n
        })
        .collect();
    ToeplitzCovariance::new(rho)
}

/// Literal sample covariance: the average of `[y(t) … y(t−m)]ᵀ[y(t) … y(t−m)]`
/// over `t = m..N−1`. Symmetric but not Toeplitz in general; used only by the
/// dense reference path.
pub fn sample_covariance_matrix(frame: &[f64], m: usize) -> Result<DMatrix<f64>> {
    if m == 0 || frame.len() <= m {
        return Err(invalid(format!(
            "frame of {} samples is too short for order {m}",
            frame.len()
        )));
    }
    let size = m + 1;
    let mut r = DMatrix::zeros(size, size);
    for t in m..frame.len() {
        for i in 0..size {
            let yi = frame[t - i];
            for j in 0..size {
                r[(i, j)] += yi * frame[t - j];
            }
        }
    }
    Ok(r / (frame.len() - m) as f64)
}

/// Solution of `R_{M−1} w = −(ρ₁ … ρ_{M−1})ᵀ` and the final prediction error
/// `α = ρ₀ + Σ ρ_k w_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonSolution {
    pub w: Vec<f64>,
    pub alpha: f64,
}

/// Levinson-Durbin recursion, `O(M²)`. Fails as soon as a prediction error
/// stops being positive, which happens exactly when the covariance is not
/// positive definite.
pub fn levinson_solve(cov: &ToeplitzCovariance) -> Result<LevinsonSolution> {
    let rho = cov.first_column();
    let order = rho.len();
    let mut alpha = rho[0];
    if !(alpha > 0.0) {
        return Err(EnfError::NotPositiveDefinite { order: 0, alpha });
    }
    let mut w: Vec<f64> = Vec::with_capacity(order - 1);
    let mut prev = Vec::with_capacity(order - 1);
    for k in 1..order {
        let acc = rho[k]
            + w.iter()
                .enumerate()
                .map(|(j, wj)| wj * rho[k - 1 - j])
                .sum::<f64>();
        let reflection = -acc / alpha;
        prev.clone_from(&w);
        for j in 0..w.len() {
            w[j] += reflection * prev[prev.len() - 1 - j];
        }
        w.push(reflection);
        alpha *= 1.0 - reflection * reflection;
        if !(alpha > 0.0) || reflection.abs() >= 1.0 {
            return Err(EnfError::NotPositiveDefinite { order: k, alpha });
        }
    }
    Ok(LevinsonSolution { w, alpha })
}

/// Gohberg-Semencul generators of `R⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct GsFactors {
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub alpha: f64,
    pub w: Vec<f64>,
}

impl GsFactors {
    pub fn order(&self) -> usize {
        self.gamma.len()
    }
}

pub fn gs_factors(w: &[f64], alpha: f64) -> Result<GsFactors> {
    if !(alpha > 0.0) {
        return Err(EnfError::NotPositiveDefinite {
            order: w.len(),
            alpha,
        });
    }
    let scale = 1.0 / alpha.sqrt();
    let gamma = std::iter::once(1.0)
        .chain(w.iter().copied())
        .map(|v| v * scale)
        .collect();
    let delta = std::iter::once(0.0)
        .chain(w.iter().rev().copied())
        .map(|v| v * scale)
        .collect();
    Ok(GsFactors {
        gamma,
        delta,
        alpha,
        w: w.to_vec(),
    })
}

/// Krylov matrix `[v, Dv, …, D^{M−1}v]` for the lag-1 lower shift `D`.
pub fn krylov(v: &[f64]) -> DMatrix<f64> {
    let m = v.len();
    let mut k = DMatrix::zeros(m, m);
    let mut col = v.to_vec();
    for j in 0..m {
        k.set_column(j, &nalgebra::DVector::from_column_slice(&col));
        col.rotate_right(1);
        col[0] = 0.0;
    }
    k
}

/// Dense `R⁻¹` assembled from its generators. For verification and small orders.
pub fn inverse_from_gs(factors: &GsFactors) -> DMatrix<f64> {
    let kg = krylov(&factors.gamma);
    let kd = krylov(&factors.delta);
    &kg * kg.transpose() - &kd * kd.transpose()
}

/// Diagonal sums `x_i` of `R⁻¹`, `i = −(M−1)..=(M−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaponDenomCoeffs {
    coeffs: Vec<f64>,
}

impl CaponDenomCoeffs {
    /// Wraps `2M − 1` coefficients ordered from `i = −(M−1)` upward.
    pub fn from_vec(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(invalid("diagonal-sum vector must have odd length"));
        }
        Ok(Self { coeffs })
    }

    /// Diagonal sums of an arbitrary square matrix (`i > 0` above the diagonal).
    pub fn from_matrix(r: &DMatrix<f64>) -> Self {
        let m = r.nrows() as isize;
        let coeffs = (-(m - 1)..m)
            .map(|i| {
                (0..m)
                    .filter(|&k| (0..m).contains(&(k + i)))
                    .map(|k| r[(k as usize, (k + i) as usize)])
                    .sum()
            })
            .collect();
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().div_ceil(2)
    }

    pub fn get(&self, i: isize) -> f64 {
        self.coeffs[(i + self.order() as isize - 1) as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }
}

/// `x_i = Σ_s (M − i − s)(γ_s γ_{s+i} − δ_s δ_{s+i})` for `i ≥ 0`, mirrored
/// for negative `i`.
pub fn denom_coeffs(factors: &GsFactors) -> CaponDenomCoeffs {
    let m = factors.order();
    let (g, d) = (&factors.gamma, &factors.delta);
    let positive: Vec<f64> = (0..m)
        .map(|i| {
            (0..m - i)
                .map(|s| (m - i - s) as f64 * (g[s] * g[s + i] - d[s] * d[s + i]))
                .sum()
        })
        .collect();
    let coeffs = positive
        .iter()
        .rev()
        .chain(positive.iter().skip(1))
        .copied()
        .collect();
    CaponDenomCoeffs { coeffs }
}

/// Evaluates the Capon spectrum on a `Q`-point grid with one FFT.
pub struct CaponGrid {
    fft: Arc<dyn Fft<f64>>,
}

impl CaponGrid {
    pub fn new(grid_len: usize) -> Result<Self> {
        if grid_len == 0 {
            return Err(invalid("grid must have at least one point"));
        }
        Ok(Self {
            fft: FftPlanner::new().plan_fft_inverse(grid_len),
        })
    }

    pub fn grid_len(&self) -> usize {
        self.fft.len()
    }

    /// `φ_den(ω_q) = Σ_i x_i e^{j2πqi/Q}` for all `q`.
    pub fn denominator(&self, x: &CaponDenomCoeffs) -> Result<Vec<f64>> {
        let q = self.fft.len();
        let m = x.order();
        if q < 2 * m - 1 {
            return Err(invalid(format!(
                "grid of {q} points is smaller than 2M-1 = {} coefficients",
                2 * m - 1
            )));
        }
        let mut buf = vec![Complex::new(0.0, 0.0); q];
        let mi = m as isize;
        for i in -(mi - 1)..mi {
            buf[i.rem_euclid(q as isize) as usize].re = x.get(i);
        }
        // The inverse transform carries the e^{+j} kernel, unnormalized.
        self.fft.process(&mut buf);
        Ok(buf.into_iter().map(|c| c.re).collect())
    }

    /// `φ(ω_q) = (m + 1) / φ_den(ω_q)`; fails if any denominator is not positive.
    pub fn psd(&self, x: &CaponDenomCoeffs, sample_rate_hz: f64) -> Result<PsdEstimate> {
        let numerator = x.order() as f64;
        let den = self.denominator(x)?;
        let mut values = Vec::with_capacity(den.len());
        for (bin, d) in den.into_iter().enumerate() {
            if !(d > 0.0) {
                return Err(EnfError::DegenerateDenominator { bin, value: d });
            }
            values.push(numerator / d);
        }
        PsdEstimate::new(values, sample_rate_hz)
    }
}

pub fn capon_psd(x: &CaponDenomCoeffs, grid_len: usize, sample_rate_hz: f64) -> Result<PsdEstimate> {
    CaponGrid::new(grid_len)?.psd(x, sample_rate_hz)
}

/// Settings for per-frame Capon estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaponSettings {
    pub order: usize,
    pub pad_factor: usize,
    pub interpolate: bool,
    /// Relative diagonal loading; keeps noiseless tones, whose windowed
    /// covariance is singular to working precision, invertible.
    pub diagonal_loading: f64,
}

impl Default for CaponSettings {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            pad_factor: DEFAULT_PAD_FACTOR,
            interpolate: true,
            diagonal_loading: DEFAULT_DIAGONAL_LOADING,
        }
    }
}

/// Fast Capon estimator for frames of one fixed length.
pub struct CaponEstimator {
    settings: CaponSettings,
    frame_len: usize,
    grid: CaponGrid,
}

impl CaponEstimator {
    pub fn new(frame_len: usize, settings: CaponSettings) -> Result<Self> {
        if settings.order == 0 || frame_len <= settings.order {
            return Err(invalid(format!(
                "frame length {frame_len} must exceed Capon order {}",
                settings.order
            )));
        }
        if settings.pad_factor == 0 {
            return Err(invalid("pad factor must be >= 1"));
        }
        if !(settings.diagonal_loading >= 0.0) {
            return Err(invalid("diagonal loading must be >= 0"));
        }
        Ok(Self {
            settings,
            frame_len,
            grid: CaponGrid::new(settings.pad_factor * frame_len)?,
        })
    }

    pub fn settings(&self) -> CaponSettings {
        self.settings
    }

    /// Autocovariance → Levinson → generators → diagonal sums → grid.
    pub fn spectrum(&self, frame: &[f64], sample_rate_hz: f64) -> Result<PsdEstimate> {
        if frame.len() != self.frame_len {
            return Err(invalid(format!(
                "frame has {} samples, estimator expects {}",
                frame.len(),
                self.frame_len
            )));
        }
        let cov = estimate_autocovariance(frame, self.settings.order)?
            .loaded(self.settings.diagonal_loading);
        let sol = levinson_solve(&cov)?;
        let factors = gs_factors(&sol.w, sol.alpha)?;
        self.grid.psd(&denom_coeffs(&factors), sample_rate_hz)
    }

    /// Frequency of the in-band spectral peak. `Ok(None)` marks a degenerate
    /// frame (silent, rank-deficient, or numerically non-positive spectrum).
    pub fn estimate_frame(
        &self,
        frame: &[f64],
        sample_rate_hz: f64,
        band: (f64, f64),
    ) -> Result<Option<PeakEstimate>> {
        match self.spectrum(frame, sample_rate_hz) {
            Ok(psd) => locate_peak(&psd, band, self.settings.interpolate).map(Some),
            Err(EnfError::NotPositiveDefinite { .. } | EnfError::DegenerateDenominator { .. }) => {
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

pub fn capon_estimate_frame(
    frame: &[f64],
    sample_rate_hz: f64,
    settings: CaponSettings,
    band: (f64, f64),
) -> Result<Option<PeakEstimate>> {
    CaponEstimator::new(frame.len(), settings)?.estimate_frame(frame, sample_rate_hz, band)
}

/// Dense inverse through a Cholesky factorization; `None` if not positive definite.
pub fn dense_inverse(r: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    r.clone().cholesky().map(|c| c.inverse())
}

/// Capon spectrum by explicit quadratic forms `a*(ω_q) R⁻¹ a(ω_q)` at each of
/// `grid_len` bins. `O(Q M²)`; the reference the fast path is checked
/// and timed against.
pub fn dense_capon_psd(inverse: &DMatrix<f64>, grid_len: usize, sample_rate_hz: f64) -> Result<PsdEstimate> {
    let m = inverse.nrows();
    let mut steering = vec![Complex::new(0.0, 0.0); m];
    let mut values = Vec::with_capacity(grid_len);
    for q in 0..grid_len {
        let omega = 2.0 * std::f64::consts::PI * q as f64 / grid_len as f64;
        for (k, a) in steering.iter_mut().enumerate() {
            *a = Complex::from_polar(1.0, omega * k as f64);
        }
        let mut den = Complex::new(0.0, 0.0);
        for k in 0..m {
            let mut row = Complex::new(0.0, 0.0);
            for l in 0..m {
                row += steering[l] * inverse[(k, l)];
            }
            den += steering[k].conj() * row;
        }
        if !(den.re > 0.0) {
            return Err(EnfError::DegenerateDenominator { bin: q, value: den.re });
        }
        values.push(m as f64 / den.re);
    }
    PsdEstimate::new(values, sample_rate_hz)
}
