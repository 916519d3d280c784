//! Maximum-correlation alignment of an extracted track against a longer
//! reference, and Fisher-z comparison of two correlation coefficients.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, EnfError, Result};

/// Correlation between two equal-length sequences. Uncentered mode is the
/// cosine of the angle between them; centered mode subtracts each mean first
/// (Pearson).
pub fn correlation(f: &[f64], g: &[f64], centered: bool) -> Result<f64> {
    if f.len() != g.len() {
        return Err(invalid(format!(
            "sequences differ in length ({} vs {})",
            f.len(),
            g.len()
        )));
    }
    if f.len() < 2 {
        return Err(invalid("correlation needs at least 2 samples"));
    }
    let (mf, mg) = if centered {
        let n = f.len() as f64;
        (f.iter().sum::<f64>() / n, g.iter().sum::<f64>() / n)
    } else {
        (0.0, 0.0)
    };
    let (mut fg, mut ff, mut gg) = (0.0, 0.0, 0.0);
    for (a, b) in f.iter().zip(g) {
        let (a, b) = (a - mf, b - mg);
        fg += a * b;
        ff += a * a;
        gg += b * b;
    }
    if ff == 0.0 || gg == 0.0 {
        return Err(EnfError::UndefinedCorrelation(if centered {
            "a sequence has zero variance"
        } else {
            "a sequence has zero norm"
        }));
    }
    Ok((fg / (ff.sqrt() * gg.sqrt())).clamp(-1.0, 1.0))
}

/// Correlation over the index pairs where both values are present.
pub fn correlation_with_gaps(f: &[Option<f64>], g: &[Option<f64>], centered: bool) -> Result<(f64, usize)> {
    let (a, b): (Vec<f64>, Vec<f64>) = f
        .iter()
        .zip(g)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip();
    let n = a.len();
    correlation(&a, &b, centered).map(|c| (c, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// 0-based offset into the reference.
    pub lag: usize,
    pub correlation: f64,
    pub centered: bool,
    /// Pairs used at the winning lag after dropping gaps.
    pub n_used: usize,
}

impl MatchResult {
    /// Lag as reported to users, counting from 1.
    pub fn reported_lag(&self) -> usize {
        self.lag + 1
    }
}

/// Slides `f` over every offset of the reference `g` and keeps the offset
/// with the largest correlation; ties keep the smallest offset. Offsets with
/// an undefined correlation are skipped.
pub fn best_lag(f: &[Option<f64>], g: &[Option<f64>], centered: bool) -> Result<MatchResult> {
    if g.len() < f.len() {
        return Err(invalid(format!(
            "reference ({} values) is shorter than the track ({} values)",
            g.len(),
            f.len()
        )));
    }
    let mut best: Option<MatchResult> = None;
    for lag in 0..=g.len() - f.len() {
        let Ok((c, n_used)) = correlation_with_gaps(f, &g[lag..lag + f.len()], centered) else {
            continue;
        };
        if best.is_none_or(|b| c > b.correlation) {
            best = Some(MatchResult {
                lag,
                correlation: c,
                centered,
                n_used,
            });
        }
    }
    best.ok_or(EnfError::UndefinedCorrelation("no offset gives a defined correlation"))
}

/// [`best_lag`] for sequences without gaps.
pub fn best_lag_dense(f: &[f64], g: &[f64], centered: bool) -> Result<MatchResult> {
    let wrap = |s: &[f64]| s.iter().copied().map(Some).collect::<Vec<_>>();
    best_lag(&wrap(f), &wrap(g), centered)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherTest {
    pub c1: f64,
    pub c2: f64,
    pub z1: f64,
    pub z2: f64,
    pub q: f64,
    pub n: usize,
    pub alpha: f64,
    pub critical: f64,
    pub reject: bool,
}

/// Two-sided standard-normal critical value for significance `alpha`.
pub fn critical_value(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("significance level must be in (0, 1), got {alpha}")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(1.0 - alpha / 2.0))
}

/// Tests `H₀: c₁ = c₂` via `q = √(n−3)(atanh c₁ − atanh c₂)`. The two
/// coefficients are treated as independent estimates.
pub fn fisher_test(c1: f64, c2: f64, n: usize, alpha: f64) -> Result<FisherTest> {
    for c in [c1, c2] {
        if !(c.abs() < 1.0) {
            return Err(invalid(format!("|c| must be < 1 for the Fisher transform, got {c}")));
        }
    }
    if n <= 3 {
        return Err(invalid(format!("need n > 3, got {n}")));
    }
    let critical = critical_value(alpha)?;
    let (z1, z2) = (c1.atanh(), c2.atanh());
    let q = ((n - 3) as f64).sqrt() * (z1 - z2);
    Ok(FisherTest {
        c1,
        c2,
        z1,
        z2,
        q,
        n,
        alpha,
        critical,
        reject: q.abs() >= critical,
    })
}
