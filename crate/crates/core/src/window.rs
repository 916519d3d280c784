//! Temporal tapers multiplied into each frame before spectral analysis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, EnfError, Result};

pub const DEFAULT_KAISER_BETA: f64 = 8.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Parzen,
    Hamming,
    Kaiser,
    #[serde(alias = "rectangular")]
    Rect,
}

impl WindowKind {
    pub const ALL: [WindowKind; 4] = [
        WindowKind::Parzen,
        WindowKind::Hamming,
        WindowKind::Kaiser,
        WindowKind::Rect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Parzen => "parzen",
            WindowKind::Hamming => "hamming",
            WindowKind::Kaiser => "kaiser",
            WindowKind::Rect => "rect",
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowKind {
    type Err = EnfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "parzen" => Ok(WindowKind::Parzen),
            "hamming" => Ok(WindowKind::Hamming),
            "kaiser" | "kaizer" => Ok(WindowKind::Kaiser),
            "rect" | "rectangular" | "boxcar" => Ok(WindowKind::Rect),
            other => Err(invalid(format!("unknown window kind `{other}`"))),
        }
    }
}

/// Window family plus its shape parameter, without a length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    /// Kaiser β; ignored by the other kinds.
    #[serde(default = "default_beta")]
    pub kaiser_beta: f64,
}

fn default_beta() -> f64 {
    DEFAULT_KAISER_BETA
}

impl WindowSpec {
    pub fn new(kind: WindowKind) -> Self {
        Self {
            kind,
            kaiser_beta: DEFAULT_KAISER_BETA,
        }
    }

    pub fn kaiser(beta: f64) -> Self {
        Self {
            kind: WindowKind::Kaiser,
            kaiser_beta: beta,
        }
    }

    pub fn build(&self, len: usize) -> Result<WindowVector> {
        make_window(self.kind, len, Some(self.kaiser_beta))
    }
}

/// A length-N symmetric taper with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WindowVector {
    kind: WindowKind,
    taps: Vec<f64>,
    beta: Option<f64>,
}

impl WindowVector {
    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// Multiplies `frame` by the taps. Lengths must agree.
    pub fn apply(&self, frame: &[f64]) -> Result<Vec<f64>> {
        if frame.len() != self.taps.len() {
            return Err(invalid(format!(
                "window length {} does not match frame length {}",
                self.taps.len(),
                frame.len()
            )));
        }
        Ok(frame.iter().zip(&self.taps).map(|(x, w)| x * w).collect())
    }
}

/// Builds a window of `len` taps. `beta` is only consulted for Kaiser and
/// defaults to [`DEFAULT_KAISER_BETA`].
pub fn make_window(kind: WindowKind, len: usize, beta: Option<f64>) -> Result<WindowVector> {
    if len == 0 {
        return Err(invalid("window length must be at least 1"));
    }
    let half = (len as f64 - 1.0) / 2.0;
    // All kinds are evaluated on |n| so that taps[k] == taps[N-1-k] bit for bit.
    let centered = |k: usize| (k as f64 - half).abs();

    let (taps, beta) = match kind {
        WindowKind::Rect => (vec![1.0; len], None),
        WindowKind::Parzen => ((0..len).map(|k| parzen_tap(centered(k), len)).collect(), None),
        WindowKind::Hamming => {
            let taps = if len == 1 {
                vec![1.0]
            } else {
                (0..len)
                    .map(|k| 0.54 + 0.46 * (PI * centered(k) / half).cos())
                    .collect()
            };
            (taps, None)
        }
        WindowKind::Kaiser => {
            let beta = beta.unwrap_or(DEFAULT_KAISER_BETA);
            if !(beta >= 0.0) || !beta.is_finite() {
                return Err(invalid(format!("Kaiser beta must be >= 0, got {beta}")));
            }
            let taps = if len == 1 {
                vec![1.0]
            } else {
                let norm = bessel_i0(beta);
                (0..len)
                    .map(|k| {
                        let r = centered(k) / half;
                        let arg = beta * (1.0 - r * r).max(0.0).sqrt();
                        (bessel_i0(arg) / norm).min(1.0)
                    })
                    .collect()
            };
            (taps, Some(beta))
        }
    };

    Ok(WindowVector { kind, taps, beta })
}

/// Parzen (de la Vallée Poussin) taper at distance `abs_n` from the centre
/// of an `len`-point window. The boundary `|n| = (N-1)/4` uses the inner
/// polynomial.
pub fn parzen_tap(abs_n: f64, len: usize) -> f64 {
    let n = len as f64;
    let r = abs_n / (n / 2.0);
    if abs_n <= (n - 1.0) / 4.0 {
        1.0 - 6.0 * r * r + 6.0 * r * r * r
    } else {
        let s = 1.0 - r;
        2.0 * s * s * s
    }
}

/// Zeroth-order modified Bessel function of the first kind, by power series.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parzen_center_is_one() {
        for n in [1, 9, 441, 442] {
            let w = make_window(WindowKind::Parzen, n, None).unwrap();
            assert!(w.taps().iter().all(|&t| (0.0..=1.0).contains(&t)));
            if n % 2 == 1 {
                assert_eq!(w.taps()[n / 2], 1.0);
            }
        }
    }

    #[test]
    fn parzen_nine_points_match_direct_evaluation() {
        // Independent scalar evaluation of the two-branch polynomial at n = -4..4.
        let half_n = 4.5_f64;
        let expected: Vec<f64> = (-4i32..=4)
            .map(|n| {
                let a = f64::from(n.abs());
                let r = a / half_n;
                if a <= 2.0 {
                    1.0 - 6.0 * r.powi(2) + 6.0 * r.powi(3)
                } else {
                    2.0 * (1.0 - r).powi(3)
                }
            })
            .collect();
        let w = make_window(WindowKind::Parzen, 9, None).unwrap();
        for (got, want) in w.taps().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        assert!((w.taps()[0] - 2.0 * (1.0 - 4.0 / 4.5_f64).powi(3)).abs() < 1e-15);
    }

    #[test]
    fn rectangular_is_all_ones() {
        let w = make_window(WindowKind::Rect, 17, None).unwrap();
        assert!(w.taps().iter().all(|&t| t == 1.0));
    }

    #[test]
    fn hamming_endpoints() {
        let w = make_window(WindowKind::Hamming, 11, None).unwrap();
        assert!((w.taps()[0] - 0.08).abs() < 1e-15);
        assert!((w.taps()[5] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kaiser_beta_zero_is_rectangular() {
        let w = make_window(WindowKind::Kaiser, 32, Some(0.0)).unwrap();
        assert!(w.taps().iter().all(|&t| (t - 1.0).abs() < 1e-15));
        assert_eq!(w.beta(), Some(0.0));
    }

    #[test]
    fn bessel_i0_known_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        // Abramowitz & Stegun table 9.8
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(2.5) - 3.289_839_144_050_123).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(make_window(WindowKind::Parzen, 0, None).is_err());
        assert!(make_window(WindowKind::Kaiser, 8, Some(-1.0)).is_err());
        assert!(make_window(WindowKind::Kaiser, 8, Some(f64::NAN)).is_err());
    }

    #[test]
    fn apply_checks_length() {
        let w = make_window(WindowKind::Parzen, 5, None).unwrap();
        assert!(w.apply(&[1.0; 4]).is_err());
        assert_eq!(w.apply(&[1.0; 5]).unwrap(), w.taps());
    }

    #[test]
    fn parses_kinds() {
        assert_eq!("rectangular".parse::<WindowKind>().unwrap(), WindowKind::Rect);
        assert_eq!("Kaiser".parse::<WindowKind>().unwrap(), WindowKind::Kaiser);
        assert!("hann".parse::<WindowKind>().is_err());
    }
}
