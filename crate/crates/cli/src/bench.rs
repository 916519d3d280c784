//! Per-frame timing of the two ways to evaluate a Capon spectrum on a grid.
//!
//! Fast: Levinson-Durbin, generator diagonal sums, one inverse FFT.
//! Dense: Cholesky inverse, then one complex quadratic form per bin.

use std::hint::black_box;
use std::time::Instant;

use enf_core::capon::{dense_capon_psd, dense_inverse, CaponGrid};
use enf_core::{denom_coeffs, gs_factors, levinson_solve, random_covariance, EnfError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub grid_len: usize,
    pub fast_median_s: f64,
    pub dense_median_s: f64,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub order: usize,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn cmd_bench(order: usize, grid_lens: &[usize], trials: usize, seed: u64) -> Result<BenchReport> {
    if order < 2 {
        return Err(EnfError::InvalidArgument(format!("order must be >= 2, got {order}")));
    }
    if trials == 0 {
        return Err(EnfError::InvalidArgument("trials must be >= 1".into()));
    }
    if grid_lens.is_empty() {
        return Err(EnfError::InvalidArgument("no grid sizes given".into()));
    }
    if let Some(&q) = grid_lens.iter().find(|&&q| q < 2 * order - 1) {
        return Err(EnfError::InvalidArgument(format!(
            "grid size {q} is below 2M-1 = {} for M = {order}",
            2 * order - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let covs = (0..trials)
        .map(|_| random_covariance(order, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(grid_lens.len());
    for &q in grid_lens {
        let grid = CaponGrid::new(q)?;
        let mut fast = Vec::with_capacity(trials);
        let mut dense = Vec::with_capacity(trials);
        for cov in &covs {
            let start = Instant::now();
            let sol = levinson_solve(black_box(cov))?;
            let psd = grid.psd(&denom_coeffs(&gs_factors(&sol.w, sol.alpha)?), 1.0)?;
            black_box(psd);
            fast.push(start.elapsed().as_secs_f64());

            let start = Instant::now();
            let inv = dense_inverse(&black_box(cov).to_dense()).ok_or(EnfError::NotPositiveDefinite {
                order,
                alpha: f64::NAN,
            })?;
            black_box(dense_capon_psd(&inv, q, 1.0)?);
            dense.push(start.elapsed().as_secs_f64());
        }
        let (f, d) = (median(fast), median(dense));
        rows.push(BenchRow {
            grid_len: q,
            fast_median_s: f,
            dense_median_s: d,
            speedup: d / f,
        });
    }
    Ok(BenchReport {
        order,
        trials,
        seed,
        rows,
    })
}
