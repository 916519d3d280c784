//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use enf_cli::cmd_bench;
use enf_core::capon::{dense_capon_psd, dense_inverse, CaponDenomCoeffs};
use enf_core::matching::{best_lag_dense, correlation_with_gaps};
use enf_core::pipeline::{estimate_track, prepare, EstimatorKind, PipelineConfig};
use enf_core::stft::refine_quadratic;
use enf_core::track::to_fundamental;
use enf_core::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MATRIX_COUNT: usize = 1000;
const MATRIX_ORDER: usize = 11;
const MATRIX_SEED: u64 = 0x5eed;
const GS_INVERSE_TOL: f64 = 1e-8;
const GS_PSD_TOL: f64 = 1e-9;
const GS_BUDGET: Duration = Duration::from_secs(10);
const LEVINSON_TOL: f64 = 1e-10;
const E2E_MIN_CORR: f64 = 0.99;
const E2E_BUDGET: Duration = Duration::from_secs(120);
const STFT_MIN_CORR: f64 = 0.98;
const VERTEX_TOL_BINS: f64 = 1e-6;
const FISHER_TOL: f64 = 1e-12;
const BENCH_GRID: usize = 1764;
const BENCH_TRIALS: usize = 1000;
const PROPERTY_CASES: u32 = 500;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u32, name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome {
        id,
        name,
        pass,
        detail,
    }
}

fn covariances() -> Vec<ToeplitzCovariance> {
    let mut rng = ChaCha8Rng::seed_from_u64(MATRIX_SEED);
    (0..MATRIX_COUNT)
        .map(|_| random_covariance(MATRIX_ORDER, &mut rng).unwrap())
        .collect()
}

fn gs_correctness(covs: &[ToeplitzCovariance]) -> Outcome {
    let start = Instant::now();
    let grid = 4 * 441;
    let (mut worst_inv, mut worst_psd) = (0.0f64, 0.0f64);
    for cov in covs {
        let sol = levinson_solve(cov).unwrap();
        let factors = gs_factors(&sol.w, sol.alpha).unwrap();
        let dense = dense_inverse(&cov.to_dense()).unwrap();
        let gs = inverse_from_gs(&factors);
        worst_inv = worst_inv.max((&gs - &dense).norm() / dense.norm());
        let fast = capon_psd(&denom_coeffs(&factors), grid, 441.0).unwrap();
        let slow = dense_capon_psd(&dense, grid, 441.0).unwrap();
        for (a, b) in fast.values().iter().zip(slow.values()) {
            worst_psd = worst_psd.max((a - b).abs() / b.abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        1,
        "Gohberg-Semencul inverse and Capon grid",
        worst_inv <= GS_INVERSE_TOL && worst_psd <= GS_PSD_TOL && elapsed < GS_BUDGET,
        format!(
            "{MATRIX_COUNT} matrices, max rel Frobenius {worst_inv:.2e} (<= {GS_INVERSE_TOL:e}), \
             max rel PSD {worst_psd:.2e} (<= {GS_PSD_TOL:e}), {:.2}s (< {}s)",
            elapsed.as_secs_f64(),
            GS_BUDGET.as_secs()
        ),
    )
}

fn levinson_correctness(covs: &[ToeplitzCovariance]) -> Outcome {
    let (mut worst_w, mut worst_alpha) = (0.0f64, 0.0f64);
    for cov in covs {
        let rho = cov.first_column();
        let m = rho.len() - 1;
        let sol = levinson_solve(cov).unwrap();
        let r = DMatrix::from_fn(m, m, |i, j| rho[i.abs_diff(j)]);
        let rhs = DVector::from_iterator(m, rho[1..].iter().map(|v| -v));
        let w = r.lu().solve(&rhs).unwrap();
        let alpha = rho[0] + rho[1..].iter().zip(w.iter()).map(|(a, b)| a * b).sum::<f64>();
        let got = DVector::from_column_slice(&sol.w);
        worst_w = worst_w.max((&got - &w).norm() / w.norm());
        worst_alpha = worst_alpha.max((sol.alpha - alpha).abs() / alpha.abs());
    }
    outcome(
        2,
        "Levinson-Durbin against dense solves",
        worst_w <= LEVINSON_TOL && worst_alpha <= LEVINSON_TOL,
        format!("max rel w {worst_w:.2e}, max rel alpha {worst_alpha:.2e} (<= {LEVINSON_TOL:e})"),
    )
}

struct EndToEnd {
    capon_parzen: f64,
    capon_rect: f64,
    stft_parzen: f64,
    capon_parzen_time: Duration,
}

fn fixture_correlation(rec: &SyntheticRecording, prepared: &pipeline::PreparedSignal, config: &PipelineConfig) -> f64 {
    let track = to_fundamental(&estimate_track(prepared, config).unwrap());
    let truth: Vec<Option<f64>> = rec.enf.truth_for(&track).into_iter().map(Some).collect();
    correlation_with_gaps(&track.frequencies(), &truth, true).unwrap().0
}

fn end_to_end() -> EndToEnd {
    let base = PipelineConfig::power();
    let start = Instant::now();
    let rec = generate(&SyntheticConfig::default()).unwrap();
    let prepared = prepare(&rec.signal, &base).unwrap();
    let capon_parzen = fixture_correlation(&rec, &prepared, &base);
    let capon_parzen_time = start.elapsed();
    let with = |window: WindowKind, estimator: EstimatorKind| PipelineConfig {
        window: WindowSpec::new(window),
        estimator,
        ..base.clone()
    };
    EndToEnd {
        capon_parzen,
        capon_rect: fixture_correlation(&rec, &prepared, &with(WindowKind::Rect, EstimatorKind::Capon)),
        stft_parzen: fixture_correlation(&rec, &prepared, &with(WindowKind::Parzen, EstimatorKind::Stft)),
        capon_parzen_time,
    }
}

fn quadratic_vertex() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let delta: f64 = rng.random_range(-0.4999..0.4999);
        let curvature: f64 = rng.random_range(0.05..2.0);
        let peak_bin = rng.random_range(20..200usize);
        let values: Vec<f64> = (0..512)
            .map(|q| (-curvature * (q as f64 - peak_bin as f64 - delta).powi(2)).exp())
            .collect();
        let psd = PsdEstimate::new(values, 512.0).unwrap();
        let est = refine_quadratic(&psd, peak_bin).unwrap();
        worst = worst.max((est.offset - delta).abs());
    }
    outcome(
        6,
        "log-parabola vertex recovery",
        worst <= VERTEX_TOL_BINS,
        format!("100 offsets, max error {worst:.2e} bins (<= {VERTEX_TOL_BINS:e})"),
    )
}

fn matching_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut recovered = 0;
    for trial in 0..100 {
        let mut level = 60.0;
        let g: Vec<f64> = (0..500)
            .map(|_| {
                level += rng.random_range(-0.002..0.002);
                level
            })
            .collect();
        let lag = rng.random_range(0..=450);
        let f = g[lag..lag + 50].to_vec();
        let centered = trial % 2 == 0;
        if best_lag_dense(&f, &g, centered).ok().map(|r| r.lag) == Some(lag) {
            recovered += 1;
        }
    }

    let equal = fisher_test(0.95, 0.95, 1800, 0.05).unwrap().q == 0.0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let c1: f64 = rng.random_range(-0.999..0.999);
        let c2: f64 = rng.random_range(-0.999..0.999);
        let n = rng.random_range(4..10_000usize);
        let z = |c: f64| 0.5 * ((1.0 + c) / (1.0 - c)).ln();
        let direct = ((n - 3) as f64).sqrt() * (z(c1) - z(c2));
        let q = fisher_test(c1, c2, n, 0.05).unwrap().q;
        worst = worst.max((q - direct).abs() / direct.abs().max(1.0));
    }
    let published = fisher_test(0.9990, 0.9847, 1800, 0.05).unwrap();
    outcome(
        7,
        "lag recovery and Fisher test",
        recovered == 100 && equal && worst <= FISHER_TOL && published.reject,
        format!(
            "planted lags {recovered}/100, q(c,c)=0 {equal}, max formula deviation {worst:.1e} \
             (<= {FISHER_TOL:e}), q(0.9990, 0.9847, 1800) = {:.3} reject {}",
            published.q, published.reject
        ),
    )
}

fn bench_smoke() -> Outcome {
    let report = cmd_bench(MATRIX_ORDER, &[BENCH_GRID], BENCH_TRIALS, 1).unwrap();
    let row = &report.rows[0];
    outcome(
        8,
        "fast Capon grid beats per-bin quadratic forms",
        row.speedup > 1.0,
        format!(
            "Q={BENCH_GRID}, M={MATRIX_ORDER}: fast {:.1}us, dense {:.1}us, speedup {:.1}x",
            row.fast_median_s * 1e6,
            row.dense_median_s * 1e6,
            row.speedup
        ),
    )
}

fn property<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Outcome {
    let kinds = prop::sample::select(WindowKind::ALL.to_vec());
    let results = [
        property(
            "window symmetry",
            (kinds.clone(), 1usize..=2000, 0.0f64..14.0),
            |(kind, len, beta)| {
                let w = make_window(kind, len, Some(beta)).unwrap();
                let t = w.taps();
                for k in 0..len {
                    prop_assert!((t[k] - t[len - 1 - k]).abs() <= 1e-12);
                }
                Ok(())
            },
        ),
        property("Parzen branch continuity", 1000usize..=1_000_000, |len| {
            let n = len as f64;
            let r = ((n - 1.0) / 4.0) / (n / 2.0);
            let inner = 1.0 - 6.0 * r * r * (1.0 - r);
            let outer = 2.0 * (1.0 - r).powi(3);
            prop_assert!((inner - outer).abs() <= 1e-9);
            Ok(())
        }),
        property("scale equivariance", (any::<u64>(), 1e-3f64..1e3), |(seed, c)| {
            let cov = random_covariance(MATRIX_ORDER, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let a = levinson_solve(&cov).unwrap();
            let b = levinson_solve(&cov.scaled(c)).unwrap();
            for (x, y) in a.w.iter().zip(&b.w) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
            prop_assert!((b.alpha - c * a.alpha).abs() <= 1e-10 * c * a.alpha);
            Ok(())
        }),
        property("x-coefficient symmetry", (any::<u64>(), 2usize..=16), |(seed, order)| {
            let cov = random_covariance(order, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let sol = levinson_solve(&cov).unwrap();
            let x = denom_coeffs(&gs_factors(&sol.w, sol.alpha).unwrap());
            let dense = CaponDenomCoeffs::from_matrix(&dense_inverse(&cov.to_dense()).unwrap());
            for i in 0..order as isize {
                prop_assert_eq!(x.get(i), x.get(-i));
                prop_assert!((x.get(i) - dense.get(i)).abs() <= 1e-9 * x.get(0).abs());
            }
            Ok(())
        }),
        property("determinism", (any::<u64>(), kinds), |(seed, kind)| {
            let rec = generate(&SyntheticConfig {
                duration_s: 6.0,
                seed,
                ..SyntheticConfig::default()
            })
            .unwrap();
            let config = PipelineConfig {
                window: WindowSpec::new(kind),
                ..PipelineConfig::power()
            };
            let run = |threads| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap()
                    .install(|| extract_enf(&rec.signal, &config).unwrap())
            };
            prop_assert_eq!(run(1), run(4));
            Ok(())
        }),
    ];
    let failures: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
    outcome(
        9,
        "invariant property suites",
        failures.is_empty(),
        if failures.is_empty() {
            format!("5 suites x {PROPERTY_CASES} cases")
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let covs = covariances();
    let mut outcomes = vec![gs_correctness(&covs), levinson_correctness(&covs)];

    let e2e = end_to_end();
    outcomes.push(outcome(
        3,
        "synthetic power recording, Capon + Parzen, L = 1 s",
        e2e.capon_parzen >= E2E_MIN_CORR && e2e.capon_parzen_time < E2E_BUDGET,
        format!(
            "correlation {:.5} (>= {E2E_MIN_CORR}), {:.1}s (< {}s)",
            e2e.capon_parzen,
            e2e.capon_parzen_time.as_secs_f64(),
            E2E_BUDGET.as_secs()
        ),
    ));
    outcomes.push(outcome(
        4,
        "Parzen not worse than rectangular at L = 1 s",
        e2e.capon_parzen >= e2e.capon_rect,
        format!("Parzen {:.5} vs rectangular {:.5}", e2e.capon_parzen, e2e.capon_rect),
    ));
    outcomes.push(outcome(
        5,
        "periodogram + Parzen at L = 1 s",
        e2e.stft_parzen >= STFT_MIN_CORR,
        format!("correlation {:.5} (>= {STFT_MIN_CORR})", e2e.stft_parzen),
    ));
    outcomes.push(quadratic_vertex());
    outcomes.push(matching_checks());
    outcomes.push(bench_smoke());
    outcomes.push(property_suites());

    outcomes.sort_by_key(|o| o.id);
    for o in &outcomes {
        println!(
            "criterion {} {} {}: {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
