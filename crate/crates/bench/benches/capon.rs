use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use enf_bench::{covariances, harmonic_frame};
use enf_core::capon::{dense_capon_psd, dense_inverse, CaponGrid};
use enf_core::stft::{locate_peak, Periodogram};
use enf_core::{denom_coeffs, gs_factors, levinson_solve, CaponEstimator, CaponSettings};

fn grid_evaluation(c: &mut Criterion) {
    let cov = covariances(1, 11, 7).remove(0);
    let mut group = c.benchmark_group("capon_grid");
    for q in [256usize, 1764, 8820] {
        let grid = CaponGrid::new(q).unwrap();
        group.bench_with_input(BenchmarkId::new("fast", q), &q, |b, _| {
            b.iter(|| {
                let sol = levinson_solve(black_box(&cov)).unwrap();
                let x = denom_coeffs(&gs_factors(&sol.w, sol.alpha).unwrap());
                grid.psd(&x, 441.0).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("dense", q), &q, |b, &q| {
            b.iter(|| {
                let inv = dense_inverse(&black_box(&cov).to_dense()).unwrap();
                dense_capon_psd(&inv, q, 441.0).unwrap()
            })
        });
    }
    group.finish();
}

fn levinson(c: &mut Criterion) {
    let mut group = c.benchmark_group("levinson");
    for order in [11usize, 21, 41] {
        let cov = covariances(1, order, 3).remove(0);
        group.bench_with_input(BenchmarkId::from_parameter(order), &cov, |b, cov| {
            b.iter(|| levinson_solve(black_box(cov)).unwrap())
        });
    }
    group.finish();
}

fn frame_estimators(c: &mut Criterion) {
    let frame = harmonic_frame(1);
    let band = (177.0, 183.0);
    let capon = CaponEstimator::new(441, CaponSettings::default()).unwrap();
    let periodogram = Periodogram::new(441, 4).unwrap();
    let mut group = c.benchmark_group("frame_estimate");
    group.bench_function("capon", |b| {
        b.iter(|| capon.estimate_frame(black_box(&frame), 441.0, band).unwrap())
    });
    group.bench_function("periodogram", |b| {
        b.iter(|| {
            let psd = periodogram.estimate(black_box(&frame), 441.0).unwrap();
            locate_peak(&psd, band, true).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, grid_evaluation, levinson, frame_estimators);
criterion_main!(benches);
