use criterion::{criterion_group, criterion_main, Criterion};
use enf_core::pipeline::{estimate_track, prepare};
use enf_core::{generate, EstimatorKind, PipelineConfig, SyntheticConfig};

fn extraction(c: &mut Criterion) {
    let rec = generate(&SyntheticConfig {
        duration_s: 120.0,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let config = PipelineConfig::power();
    let prepared = prepare(&rec.signal, &config).unwrap();

    let mut group = c.benchmark_group("pipeline_120s");
    group.sample_size(20);
    group.bench_function("prepare", |b| b.iter(|| prepare(&rec.signal, &config).unwrap()));
    for estimator in [EstimatorKind::Capon, EstimatorKind::Stft] {
        let config = PipelineConfig {
            estimator,
            ..config.clone()
        };
        group.bench_function(format!("estimate_{estimator}"), |b| {
            b.iter(|| estimate_track(&prepared, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, extraction);
criterion_main!(benches);
