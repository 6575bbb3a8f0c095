use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use venuerisk::harness::{calibrate_pi, run_study, StudyConfig, SyntheticBase};
use venuerisk::parallel::Execution;
use venuerisk::RngStream;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut modes = vec![("sequential", Execution::Sequential)];
    if Execution::parallel_available() {
        modes.push(("parallel", Execution::Parallel));
    }
    modes
}

fn study_throughput(c: &mut Criterion) {
    let base = SyntheticBase::default().generate(RngStream::new(2024, 0)).unwrap();
    let mut group = c.benchmark_group("run_study");
    for reps in [8usize, 32] {
        for (name, execution) in modes() {
            let cfg = StudyConfig {
                replications: reps,
                master_seed: 5,
                execution,
                ..StudyConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, reps), &cfg, |b, cfg| {
                b.iter(|| run_study(black_box(cfg), black_box(&base)).unwrap())
            });
        }
    }
    group.finish();
}

fn calibration_sweep(c: &mut Criterion) {
    let base = SyntheticBase::default().generate(RngStream::new(2024, 0)).unwrap();
    let grid: Vec<f64> = (1..=20).map(|k| f64::from(k) / 1000.0).collect();
    let mut group = c.benchmark_group("calibrate_pi");
    for (name, execution) in modes() {
        let cfg = StudyConfig {
            execution,
            ..StudyConfig::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| calibrate_pi(black_box(&base), &grid, 16, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = study_throughput, calibration_sweep
}
criterion_main!(benches);
