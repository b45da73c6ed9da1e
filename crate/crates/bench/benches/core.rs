use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use exitflow::experiments::donsker::{donsker_sample, ProfileOptions};
use exitflow::experiments::{donsker_exit_experiment, donsker_profile_experiment, RandomWalkSpec, StepLaw};
use exitflow::{exit_profile, first_passage, m1_upper_bound, BoundaryFn, MonotonePath};
use std::hint::black_box;

fn walk(n: usize) -> exitflow::CadlagPath {
    donsker_sample(&RandomWalkSpec { law: StepLaw::Rademacher, n, seed: 1 }, 2.0, 0).unwrap()
}

fn passage(c: &mut Criterion) {
    let mut group = c.benchmark_group("first_passage");
    for n in [256, 4096, 65536] {
        let y = walk(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &y, |b, y| b.iter(|| first_passage(y, black_box(1.0))));
    }
    group.finish();
}

fn m1(c: &mut Criterion) {
    let mut group = c.benchmark_group("m1_upper_bound");
    for n in [256, 4096] {
        let spec = RandomWalkSpec { law: StepLaw::StandardNormal, n, seed: 1 };
        let opts = ProfileOptions::default();
        let (w, bm) = exitflow::experiments::donsker::coupled_paths(&spec, &opts, 0).unwrap();
        let to_mono = |p| MonotonePath::new(exit_profile(p, opts.u0, opts.u1).unwrap().compactified(1).unwrap()).unwrap();
        let (f, g) = (to_mono(&w), to_mono(&bm));
        group.bench_with_input(BenchmarkId::from_parameter(n), &(f, g), |b, (f, g)| b.iter(|| m1_upper_bound(f, g).unwrap()));
    }
    group.finish();
}

fn donsker(c: &mut Criterion) {
    let mut group = c.benchmark_group("donsker");
    group.sample_size(10);
    let spec = RandomWalkSpec { law: StepLaw::Rademacher, n: 1024, seed: 0 };
    group.bench_function("exit_1024x1000", |b| {
        b.iter(|| donsker_exit_experiment(&spec, 1000, BoundaryFn::Constant(1.0), 2.0).unwrap())
    });
    let spec = RandomWalkSpec { law: StepLaw::StandardNormal, n: 256, seed: 0 };
    group.bench_function("profile_256x100", |b| {
        b.iter(|| donsker_profile_experiment(&spec, 100, &ProfileOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, passage, m1, donsker);
criterion_main!(benches);
