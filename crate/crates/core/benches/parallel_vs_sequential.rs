use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wienercert::dyadic_sums::bernstein_ladder;
use wienercert::envelopes::mixed_envelope_2d;
use wienercert::function_model::{sample_2d, Domain1D};
use wienercert::harness::{parse_axis, sweep_command, RunConfig, SweepConfig, DEFAULT_LADDER};
use wienercert::parallel;
use wienercert::spectral_oracle::{wiener_norm, LadderOptions};
use wienercert::testbed::{make_family, make_family_1d, Family, FamilySpec};

fn modes(c: &mut Criterion, name: &str, mut work: impl FnMut()) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.bench_function(BenchmarkId::new(name, "parallel"), |b| b.iter(&mut work));
    group.bench_function(BenchmarkId::new(name, "sequential"), |b| {
        b.iter(|| parallel::sequential(&mut work))
    });
    group.finish();
}

fn oracle_ladder(c: &mut Criterion) {
    let f = make_family_1d(&FamilySpec::polya(1.0)).unwrap().function;
    let opts = LadderOptions::default();
    modes(c, "wiener_norm", || {
        black_box(wiener_norm(&f, &DEFAULT_LADDER, &opts).unwrap());
    });
}

fn dyadic_ladder(c: &mut Criterion) {
    let f = make_family_1d(&FamilySpec::Gaussian).unwrap().function;
    modes(c, "bernstein_ladder", || {
        black_box(bernstein_ladder(&f, &[6, 8, 10]).unwrap());
    });
}

fn envelope_2d(c: &mut Criterion) {
    let spec = FamilySpec::tensor2d(FamilySpec::Gaussian, FamilySpec::ExpDecay);
    let Family::TwoD(fam) = make_family(&spec).unwrap() else {
        unreachable!()
    };
    let d = Domain1D::new(16.0, 1024).unwrap();
    let g = sample_2d(&fam.function, d, d).unwrap();
    modes(c, "mixed_envelope_2d", || {
        black_box(mixed_envelope_2d(&g, [1, 1], [0, 0]).unwrap());
    });
}

fn sweep(c: &mut Criterion) {
    let cfg = SweepConfig::new(
        "polya",
        vec![parse_axis("a=0.5:2.0:0.5").unwrap()],
        RunConfig::new(FamilySpec::polya(1.0)),
    );
    modes(c, "sweep", || {
        black_box(sweep_command(&cfg).unwrap());
    });
}

criterion_group!(benches, oracle_ladder, dyadic_ladder, envelope_2d, sweep);
criterion_main!(benches);
