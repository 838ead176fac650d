use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use monogamy_core::classical::{kcbs_expression, monogamy_expression};
use monogamy_core::quantum::{behavior_from_state, chsh_operator, eigensystem, Ket, JOINT_DIM};
use monogamy_core::region::{canonical_region, region_membership_sweep};
use monogamy_core::scenario::canonical_scenario;
use monogamy_core::{classical_bound, nd_optimum, Sense};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spectra(c: &mut Criterion) {
    let op = chsh_operator();
    c.bench_function("eigensystem_chsh_6x6", |b| b.iter(|| eigensystem(black_box(&op)).unwrap()));
}

fn bounds(c: &mut Criterion) {
    let expr = monogamy_expression(5);
    c.bench_function("classical_bound_128_assignments", |b| {
        b.iter(|| classical_bound(black_box(&expr), canonical_scenario()).unwrap())
    });
    let kappa = kcbs_expression();
    c.bench_function("nd_optimum_kcbs", |b| b.iter(|| nd_optimum(black_box(&kappa), Sense::Min).unwrap()));
}

fn quantum(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("behavior_from_state", |b| {
        b.iter_batched(
            || Ket::random(&mut rng, JOINT_DIM),
            |psi| behavior_from_state(&psi).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn region(c: &mut Criterion) {
    let r = canonical_region();
    let mut group = c.benchmark_group("region");
    group.sample_size(20);
    group.bench_function("sample_boundary_400", |b| b.iter(|| r.sample_boundary(black_box(400)).unwrap()));
    group.bench_function("touching_point", |b| b.iter(|| r.touching_point()));
    group.bench_function("membership_sweep_10k", |b| b.iter(|| region_membership_sweep(black_box(10_000), 7)));
    group.finish();
}

criterion_group!(benches, spectra, bounds, quantum, region);
criterion_main!(benches);
