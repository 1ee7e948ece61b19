use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wfts_bench::cases;
use wfts_core::analysis::{family_values, product_values};
use wfts_core::Mode;

fn strategies(c: &mut Criterion) {
    let mut group = c.benchmark_group("limit-average");
    group.sample_size(20);
    for (name, w) in cases(5) {
        group.bench_with_input(BenchmarkId::new("family", &name), &w, |b, w| {
            b.iter(|| family_values(w, Mode::Max, false))
        });
        group.bench_with_input(BenchmarkId::new("product", &name), &w, |b, w| {
            b.iter(|| product_values(w, Mode::Max, false))
        });
    }
    group.finish();
}

criterion_group!(benches, strategies);
criterion_main!(benches);
