//! Direct vs transform search products, and the rayon pool at its default
//! width vs a single worker. Build with `--no-default-features` to time the
//! plain sequential code paths instead.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use nength::grid::Shape;
use nength::scaling::{balanced_shape, bench_instance};
use nength::spectral::fast_search_product;
use nength::verify::{random_support, rng_for};
use nength::{build_index, find_all, search_product, AlphabetMode, CodeSpace, IntGrid};

fn engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("search_product");
    group.sample_size(10);
    for s in [256usize, 1024, 4096] {
        let shape = Shape::new(vec![s]).unwrap();
        let (pattern, text) = bench_instance(&shape, 1).unwrap();
        group.throughput(Throughput::Elements(s as u64));
        group.bench_with_input(BenchmarkId::new("naive", s), &s, |b, _| {
            b.iter(|| search_product(black_box(&pattern), black_box(&text)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fft", s), &s, |b, _| {
            b.iter(|| fast_search_product(black_box(&pattern), black_box(&text)).unwrap())
        });
    }
    for s in [1usize << 14, 1 << 16] {
        let shape = Shape::new(vec![s]).unwrap();
        let (pattern, text) = bench_instance(&shape, 1).unwrap();
        group.throughput(Throughput::Elements(s as u64));
        group.bench_with_input(BenchmarkId::new("fft", s), &s, |b, _| {
            b.iter(|| fast_search_product(black_box(&pattern), black_box(&text)).unwrap())
        });
    }
    group.finish();
}

fn threads(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let wide = rayon::ThreadPoolBuilder::new().build().unwrap();
    let space = CodeSpace::new(4, AlphabetMode::Shifted).unwrap();
    let mut group = c.benchmark_group("find_all");
    group.sample_size(10);
    for ndim in [1usize, 2, 3] {
        let shape = balanced_shape(1 << 15, ndim).unwrap();
        let mut rng = rng_for(7);
        let text = IntGrid::from_fn(shape.clone(), |_| rand::Rng::gen_range(&mut rng, 1..=4));
        let support = random_support(&mut rng, &shape, 4);
        let index = build_index(&text, space).unwrap();
        let label = shape.dims().iter().map(ToString::to_string).collect::<Vec<_>>().join("x");
        for (name, pool) in [("1-thread", &single), ("pool", &wide)] {
            group.bench_with_input(BenchmarkId::new(name, &label), &label, |b, _| {
                b.iter(|| pool.install(|| find_all(black_box(&index), black_box(&support)).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, engines, threads);
criterion_main!(benches);
