//! Benchmarks for the parallel dispatch against the plain sequential
//! kernels. Build with default features to measure the rayon paths; rerun
//! with `--no-default-features` for a fully sequential baseline.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use qseries::builders::{etaq, theta3, theta4};
use qseries::relations::findhom;
use qseries::series::QSeries;

fn dense_series(trunc: usize) -> QSeries {
    // Partition generating function: dense, structured coefficients.
    etaq(1, trunc).unwrap().inv().unwrap()
}

fn bench_convolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("series_mul");
    for trunc in [256usize, 1024] {
        let f = dense_series(trunc);
        let g = etaq(2, trunc).unwrap().inv().unwrap();
        group.bench_function(format!("dispatch/{trunc}"), |b| {
            b.iter_batched(|| (f.clone(), g.clone()), |(f, g)| f.mul(&g), BatchSize::SmallInput)
        });
        group.bench_function(format!("serial/{trunc}"), |b| {
            b.iter_batched(
                || (f.clone(), g.clone()),
                |(f, g)| f.mul_serial(&g),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_findhom(c: &mut Criterion) {
    // Monomial evaluation is the data-parallel part of relation search.
    let list = vec![
        theta3(300),
        theta4(300),
        theta3(150).substitute_power(2).unwrap(),
        theta4(150).substitute_power(2).unwrap(),
    ];
    c.bench_function("findhom/theta_degree_4", |b| {
        b.iter(|| findhom(&list, 4, 0).unwrap())
    });
}

fn bench_partition_series(c: &mut Criterion) {
    c.bench_function("partition_series/2000", |b| b.iter(|| dense_series(2000)));
}

criterion_group!(benches, bench_convolution, bench_findhom, bench_partition_series);
criterion_main!(benches);
