use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matchdyn::blocks::primitivity_agreement;
use matchdyn::measure::{birkhoff_frequency, coverage, sweep_blocks, SimMode};
use matchdyn::rational::rat;
use matchdyn::{Execution, Word};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn words(len: usize) -> Vec<Word> {
    (0u64..(1 << len))
        .map(|x| Word::new((0..len).rev().map(|i| ((x >> i) & 1) as u8).collect()).unwrap())
        .collect()
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("coverage_14");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| coverage(black_box(14), exec).unwrap())
        });
    }
    g.finish();

    let ws = words(12);
    let mut g = c.benchmark_group("primitivity_agreement_12");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(&ws, |w| primitivity_agreement(w).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("sweep_blocks_10");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep_blocks(black_box(10), None, exec).unwrap())
        });
    }
    g.finish();

    let alpha = rat(1024, 945);
    let mut g = c.benchmark_group("birkhoff_1e6");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| birkhoff_frequency(&alpha, 1_000_000, 7, SimMode::Float, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
