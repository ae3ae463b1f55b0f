use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dinat::corpus::{corpus_entries, model_suite, run_corpus};
use dinat::finsem::random::random_composition_search;
use dinat::par::Exec;

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn corpus_sweep(c: &mut Criterion) {
    let (entries, models) = (corpus_entries(), model_suite());
    let mut g = c.benchmark_group("corpus");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(exec), &exec, |b, &exec| {
            b.iter(|| black_box(run_corpus(&entries, &models, exec)))
        });
    }
    g.finish();
}

fn composition_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("composition-search");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(exec), &exec, |b, &exec| {
            b.iter(|| black_box(random_composition_search(2024, 50, 2000, exec).unwrap().with_witness))
        });
    }
    g.finish();
}

criterion_group!(benches, corpus_sweep, composition_search);
criterion_main!(benches);
