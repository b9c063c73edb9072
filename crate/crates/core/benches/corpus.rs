use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ordfree::catalog::example_action;
use ordfree::dirprod::{relation_search, sym4_corpus};
use ordfree::freegroup::{sample_reduced_word, witness_corpus, Budget, GeneratorId, Word};
use ordfree::par::Exec;

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn bench_witness(c: &mut Criterion) {
    let a = example_action();
    let gens = [GeneratorId::named("f"), GeneratorId::named("g")];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let words: Vec<Word> = (0..400).map(|_| sample_reduced_word(&mut rng, &gens, 16)).collect();
    let budget = Budget::default();
    let mut group = c.benchmark_group("witness_corpus");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| witness_corpus(&a, &words, &budget, exec))
        });
    }
    group.finish();
}

fn bench_relations(c: &mut Criterion) {
    let corpus = sym4_corpus();
    let set = corpus[2..5].to_vec();
    let mut group = c.benchmark_group("relation_search");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| relation_search(&set, 8, 10_000_000, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_witness, bench_relations);
criterion_main!(benches);
