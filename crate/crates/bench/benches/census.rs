use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graphlet_core::{
    canonical_form, esu_census, generate, gtrie_census, gtrie_census_parallel, random, GTrie,
    SmallGraph,
};

fn bench_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    group.bench_function("undirected_k5", |b| b.iter(|| generate(5, false).unwrap()));
    group.bench_function("directed_k4", |b| b.iter(|| generate(4, true).unwrap()));
    group.finish();
}

fn bench_trie_build(c: &mut Criterion) {
    let set = generate(4, true).unwrap();
    c.bench_function("gtrie_build_directed_k4", |b| {
        b.iter(|| GTrie::build(set.clone()))
    });
}

fn bench_canonical(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = random::gnm_digraph(5, 12, &mut rng);
    let verts: Vec<u32> = (0..5).collect();
    let small = SmallGraph::from_graph(&g, &verts);
    c.bench_function("canonical_form_size5", |b| b.iter(|| canonical_form(&small)));
}

fn bench_census_engines(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random::gnm_digraph(400, 1200, &mut rng);
    let mut group = c.benchmark_group("census_directed_n400_m1200");
    group.sample_size(10);
    for k in [3usize, 4] {
        let trie = GTrie::build(generate(k, true).unwrap());
        group.bench_with_input(BenchmarkId::new("gtrie", k), &k, |b, _| {
            b.iter(|| gtrie_census(&g, &trie).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("esu_oracle", k), &k, |b, _| {
            b.iter(|| esu_census(&g, k, trie.set()).unwrap())
        });
    }
    group.finish();
}

fn bench_parallel_scaling(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = random::gnm_digraph(1000, 3000, &mut rng);
    let trie = GTrie::build(generate(4, true).unwrap());
    let mut group = c.benchmark_group("census_workers");
    group.sample_size(10);
    for workers in [1usize, 2, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &w| {
            b.iter(|| gtrie_census_parallel(&g, &trie, w).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_generation,
    bench_trie_build,
    bench_canonical,
    bench_census_engines,
    bench_parallel_scaling
);
criterion_main!(benches);
