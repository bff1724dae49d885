//! Parallel engines against a single worker. Build with
//! `--no-default-features` to time the sequential fallback instead; both
//! paths produce identical numbers.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treecode::distance::random_tree_distance;
use treecode::par::with_threads;
use treecode::pauli::{opt152, Pauli};
use treecode::popdyn::{Dynamics, Model, SiteNoise};
use treecode::sampler::sample_and_decode;
use treecode::tensors::Channel;
use treecode::tree::{RTilde, Tree};

/// Worker counts compared: one, and the library default (0).
const WORKERS: [(usize, &str); 2] = [(1, "one-thread"), (0, "default")];

fn popdyn_step(c: &mut Criterion) {
    let rt = RTilde::new(&opt152(), Pauli::X).unwrap();
    let model = Model::general(&rt, SiteNoise::depolarizing(0.15).unwrap(), SiteNoise::noiseless());
    let dynamics = Dynamics::new(model).unwrap();
    let pop = dynamics.init(50_000, &mut ChaCha8Rng::seed_from_u64(1));
    let mut g = c.benchmark_group("popdyn_step_m50k");
    g.sample_size(10);
    for (threads, label) in WORKERS {
        g.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| with_threads(threads, || black_box(dynamics.step(&pop, 7, 0).unwrap())))
        });
    }
    g.finish();
}

fn random_distance(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_tree_distance_t10_200");
    g.sample_size(10);
    for (threads, label) in WORKERS {
        g.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| with_threads(threads, || black_box(random_tree_distance(10, 200, Pauli::Z, 3).unwrap())))
        });
    }
    g.finish();
}

fn direct_sampling(c: &mut Criterion) {
    let tree = Tree::uniform(8, opt152(), Pauli::X).unwrap();
    let leaf = Channel::depolarizing(0.15).unwrap();
    let mut g = c.benchmark_group("sample_and_decode_t8_2k");
    g.sample_size(10);
    for (threads, label) in WORKERS {
        g.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| with_threads(threads, || black_box(sample_and_decode(&tree, &leaf, None, 2000, 5).unwrap())))
        });
    }
    g.finish();
}

criterion_group!(engines, popdyn_step, random_distance, direct_sampling);
criterion_main!(engines);
