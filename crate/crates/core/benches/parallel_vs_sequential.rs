//! Same workloads on one worker and on the default pool. Build with
//! `--no-default-features` to time the rayon-free fallback instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fp_core::complex::clique_lift;
use fp_core::fp::{build_operators, propagate_features};
use fp_core::higcn::{forward, init_params, Head, HigcnConfig};
use fp_core::par;
use fp_core::sparse::DenseMatrix;
use fp_core::synth;

const POOLS: [(&str, usize); 2] = [("one_thread", 1), ("default", 0)];

fn workloads(c: &mut Criterion) {
    let g = synth::erdos_renyi(1500, 0.01, 7);
    let n = g.node_count();
    let x = DenseMatrix::from_fn(n, 32, |i, j| ((i * 7 + j * 3) % 17) as f64 / 17.0);
    let ops = build_operators(&clique_lift(&g, 3).unwrap(), 3).unwrap();
    let feats = propagate_features(&ops, &x, 10).unwrap();
    let cfg = HigcnConfig { orders: 3, hops: 10, input_dim: 32, hidden: 64, outputs: 8, alpha: 0.1, layers: 2, head: Head::LogSoftmax };
    let params = init_params(cfg, 0).unwrap();
    let a = &ops[0].a_tilde;

    let mut group = c.benchmark_group("fp");
    group.sample_size(20);
    for (name, jobs) in POOLS {
        group.bench_with_input(BenchmarkId::new("spmm", name), &jobs, |b, &jobs| {
            b.iter(|| par::with_jobs(jobs, || black_box(a.spmm_dense(&x).unwrap())))
        });
        group.bench_with_input(BenchmarkId::new("propagate", name), &jobs, |b, &jobs| {
            b.iter(|| par::with_jobs(jobs, || black_box(propagate_features(&ops, &x, 10).unwrap())))
        });
        group.bench_with_input(BenchmarkId::new("forward", name), &jobs, |b, &jobs| {
            b.iter(|| par::with_jobs(jobs, || black_box(forward(&params, &feats).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, workloads);
criterion_main!(benches);
