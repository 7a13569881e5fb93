use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use certideld_core::adversary::ComputationalCheater;
use certideld_core::harness::{ev_exp_trace_distance, hybrid_chain, Mode, Scheme};
use certideld_core::Exec;

fn ev_exp(c: &mut Criterion) {
    let mut g = c.benchmark_group("ev_exp_td");
    g.sample_size(10);
    for lambda in [4usize, 6] {
        for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            g.bench_with_input(BenchmarkId::new(name, lambda), &lambda, |bch, &l| {
                bch.iter(|| {
                    ev_exp_trace_distance(Scheme::SecretSharing, &ComputationalCheater, l, Mode::IdealizedHiding, exec)
                        .unwrap()
                        .0
                })
            });
        }
    }
    g.finish();
}

fn hybrids(c: &mut Criterion) {
    let mut g = c.benchmark_group("hybrid_chain");
    g.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        g.bench_function(BenchmarkId::new(name, 4), |bch| {
            bch.iter(|| hybrid_chain(&ComputationalCheater, 4, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, ev_exp, hybrids);
criterion_main!(benches);
