use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use supergrade::catalog::{self, entries, make, Args, Role};
use supergrade::par::Exec;
use supergrade::superalg::{check_identity_with, check_super_leibniz_with, SuperAlgebra};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn law_sweep() -> Vec<SuperAlgebra> {
    let mut out = Vec::new();
    for e in entries().iter().filter(|e| e.role == Role::Law) {
        let top = |r: catalog::Range| r.max.unwrap_or(6).min(6);
        for n in e.n.min..=top(e.n) {
            for m in e.m.min..=top(e.m) {
                if let Some(a) = make(e.id, &Args::dims(n, m)).ok().and_then(|b| b.algebra()) {
                    out.push(a);
                }
            }
        }
    }
    out
}

fn bench(c: &mut Criterion) {
    let ng = catalog::ng(8, 8).unwrap();
    let gamma = catalog::leibniz_family(7, 7, &BTreeMap::new()).unwrap().algebra;
    let sweep = law_sweep();

    let mut g = c.benchmark_group("identity");
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::new("NG 8,8", name), &exec, |b, &e| {
            b.iter(|| check_identity_with(&ng, e))
        });
        g.bench_with_input(BenchmarkId::new("gamma 7,7", name), &exec, |b, &e| {
            b.iter(|| check_super_leibniz_with(&gamma, e).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("catalog sweep", name), &exec, |b, &e| {
            b.iter(|| sweep.iter().map(|a| check_identity_with(a, e).len()).sum::<usize>())
        });
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench
}
criterion_main!(benches);
