use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use flatpol::exec::Execution;
use flatpol::lorentz::{certify_C_lorentzian, sample_tuples};
use flatpol::matroid::Matroid;
use flatpol::pol::PolCache;

fn certification(c: &mut Criterion) {
    let cases = [
        ("K4", Matroid::graphic(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()),
        ("U44", Matroid::uniform(4, 4).unwrap()),
    ];
    let mut group = c.benchmark_group("certify");
    group.sample_size(10);
    for (name, m) in cases {
        let lattice = m.flats_lattice().unwrap();
        let (k, l) = (lattice.bottom(), lattice.top());
        let mut cache = PolCache::new(lattice.poset());
        cache.pol(k, l).unwrap();
        let d = lattice.d(k, l).unwrap();
        let tuples = sample_tuples(&cache, k, l, d, 32, 1).unwrap();
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, name), &tuples, |b, tuples| {
                b.iter(|| certify_C_lorentzian(&mut cache, k, l, black_box(tuples), None, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn lineality(c: &mut Criterion) {
    let lattice = Matroid::fano().flats_lattice().unwrap();
    let (k, l) = (lattice.bottom(), lattice.top());
    let mut cache = PolCache::new(lattice.poset());
    let mut group = c.benchmark_group("lineality");
    group.sample_size(10);
    for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(label, |b| b.iter(|| cache.check_lineality_invariance(k, l, 64, 3, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, certification, lineality);
criterion_main!(benches);
