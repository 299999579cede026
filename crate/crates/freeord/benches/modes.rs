//! Sequential vs parallel sweeps: the consistency harness and a
//! distributive-lattice oracle comparison.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use freeord::dlat::{decide_dl, oracle_dl, DlTerm};
use freeord::exec::ExecMode;
use freeord::ntheory::consistency_check;
use freeord::Preorder;

fn bench_consistency(c: &mut Criterion) {
    let mut group = c.benchmark_group("consistency_check");
    group.sample_size(10);
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &mode,
            |b, &mode| {
                b.iter(|| {
                    let r = consistency_check(3, 2, mode).unwrap();
                    assert!(r.consistent);
                })
            },
        );
    }
    group.finish();
}

fn dl_pairs() -> Vec<(DlTerm, DlTerm)> {
    let mut terms: Vec<DlTerm> = ["a", "b", "c"].iter().map(|g| DlTerm::gen(*g)).collect();
    let atoms = terms.clone();
    for x in &atoms {
        for y in &atoms {
            terms.push(DlTerm::meet(vec![x.clone(), y.clone()]));
            terms.push(DlTerm::join(vec![x.clone(), y.clone()]));
        }
    }
    let mut pairs = Vec::new();
    for x in &terms {
        for y in &terms {
            pairs.push((x.clone(), y.clone()));
        }
    }
    pairs
}

fn bench_dl_sweep(c: &mut Criterion) {
    let preorder = Preorder::new(
        ["a", "b", "c"].map(String::from),
        [("a".to_string(), "b".to_string())],
        [],
        [],
    )
    .unwrap();
    let pairs = dl_pairs();
    let mut group = c.benchmark_group("dl_oracle_sweep");
    group.sample_size(10);
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &mode,
            |b, &mode| {
                b.iter(|| {
                    let ok = mode.all(pairs.clone(), |(x, y)| {
                        decide_dl(&preorder, &x, &y).unwrap()
                            == oracle_dl(&preorder, &x, &y).unwrap()
                    });
                    assert!(ok);
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_consistency, bench_dl_sweep);
criterion_main!(benches);
