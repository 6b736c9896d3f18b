use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lambda_sync::builtins::builtin;
use lambda_sync::certificate::Horizon;
use lambda_sync::lambda_graph::build_lambda_sync_system;
use lambda_sync::matrix::{extract_matrix_systems, group_invariants, smith_normal_form, IntMatrix};
use lambda_sync::synchronization::{check_lambda_synchronizing, sync_tables};

fn builds(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    for (name, l) in [("golden-mean", 8), ("even-shift", 8), ("dyck-2", 3), ("fibonacci", 4)] {
        let o = builtin(name).unwrap();
        group.bench_function(format!("{name} L={l}"), |b| {
            b.iter(|| build_lambda_sync_system(black_box(o.as_ref()), l, 8, 8).unwrap())
        });
    }
    group.finish();
}

fn tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("sync tables");
    group.sample_size(10);
    for name in ["markov-dyck", "thue-morse"] {
        let o = builtin(name).unwrap();
        group.bench_function(name, |b| b.iter(|| sync_tables(black_box(o.as_ref()), 4, 8, 8).unwrap()));
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("condition (iii)");
    group.sample_size(10);
    for name in ["golden-mean", "fibonacci", "markov-dyck"] {
        let o = builtin(name).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| check_lambda_synchronizing(black_box(o.as_ref()), Horizon::new(6, 6)))
        });
    }
    group.finish();
}

fn matrices(c: &mut Criterion) {
    let rows: Vec<Vec<i64>> = (0..8)
        .map(|i| (0..8).map(|j| ((i * 7 + j * 13) % 11) as i64 - 5).collect())
        .collect();
    let a = IntMatrix::from_rows(&rows);
    c.bench_function("smith 8x8", |b| b.iter(|| smith_normal_form(black_box(&a))));

    let o = builtin("dyck-2").unwrap();
    let g = build_lambda_sync_system(o.as_ref(), 4, 8, 8).unwrap();
    let (_, ms) = extract_matrix_systems(&g).unwrap();
    c.bench_function("groups dyck-2 L=4", |b| b.iter(|| group_invariants(black_box(&ms)).unwrap()));
}

criterion_group!(benches, builds, tables, checks, matrices);
criterion_main!(benches);
