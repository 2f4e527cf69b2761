use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rorbk_bench::{dense_system, sparse_matrix};
use rorbk_core::fgmres::{fab_gmres_solve, FgmresConfig};
use rorbk_core::linalg::{factor_block, regularized_apply, RowBlock};
use rorbk_core::solvers::ror_bk_solve;
use rorbk_core::SolverConfig;

fn matvec(c: &mut Criterion) {
    let mut g = c.benchmark_group("matvec");
    let dense = dense_system(2000, 200).a;
    let sparse = sparse_matrix(20_000, 2000, 10);
    let xd = vec![1.0; 200];
    let yd = vec![1.0; 2000];
    let xs = vec![1.0; 2000];
    let ys = vec![1.0; 20_000];
    g.bench_function("dense 2000x200", |b| {
        b.iter(|| dense.matvec(black_box(&xd)).unwrap())
    });
    g.bench_function("dense 2000x200 transpose", |b| {
        b.iter(|| dense.matvec_transpose(black_box(&yd)).unwrap())
    });
    g.bench_function("csr 20000x2000", |b| {
        b.iter(|| sparse.matvec(black_box(&xs)).unwrap())
    });
    g.bench_function("csr 20000x2000 transpose", |b| {
        b.iter(|| sparse.matvec_transpose(black_box(&ys)).unwrap())
    });
    g.finish();
}

fn factor(c: &mut Criterion) {
    let mut g = c.benchmark_group("block factor");
    let sys = dense_system(2000, 200);
    for s in [25, 100, 400] {
        let block = RowBlock::fixed(&sys.a, 0..s).unwrap();
        g.bench_with_input(BenchmarkId::new("cholesky", s), &block, |b, block| {
            b.iter(|| factor_block(black_box(block), 1e-6 * s as f64).unwrap())
        });
        let f = factor_block(&block, 1e-6 * s as f64).unwrap();
        let x = vec![0.0; 200];
        g.bench_with_input(BenchmarkId::new("apply", s), &block, |b, block| {
            b.iter(|| regularized_apply(&f, block, &block.residual(&sys.b, black_box(&x))).unwrap())
        });
    }
    g.finish();
}

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    let sys = dense_system(2000, 200);
    let cfg = SolverConfig::default();
    g.bench_function("ror-bk 2000x200", |b| {
        b.iter(|| ror_bk_solve(&sys, vec![0.0; 200], black_box(&cfg)).unwrap())
    });
    let five = SolverConfig {
        max_iters: 5,
        tol_rrn: 1e-300,
        ..cfg.clone()
    };
    g.bench_function("ror-bk 5 iterations", |b| {
        b.iter(|| ror_bk_solve(&sys, vec![0.0; 200], black_box(&five)).unwrap())
    });
    let fcfg = FgmresConfig {
        inner: SolverConfig {
            block_rows: 25,
            ..cfg
        },
        ..FgmresConfig::default()
    };
    g.bench_function("fab-gmres 2000x200", |b| {
        b.iter(|| fab_gmres_solve(&sys, vec![0.0; 200], black_box(&fcfg)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, matvec, factor, solve);
criterion_main!(benches);
