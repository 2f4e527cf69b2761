//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails or exceeds its time budget.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use rorbk_core::analysis::{
    check_mean_convergence, contraction_bound, initial_solution, weighted_ls_reference,
};
use rorbk_core::blocking::{
    build_sampling_distribution, compute_centroids, compute_cosine_matrix, partition_rows,
};
use rorbk_core::fgmres::{
    fab_gmres_solve, flexible_gmres, FgmresConfig, FgmresReport, TransposePreconditioner,
};
use rorbk_core::generate::{generate_system, planted_system, GeneratorSpec};
use rorbk_core::linalg::vector::norm2;
use rorbk_core::linalg::{factor_block, factor_block_on, regularized_apply, GramSide, RowBlock};
use rorbk_core::mtx::read_matrix_market;
use rorbk_core::rng::{normal_vec, seeded, standard_normal, SolverRng};
use rorbk_core::solvers::{ror_bk_solve, select_residual_block, sobk_solve, ta_reblock_u_solve};
use rorbk_core::{DenseMatrix, LinearSystem, MatrixHandle, SolverConfig, SparseMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(u32, &str, f64, Check); 9] = [
        (1, "woodbury identity", 1.0, woodbury_identity),
        (2, "contraction bound", 5.0, contraction),
        (3, "range-space preservation", 10.0, range_space),
        (
            4,
            "residual-block optimality",
            5.0,
            residual_block_optimality,
        ),
        (5, "initial solution", 2.0, initial_solution_check),
        (6, "weighted-LS mean convergence", 60.0, mean_convergence),
        (7, "desk-scale speed-up", 120.0, desk_speedup),
        (8, "FAB-GMRES optimality", 30.0, fgmres_optimality),
        (9, "convergence regression", 60.0, fixture_regression),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < limit;
        let pass = out.pass && in_time;
        let timing = if in_time {
            format!("{secs:.2}s < {limit}s")
        } else {
            format!("{secs:.2}s exceeds {limit}s")
        };
        println!(
            "criterion {id}: {} {name} [{timing}] {}",
            if pass { "PASS" } else { "FAIL" },
            out.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

fn to_dm(a: &MatrixHandle) -> DMatrix<f64> {
    let d = a.to_dense();
    DMatrix::from_row_slice(d.rows(), d.cols(), d.data())
}

fn rel_diff(p: &[f64], q: &[f64]) -> f64 {
    let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    norm2(&d) / norm2(p).max(norm2(q)).max(f64::MIN_POSITIVE)
}

fn log_uniform(rng: &mut SolverRng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn random_dense(rng: &mut SolverRng, m: usize, n: usize) -> MatrixHandle {
    DenseMatrix::new(m, n, normal_vec(rng, m * n))
        .unwrap()
        .into()
}

/// `U V` with `U: m×r`, `V: r×n`, so the rank is `r` almost surely.
fn low_rank(rng: &mut SolverRng, m: usize, n: usize, r: usize) -> MatrixHandle {
    let u = DMatrix::from_row_slice(m, r, &normal_vec(rng, m * r));
    let v = DMatrix::from_row_slice(r, n, &normal_vec(rng, r * n));
    let p = u * v;
    let rows: Vec<Vec<f64>> = (0..m).map(|i| p.row(i).iter().copied().collect()).collect();
    DenseMatrix::from_rows(&rows).unwrap().into()
}

/// Orthonormal basis of `range(Aᵀ)` from an independent SVD.
fn row_space(a: &MatrixHandle) -> DMatrix<f64> {
    let (m, n) = (a.rows(), a.cols());
    let svd = to_dm(a).svd(false, true);
    let tol = m.max(n) as f64 * f64::EPSILON * svd.singular_values.max();
    let v_t = svd.v_t.unwrap();
    let cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .map(|i| v_t.row(i).transpose())
        .collect();
    DMatrix::from_columns(&cols)
}

fn null_component(basis: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = DVector::from_column_slice(x);
    (&v - basis * (basis.transpose() * &v)).norm()
}

fn woodbury_identity() -> Outcome {
    let mut rng = seeded(101);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let r = rng.random_range(1..=8);
        let c = rng.random_range(1..=8);
        let lambda = log_uniform(&mut rng, 1e-4, 10.0);
        let a = random_dense(&mut rng, r, c);
        let resid = normal_vec(&mut rng, r);
        let m = to_dm(&a);
        let rv = DVector::from_column_slice(&resid);
        let left = m.transpose()
            * (&m * m.transpose() + DMatrix::identity(r, r) * lambda)
                .lu()
                .solve(&rv)
                .unwrap();
        let right = (m.transpose() * &m + DMatrix::identity(c, c) * lambda)
            .lu()
            .solve(&(m.transpose() * &rv))
            .unwrap();
        worst = worst.max(rel_diff(left.as_slice(), right.as_slice()));
        let block = RowBlock::fixed(&a, 0..r).unwrap();
        for side in [GramSide::Row, GramSide::Col] {
            let f = factor_block_on(&block, side, lambda).unwrap();
            let d = regularized_apply(&f, &block, &resid).unwrap();
            worst = worst.max(rel_diff(&d, left.as_slice()));
        }
    }
    Outcome::new(
        worst <= 1e-9,
        format!("50 shapes <= 8x8, max relative gap {worst:.2e}"),
    )
}

fn min_positive_eig(block: &RowBlock<'_>) -> f64 {
    let m = DMatrix::from_row_slice(block.len(), block.cols(), &block.to_dense_rows());
    let g = m.transpose() * &m;
    let eig = SymmetricEigen::new(g).eigenvalues;
    let tol = eig.max() * 1e-10;
    eig.iter()
        .copied()
        .filter(|&e| e > tol)
        .fold(f64::INFINITY, f64::min)
}

fn contraction() -> Outcome {
    let mut rng = seeded(202);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_oracle_gap: f64 = 0.0;
    for i in 0..30 {
        let n = rng.random_range(2..=8);
        // Even cases: tall full-column-rank blocks, any error. Odd cases:
        // wide blocks with the error restricted to the block's row space.
        let s = if i % 2 == 0 {
            rng.random_range(n..=n + 4)
        } else {
            rng.random_range(1..n)
        };
        let a = random_dense(&mut rng, 3 * s, n);
        let x_star = normal_vec(&mut rng, n);
        let b = a.matvec(&x_star).unwrap();
        let block = RowBlock::fixed(&a, 0..s).unwrap();
        let err0 = if i % 2 == 0 {
            normal_vec(&mut rng, n)
        } else {
            block.apply_transpose(&normal_vec(&mut rng, s))
        };
        let x0: Vec<f64> = x_star.iter().zip(&err0).map(|(x, e)| x + e).collect();
        let lambda = log_uniform(&mut rng, 1e-3, 10.0);
        let f = factor_block(&block, lambda).unwrap();
        let d = regularized_apply(&f, &block, &block.residual(&b, &x0)).unwrap();
        let x1: Vec<f64> = x0.iter().zip(&d).map(|(x, d)| x + d).collect();
        let e1: Vec<f64> = x1.iter().zip(&x_star).map(|(x, s)| x - s).collect();
        let bound = lambda / (min_positive_eig(&block) + lambda);
        worst_excess = worst_excess.max(norm2(&e1) - bound * norm2(&err0));
        let lib = contraction_bound(&block, lambda).unwrap();
        worst_oracle_gap = worst_oracle_gap.max((lib - bound).abs() / bound);
    }
    // Rank one: an error along the row contracts by exactly the bound.
    let mut worst_eq: f64 = 0.0;
    for _ in 0..10 {
        let n = rng.random_range(1..=8);
        let a = random_dense(&mut rng, 1, n);
        let block = RowBlock::fixed(&a, 0..1).unwrap();
        let lambda = log_uniform(&mut rng, 1e-3, 10.0);
        let x_star = normal_vec(&mut rng, n);
        let b = a.matvec(&x_star).unwrap();
        let c = standard_normal(&mut rng);
        let row = block.to_dense_rows();
        let x0: Vec<f64> = x_star.iter().zip(&row).map(|(x, r)| x + c * r).collect();
        let f = factor_block(&block, lambda).unwrap();
        let d = regularized_apply(&f, &block, &block.residual(&b, &x0)).unwrap();
        let e0 = norm2(&row) * c.abs();
        let e1: Vec<f64> = x0
            .iter()
            .zip(&d)
            .zip(&x_star)
            .map(|((x, d), s)| x + d - s)
            .collect();
        let bound = lambda / (norm2(&row).powi(2) + lambda);
        worst_eq = worst_eq.max((norm2(&e1) / e0 - bound).abs());
    }
    Outcome::new(
        worst_excess <= 1e-9 && worst_eq <= 1e-9 && worst_oracle_gap <= 1e-9,
        format!(
            "30 updates, max excess over bound {worst_excess:.2e}; rank-1 equality gap {worst_eq:.2e}; library vs eigensolver {worst_oracle_gap:.2e}"
        ),
    )
}

fn range_space() -> Outcome {
    let mut rng = seeded(303);
    // (m, n, rank); rank None means a full-rank Gaussian matrix.
    let shapes: [(usize, usize, Option<usize>); 10] = [
        (50, 50, Some(35)),
        (30, 50, None),
        (20, 45, None),
        (40, 40, Some(25)),
        (50, 30, Some(20)),
        (10, 50, None),
        (25, 25, None),
        (45, 20, None),
        (35, 50, Some(30)),
        (50, 50, Some(12)),
    ];
    let mut worst_iter: f64 = 0.0;
    let mut worst_fab: f64 = 0.0;
    let mut checked = 0;
    for (i, &(m, n, rank)) in shapes.iter().enumerate() {
        let a = match rank {
            Some(r) => low_rank(&mut rng, m, n, r),
            None => random_dense(&mut rng, m, n),
        };
        let sys = LinearSystem::with_solution("r", a, normal_vec(&mut rng, n)).unwrap();
        let x0 = if i % 2 == 0 {
            vec![0.0; n]
        } else {
            sys.a.matvec_transpose(&normal_vec(&mut rng, m)).unwrap()
        };
        let basis = row_space(&sys.a);
        let cfg = SolverConfig {
            block_rows: 10,
            max_iters: 300,
            record_iterates: true,
            seed: i as u64,
            ..SolverConfig::default()
        };
        let (_, report) = ror_bk_solve(&sys, x0.clone(), &cfg).unwrap();
        for x in &report.iterates {
            let nx = norm2(x);
            if nx > 0.0 {
                worst_iter = worst_iter.max(null_component(&basis, x) / nx);
                checked += 1;
            }
        }
        let fcfg = FgmresConfig {
            outer_max: 100,
            inner: SolverConfig {
                block_rows: 10,
                seed: i as u64,
                ..SolverConfig::default()
            },
            ..FgmresConfig::default()
        };
        let (x, _) = fab_gmres_solve(&sys, x0, &fcfg).unwrap();
        worst_fab = worst_fab.max(null_component(&basis, &x) / norm2(&x));
    }
    Outcome::new(
        worst_iter <= 1e-8 && worst_fab <= 1e-8,
        format!(
            "10 systems, {checked} ROR-BK iterates max null/norm {worst_iter:.2e}; FAB-GMRES max {worst_fab:.2e}"
        ),
    )
}

fn residual_block_optimality() -> Outcome {
    let mut rng = seeded(404);
    let mut mismatches = 0;
    for case in 0..200 {
        let m = rng.random_range(1..=12);
        let size = rng.random_range(1..=m);
        // Every fourth case uses small integers so ties are common.
        let r: Vec<f64> = if case % 4 == 0 {
            (0..m).map(|_| rng.random_range(-2i32..=2) as f64).collect()
        } else {
            normal_vec(&mut rng, m)
        };
        let sel = select_residual_block(&r, size).unwrap();
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize == size {
                let s: f64 = (0..m)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| r[i] * r[i])
                    .sum();
                best = best.max(s);
            }
        }
        let chosen: f64 = sel.indices.iter().map(|&i| r[i] * r[i]).sum();
        if sel.indices.len() != size || (chosen - best).abs() > 1e-12 * best.max(1.0) {
            mismatches += 1;
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("200 brute-force cases, {mismatches} mismatches"),
    )
}

fn initial_solution_check() -> Outcome {
    let mut rng = seeded(505);
    let mut worst_rrn: f64 = 0.0;
    let mut worst_null: f64 = 0.0;
    let mut fallbacks = 0;
    for case in 0..100 {
        let m = rng.random_range(1..=30);
        let n = rng.random_range(1..=30);
        let a: MatrixHandle = match case % 5 {
            // Rows in cancelling pairs: the all-rows sum vanishes.
            0 if m >= 2 => {
                let mut rows = Vec::with_capacity(m);
                for i in 0..m {
                    if i % 2 == 1 {
                        let prev: Vec<f64> = rows
                            .last()
                            .map(|r: &Vec<f64>| r.iter().map(|v| -v).collect())
                            .unwrap();
                        rows.push(prev);
                    } else {
                        rows.push(normal_vec(&mut rng, n));
                    }
                }
                DenseMatrix::from_rows(&rows).unwrap().into()
            }
            1 => {
                let mut trip = Vec::new();
                for i in 0..m {
                    for j in 0..n {
                        if rng.random::<f64>() < 0.15 {
                            trip.push((i, j, standard_normal(&mut rng)));
                        }
                    }
                }
                SparseMatrix::from_triplets(m, n, &trip).unwrap().into()
            }
            2 => low_rank(&mut rng, m, n, 1.max(m.min(n) / 2)),
            _ => random_dense(&mut rng, m, n),
        };
        let b = normal_vec(&mut rng, m);
        let init = initial_solution(&a, &b).unwrap();
        if init.x0.iter().all(|v| *v == 0.0) {
            fallbacks += 1;
        }
        let rrn = norm2(&a.residual(&b, &init.x0).unwrap()) / norm2(&b);
        worst_rrn = worst_rrn.max(rrn);
        let nx = norm2(&init.x0);
        if nx > 0.0 && a.nnz() > 0 {
            worst_null = worst_null.max(null_component(&row_space(&a), &init.x0) / nx);
        }
    }
    let id: MatrixHandle = DenseMatrix::identity(2).into();
    let example = initial_solution(&id, &[1.0, 0.0]).unwrap().x0;
    let exact = example == vec![0.5, 0.5];
    Outcome::new(
        worst_rrn <= 1.0 && worst_null <= 1e-8 && exact,
        format!(
            "100 systems ({fallbacks} zero fallbacks), max RRN(x0) {worst_rrn:.4}, max null/norm {worst_null:.2e}; identity example {example:?}"
        ),
    )
}

fn mean_convergence() -> Outcome {
    let mut rng = seeded(606);
    let mut lines = Vec::new();
    let mut ok = true;
    for sys_id in 0..5 {
        let a = random_dense(&mut rng, 10, 5);
        // Noisy right-hand side: x_μ is then a genuinely weighted solution.
        let clean = a.matvec(&normal_vec(&mut rng, 5)).unwrap();
        let b: Vec<f64> = clean
            .iter()
            .map(|v| v + 0.1 * standard_normal(&mut rng))
            .collect();
        let part = partition_rows(10, 2).unwrap();
        let cos = compute_cosine_matrix(&compute_centroids(&a, &part).unwrap());
        let probs = build_sampling_distribution(&cos).probs().to_vec();
        let x0 = vec![0.0; 5];
        let rep =
            check_mean_convergence(&a, &b, &part, &probs, 0.1, &x0, 10_000, 20, sys_id).unwrap();
        let reference = weighted_ls_reference(&a, &b, &part, &probs, 0.1).unwrap();
        // Independent check that x_μ solves the weighted normal equations.
        let ad = to_dm(&a);
        let bv = DVector::from_column_slice(&b);
        let xm = DVector::from_column_slice(&reference.x_mu);
        let lhs = ad.transpose() * &reference.w_bar * &ad * &xm;
        let rhs = ad.transpose() * &reference.w_bar * &bv;
        let normal_gap = (&lhs - &rhs).norm() / rhs.norm();
        let pass = rep.within(3.0) && normal_gap <= 1e-8;
        ok &= pass;
        lines.push(format!(
            "dev {:.2e} <= bound {:.2e} + 3*se {:.2e} (alpha {:.3})",
            rep.deviation, rep.bound, rep.standard_error, rep.alpha
        ));
    }
    Outcome::new(
        ok,
        format!("5 systems 10x5, T=20, 10000 trials: {}", lines.join("; ")),
    )
}

fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

fn desk_speedup() -> Outcome {
    let spec = GeneratorSpec::OnePlusRand { m: 2000, n: 200 };
    let (mut ror, mut sobk, mut ta) = (Vec::new(), Vec::new(), Vec::new());
    let mut all_converged = true;
    for seed in 0..20u64 {
        let sys = generate_system(&spec, seed).unwrap();
        let x0 = vec![0.0; sys.cols()];
        let cfg = SolverConfig {
            seed,
            ..SolverConfig::default()
        };
        let tcfg = SolverConfig {
            seed,
            ..SolverConfig::ta_reblock()
        };
        let (_, r) = ror_bk_solve(&sys, x0.clone(), &cfg).unwrap();
        let (_, s) = sobk_solve(&sys, x0.clone(), &cfg).unwrap();
        let (_, t) = ta_reblock_u_solve(&sys, x0, &tcfg).unwrap();
        all_converged &= r.output_rrn < 1e-6 && s.output_rrn < 1e-6 && t.output_rrn < 1e-6;
        ror.push(r.iterations);
        sobk.push(s.iterations);
        ta.push(t.iterations);
    }
    let (mr, ms, mt) = (median(ror), median(sobk), median(ta));
    let (rs, rt) = (mr / ms, mr / mt);
    Outcome::new(
        rs <= 0.5 && rt <= 0.5 && all_converged,
        format!(
            "2000x200 1+rand, 20 seeds, s=100: median IT ROR-BK {mr}, SOBK-style {ms}, TA-ReBlocK-U {mt}; ratios {rs:.3} and {rt:.3} (need <= 0.5); all RRN < 1e-6: {all_converged}"
        ),
    )
}

/// 100×80 sparse matrix with columns scaled across eight decades.
fn ill_conditioned(seed: u64) -> LinearSystem {
    let mut rng = seeded(seed);
    let (m, n) = (100, 80);
    let mut trip = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if i == j || rng.random::<f64>() < 0.08 {
                let scale = 10f64.powf(-8.0 * j as f64 / (n - 1) as f64);
                trip.push((i, j, standard_normal(&mut rng) * scale));
            }
        }
    }
    let a: MatrixHandle = SparseMatrix::from_triplets(m, n, &trip).unwrap().into();
    planted_system("ill", a, &mut rng).unwrap()
}

fn monotone(report: &FgmresReport) -> bool {
    report.rrn_history.windows(2).all(|w| w[1] <= w[0] + 1e-12)
}

/// Largest relative gap between the small-problem and true residuals, and
/// whether every step is within `1e-8` relative or `1e-14` absolute.
fn tracks_true(report: &FgmresReport) -> (f64, bool) {
    report.rrn_history[1..]
        .iter()
        .zip(&report.true_rrn_history)
        .fold((0.0f64, true), |(worst, ok), (est, tr)| {
            let gap = (est - tr).abs();
            (
                worst.max(gap / tr.max(f64::MIN_POSITIVE)),
                ok && (gap <= 1e-8 * tr || gap <= 1e-14),
            )
        })
}

fn fgmres_optimality() -> Outcome {
    let cfg = FgmresConfig {
        outer_max: 300,
        track_true_residual: true,
        ..FgmresConfig::default()
    };
    let mut all_monotone = true;
    let mut worst_gap: f64 = 0.0;
    let mut tracked = true;
    let mut faster = 0;
    let mut lines = Vec::new();
    for seed in 0..3 {
        let sys = ill_conditioned(seed);
        let sv = to_dm(&sys.a).singular_values();
        let cond = sv.max() / sv.min();
        let x0 = vec![0.0; sys.cols()];
        let (_, fab) = fab_gmres_solve(&sys, x0.clone(), &cfg).unwrap();
        let plain = flexible_gmres(
            &sys.a,
            &sys.b,
            x0,
            &mut TransposePreconditioner::new(&sys.a),
            &cfg,
        )
        .unwrap()
        .report;
        all_monotone &= monotone(&fab) && monotone(&plain);
        for rep in [&fab, &plain] {
            let (gap, ok) = tracks_true(rep);
            worst_gap = worst_gap.max(gap);
            tracked &= ok;
        }
        if cond >= 1e8 && fab.converged && fab.outer_iterations < plain.outer_iterations {
            faster += 1;
        }
        lines.push(format!(
            "cond {cond:.1e}: {} vs {} outer",
            fab.outer_iterations, plain.outer_iterations
        ));
    }
    // Better-conditioned shapes, including a wide one.
    let mut rng = seeded(808);
    for (m, n) in [(60, 40), (40, 60), (30, 30)] {
        let a = random_dense(&mut rng, m, n);
        let sys = LinearSystem::with_solution("g", a, normal_vec(&mut rng, n)).unwrap();
        let small = FgmresConfig {
            inner: SolverConfig {
                block_rows: 10,
                ..SolverConfig::default()
            },
            ..cfg.clone()
        };
        let (_, rep) = fab_gmres_solve(&sys, vec![0.0; n], &small).unwrap();
        all_monotone &= monotone(&rep) && rep.converged;
        let (gap, ok) = tracks_true(&rep);
        worst_gap = worst_gap.max(gap);
        tracked &= ok;
    }
    Outcome::new(
        all_monotone && tracked && faster == 3,
        format!(
            "RRN nonincreasing: {all_monotone}; small vs true residual max relative gap {worst_gap:.2e}; 100x80 FAB-GMRES vs plain GMRES: {}",
            lines.join(", ")
        ),
    )
}

fn fixture_regression() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let budgets_src = std::fs::read_to_string(dir.join("budgets.txt")).unwrap_or_default();
    let budgets: HashMap<&str, usize> = budgets_src
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            Some((it.next()?, it.next()?.parse().ok()?))
        })
        .collect();
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".mtx"))
        .collect();
    names.sort();
    let mut ok = !names.is_empty();
    let mut lines = Vec::new();
    for name in &names {
        let stem = name.trim_end_matches(".mtx");
        let a = read_matrix_market(dir.join(name)).unwrap();
        let sys = planted_system(stem, a, &mut seeded(7)).unwrap();
        let (_, rep) = ror_bk_solve(&sys, vec![0.0; sys.cols()], &SolverConfig::default()).unwrap();
        let verdict = match budgets.get(stem) {
            Some(&budget) if rep.converged && rep.iterations <= budget => {
                format!("{}/{budget}", rep.iterations)
            }
            Some(&budget) => {
                ok = false;
                format!(
                    "{} over budget {budget} (converged {})",
                    rep.iterations, rep.converged
                )
            }
            None => {
                ok = false;
                format!("{} with no recorded budget", rep.iterations)
            }
        };
        lines.push(format!("{stem} {verdict}"));
    }
    Outcome::new(ok, format!("IT/budget: {}", lines.join(", ")))
}
