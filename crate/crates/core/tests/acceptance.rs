//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use soglasso::cli::experiments::{
    penalty_tables, phase_curve, run_phase, run_toy_regression, run_width, Method, PhaseSpec, RowStatus, ToySpec,
    WidthSpec,
};
use soglasso::cli::default_eta1_fracs;
use soglasso::groups::{DuplicationMap, GroupLayout};
use soglasso::meanwidth::relaxation_check;
use soglasso::penalty::{eval_penalty, PenaltyParams, DEFAULT_TOL};
use soglasso::prox::{prox_sparse_group, ProxStep};
use soglasso::simulate::{rng_for, Covariance, DesignSpec, ObservationModel};
use soglasso::solver::{fit, Loss, SolverConfig};

use common::{grid_minimize, lasso_cd, lasso_objective, latent_norm_4d, sgl_prox_objective, within_grid_resolution};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed < limit;
    println!(
        "[{}] criterion {id:>2} {name}: {} ({:.1}s, limit {}s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn c1_penalty_tables() -> Outcome {
    let cells = penalty_tables().expect("tables evaluate");
    let worst = cells.iter().filter(|c| c.relation == "equal").map(|c| c.delta()).fold(0.0, f64::max);
    let failing = cells.iter().filter(|c| !c.ok()).count();
    let cli = Command::new(env!("CARGO_BIN_EXE_soglasso")).arg("penalty-table").output().expect("binary runs");
    Outcome {
        pass: failing == 0 && cli.status.success(),
        detail: format!("{} cells, max |delta| {worst:.2e}, {failing} failing, cli exit {:?}", cells.len(), cli.status.code()),
    }
}

fn c2_norm_axioms() -> Outcome {
    let mut rng = rng_for(2, 0);
    let mut worst_h = 0.0_f64;
    let mut worst_t = f64::NEG_INFINITY;
    for _ in 0..500 {
        let layout = loop {
            let count = rng.random_range(2..=6);
            let size = rng.random_range(2..=8);
            let shift = rng.random_range(1..size);
            if shift * (count - 1) + size <= 50 {
                break GroupLayout::chain(count, size, shift).unwrap();
            }
        };
        let p = layout.dim();
        let mut draw = || -> Array1<f64> { (0..p).map(|_| rng.random_range(-3.0..3.0)).collect() };
        let (x, y) = (draw(), draw());
        let gamma: f64 = rng.random_range(-4.0..4.0);
        let params = PenaltyParams::new(rng.random_range(0.0..3.0), rng.random_range(1..4)).unwrap();
        let h = |v: &Array1<f64>| eval_penalty(v.view(), &layout, &params, DEFAULT_TOL).unwrap().objective;
        let (hx, hy) = (h(&x), h(&y));
        worst_h = worst_h.max((h(&(gamma * &x)) - gamma.abs() * hx).abs());
        worst_t = worst_t.max(h(&(&x + &y)) - hx - hy);
    }
    Outcome {
        pass: worst_h <= 1e-4 && worst_t <= 1e-4,
        detail: format!("500 tuples, max homogeneity error {worst_h:.2e}, max triangle excess {worst_t:.2e}"),
    }
}

fn c3_prox_oracle() -> Outcome {
    let mut rng = rng_for(3, 0);
    let mut mismatches = 0;
    for dim in [1usize, 2] {
        let map = DuplicationMap::new(&GroupLayout::contiguous(1, dim).unwrap());
        for _ in 0..200 {
            let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
            let (eta1, mu) = (rng.random_range(0.05..1.5), rng.random_range(0.0..3.0));
            let z = prox_sparse_group(Array1::from(w.clone()).view(), &map, ProxStep::new(eta1, mu).unwrap()).unwrap();
            let f = |v: &[f64]| sgl_prox_objective(v, &w, eta1, mu);
            let grid = grid_minimize(f, dim, 3.0, 1e-3, 41, 10.0);
            let z = z.to_vec();
            if !(f(&z) <= f(&grid) + 1e-12 && within_grid_resolution(&z, &grid, f, 1e-3)) {
                mismatches += 1;
            }
        }
    }
    let layout = GroupLayout::chain(5, 4, 2).unwrap();
    let map = DuplicationMap::new(&layout);
    let mut expansive = 0;
    for _ in 0..1000 {
        let d = layout.total_size();
        let a: Array1<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let b: Array1<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let step = ProxStep::new(rng.random_range(0.0..2.0), rng.random_range(0.0..3.0)).unwrap();
        let pa = prox_sparse_group(a.view(), &map, step).unwrap();
        let pb = prox_sparse_group(b.view(), &map, step).unwrap();
        let lhs = (&pa - &pb).mapv(|v| v * v).sum().sqrt();
        let rhs = (&a - &b).mapv(|v| v * v).sum().sqrt();
        expansive += (lhs > rhs + 1e-12) as usize;
    }
    Outcome {
        pass: mismatches == 0 && expansive == 0,
        detail: format!("400 grid instances, {mismatches} mismatches; 1000 pairs, {expansive} expansive"),
    }
}

fn gaussian(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = rng_for(seed, 40);
    Array2::from_shape_simple_fn((rows, cols), || rng.sample(StandardNormal))
}

fn tight(eta1: f64, lambda1: f64) -> SolverConfig {
    SolverConfig {
        eta1,
        params: PenaltyParams::new(lambda1, 1).unwrap(),
        max_iters: 100_000,
        rel_tol: 1e-14,
        ..SolverConfig::default()
    }
}

fn c4_special_cases() -> Outcome {
    let mut worst_gap = 0.0_f64;
    for problem in 0..20u64 {
        let phi = gaussian(50, 30, 400 + problem);
        let mut rng = rng_for(400 + problem, 1);
        let truth: Array1<f64> = (0..30).map(|j| if j % 5 == 0 { rng.random_range(-2.0..2.0) } else { 0.0 }).collect();
        let y = phi.dot(&truth) + (0..50).map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal)).collect::<Array1<f64>>();
        let (eta1, lambda1) = (1.0 + problem as f64, 0.5);
        let weight = eta1 * (1.0 + lambda1);
        let ours = fit(phi.view(), y.view(), &GroupLayout::singletons(30).unwrap(), Loss::Squared, &tight(eta1, lambda1)).unwrap();
        let cd = lasso_cd(phi.view(), y.view(), weight, 100_000);
        let gap = (lasso_objective(phi.view(), y.view(), ours.x_hat.view(), weight)
            - lasso_objective(phi.view(), y.view(), cd.view(), weight))
        .abs();
        worst_gap = worst_gap.max(gap);
    }
    let layout = GroupLayout::new(vec![vec![0, 1, 2], vec![2, 3]], 4).unwrap();
    let phi = gaussian(20, 4, 450);
    let y = phi.dot(&ndarray::array![1.0, -0.5, 0.8, 0.3]);
    let eta1 = 4.0;
    let ours = fit(phi.view(), y.view(), &layout, Loss::Squared, &tight(eta1, 0.0)).unwrap();
    let objective = |x: &[f64]| {
        let r = &y - &phi.dot(&Array1::from(x.to_vec()));
        0.5 * r.dot(&r) + eta1 * latent_norm_4d(x)
    };
    let grid = grid_minimize(objective, 4, 2.0, 1e-3, 15, 3.0);
    let worst_coord = (0..4).map(|i| (ours.x_hat[i] - grid[i]).abs()).fold(0.0, f64::max);
    Outcome {
        pass: worst_gap <= 1e-5 && worst_coord <= 1e-2,
        detail: format!("lasso objective gap {worst_gap:.2e}; latent group lasso max |delta| {worst_coord:.2e}"),
    }
}

fn recovery_spec(n_grid: Vec<usize>, covariance: Covariance) -> PhaseSpec {
    PhaseSpec {
        layout: GroupLayout::contiguous(25, 4).unwrap(),
        k: 3,
        l: 2,
        n_grid,
        trials: 20,
        model: ObservationModel::Sign,
        covariance,
        methods: vec![Method::Soglasso],
        eta1_frac: 0.3,
        lambda1: 1.0,
        debias: true,
        seed: 5,
    }
}

fn c5_recovery_scaling() -> Outcome {
    let rows = run_phase(&recovery_spec(vec![50, 100, 200, 400], Covariance::Identity)).unwrap();
    let curve = phase_curve(&rows, Method::Soglasso);
    let decreasing = curve
        .windows(2)
        .all(|w| w[1].mean < w[0].mean + 2.0 * w[0].std_error.max(w[1].std_error));
    let last = curve.last().unwrap();
    let failures: usize = curve.iter().map(|c| c.failures).sum();
    let text: Vec<String> = curve.iter().map(|c| format!("n={} {:.4}±{:.4}", c.n, c.mean, c.std_error)).collect();
    Outcome {
        pass: decreasing && last.mean < 0.1 && failures == 0,
        detail: text.join(", "),
    }
}

fn c6_toy_ordering() -> Outcome {
    let spec = ToySpec {
        layout: GroupLayout::chain(25, 6, 4).unwrap(),
        k: 5,
        alphas: vec![0.2, 1.0],
        n: 100,
        sigma: 0.1,
        trials: 25,
        methods: Method::ALL.to_vec(),
        eta1_fracs: default_eta1_fracs(),
        lambda1_grid: vec![0.1, 0.3, 1.0, 3.0, 10.0],
        seed: 6,
    };
    let rows = run_toy_regression(&spec).unwrap();
    let get = |m: Method, a: f64| rows.iter().find(|r| r.method == m && r.alpha == a).unwrap();
    let (so2, og2, gl2) = (get(Method::Soglasso, 0.2), get(Method::Oglasso, 0.2), get(Method::Glasso, 0.2));
    let (so1, og1) = (get(Method::Soglasso, 1.0), get(Method::Oglasso, 1.0));
    let lasso1 = get(Method::Lasso, 1.0);
    let sparse_ok = so2.mean_mse < og2.mean_mse && so2.mean_mse < gl2.mean_mse;
    let dense_ok = (so1.mean_mse - og1.mean_mse).abs() <= 2.0 * so1.std_error.max(og1.std_error);
    let lasso_worst = Method::ALL
        .iter()
        .filter(|m| **m != Method::Lasso)
        .all(|m| lasso1.mean_mse > get(*m, 1.0).mean_mse);
    let text: Vec<String> = rows.iter().map(|r| format!("{}@{}={:.2e}", r.method, r.alpha, r.mean_mse)).collect();
    Outcome {
        pass: sparse_ok && dense_ok && lasso_worst,
        detail: text.join(" "),
    }
}

fn c7_width() -> Outcome {
    let rows = run_width(&WidthSpec { seed: 7, ..WidthSpec::default() }).unwrap();
    let count = |kind: &str| rows.iter().filter(|r| r.kind == kind).count();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.status != RowStatus::Pass)
        .map(|r| format!("{} K={} L={} k={} l={}", r.kind, r.groups, r.size, r.k, r.l))
        .collect();
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} width rows, {} monotonicity rows, {} chi-square rows, {} not passing {:?}",
            count("width"),
            count("monotone"),
            count("chisq"),
            bad.len(),
            bad
        ),
    }
}

fn c8_relaxation() -> Outcome {
    let cases: Vec<(GroupLayout, usize, usize, f64)> = vec![
        (GroupLayout::contiguous(6, 4).unwrap(), 2, 2, 1.0),
        (GroupLayout::contiguous(5, 5).unwrap(), 3, 1, 0.5),
        (GroupLayout::contiguous(4, 3).unwrap(), 1, 3, 2.0),
        (GroupLayout::chain(6, 6, 4).unwrap(), 2, 3, 1.0),
    ];
    let mut worst = 0.0_f64;
    let mut witness_err = 0.0_f64;
    let mut witnesses = 0;
    for (i, (layout, k, l, lambda1)) in cases.iter().enumerate() {
        let params = PenaltyParams::new(*lambda1, *l).unwrap();
        let report = relaxation_check(layout, *k, *l, &params, 200, &mut rng_for(8, i as u64)).unwrap();
        worst = worst.max(report.worst_ratio);
        if let Some(r) = report.witness_ratio {
            witnesses += 1;
            witness_err = witness_err.max((r - 1.0).abs());
        }
    }
    Outcome {
        pass: worst <= 1.0 + 1e-4 && witnesses > 0 && witness_err <= 1e-4,
        detail: format!("worst ratio {worst:.6}, {witnesses} witnesses with max |ratio - 1| {witness_err:.2e}"),
    }
}

fn c9_correlation() -> Outcome {
    let mut means = Vec::new();
    let mut text = Vec::new();
    for rho in [0.0, 0.8, 0.95] {
        let cov = if rho == 0.0 { Covariance::Identity } else { Covariance::Ar1(rho) };
        let kappa = DesignSpec { n: 1, p: 100, covariance: cov.clone(), seed: 0 }.condition_number().unwrap();
        let rows = run_phase(&recovery_spec(vec![200], cov)).unwrap();
        let c = phase_curve(&rows, Method::Soglasso)[0];
        text.push(format!("rho={rho} kappa={kappa:.0} {:.4}±{:.4}", c.mean, c.std_error));
        means.push(c.mean);
    }
    Outcome {
        pass: means.windows(2).all(|w| w[1] >= w[0]),
        detail: text.join(", "),
    }
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str, args: &[&str]| -> Vec<u8> {
        let path = tmp.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_soglasso"))
            .args(args)
            .args(["--seed", "10", "--reproducible", "--jobs", jobs, "--out", path.to_str().unwrap()])
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let commands: [&[&str]; 3] = [
        &["phase", "--n", "40,80", "--trials", "4", "--methods", "lasso,glasso,oglasso,soglasso"],
        &["toy-regression", "--groups", "6", "--k", "2", "--n", "30", "--trials", "3", "--alphas", "0.5,1"],
        &["width", "--trials", "1000"],
    ];
    let mut identical = 0;
    for (i, args) in commands.iter().enumerate() {
        let a = run(&format!("a{i}.csv"), "1", args);
        let b = run(&format!("b{i}.csv"), "3", args);
        identical += (a == b && !a.is_empty()) as usize;
    }
    Outcome {
        pass: identical == commands.len(),
        detail: format!("{identical}/{} commands byte-identical across reruns", commands.len()),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        check(1, "penalty tables", secs(5), c1_penalty_tables),
        check(2, "norm axioms", secs(120), c2_norm_axioms),
        check(3, "prox oracle", secs(60), c3_prox_oracle),
        check(4, "special-case solvers", secs(120), c4_special_cases),
        check(5, "recovery scaling", secs(300), c5_recovery_scaling),
        check(6, "toy regression ordering", secs(600), c6_toy_ordering),
        check(7, "width bounds", secs(180), c7_width),
        check(8, "relaxation tightness", secs(120), c8_relaxation),
        check(9, "correlated designs", secs(300), c9_correlation),
        check(10, "determinism", secs(300), c10_determinism),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
