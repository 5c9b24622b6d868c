//! Acceptance suite A1-A10. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Run with `cargo test -p locmin-cli --test acceptance`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use locmin_core::diagonal_pipeline::{dimension_budget, joint_diagonal_frame};
use locmin_core::equalization::{
    ratio_split, scalar_flatten, solve_finite_rank, two_point_blend, LambdaRule, SolveOptions, SplitResult,
};
use locmin_core::essential_range::{build_infinite_rank, calkin_independent, fixtures, InfiniteRankBuilder};
use locmin_core::operator_model::{compress, random_tuple};
use locmin_core::simplex_geometry::Simplex;
use locmin_core::{ClusterModel, Error, Frame, HermitianTuple};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const A1_SEEDS: u64 = 20;
const A1_RANKS: [usize; 3] = [1, 2, 3];

fn a1_instance(k: usize, seed: u64) -> HermitianTuple {
    let d = dimension_budget(2, k).unwrap().min_dim;
    random_tuple(seed, 2, d, 1.0)
}

fn a1() -> Outcome {
    let mut worst_res = 0.0f64;
    let mut worst_gram = 0.0f64;
    let mut slowest = Duration::ZERO;
    for k in A1_RANKS {
        for seed in 0..A1_SEEDS {
            let ops = a1_instance(k, seed);
            let start = Instant::now();
            let cert = solve_finite_rank(&ops, k, seed, &SolveOptions::default())
                .map_err(|e| format!("k={k} seed={seed}: {e}"))?;
            let took = start.elapsed();
            slowest = slowest.max(took);
            ensure!(cert.rank() == k, "k={k} seed={seed}: rank {}", cert.rank());
            let report = cert.check(&ops).map_err(|e| e.to_string())?;
            ensure!(report.gram_deviation <= 1e-10, "k={k} seed={seed}: gram {:e}", report.gram_deviation);
            ensure!(
                report.max_residual() <= 1e-8 * ops.scale(),
                "k={k} seed={seed}: residual {:e}",
                report.max_residual()
            );
            ensure!(took < Duration::from_secs(5), "k={k} seed={seed}: took {took:?}");
            worst_res = worst_res.max(report.max_residual() / ops.scale());
            worst_gram = worst_gram.max(report.gram_deviation);
        }
    }
    Ok(format!(
        "{} instances, max residual/scale {worst_res:.1e}, max gram {worst_gram:.1e}, slowest {slowest:.2?}",
        A1_RANKS.len() as u64 * A1_SEEDS
    ))
}

fn a2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for trial in 0..100_000 {
        let mag = 10f64.powi(rng.gen_range(-3..=3));
        let a1 = rng.gen_range(-mag..mag);
        let a2 = rng.gen_range(-mag..mag);
        // Hit the degenerate branches often.
        let up = if trial % 10 == 0 { 0.0 } else { rng.gen_range(0.0..mag) };
        let down = if trial % 10 == 1 { 0.0 } else { rng.gen_range(0.0..mag) };
        let (b1, b2) = (a1 - up, a2 + down);
        let w = two_point_blend(a1, a2, b1, b2, 0.0).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!((0.0..=1.0).contains(&w.t), "trial {trial}: t = {}", w.t);
        let scale = [a1, a2, b1, b2].iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let gap = (w.expectation(a1, a2) - w.expectation(b1, b2)).abs();
        if up == 0.0 || down == 0.0 {
            ensure!(gap == 0.0, "trial {trial}: degenerate branch gap {gap:e}");
        }
        ensure!(gap <= 1e-12 * scale, "trial {trial}: gap {gap:e}");
        worst = worst.max(gap / scale);
    }
    Ok(format!("100000 blends, max gap/scale {worst:.1e}, degenerate branches exact"))
}

/// Every `(t, upper, lower)` with `t` among the ratios and disjoint index sets
/// of size `kappa` satisfying the split inequalities.
fn brute_force_splits(alpha: &[f64], beta: &[f64], kappa: usize) -> Vec<(f64, usize, usize)> {
    let len = alpha.len();
    let subsets: Vec<usize> = (0..1usize << len).filter(|m| m.count_ones() as usize == kappa).collect();
    let mut found = Vec::new();
    for j in 0..len {
        let t = alpha[j] / beta[j];
        let up_ok = |m: usize| (0..len).all(|i| m >> i & 1 == 0 || alpha[i] >= t * beta[i]);
        let low_ok = |m: usize| (0..len).all(|i| m >> i & 1 == 0 || alpha[i] <= t * beta[i]);
        for &u in subsets.iter().filter(|&&u| up_ok(u)) {
            if let Some(&l) = subsets.iter().find(|&&l| l & u == 0 && low_ok(l)) {
                found.push((t, u, l));
                break;
            }
        }
    }
    found
}

fn a3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = 1e-9;
    let (mut equal, mut split) = (0, 0);
    for kappa in 1..=3usize {
        for trial in 0..400 {
            let len = 3 * kappa;
            let alpha: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..5.0)).collect();
            let mut beta: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..5.0)).collect();
            let p_match = [0.0, 0.2, 0.5][trial % 3];
            for j in 0..len {
                if rng.gen_bool(p_match) {
                    beta[j] = alpha[j] + rng.gen_range(-0.5..0.5) * tol;
                }
            }
            let matching = (0..len).filter(|&j| (alpha[j] - beta[j]).abs() <= tol).count();
            let out = ratio_split(&alpha, &beta, kappa, tol).map_err(|e| e.to_string())?;
            match out {
                SplitResult::Equal(idx) => {
                    ensure!(matching >= kappa, "kappa={kappa} trial {trial}: equal branch with {matching} matches");
                    ensure!(idx.len() == kappa, "kappa={kappa} trial {trial}: {} equal indices", idx.len());
                    equal += 1;
                }
                SplitResult::Split { t, upper, lower } => {
                    ensure!(matching < kappa, "kappa={kappa} trial {trial}: split despite {matching} matches");
                    let oracle = brute_force_splits(&alpha, &beta, kappa);
                    ensure!(!oracle.is_empty(), "kappa={kappa} trial {trial}: oracle found no split");
                    ensure!(upper.len() == kappa && lower.len() == kappa, "kappa={kappa} trial {trial}: sizes");
                    ensure!(upper.iter().all(|u| !lower.contains(u)), "kappa={kappa} trial {trial}: overlap");
                    ensure!(upper.iter().all(|&j| alpha[j] >= t * beta[j] - tol), "kappa={kappa} trial {trial}: upper");
                    ensure!(lower.iter().all(|&j| alpha[j] <= t * beta[j] + tol), "kappa={kappa} trial {trial}: lower");
                    split += 1;
                }
            }
        }
    }
    Ok(format!("1200 lists (kappa <= 3): {split} splits confirmed by brute force, {equal} equal branches"))
}

fn a4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 1..=16usize {
        for _ in 0..10 {
            let mut diag: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(-20.0..20.0)).collect();
            if rng.gen_bool(0.2) {
                diag[1 % (2 * k)] = diag[0];
            }
            let mut sorted = diag.clone();
            sorted.sort_by(f64::total_cmp);
            let ops = HermitianTuple::from_diagonals(&[diag.clone()]).map_err(|e| e.to_string())?;
            let frame = Frame::canonical(2 * k, &(0..2 * k).collect::<Vec<_>>());
            for rule in [LambdaRule::Mid, LambdaRule::Low, LambdaRule::High] {
                let (flat, lambda) = scalar_flatten(&frame, &diag, rule).map_err(|e| e.to_string())?;
                ensure!(
                    sorted[k - 1] <= lambda && lambda <= sorted[k],
                    "k={k} {}: lambda {lambda} outside",
                    rule.as_str()
                );
                let cmp = &compress(&ops, &flat).map_err(|e| e.to_string())?[0];
                for j in 0..k {
                    let err = (cmp[(j, j)].re - lambda).abs();
                    ensure!(err <= 1e-12 * ops.scale(), "k={k} {}: diagonal off by {err:e}", rule.as_str());
                    worst = worst.max(err / ops.scale());
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} flattenings (k <= 16, all rules), max |diag - lambda|/scale {worst:.1e}"))
}

fn a5() -> Outcome {
    let cases = [(1, 64), (1, 511), (2, 100), (2, 300), (3, 256), (3, 512), (2, 512)];
    let mut worst = 0.0f64;
    for (idx, &(n, d)) in cases.iter().enumerate() {
        let ops = random_tuple(500 + idx as u64, n, d, 1.0);
        let m = (d - 1) / (n + 1) + 1;
        let table = joint_diagonal_frame(&ops, m, idx as u64).map_err(|e| format!("n={n} d={d}: {e}"))?;
        ensure!(table.columns() == m, "n={n} d={d}: {} columns", table.columns());
        let cmp = compress(&ops, &table.frame).map_err(|e| e.to_string())?;
        let off = cmp
            .iter()
            .flat_map(|c| (0..m).flat_map(move |j| (0..m).filter(move |&l| l != j).map(move |l| c[(j, l)].norm())))
            .fold(0.0, f64::max);
        ensure!(off <= 1e-10 * ops.scale(), "n={n} d={d}: off-diagonal {off:e}");
        worst = worst.max(off / ops.scale());
        match joint_diagonal_frame(&ops, m + 1, idx as u64) {
            Err(Error::InsufficientDimension { .. }) => {}
            other => return Err(format!("n={n} d={d}: M+1 gave {:?}", other.map(|t| t.columns()))),
        }
    }
    Ok(format!("{} tuples up to d=512, max off-diagonal/scale {worst:.1e}, M+1 refused", cases.len()))
}

fn random_point_in(s: &Simplex, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..=s.dim()).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    (0..s.dim()).map(|r| w.iter().zip(s.vertices()).map(|(t, v)| t * v[r]).sum()).collect()
}

fn a6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total = 0;
    for n in 2..=4usize {
        let mut trials = 0;
        while trials < 1000 {
            let verts: Vec<Vec<f64>> = (0..=n).map(|_| (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
            let Ok(s) = Simplex::new(verts) else { continue };
            let w = random_point_in(&s, &mut rng);
            let margin = s.interior_margin(&w).map_err(|e| e.to_string())?;
            if margin <= 0.0 {
                continue;
            }
            // Half the trials sit on the boundary of the eps-interior.
            let eps = if trials % 2 == 0 { margin } else { margin * rng.gen_range(0.01..1.0) };
            ensure!(s.eps_interior_contains(&w, eps).unwrap(), "n={n}: drawn point not in eps-interior");
            let perturbed: Vec<Vec<f64>> = s
                .vertices()
                .iter()
                .map(|v| {
                    let dir: Vec<f64> = if trials % 3 == 0 {
                        // Worst case: straight towards the point.
                        w.iter().zip(v).map(|(a, b)| a - b).collect()
                    } else {
                        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
                    };
                    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let len = eps * if trials % 3 == 0 { 1.0 - 1e-9 } else { rng.gen_range(0.0..1.0) };
                    v.iter().zip(&dir).map(|(x, dx)| x + dx * len / norm).collect()
                })
                .collect();
            let Ok(moved) = Simplex::new(perturbed) else {
                return Err(format!("n={n}: perturbed simplex degenerate"));
            };
            ensure!(moved.contains(&w).unwrap(), "n={n} trial {trials}: perturbed simplex lost the point");
            trials += 1;
        }
        total += trials;
    }
    Ok(format!("{total} trials over n = 2, 3, 4, zero failures"))
}

fn affine_rank(points: &[Vec<f64>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let mut rows: Vec<Vec<f64>> =
        points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    let cols = rows[0].len();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else {
            break;
        };
        if rows[p][col].abs() <= 1e-9 {
            continue;
        }
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            let f = rows[i][col] / rows[r][col];
            for j in col..cols {
                rows[i][j] -= f * rows[r][j];
            }
        }
        r += 1;
    }
    r
}

fn a7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut indep, mut dep) = (0, 0);
    for trial in 0..50 {
        let n = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=6usize);
        let r = rng.gen_range(0..=n);
        // Integer lattice in an r-dimensional affine subspace keeps ranks exact.
        let base: Vec<f64> = (0..n).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
        let dirs: Vec<Vec<f64>> = (0..r).map(|_| (0..n).map(|_| rng.gen_range(-2i32..=2) as f64).collect()).collect();
        let mut clusters: Vec<Vec<f64>> = Vec::new();
        for _ in 0..m {
            let c: Vec<f64> = (0..n)
                .map(|i| base[i] + dirs.iter().map(|d| rng.gen_range(-2i32..=2) as f64 * d[i]).sum::<f64>())
                .collect();
            if !clusters.contains(&c) {
                clusters.push(c);
            }
        }
        let model = ClusterModel::diagonal(clusters).map_err(|e| e.to_string())?;
        let oracle = affine_rank(model.clusters()) == n;
        let got = calkin_independent(&model).map_err(|e| e.to_string())?;
        ensure!(got == oracle, "trial {trial}: got {got}, oracle {oracle} for {:?}", model.clusters());
        if oracle {
            indep += 1;
        } else {
            dep += 1;
        }
    }
    let shift = calkin_independent(&fixtures::compact_shift_model(8)).map_err(|e| e.to_string())?;
    ensure!(!shift, "compact shift model reported independent");
    Ok(format!("50 models agree with the rank oracle ({indep} independent, {dep} dependent); compact shift dependent"))
}

fn a8() -> Outcome {
    let model = fixtures::triangle_model();
    let v = [0.25, 0.25];
    let cert = build_infinite_rank(&model, &v, 100, 0).map_err(|e| e.to_string())?;
    let gram = cert.frame.gram_deviation();
    ensure!(gram <= 1e-12, "gram deviation {gram:e}");
    let cmp = compress(&model, &cert.frame).map_err(|e| e.to_string())?;
    let mut diag_err = 0.0f64;
    for (r, mat) in cmp.iter().enumerate() {
        for j in 0..100 {
            diag_err = diag_err.max((mat[(j, j)].re - v[r]).abs());
            ensure!(mat[(j, j)].im == 0.0, "imaginary diagonal");
            for l in 0..100 {
                ensure!(l == j || mat[(j, l)] == Complex64::new(0.0, 0.0), "off-diagonal ({j},{l}) nonzero");
            }
        }
    }
    ensure!(diag_err <= 1e-10, "diagonal off by {diag_err:e}");

    let mut resumed = InfiniteRankBuilder::new(&model, &v, 0).map_err(|e| e.to_string())?;
    resumed.extend(50);
    let snapshot = resumed.clone();
    resumed.extend(100);
    ensure!(resumed.frame() == cert.frame, "resumed frame differs from single run");
    ensure!(snapshot.frame().columns() == &cert.frame.columns()[..50], "first 50 columns differ");
    Ok(format!("100 blocks, gram {gram:.1e}, off-diagonals exactly 0, diag error {diag_err:.1e}, resume identical"))
}

fn a9() -> Outcome {
    match build_infinite_rank(&fixtures::compact_shift_model(8), &[0.0, 0.0], 5, 0) {
        Err(Error::NoInterior(_)) => {}
        other => return Err(format!("compact shift: expected NoInterior, got {:?}", other.map(|c| c.rank()))),
    }
    let d = 2000;
    let tuple = fixtures::alternating_compact(d);
    let cols = fixtures::paired_frame(10)
        .into_columns()
        .into_iter()
        .map(|mut c| {
            c.resize(d, Complex64::new(0.0, 0.0));
            c
        })
        .collect();
    let frame = Frame::finite(d, cols);
    let cmp = compress(&tuple, &frame).map_err(|e| e.to_string())?;
    let worst = cmp[0].iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure!(worst <= 1e-15, "pcp = {worst:e}");
    Ok(format!("compact shift -> NoInterior; paired frame at d={d}: max |pcp| = {worst:.1e}"))
}

fn locmin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_locmin")).args(args).output().expect("spawn locmin");
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap_or(-1), text)
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn a10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    let mut corrupted = 0;
    for k in A1_RANKS {
        let d = dimension_budget(2, k).unwrap().min_dim.to_string();
        for seed in 0..A1_SEEDS {
            let tuple = dir.path().join(format!("t{k}_{seed}.json"));
            let cert = dir.path().join(format!("c{k}_{seed}.json"));
            let seed_s = seed.to_string();
            let (code, out) = locmin(&["gen", "tuple", "--seed", &seed_s, "-n", "2", "-d", &d, "-o", path_str(&tuple)]);
            ensure!(code == 0, "gen k={k} seed={seed}: {code} {out}");
            let k_s = k.to_string();
            let (code, out) =
                locmin(&["solve", path_str(&tuple), "-k", &k_s, "--seed", &seed_s, "-o", path_str(&cert)]);
            ensure!(code == 0, "solve k={k} seed={seed}: {code} {out}");
            let (code, out) = locmin(&["check", path_str(&tuple), path_str(&cert)]);
            ensure!(code == 0, "check k={k} seed={seed}: {code} {out}");
            runs += 1;

            // One corruption per instance, alternating scalar and frame damage.
            let mut json: serde_json::Value =
                serde_json::from_slice(&std::fs::read(&cert).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            if seed % 2 == 0 {
                let s = json["scalars"][0].as_f64().unwrap();
                json["scalars"][0] = serde_json::json!(s + 0.1);
            } else {
                let z = json["frame"][0][0][0].as_f64().unwrap();
                json["frame"][0][0][0] = serde_json::json!(z + 0.05);
            }
            let bad = dir.path().join(format!("bad{k}_{seed}.json"));
            std::fs::write(&bad, serde_json::to_string(&json).unwrap()).map_err(|e| e.to_string())?;
            let (code, out) = locmin(&["check", path_str(&tuple), path_str(&bad)]);
            ensure!(code == 3, "corrupted k={k} seed={seed}: expected 3, got {code} {out}");
            corrupted += 1;
        }
    }
    Ok(format!("{runs} solve/check round trips pass; {corrupted} corrupted certificates fail with code 3"))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        ("A1", "finite rank end-to-end", a1),
        ("A2", "two-point blend oracle", a2),
        ("A3", "ratio split brute force", a3),
        ("A4", "scalar flattening", a4),
        ("A5", "jointly diagonal frame", a5),
        ("A6", "perturbed simplex containment", a6),
        ("A7", "independence vs rank oracle", a7),
        ("A8", "infinite-rank builder", a8),
        ("A9", "compact fixtures", a9),
        ("A10", "CLI round trip", a10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id:<4} PASS  {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("{id:<4} FAIL  {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
