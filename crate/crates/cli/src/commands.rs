//! Subcommand bodies. Each returns the process exit status; summaries go to
//! stdout, diagnostics to stderr.

use std::path::Path;

use locmin_core::diagonal_pipeline::dimension_budget;
use locmin_core::equalization::{solve_finite_rank, LambdaRule, SolveOptions};
use locmin_core::essential_range::{build_infinite_rank, calkin_independent, essential_range_polytope, fixtures};
use locmin_core::operator_model::io::{self, OperatorFile};
use locmin_core::operator_model::random_tuple;
use locmin_core::{Certificate, ClusterModel, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ExitStatus, Preset};

fn fail(err: &Error) -> ExitStatus {
    eprintln!("error: {}: {}", err.kind(), err);
    if err.is_infeasible() {
        ExitStatus::Infeasible
    } else {
        ExitStatus::Validation
    }
}

fn read(path: &Path) -> Result<Vec<u8>, ExitStatus> {
    std::fs::read(path).map_err(|e| {
        eprintln!("error: cannot read {}: {}", path.display(), e);
        ExitStatus::Io
    })
}

fn write(path: &Path, contents: &str) -> Result<(), ExitStatus> {
    std::fs::write(path, contents).map_err(|e| {
        eprintln!("error: cannot write {}: {}", path.display(), e);
        ExitStatus::Io
    })
}

macro_rules! tryx {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! tryc {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return fail(&err),
        }
    };
}

pub fn budget(n: usize, k: usize) -> ExitStatus {
    let b = tryc!(dimension_budget(n, k));
    println!("N={} M={} d_min={}", b.pool, b.columns, b.min_dim);
    ExitStatus::Success
}

pub fn gen_tuple(seed: u64, n: usize, d: usize, scale: f64, output: &Path) -> ExitStatus {
    if !(scale.is_finite() && scale > 0.0) {
        return fail(&Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    let t = random_tuple(seed, n, d, scale);
    tryx!(write(output, &io::emit_tuple(&t)));
    println!("wrote tuple n={} d={} seed={} to {}", n, d, seed, output.display());
    ExitStatus::Success
}

fn preset_model(p: Preset) -> ClusterModel {
    match p {
        Preset::Triangle => fixtures::triangle_model(),
        Preset::Segment => fixtures::segment_model(),
        Preset::CompactShift => fixtures::compact_shift_model(8),
        Preset::CollinearSegment => {
            ClusterModel::diagonal(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).expect("distinct clusters")
        }
    }
}

/// Random clusters in `[-1, 1]^n`, with an optional small Hermitian
/// perturbation on the first `support` coordinates.
fn random_model(m: usize, n: usize, support: usize, seed: u64) -> Result<ClusterModel, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clusters = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    let perturb =
        if support == 0 { Vec::new() } else { random_tuple(seed.wrapping_add(1), n, support, 0.1).matrices().to_vec() };
    ClusterModel::new(n, clusters, support, perturb)
}

pub fn gen_model(
    preset: Option<Preset>,
    random: Option<(u32, u32)>,
    support: usize,
    seed: u64,
    output: &Path,
) -> ExitStatus {
    let model = match (preset, random) {
        (Some(p), None) => preset_model(p),
        (None, Some((m, n))) => tryc!(random_model(m as usize, n as usize, support, seed)),
        _ => {
            eprintln!("error: give either --preset or both --clusters and -n");
            return ExitStatus::Validation;
        }
    };
    tryx!(write(output, &io::emit_model(&model)));
    println!(
        "wrote model n={} clusters={} support={} to {}",
        model.n(),
        model.period(),
        model.support(),
        output.display()
    );
    ExitStatus::Success
}

pub struct SolveRequest<'a> {
    pub input: &'a Path,
    pub k: usize,
    pub seed: u64,
    pub tol: f64,
    pub lambda_rule: LambdaRule,
    pub best_effort: bool,
    pub output: Option<&'a Path>,
}

pub fn solve(req: &SolveRequest<'_>) -> ExitStatus {
    let bytes = tryx!(read(req.input));
    let tuple = tryc!(io::parse_tuple(&bytes));
    let opts = SolveOptions { lambda_rule: req.lambda_rule, best_effort: req.best_effort, ..SolveOptions::default() };
    let cert = tryc!(solve_finite_rank(&tuple, req.k, req.seed, &opts));
    if let Some(out) = req.output {
        tryx!(write(out, &io::emit_certificate(&cert)));
    }
    let limit = req.tol * tuple.scale();
    let pass = cert.max_residual() <= limit;
    println!(
        "rank={} scalars={:?} max_residual={:.3e} limit={:.3e} {}",
        cert.rank(),
        cert.scalars,
        cert.max_residual(),
        limit,
        if pass { "PASS" } else { "FAIL" }
    );
    if pass {
        ExitStatus::Success
    } else {
        ExitStatus::Infeasible
    }
}

pub fn check(input: &Path, certificate: &Path, tol: f64, gram_tol: f64) -> ExitStatus {
    let input_bytes = tryx!(read(input));
    let cert_bytes = tryx!(read(certificate));
    let ops = tryc!(io::parse_operator_file(&input_bytes));
    let cert: Certificate = tryc!(io::parse_certificate(&cert_bytes));
    let (report, names) = match &ops {
        OperatorFile::Tuple(t) => (tryc!(cert.check(t)), t.names().to_vec()),
        OperatorFile::Model(m) => (tryc!(cert.check(m)), (1..=m.n()).map(|i| format!("a{i}")).collect()),
    };
    let verdicts = report.operator_pass(tol);
    for ((name, r), ok) in names.iter().zip(&report.residuals).zip(&verdicts) {
        println!("{name}: residual={r:.3e} {}", if *ok { "PASS" } else { "FAIL" });
    }
    let gram_ok = report.gram_pass(gram_tol);
    println!("gram: deviation={:.3e} {}", report.gram_deviation, if gram_ok { "PASS" } else { "FAIL" });
    if gram_ok && verdicts.iter().all(|&v| v) {
        ExitStatus::Success
    } else {
        ExitStatus::Infeasible
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn wess(model: &Path) -> ExitStatus {
    let bytes = tryx!(read(model));
    let model = tryc!(io::parse_model(&bytes));
    let poly = tryc!(essential_range_polytope(&model));
    let independent = tryc!(calkin_independent(&model));
    for v in poly.vertices() {
        println!("vertex {v:?}");
    }
    println!(
        "affine_dim={} interior={} independent={}",
        poly.affine_dim(),
        yes_no(poly.has_interior()),
        yes_no(independent)
    );
    ExitStatus::Success
}

pub fn build_inf(model: &Path, point: &[f64], m: usize, seed: u64, tol: f64, output: Option<&Path>) -> ExitStatus {
    let bytes = tryx!(read(model));
    let model = tryc!(io::parse_model(&bytes));
    let cert = tryc!(build_infinite_rank(&model, point, m, seed));
    if let Some(out) = output {
        tryx!(write(out, &io::emit_certificate(&cert)));
    }
    let limit = tol * model.scale();
    let pass = cert.max_residual() <= limit;
    println!(
        "blocks={} scalars={:?} max_residual={:.3e} gram_deviation={:.3e} {}",
        cert.rank(),
        cert.scalars,
        cert.max_residual(),
        cert.frame.gram_deviation(),
        if pass { "PASS" } else { "FAIL" }
    );
    if pass {
        ExitStatus::Success
    } else {
        ExitStatus::Infeasible
    }
}
