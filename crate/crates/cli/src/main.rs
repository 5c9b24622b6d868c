//! `locmin`: batch front end for building and checking locally minimal
//! projections.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes. Stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Validation = 2,
    Infeasible = 3,
    Io = 4,
}

impl From<ExitStatus> for ExitCode {
    fn from(s: ExitStatus) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Parser)]
#[command(name = "locmin", version, about = "Locally minimal projections for tuples of Hermitian operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dimension budget for n operators and rank k.
    Budget {
        #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(short = 'k', value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// Generate a random operator tuple or a cluster model.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Build a rank-k locally minimal projection and write its certificate.
    Solve(SolveArgs),
    /// Recheck a certificate against an operator tuple or cluster model.
    Check(CheckArgs),
    /// Describe the joint essential range of a cluster model.
    Wess { model: std::path::PathBuf },
    /// Build an infinite-rank locally minimal projection for a cluster model.
    BuildInf(BuildInfArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random Hermitian tuple.
    Tuple {
        #[arg(long, env = "LOCMIN_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(short = 'd', value_parser = clap::value_parser!(u32).range(1..))]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(short = 'o')]
        output: std::path::PathBuf,
    },
    /// Cluster model, either a preset or random clusters.
    Model {
        #[arg(long, conflicts_with_all = ["clusters", "n", "support"])]
        preset: Option<Preset>,
        #[arg(long, requires = "n", value_parser = clap::value_parser!(u32).range(1..))]
        clusters: Option<u32>,
        #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(1..))]
        n: Option<u32>,
        #[arg(long, default_value_t = 0)]
        support: u32,
        #[arg(long, env = "LOCMIN_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o')]
        output: std::path::PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Preset {
    /// Clusters (0,0), (1,0), (0,1).
    Triangle,
    /// One operator, clusters 0 and 1.
    Segment,
    /// a_1 = 0, a_2 = a_1 + positive compact: empty interior.
    CompactShift,
    /// Two operators with collinear clusters: empty interior.
    CollinearSegment,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum LambdaRuleArg {
    Mid,
    Low,
    High,
}

#[derive(Args)]
struct SolveArgs {
    input: std::path::PathBuf,
    #[arg(short = 'k', value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long, env = "LOCMIN_SEED", default_value_t = 0)]
    seed: u64,
    /// Residual tolerance relative to the operator scale.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = LambdaRuleArg::Mid)]
    lambda_rule: LambdaRuleArg,
    /// Run below the dimension budget.
    #[arg(long)]
    best_effort: bool,
    #[arg(short = 'o')]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    input: std::path::PathBuf,
    certificate: std::path::PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Maximum allowed entry of |F*F - I|.
    #[arg(long, default_value_t = 1e-10)]
    gram_tol: f64,
}

#[derive(Args)]
struct BuildInfArgs {
    model: std::path::PathBuf,
    /// Target point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    point: Vec<f64>,
    /// Number of columns (blocks) to build.
    #[arg(short = 'm', long = "blocks", default_value_t = 10)]
    m: usize,
    #[arg(long, env = "LOCMIN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(short = 'o')]
    output: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Budget { n, k } => commands::budget(n as usize, k as usize),
        Command::Gen(GenCommand::Tuple { seed, n, d, scale, output }) => {
            commands::gen_tuple(seed, n as usize, d as usize, scale, &output)
        }
        Command::Gen(GenCommand::Model { preset, clusters, n, support, seed, output }) => {
            commands::gen_model(preset, clusters.zip(n), support as usize, seed, &output)
        }
        Command::Solve(a) => commands::solve(&commands::SolveRequest {
            input: &a.input,
            k: a.k as usize,
            seed: a.seed,
            tol: a.tol,
            lambda_rule: match a.lambda_rule {
                LambdaRuleArg::Mid => locmin_core::equalization::LambdaRule::Mid,
                LambdaRuleArg::Low => locmin_core::equalization::LambdaRule::Low,
                LambdaRuleArg::High => locmin_core::equalization::LambdaRule::High,
            },
            best_effort: a.best_effort,
            output: a.output.as_deref(),
        }),
        Command::Check(a) => commands::check(&a.input, &a.certificate, a.tol, a.gram_tol),
        Command::Wess { model } => commands::wess(&model),
        Command::BuildInf(a) => commands::build_inf(&a.model, &a.point, a.m, a.seed, a.tol, a.output.as_deref()),
    };
    status.into()
}
