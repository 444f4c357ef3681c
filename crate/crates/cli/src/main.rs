use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sparsekl::solver::StepRule;
use sparsekl_cli::commands::{self, CertifyArgs, SolveArgs};
use sparsekl_cli::Failure;

#[derive(Parser)]
#[command(name = "sparsekl", version, about = "Sparse quadratic problems: solver and KL-exponent checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run proximal gradient from `x0` (or a seeded random feasible point).
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        /// `auto` or a fixed step size.
        #[arg(long, default_value = "auto", value_parser = parse_step)]
        step: StepRule,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Empirically test the exponent-1/2 inequality around `xbar`.
    Certify {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        delta: f64,
        #[arg(long, default_value_t = 1e-2)]
        eta: f64,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples_out: Option<PathBuf>,
    },
    /// List critical points of the sphere-constrained quadratic.
    Critical {
        file: PathBuf,
        /// Also list support-restricted eigenvectors that are critical under `h`.
        #[arg(long)]
        enumerate: bool,
    },
    /// Evaluate the joint proximal map at `u`.
    Prox {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        t: f64,
    },
    /// Compare closed forms against brute-force oracles at random points.
    OracleCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit a linear rate to a trace written by `solve --trace-out`.
    Rate {
        trace: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta_star: f64,
    },
}

fn parse_step(s: &str) -> Result<StepRule, String> {
    if s == "auto" {
        return Ok(StepRule::Auto);
    }
    s.parse::<f64>().map(StepRule::Fixed).map_err(|_| format!("expected `auto` or a number, got {s:?}"))
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { file, max_iters, step, tol, seed, trace_out } => {
            commands::solve(&SolveArgs { file, max_iters, step, tol, seed, trace_out }, out)
        }
        Command::Certify { file, delta, eta, n, seed, samples_out } => {
            commands::certify(&CertifyArgs { file, delta, eta, n, seed, samples_out }, out)
        }
        Command::Critical { file, enumerate } => commands::critical(&file, enumerate, out),
        Command::Prox { file, u, t } => commands::prox(&file, &u, t, out),
        Command::OracleCheck { file, trials, seed } => commands::oracle_check(&file, trials, seed, out),
        Command::Rate { trace, theta_star } => commands::rate(&trace, theta_star, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
