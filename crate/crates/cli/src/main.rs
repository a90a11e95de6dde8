#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

mod commands;
mod config;

use commands::Outcome;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "fixpoint", version, about = "Certify and iterate fixed-point operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample-based check of an operator property; writes certify.json.
    Certify(RunArgs),
    /// Picard iteration; writes trace.csv and summary.json.
    Solve(RunArgs),
    /// Picard iteration plus rate fit and checks; writes trace.csv, fit.json, checks.json.
    Rates(RunArgs),
    /// Rasterize the range region in the plane; writes region.csv.
    Region(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, default `<command>-<unix time>`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

fn run(name: &str, args: RunArgs, f: fn(&RunConfig, &config::Params, &std::path::Path) -> Result<Outcome>) -> Result<Outcome> {
    let cfg = RunConfig::load(&args.config)?;
    let mut p = cfg.params.clone();
    p.seed = args.seed.or(p.seed);
    p.gamma = args.gamma.or(p.gamma);
    p.mu = args.mu.or(p.mu);
    p.beta = args.beta.or(p.beta);
    p.eta = args.eta.or(p.eta);
    p.lambda = args.lambda.or(p.lambda);
    p.tol = args.tol.or(p.tol);
    p.max_iter = args.max_iter.or(p.max_iter);
    let out = args.out.unwrap_or_else(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        PathBuf::from(format!("{name}-{secs}"))
    });
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    f(&cfg, &p, &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Certify(a) => run("certify", a, commands::certify),
        Command::Solve(a) => run("solve", a, commands::solve),
        Command::Rates(a) => run("rates", a, commands::rates),
        Command::Region(a) => run("region", a, commands::region),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<fixpoint_core::Error>() {
                Some(fixpoint_core::Error::NonFinite { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
