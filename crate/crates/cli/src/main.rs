//! `gcrsi`: batch front end for the verification suites.
//!
//! Exit status: 0 when every asserted check passes, 1 when one fails, 2 on
//! usage, configuration or input errors.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{parse_assignment, Mode, Overrides, RunConfig};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "gcrsi", version, about = "Numerical checks of Gaussian conjugate Rogers-Shephard inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed; every stochastic stage derives its own stream from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo samples per estimated measure.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Flat `key = value` file; command-line values take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report path. CSV sidecars are written beside it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Count failed checks in the exit status (default).
    #[arg(long = "assert", global = true, conflicts_with = "explore")]
    assert_mode: bool,
    /// Report every check without asserting any.
    #[arg(long, global = true)]
    explore: bool,
    /// Subcommand parameter, repeatable: `--set a=1/4 --set b=3/4`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo check of the geometric inequality on a corpus of body pairs.
    VerifyGeometric(#[command(flatten)] Common),
    /// Search for Gaussian certificates and compare with the closed-form families.
    Saturate(#[command(flatten)] Common),
    /// Classify a grid of (a², b²) and probe the tail necessity test.
    RegionMap(#[command(flatten)] Common),
    /// Self-convolution doubling on the indicator of [-1, 1].
    ConvolveDemo(#[command(flatten)] Common),
    /// Functional inequality on grid functions, cross-checked against geometry.
    FunctionalCheck(#[command(flatten)] Common),
    /// Reproduce the explicit counterexample certificates.
    Counterexample(#[command(flatten)] Common),
}

type Runner = fn(&RunConfig) -> anyhow::Result<Report>;

fn dispatch(cmd: Command) -> (Common, &'static [&'static str], Runner) {
    use commands::*;
    match cmd {
        Command::VerifyGeometric(c) => (c, geometric::KEYS, geometric::run),
        Command::Saturate(c) => (c, saturate::KEYS, saturate::run),
        Command::RegionMap(c) => (c, region::KEYS, region::run),
        Command::ConvolveDemo(c) => (c, convolve::KEYS, convolve::run),
        Command::FunctionalCheck(c) => (c, functional::KEYS, functional::run),
        Command::Counterexample(c) => (c, counterexample::KEYS, counterexample::run),
    }
}

fn run(common: Common, keys: &[&str], runner: Runner) -> anyhow::Result<bool> {
    let params = common.set.iter().map(|s| parse_assignment(s)).collect::<anyhow::Result<Vec<_>>>()?;
    let mode = match (common.assert_mode, common.explore) {
        (_, true) => Some(Mode::Explore),
        (true, _) => Some(Mode::Assert),
        _ => None,
    };
    let overrides = Overrides { seed: common.seed, samples: common.samples, mode, params };
    let cfg = RunConfig::resolve(common.config.as_deref(), overrides, keys)?;
    let started = Instant::now();
    let report = runner(&cfg)?;
    report.emit(&cfg, common.out.as_deref())?;
    let s = report.summary();
    eprintln!(
        "{}: {} asserted, {} passed, {} failed, {} exploratory in {:.2?}",
        report.subcommand,
        s.asserted,
        s.passed,
        s.failed,
        s.exploratory,
        started.elapsed()
    );
    Ok(s.failed == 0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (common, keys, runner) = dispatch(cli.command);
    match run(common, keys, runner) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
