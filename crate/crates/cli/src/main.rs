use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gevrey_flow_cli::{run_with_threads, thread_cap, CliError, Command, RunConfig, EXIT_PASS};

#[derive(Parser)]
#[command(name = "gevrey-flow", version, about = "Simulate and verify decay of active scalar equations with random diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Flat TOML run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for reports, CSV series and field dumps.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Derived parameters and the admissibility report.
    Params,
    /// Monte Carlo estimate of the barrier event probability.
    OmegaMc,
    /// Runs the integrator along sampled paths and records the norm series.
    Simulate,
    /// Simulates and checks the exponential decay envelope and fitted rate.
    VerifyDecay,
    /// Embedding inequalities, bilinear bound, convolution oracle and mass rescaling.
    PropertySuite,
    /// Compares the integrator with the fixed-point iteration of the mild form.
    PicardCompare,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Params => Command::Params,
            Cmd::OmegaMc => Command::OmegaMc,
            Cmd::Simulate => Command::Simulate,
            Cmd::VerifyDecay => Command::VerifyDecay,
            Cmd::PropertySuite => Command::PropertySuite,
            Cmd::PicardCompare => Command::PicardCompare,
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let outcome = run_with_threads(cli.command.into(), &cfg, &cli.out, thread_cap()?)?;
    for f in &outcome.artifacts {
        eprintln!("wrote {}", f.display());
    }
    if outcome.passed {
        println!("{}: all checks passed", outcome.command.name());
        Ok(EXIT_PASS)
    } else {
        for f in &outcome.failures {
            println!("check failed: {f}");
        }
        Ok(gevrey_flow_cli::EXIT_CHECK_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
