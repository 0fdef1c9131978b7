use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use densepack_cli::{run, Command, Options, Outcome, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Effective moduli at one gap width.
    Moduli,
    /// Asymptotic sweep over several gap widths with a power-law fit.
    Sweep,
    /// Identity and derivative checks of the auxiliary gap fields.
    Auxcheck,
    /// Vigdergauz shape against the m-convex shape of equal volume fraction.
    Shape,
    /// Gap integral against its leading term.
    Integral,
}

#[derive(Debug, Parser)]
#[command(name = "densepack", version, about = "Effective moduli of densely packed rigid inclusions")]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Write the CSV report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Suppress verdict lines on stderr.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut err = std::io::stderr();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "config error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(Outcome::Config.code());
        }
    };
    let mut cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "config error: {e}");
            return ExitCode::from(Outcome::Config.code());
        }
    };
    if let Some(out) = &cli.out {
        cfg.csv = Some(out.to_string_lossy().into_owned());
    }
    let command = match cli.command {
        Cmd::Moduli => Command::Moduli,
        Cmd::Sweep => Command::Sweep,
        Cmd::Auxcheck => Command::Auxcheck,
        Cmd::Shape => Command::Shape,
        Cmd::Integral => Command::Integral,
    };
    let opts = Options { seed: cli.seed, quiet: cli.quiet };
    let mut out = std::io::stdout().lock();
    match run(command, &cfg, &opts, &mut out, &mut err) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(Outcome::Solver.code())
        }
    }
}
