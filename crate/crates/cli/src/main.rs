use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use escrow_cli::commands::{cmd_coinflip, cmd_escrow_binding, cmd_escrow_sealing};
use escrow_cli::config::{ConfigError, Format, RunConfig};
use escrow_cli::output::RunSummary;
use escrow_cli::selftest::cmd_selftest;

const EXIT_INTERNAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "escrow", version, about = "Bit-escrow and coin-flip experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Honest run, baselines and optimizer probes for the coin flip.
    Coinflip(Common),
    /// Quadratic Alice over the alpha grid with the binding frontier.
    EscrowBinding(Common),
    /// Weak-measurement Bob over the p grid plus seeded random attacks.
    EscrowSealing(Common),
    /// Every invariant check, one row each.
    Selftest {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        inject_failure: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Encoding angle, e.g. `0.3927` or `pi/8`.
    #[arg(long)]
    theta: Option<String>,
    /// Comma-separated alpha values.
    #[arg(long)]
    alpha_grid: Option<String>,
    /// Comma-separated p values.
    #[arg(long)]
    p_grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random points: optimizer grid budget, attack count or Monte Carlo
    /// samples depending on the subcommand.
    #[arg(long)]
    samples: Option<u64>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// `key=value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, default_samples: u64) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::defaults(default_samples);
        if let Some(path) = &self.config {
            cfg.load_file(path)?;
        }
        let flags = [
            ("theta", self.theta.clone()),
            ("alpha-grid", self.alpha_grid.clone()),
            ("p-grid", self.p_grid.clone()),
            ("seed", self.seed.map(|s| s.to_string())),
            ("samples", self.samples.map(|s| s.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(f) = self.format {
            cfg.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(summary: &RunSummary, cfg: &RunConfig) -> io::Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            summary.write(cfg, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            summary.write(cfg, &mut w)?;
            w.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, default_samples) = match &cli.command {
        Command::Coinflip(c) => (c, 2_000),
        Command::EscrowBinding(c) => (c, 0),
        Command::EscrowSealing(c) => (c, 200),
        Command::Selftest { common, .. } => (common, 100_000),
    };
    let cfg = match common.resolve(default_samples) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let start = Instant::now();
    let result = match &cli.command {
        Command::Coinflip(_) => cmd_coinflip(&cfg),
        Command::EscrowBinding(_) => cmd_escrow_binding(&cfg),
        Command::EscrowSealing(_) => cmd_escrow_sealing(&cfg),
        Command::Selftest { inject_failure, .. } => cmd_selftest(&cfg, *inject_failure),
    };
    let summary = match result {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    if let Err(e) = emit(&summary, &cfg) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_INTERNAL);
    }

    let tally = summary.tally();
    eprintln!(
        "{}: {} passed, {} failed in {:.2?}",
        summary.command,
        tally.passed,
        tally.failed,
        start.elapsed()
    );
    if tally.failed > 0 {
        ExitCode::from(EXIT_VIOLATION)
    } else {
        ExitCode::SUCCESS
    }
}
