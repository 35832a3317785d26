//! `risfda`: scenario reports, parameter sweeps and verification runs.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use risfda::verify::Suite;
use risfda::Combine;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "risfda",
    version,
    about = "Secrecy analysis for RIS-assisted frequency diverse arrays"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file; the bundled reference scenario when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write CSV (or JSON lines for `verify`) here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 gives fully sequential runs.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Monte-Carlo symbols per point.
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,
    /// Overrides how the range and angle conditions of the wiretap area combine.
    #[arg(long, global = true)]
    combine: Option<CombineArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CombineArg {
    Conjunction,
    Union,
}

impl From<CombineArg> for Combine {
    fn from(c: CombineArg) -> Self {
        match c {
            CombineArg::Conjunction => Combine::Conjunction,
            CombineArg::Union => Combine::Union,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Moments,
    Snr,
    Bounds,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Moments => Suite::Moments,
            SuiteArg::Snr => Suite::Snr,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Secrecy report for one eavesdropper position.
    Report {
        /// Eavesdropper position `x,y` in meters; defaults to the scenario's point.
        #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
        eve: Option<String>,
        /// Overrides the scenario technique.
        #[arg(long)]
        technique: Option<String>,
    },
    /// Secrecy rate of every technique over a grid of eavesdropper positions.
    Heatmap {
        /// `MIN:MAX:N` along x.
        #[arg(long, value_name = "MIN:MAX:N", allow_hyphen_values = true)]
        x: Option<String>,
        /// `MIN:MAX:N` along y.
        #[arg(long, value_name = "MIN:MAX:N", allow_hyphen_values = true)]
        y: Option<String>,
    },
    /// Closed-form and Monte-Carlo quantities along the scenario's eavesdropper sweep.
    Sweep,
    /// Optimal subset sizes and their objective curves.
    Optimize {
        /// Tabulate the optimal `M_s` for `M = START, START+STEP, …, END`.
        #[arg(long, value_name = "START:END:STEP")]
        vary_m: Option<String>,
    },
    /// Closed forms against the enumeration, Monte-Carlo and grid oracles.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Flag {
                flag: "threads",
                message: "must be at least 1".into(),
            });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Flag {
                flag: "threads",
                message: e.to_string(),
            })?;
    }
    let (_, mut resolved) = config::load(cli.common.config.as_deref())?;
    if let Some(c) = cli.common.combine {
        resolved.scenario.combine = c.into();
    }
    if let Some(seed) = cli.common.seed {
        resolved.seed = seed;
    }
    let out = commands::Output {
        path: cli.common.out.as_deref(),
        json: cli.common.json,
    };
    match cli.command {
        Command::Report { eve, technique } => {
            commands::report(&resolved, eve.as_deref(), technique.as_deref(), &out)
        }
        Command::Heatmap { x, y } => commands::heatmap(&resolved, x.as_deref(), y.as_deref(), &out),
        Command::Sweep => commands::sweep(&resolved, cli.common.samples, &out),
        Command::Optimize { vary_m } => commands::optimize(&resolved, vary_m.as_deref(), &out),
        Command::Verify { suite } => commands::verify(&resolved, suite.into(), cli.common.samples, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation errors; 2 is reserved for failed verification
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
