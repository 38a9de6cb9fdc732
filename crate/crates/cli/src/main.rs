//! henon-lab: command-line front end over the laboratory pipeline. Every
//! subcommand resolves one configuration, writes its artifacts under a
//! single output directory with a checksummed manifest, and exits zero
//! exactly when every verdict in scope passed.

// `!(x > 0)` rejects NaN along with the out-of-range values; the guards are
// deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;
mod sweep;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use henon_core::Result;

use config::{resolve, CommonOpts, ParamOpts, Resolved};
use run::{config_echo, Artifacts};

#[derive(Parser)]
#[command(
    name = "henon-lab",
    version,
    about = "Numerical laboratory for the radial problem lap^2 u = |x|^a u^p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient sequences, their limits, and the admissible weight bound
    Sequences {
        #[command(flatten)]
        params: ParamOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Shooting solve of the radial equation with classification
    Solve {
        #[command(flatten)]
        params: ParamOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Solve, then check the pointwise inequality, ladder, and curvature
    Verify {
        #[command(flatten)]
        params: ParamOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Averaged blow-up trajectory with the quadratic bound and envelopes
    Blowup {
        #[command(flatten)]
        params: ParamOpts,
        #[command(flatten)]
        common: CommonOpts,
        /// Initial average Laplacian, must be negative
        #[arg(long, allow_hyphen_values = true)]
        v0: Option<f64>,
        /// Average value that counts as escape to infinity
        #[arg(long)]
        escape: Option<f64>,
    },
    /// Randomized inequality trials and finite-difference identity checks
    Oracle {
        #[command(flatten)]
        params: ParamOpts,
        #[command(flatten)]
        common: CommonOpts,
        /// Number of randomized trials per inequality
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Ball-integral decay slopes against their predicted exponents
    Decay {
        #[command(flatten)]
        params: ParamOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run one subcommand over a parameter grid and aggregate verdict rows
    Sweep(sweep::SweepArgs),
}

/// One single-point run: artifacts, manifest, and a status line. Module
/// errors become a structured record in the output directory and on stderr.
fn single(sub: &'static str, cfg: &Resolved) -> Result<bool> {
    let mut art = Artifacts::create(&cfg.out)?;
    match run::dispatch(sub, cfg, &mut art) {
        Ok(outcome) => {
            art.finish(config_echo(sub, cfg))?;
            let verdict = if outcome.pass { "pass" } else { "fail" };
            println!("{sub}: {verdict} ({})", cfg.out.display());
            Ok(outcome.pass)
        }
        Err(e) => {
            let record = json!({ "subcommand": sub, "error": e.to_string(), "pass": false });
            art.write_json("error.json", &record)?;
            art.finish(config_echo(sub, cfg))?;
            eprintln!("{record}");
            Ok(false)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sequences { params, common } => single("sequences", &resolve(&common, &params)?),
        Command::Solve { params, common } => single("solve", &resolve(&common, &params)?),
        Command::Verify { params, common } => single("verify", &resolve(&common, &params)?),
        Command::Blowup { params, common, v0, escape } => {
            let mut cfg = resolve(&common, &params)?;
            if let Some(v0) = v0 {
                cfg.v0 = v0;
            }
            if let Some(escape) = escape {
                cfg.escape = escape;
            }
            single("blowup", &cfg)
        }
        Command::Oracle { params, common, trials } => {
            let mut cfg = resolve(&common, &params)?;
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            single("oracle", &cfg)
        }
        Command::Decay { params, common } => single("decay", &resolve(&common, &params)?),
        Command::Sweep(args) => sweep::run_sweep(&args),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string(), "pass": false }));
            ExitCode::FAILURE
        }
    }
}
