use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gradflow::certificate::RestartPolicy;
use gradflow::config::load_config;
use gradflow::experiment::{self, Overrides, RunOutput, Status};
use gradflow::Error;

#[derive(Parser)]
#[command(
    name = "gradflow",
    version,
    about = "Learned-cost gradient-flow control of LTI plants"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone)]
struct RunFlags {
    /// Output directory (default: `output.dir` from the config, else `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["per-arrival", "global"])]
    restart_policy: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a configured experiment; writes trajectory.csv and trajectory.report.txt.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Print the certificate constants and conditions without simulating.
    Certify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Constant-disturbance preset.
    Fig2a {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Sinusoidal-disturbance preset.
    Fig2b {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run the invariant suite.
    Selftest,
}

fn overrides(f: &RunFlags) -> Result<Overrides, Error> {
    Ok(Overrides {
        out: f.out.clone(),
        seed: f.seed,
        restart_policy: f
            .restart_policy
            .as_deref()
            .map(str::parse::<RestartPolicy>)
            .transpose()?,
    })
}

fn finish(run: Result<RunOutput, Error>) -> ExitCode {
    match run {
        Ok(run) => {
            print!("{}", run.report.to_text());
            if run.report.status == Status::Fail {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => fail(e),
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Io(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Simulate { config, flags } => match overrides(&flags) {
            Ok(ov) => finish(experiment::cmd_simulate(&config, &ov)),
            Err(e) => fail(e),
        },
        Cmd::Certify { config } => {
            match load_config(&config).and_then(|c| experiment::cmd_certify(&c)) {
                Ok((text, ok)) => {
                    print!("{text}");
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Cmd::Fig2a { flags } => match overrides(&flags) {
            Ok(ov) => finish(experiment::cmd_fig2a(&ov)),
            Err(e) => fail(e),
        },
        Cmd::Fig2b { flags } => match overrides(&flags) {
            Ok(ov) => finish(experiment::cmd_fig2b(&ov)),
            Err(e) => fail(e),
        },
        Cmd::Selftest => {
            let checks = gradflow::selftest::run_selftest();
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
