// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use varfrac_cli::presets::presets;
use varfrac_cli::run::{compare, run_path, RunOptions};
use varfrac_cli::CliError;

#[derive(Parser)]
#[command(
    name = "varfrac",
    version,
    about = "Variable-order fractional CTRW experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config (or a previous manifest).
    Run {
        config: PathBuf,
        /// Worker threads; defaults to the machine's parallelism.
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Judge results tables against the acceptance thresholds.
    Compare {
        #[arg(required = true)]
        results: Vec<PathBuf>,
    },
    /// List the built-in presets.
    Presets {
        /// Also write each preset config as `<name>.json` into this directory.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            threads,
            out,
        } => match run_path(&config, &RunOptions { threads, out }) {
            Ok(report) => {
                for c in &report.checks {
                    println!("{c}");
                }
                println!("results written to {}", report.out_dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Compare { results } => match compare(&results) {
            Ok(report) => {
                for (path, checks) in &report.files {
                    for c in checks {
                        println!("{}: {c}", path.display());
                    }
                }
                if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(&e),
        },
        Command::Presets { write } => {
            for p in presets() {
                println!(
                    "{:<20} criterion {}  {}",
                    p.name, p.criterion, p.description
                );
                if let Some(dir) = &write {
                    let path = dir.join(format!("{}.json", p.name));
                    let text = serde_json::to_string_pretty(&p.config).expect("preset serializes");
                    if let Err(e) = std::fs::create_dir_all(dir)
                        .and_then(|_| std::fs::write(&path, text + "\n"))
                    {
                        return fail(&CliError::io(&path, e));
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
