// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! `run` and `compare`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::CliError;
use crate::experiments::run_experiment;
use crate::judge::{experiments, judge, Check};
use crate::results::{read_csv, write_csv, Row};

pub const MANIFEST_VERSION: u32 = 1;
pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker count; `None` uses the machine's parallelism.
    pub threads: Option<usize>,
    /// Overrides the config's output directory.
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
}

#[derive(Serialize)]
struct ManifestCheck<'a> {
    criterion: Option<u8>,
    name: &'a str,
    passed: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    manifest_version: u32,
    schema_version: u32,
    config: &'a ExperimentConfig,
    seed: u64,
    threads: usize,
    versions: Versions,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    exit_code: i32,
    files: Vec<String>,
    checks: Vec<ManifestCheck<'a>>,
}

#[derive(Serialize)]
struct Versions {
    varfrac_core: &'static str,
    varfrac_cli: &'static str,
}

pub fn output_dir(cfg: &ExperimentConfig, opts: &RunOptions) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| Path::new("varfrac-out").join(cfg.experiment.name()))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ExperimentConfig::from_json(&text)
}

pub fn run_path(path: &Path, opts: &RunOptions) -> Result<RunReport, CliError> {
    run_config(&load_config(path)?, opts)
}

/// Run one experiment and write its artifacts. A failed run still leaves a
/// manifest naming the error.
pub fn run_config(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    let out_dir = output_dir(cfg, opts);
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start the worker pool: {e}")))?;
    let threads = pool.current_num_threads();
    let manifest = |status,
                    error: Option<&CliError>,
                    files: Vec<String>,
                    checks: &[Check]|
     -> Result<(), CliError> {
        let m = Manifest {
            manifest_version: MANIFEST_VERSION,
            schema_version: SCHEMA_VERSION,
            config: cfg,
            seed: cfg.seed,
            threads,
            versions: Versions {
                varfrac_core: varfrac_core::VERSION,
                varfrac_cli: env!("CARGO_PKG_VERSION"),
            },
            status,
            error: error.map(|e| e.to_string()),
            exit_code: error.map_or(0, CliError::exit_code),
            files,
            checks: checks
                .iter()
                .map(|c| ManifestCheck {
                    criterion: c.criterion,
                    name: &c.name,
                    passed: c.passed,
                    detail: &c.detail,
                })
                .collect(),
        };
        let path = out_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
    };
    let outcome = match pool.install(|| run_experiment(cfg)) {
        Ok(o) => o,
        Err(e) => {
            manifest("error", Some(&e), Vec::new(), &[])?;
            return Err(e);
        }
    };
    let mut files = vec![RESULTS_FILE.to_string()];
    write_csv(&outcome.rows, &out_dir.join(RESULTS_FILE))?;
    for (name, plot) in &outcome.plots {
        let path = out_dir.join(name);
        std::fs::write(&path, plot.render()).map_err(|e| CliError::io(&path, e))?;
        files.push(name.clone());
    }
    let checks = judge(&outcome.rows);
    manifest("ok", None, files, &checks)?;
    Ok(RunReport {
        out_dir,
        rows: outcome.rows,
        checks,
    })
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub files: Vec<(PathBuf, Vec<Check>)>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.files.iter().all(|(_, c)| c.iter().all(|c| c.passed))
    }
}

/// Judge each results table. All tables must carry the same experiments.
pub fn compare(paths: &[PathBuf]) -> Result<CompareReport, CliError> {
    if paths.is_empty() {
        return Err(CliError::Validation("nothing to compare".into()));
    }
    let tables = paths
        .iter()
        .map(|p| read_csv(p).map(|rows| (p.clone(), rows)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut expected = experiments(&tables[0].1);
    expected.sort();
    if expected.is_empty() {
        return Err(CliError::SchemaMismatch(format!(
            "{}: no rows",
            paths[0].display()
        )));
    }
    for (p, rows) in &tables[1..] {
        let mut got = experiments(rows);
        got.sort();
        if got != expected {
            return Err(CliError::SchemaMismatch(format!(
                "{} has experiments {got:?}, {} has {expected:?}",
                p.display(),
                paths[0].display()
            )));
        }
    }
    Ok(CompareReport {
        files: tables
            .into_iter()
            .map(|(p, rows)| (p, judge(&rows)))
            .collect(),
    })
}
