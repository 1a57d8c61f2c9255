// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Runs every acceptance preset and prints one verdict line per criterion.

use std::collections::BTreeMap;
use std::time::Instant;

use varfrac_cli::judge::{by_criterion, Check};
use varfrac_cli::presets::{preset, presets};
use varfrac_cli::run::{run_config, RunOptions, RESULTS_FILE};

/// Criteria that fail at the specified thresholds, with the reason. Their
/// remaining checks must still pass.
const KNOWN_RED: &[(u8, &str, &str)] = &[
    (
        1,
        "alpha=0.3: fitted order",
        "the default threshold at alpha = 0.3 is B = 55.3, so h B >> 1 on the required \
     h range and the error saturates near Gamma(1 - alpha) = 1.30; local slopes \
     climb from 0.05 to 0.52 there and only pass 0.6 below h = 6e-3 (limit 0.7). \
     The bound C_B L h^(1-alpha) holds at every h",
    ),
    (
        4,
        "tau=0.01 agrees with solver",
        "the chain at tau = 1e-2 carries a time-step bias near -4e-4 (-3.0e-4, \
     -3.7e-4 and -5.7e-4 on three seeds), which 4e6 paths resolve beyond 3 std \
     errors. Fewer paths would hide it but leave the tau-ladder ordering to \
     noise. At tau = 1e-3 the gap is within 3 std errors and the ladder gap shrinks",
    ),
];

fn known_red(check: &Check) -> bool {
    KNOWN_RED
        .iter()
        .any(|(c, name, _)| check.criterion == Some(*c) && check.name.contains(name))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut checks: Vec<Check> = Vec::new();
    let mut broken: Vec<String> = Vec::new();
    for p in presets() {
        let start = Instant::now();
        let opts = RunOptions {
            threads: None,
            out: Some(dir.path().join(p.name)),
        };
        match run_config(&p.config, &opts) {
            Ok(report) => {
                eprintln!("ran {} in {:.1}s", p.name, start.elapsed().as_secs_f64());
                checks.extend(report.checks);
            }
            Err(e) => broken.push(format!("{}: {e}", p.name)),
        }
    }

    // byte-identical results.csv across worker counts
    for name in ["triangulation", "discrete-identity"] {
        let p = preset(name).expect("preset exists");
        let bytes: Vec<Result<Vec<u8>, String>> = [1usize, 3]
            .into_iter()
            .map(|threads| {
                let out = dir.path().join(format!("{name}-threads-{threads}"));
                let opts = RunOptions {
                    threads: Some(threads),
                    out: Some(out.clone()),
                };
                run_config(&p.config, &opts).map_err(|e| e.to_string())?;
                std::fs::read(out.join(RESULTS_FILE)).map_err(|e| e.to_string())
            })
            .collect();
        let (passed, detail) = match (&bytes[0], &bytes[1]) {
            (Ok(a), Ok(b)) => (a == b, format!("{} bytes on 1 and 3 workers", a.len())),
            (Err(e), _) | (_, Err(e)) => (false, e.clone()),
        };
        checks.push(Check {
            experiment: name.into(),
            criterion: Some(9),
            name: "results.csv identical across --threads".into(),
            passed,
            detail,
        });
    }

    let mut failures: Vec<String> = broken.clone();
    for c in &checks {
        if !c.passed && !known_red(c) {
            failures.push(c.to_string());
        }
    }
    for (criterion, name, _) in KNOWN_RED {
        let matching: Vec<&Check> = checks
            .iter()
            .filter(|c| c.criterion == Some(*criterion) && c.name.contains(name))
            .collect();
        if matching.is_empty() || matching.iter().all(|c| c.passed) {
            failures.push(format!(
                "criterion {criterion}: `{name}` is listed as red but passed or did not run"
            ));
        }
    }

    let verdicts: BTreeMap<u8, bool> = by_criterion(&checks);
    println!();
    for criterion in 1..=9u8 {
        let line = match verdicts.get(&criterion) {
            Some(true) => "PASS".to_string(),
            Some(false) => {
                let reasons: Vec<String> = checks
                    .iter()
                    .filter(|c| c.criterion == Some(criterion) && !c.passed)
                    .map(|c| format!("{} ({})", c.name, c.detail))
                    .collect();
                let note = KNOWN_RED
                    .iter()
                    .find(|(c, _, _)| *c == criterion)
                    .map(|(_, _, why)| format!("; known: {why}"))
                    .unwrap_or_default();
                format!("FAIL: {}{note}", reasons.join("; "))
            }
            None => "FAIL: no checks ran".to_string(),
        };
        println!("criterion {criterion}: {line}");
    }
    println!();
    for c in &checks {
        println!("  {c}");
    }
    if !failures.is_empty() {
        println!("\nunexpected failures:");
        for f in &failures {
            println!("  {f}");
        }
        std::process::exit(1);
    }
    println!("\nacceptance: all criteria pass except the documented red ones");
}
