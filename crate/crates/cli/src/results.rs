// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Long-format results table.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const HEADER: [&str; 11] = [
    "experiment",
    "case",
    "quantity",
    "h",
    "tau",
    "n_x",
    "n_s",
    "n_traj",
    "level",
    "value",
    "uncertainty",
];

/// One measured quantity. Parameter columns that do not apply stay empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub case: String,
    pub quantity: String,
    pub h: Option<f64>,
    pub tau: Option<f64>,
    pub n_x: Option<u64>,
    pub n_s: Option<u64>,
    pub n_traj: Option<u64>,
    pub level: Option<f64>,
    pub value: f64,
    pub uncertainty: Option<f64>,
}

impl Row {
    pub fn new(experiment: &str, case: &str, quantity: &str, value: f64) -> Self {
        Self {
            experiment: experiment.into(),
            case: case.into(),
            quantity: quantity.into(),
            h: None,
            tau: None,
            n_x: None,
            n_s: None,
            n_traj: None,
            level: None,
            value,
            uncertainty: None,
        }
    }

    pub fn h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    pub fn tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn grid(mut self, n_x: usize, n_s: usize) -> Self {
        self.n_x = Some(n_x as u64);
        self.n_s = Some(n_s as u64);
        self
    }

    pub fn n_traj(mut self, n: u64) -> Self {
        self.n_traj = Some(n);
        self
    }

    pub fn level(mut self, level: f64) -> Self {
        self.level = Some(level);
        self
    }

    pub fn uncertainty(mut self, u: f64) -> Self {
        self.uncertainty = Some(u);
        self
    }
}

pub fn to_csv_bytes(rows: &[Row]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(HEADER)
        .and_then(|_| rows.iter().try_for_each(|r| w.serialize(r)))
        .map_err(|e| CliError::Numerical(format!("cannot encode results: {e}")))?;
    w.into_inner()
        .map_err(|e| CliError::Numerical(format!("cannot encode results: {e}")))
}

pub fn write_csv(rows: &[Row], path: &Path) -> Result<(), CliError> {
    let bytes = to_csv_bytes(rows)?;
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Read a results table, rejecting any other column layout.
pub fn read_csv(path: &Path) -> Result<Vec<Row>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r
        .headers()
        .map_err(|e| CliError::SchemaMismatch(format!("{}: {e}", path.display())))?
        .clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::SchemaMismatch(format!(
            "{}: columns {:?}, expected {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>(),
            HEADER
        )));
    }
    r.deserialize()
        .collect::<Result<Vec<Row>, _>>()
        .map_err(|e| CliError::SchemaMismatch(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows = vec![
            Row::new("rate-check", "alpha=0.3", "error", 1.25e-3).h(0.1),
            Row::new("triangulation", "cos, x0", "mc", 0.1 + 0.2)
                .tau(1e-3)
                .n_traj(100_000)
                .uncertainty(7e-4),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "experiment,case,quantity,h,tau,n_x,n_s,n_traj,level,value,uncertainty\n"
        ));
        assert!(text.contains("\"cos, x0\""));
        assert_eq!(read_csv(&path).unwrap(), rows);
    }

    #[test]
    fn foreign_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_csv(&path), Err(CliError::SchemaMismatch(_))));
    }
}
