// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Versioned experiment configuration.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use varfrac_core::{HeadKind, ModelConfig};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    RateCheck,
    ExactnessWindow,
    Triangulation,
    SolverConvergence,
    VariableOrder,
    Conservation,
    MaximumPrinciple,
    SubordinationIdentity,
    DiscreteIdentity,
    SubordinatorLaw,
    Determinism,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::RateCheck,
        ExperimentKind::ExactnessWindow,
        ExperimentKind::Triangulation,
        ExperimentKind::SolverConvergence,
        ExperimentKind::VariableOrder,
        ExperimentKind::Conservation,
        ExperimentKind::MaximumPrinciple,
        ExperimentKind::SubordinationIdentity,
        ExperimentKind::DiscreteIdentity,
        ExperimentKind::SubordinatorLaw,
        ExperimentKind::Determinism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::RateCheck => "rate-check",
            ExperimentKind::ExactnessWindow => "exactness-window",
            ExperimentKind::Triangulation => "triangulation",
            ExperimentKind::SolverConvergence => "solver-convergence",
            ExperimentKind::VariableOrder => "variable-order",
            ExperimentKind::Conservation => "conservation",
            ExperimentKind::MaximumPrinciple => "maximum-principle",
            ExperimentKind::SubordinationIdentity => "subordination-identity",
            ExperimentKind::DiscreteIdentity => "discrete-identity",
            ExperimentKind::SubordinatorLaw => "subordinator-law",
            ExperimentKind::Determinism => "determinism",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Terminal data `F(x)` at `s = t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Terminal {
    Cos {
        wavenumber: f64,
    },
    Constant {
        value: f64,
    },
    /// `+1` on the first half period, `-1` on the second.
    SquareWave {
        period: f64,
    },
}

impl Terminal {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Terminal::Cos { wavenumber } => (wavenumber * x).cos(),
            Terminal::Constant { value } => *value,
            Terminal::SquareWave { period } => {
                if x.rem_euclid(*period) < 0.5 * period {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Terminal::Cos { wavenumber } => format!("cos({wavenumber}x)"),
            Terminal::Constant { value } => format!("constant {value}"),
            Terminal::SquareWave { period } => format!("square wave {period}"),
        }
    }
}

/// Test function of the generator-rate check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateFunction {
    /// `y e^{-y}`
    YExp,
    /// `(y - c)^2 e^{-y}` past `c = B max(h)`.
    BeyondThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSize {
    pub n_x: usize,
    pub n_s: usize,
}

/// Histogram layout for transition densities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityLayout {
    /// `u` nodes are `(u_max q_i^2)` for uniform `q_i` in `[0, 1]`.
    pub u_max: f64,
    pub u_points: usize,
    pub y_half_width: f64,
    pub y_cells: usize,
    pub v_cells: usize,
}

impl Default for DensityLayout {
    fn default() -> Self {
        Self {
            u_max: 4.0,
            u_points: 160,
            y_half_width: 6.0,
            y_cells: 240,
            v_cells: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Chain time steps, coarse to fine.
    pub tau: Vec<f64>,
    pub n_traj: u64,
    /// Solver grids, coarse to fine.
    pub grids: Vec<GridSize>,
    /// Truncation `T in [1/K, K]`; absent means none.
    pub k: Option<f64>,
    pub alphas: Vec<f64>,
    pub h: Vec<f64>,
    pub rate_function: RateFunction,
    /// Waiting threshold `B`; absent uses the default rule.
    pub threshold: Option<f64>,
    pub head: HeadKind,
    /// Chain steps for marginal laws.
    pub steps: u64,
    pub time_cells: u32,
    pub density: DensityLayout,
    /// Transition density from the chain instead of the exact one.
    pub empirical: bool,
    /// Worker counts compared by the determinism experiment.
    pub threads: Vec<usize>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            tau: vec![1e-2],
            n_traj: 10_000,
            grids: vec![GridSize { n_x: 128, n_s: 256 }],
            k: None,
            alphas: vec![0.5],
            h: vec![0.1, 0.05, 0.025, 0.0125],
            rate_function: RateFunction::YExp,
            threshold: None,
            head: HeadKind::Uniform,
            steps: 1000,
            time_cells: 50,
            density: DensityLayout::default(),
            empirical: false,
            threads: vec![1, 2],
        }
    }
}

/// Start point, horizon and terminal data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Problem {
    pub x0: f64,
    pub s0: f64,
    pub horizon: f64,
    pub period: f64,
    pub terminal: Terminal,
}

impl Default for Problem {
    fn default() -> Self {
        Self {
            x0: 0.0,
            s0: 0.0,
            horizon: 1.0,
            period: 2.0 * PI,
            terminal: Terminal::Cos { wavenumber: 1.0 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub problem: Problem,
    #[serde(default)]
    pub numerics: Numerics,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parse a config, or the config echoed inside a run manifest.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("malformed JSON: {e}")))?;
        let value = match value.get("manifest_version") {
            Some(_) => value
                .get("config")
                .cloned()
                .ok_or_else(|| CliError::Validation("manifest without a config".into()))?,
            None => value,
        };
        let config: Self = serde_json::from_value(value)
            .map_err(|e| CliError::Validation(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        if self.version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema version {}, expected {SCHEMA_VERSION}",
                self.version
            ));
        }
        let n = &self.numerics;
        let p = &self.problem;
        if !(p.horizon > p.s0) {
            return bad(format!("horizon {} must exceed s0 {}", p.horizon, p.s0));
        }
        if !(p.period > 0.0) {
            return bad("period must be positive".into());
        }
        if n.tau.iter().any(|t| !(*t > 0.0)) {
            return bad("tau values must be positive".into());
        }
        if let Some(k) = n.k {
            if !(k > 1.0) {
                return bad(format!("K must exceed 1, got {k}"));
            }
        }
        let needs_model = !matches!(
            self.experiment,
            ExperimentKind::RateCheck | ExperimentKind::ExactnessWindow
        );
        if needs_model && self.model.is_none() {
            return bad(format!(
                "experiment {} needs a model block",
                self.experiment.name()
            ));
        }
        let needs = |ok: bool, what: &str| -> Result<(), CliError> {
            if ok {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "experiment {} needs {what}",
                    self.experiment.name()
                )))
            }
        };
        match self.experiment {
            ExperimentKind::RateCheck | ExperimentKind::ExactnessWindow => {
                needs(
                    !n.alphas.is_empty() && n.h.len() >= 2,
                    "alphas and at least two h values",
                )?;
                if n.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                    return bad("alphas must lie in (0, 1)".into());
                }
                if n.h.iter().any(|h| !(*h > 0.0)) {
                    return bad("h values must be positive".into());
                }
            }
            ExperimentKind::SolverConvergence => needs(n.grids.len() >= 2, "at least two grids")?,
            ExperimentKind::VariableOrder => {
                needs(n.grids.len() >= 2, "at least two grids")?;
                needs(n.tau.len() >= 2, "a tau ladder of at least two entries")?;
            }
            ExperimentKind::Triangulation | ExperimentKind::Conservation => {
                needs(!n.grids.is_empty() && !n.tau.is_empty(), "a grid and a tau")?
            }
            ExperimentKind::MaximumPrinciple => needs(!n.grids.is_empty(), "a grid")?,
            ExperimentKind::SubordinationIdentity
            | ExperimentKind::DiscreteIdentity
            | ExperimentKind::SubordinatorLaw => needs(!n.tau.is_empty(), "a tau")?,
            ExperimentKind::Determinism => {
                needs(
                    !n.tau.is_empty() && n.threads.len() >= 2,
                    "a tau and two thread counts",
                )?;
                if n.threads.contains(&0) {
                    return bad("thread counts must be positive".into());
                }
            }
        }
        Ok(())
    }
}
