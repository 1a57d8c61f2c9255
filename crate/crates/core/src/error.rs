// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("order bound violated: a_hi * alpha = {product} must be < 1")]
    OrderBoundViolation { product: f64 },

    #[error("bound `{name}` must be positive, got {value}")]
    NonPositiveBound { name: &'static str, value: f64 },

    #[error("dimension {dim} unsupported for {kind}")]
    DimensionUnsupported { kind: &'static str, dim: usize },

    #[error("field `{field}` = {value} at (t={t}, x={x:?}) outside declared [{lo}, {hi}]")]
    FieldOutOfBounds {
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
        t: f64,
        x: Vec<f64>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "invalid tail mass at gamma={gamma}: tail mass {tail_mass}, head height {head_height}"
    )]
    InvalidTailMass {
        gamma: f64,
        tail_mass: f64,
        head_height: f64,
    },

    #[error("no nonnegative jump weights reproduce G = [[{g11}, {g12}], [{g12}, {g22}]]")]
    KernelInfeasible { g11: f64, g22: f64, g12: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} > tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("step budget of {budget} exceeded before the horizon was reached")]
    StepBudgetExceeded { budget: u64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("singular cell not resolved: {0}")]
    SingularityResolution(String),

    #[error("lattice of {states} states exceeds the limit {limit}")]
    LatticeOverflow { states: usize, limit: usize },

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("Mittag-Leffler evaluation outside validated range: gamma={gamma}, z={z}")]
    AccuracyLoss { gamma: f64, z: f64 },

    #[error("Laplace inversion failed: {0}")]
    InversionFailure(String),
}
