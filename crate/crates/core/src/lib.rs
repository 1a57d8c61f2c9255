// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Continuous-time random walks with position- and time-dependent power-law
//! waiting times, and the variable-order fractional equations they converge to.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: problem data (order field `a(t,x)`, spatial operator, bounds);
//! - [`waiting`]: waiting-time laws with exact Pareto tails and the
//!   generator-rate check;
//! - [`kernels`]: symmetric jump laws and the approximating generators;
//! - [`ctrw`]: the enhanced chain `(X, S)`, its hitting time and Monte Carlo
//!   estimators;
//! - [`subordination`]: representation formulas over a transition density;
//! - [`solver`]: the terminal-value problem for the right Marchaud-type
//!   derivative on a periodic grid;
//! - [`oracles`]: Mittag-Leffler, constant-order solutions and subordinator
//!   laws.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ctrw;
pub mod error;
pub mod field;
pub mod kernels;
pub mod linalg;
pub mod model;
pub mod oracles;
pub mod quad;
pub mod rng;
pub mod solver;
pub mod subordination;
pub mod sum;
pub mod waiting;

pub use ctrw::{ChainConfig, ChainState, DensityGrid, MCEstimate};
pub use error::{Error, Result};
pub use field::{MatrixField, ScalarField};
pub use kernels::JumpDistribution;
pub use model::{Model, ModelConfig, SpatialConfig};
pub use solver::{Field, Grid, TimeWeights};
pub use waiting::{HeadKind, RateReport, WaitingLaw};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
