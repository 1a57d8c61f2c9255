// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Experiment orchestration for `varfrac`: versioned JSON configs, named
//! experiments, long-format CSV results, manifests, SVG plots and the
//! acceptance judge.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod judge;
pub mod presets;
pub mod results;
pub mod run;
pub mod svg;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::CliError;
pub use judge::Check;
pub use run::{compare, run_config, run_path, RunOptions};
