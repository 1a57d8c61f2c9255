// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Built-in configs, one per acceptance criterion.

use varfrac_core::{HeadKind, ModelConfig, ScalarField};

use crate::config::{
    DensityLayout, ExperimentConfig, ExperimentKind, GridSize, Numerics, Problem, RateFunction,
    SCHEMA_VERSION,
};

pub struct Preset {
    pub name: &'static str,
    pub criterion: u8,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

fn base(
    experiment: ExperimentKind,
    model: Option<ModelConfig>,
    numerics: Numerics,
) -> ExperimentConfig {
    ExperimentConfig {
        version: SCHEMA_VERSION,
        experiment,
        model,
        problem: Problem::default(),
        numerics,
        seed: 20_260_101,
        output_dir: None,
    }
}

/// `a = 1`, `gamma = 1/2`, `G = 1`.
pub fn half_order_model() -> ModelConfig {
    ModelConfig::diffusion_1d(0.5, ScalarField::constant(1.0), 1.0, 1.0, 1.0)
}

/// `alpha = 0.4`, `a(x) = 1 + sin(x) / 2`.
pub fn variable_order_field() -> ScalarField {
    ScalarField::Trig {
        offset: 1.0,
        amplitude: 0.5,
        wavevector: vec![1.0],
        phase: 0.0,
        time_frequency: 0.0,
    }
}

pub fn variable_order_model() -> ModelConfig {
    ModelConfig::diffusion_1d(0.4, variable_order_field(), 0.5, 1.5, 1.0)
}

fn grid(n_x: usize, n_s: usize) -> GridSize {
    GridSize { n_x, n_s }
}

pub fn presets() -> Vec<Preset> {
    let d = Numerics::default;
    let rate = |f| Numerics {
        alphas: vec![0.3, 0.5, 0.7],
        h: vec![0.1, 0.05, 0.025, 0.0125],
        rate_function: f,
        ..d()
    };
    vec![
        Preset {
            name: "rate-check",
            criterion: 1,
            description: "generator rate of the Pareto waiting law against C_B L h^(1-alpha)",
            config: base(ExperimentKind::RateCheck, None, rate(RateFunction::YExp)),
        },
        Preset {
            name: "exactness-window",
            criterion: 2,
            description: "test function supported past B h: the rate check is exact",
            config: base(
                ExperimentKind::ExactnessWindow,
                None,
                rate(RateFunction::BeyondThreshold),
            ),
        },
        Preset {
            name: "triangulation",
            criterion: 3,
            description:
                "constant order 1/2: solver, Monte Carlo and subordination against Mittag-Leffler",
            config: base(
                ExperimentKind::Triangulation,
                Some(half_order_model()),
                Numerics {
                    tau: vec![1e-3],
                    n_traj: 100_000,
                    grids: vec![grid(256, 512)],
                    ..d()
                },
            ),
        },
        Preset {
            name: "variable-order",
            criterion: 4,
            description:
                "a = 1 + sin(x)/2, alpha = 0.4: solver ladder against the Monte Carlo tau ladder",
            config: base(
                ExperimentKind::VariableOrder,
                Some(variable_order_model()),
                Numerics {
                    tau: vec![1e-2, 1e-3],
                    n_traj: 4_000_000,
                    grids: vec![grid(128, 256), grid(256, 512), grid(512, 1024)],
                    head: HeadKind::MomentMatched,
                    ..d()
                },
            ),
        },
        Preset {
            name: "conservation",
            criterion: 5,
            description: "F = 1 through solver, Monte Carlo and both subordination routes",
            config: base(
                ExperimentKind::Conservation,
                Some(half_order_model()),
                Numerics {
                    tau: vec![1e-2],
                    n_traj: 20_000,
                    grids: vec![grid(256, 512)],
                    density: DensityLayout {
                        u_max: 4.0,
                        u_points: 161,
                        y_half_width: 6.0,
                        y_cells: 60,
                        v_cells: 100,
                    },
                    ..d()
                },
            ),
        },
        Preset {
            name: "maximum-principle",
            criterion: 6,
            description: "variable-order stable jumps: solutions stay within the terminal range",
            config: base(
                ExperimentKind::MaximumPrinciple,
                Some(ModelConfig::stable_1d(
                    0.4,
                    variable_order_field(),
                    0.5,
                    1.5,
                    1.5,
                    1.0,
                )),
                Numerics {
                    grids: vec![grid(128, 256)],
                    ..d()
                },
            ),
        },
        Preset {
            name: "discrete-identity",
            criterion: 7,
            description: "exact lattice recursion against the lattice chain",
            config: ExperimentConfig {
                problem: Problem {
                    x0: 0.3,
                    ..Problem::default()
                },
                ..base(
                    ExperimentKind::DiscreteIdentity,
                    Some(variable_order_model()),
                    Numerics {
                        tau: vec![0.02],
                        n_traj: 100_000,
                        k: Some(4.0),
                        time_cells: 100,
                        head: HeadKind::MomentMatched,
                        ..d()
                    },
                )
            },
        },
        Preset {
            name: "subordinator-law",
            criterion: 8,
            description:
                "S marginal after 1000 steps of 1e-3 against the inverted Laplace transform",
            config: base(
                ExperimentKind::SubordinatorLaw,
                Some(half_order_model()),
                Numerics {
                    tau: vec![1e-3],
                    n_traj: 100_000,
                    steps: 1000,
                    ..d()
                },
            ),
        },
        Preset {
            name: "determinism",
            criterion: 9,
            description: "Monte Carlo estimate on 1, 2 and 4 workers",
            config: base(
                ExperimentKind::Determinism,
                Some(variable_order_model()),
                Numerics {
                    tau: vec![1e-2],
                    n_traj: 20_000,
                    threads: vec![1, 2, 4],
                    head: HeadKind::MomentMatched,
                    ..d()
                },
            ),
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_preset_per_criterion_and_all_valid() {
        let all = presets();
        let criteria: Vec<u8> = all.iter().map(|p| p.criterion).collect();
        assert_eq!(criteria, (1..=9).collect::<Vec<_>>());
        for p in &all {
            p.config.validate().unwrap();
            assert_eq!(p.config.experiment.name(), p.name);
            let text = serde_json::to_string(&p.config).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), p.config);
        }
    }
}
