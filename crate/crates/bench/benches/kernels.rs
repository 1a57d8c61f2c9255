// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use varfrac_core::ctrw::{estimate_functional, step_chain, Chain};
use varfrac_core::kernels::SpatialKernel;
use varfrac_core::oracles::{mittag_leffler, subordinator_cdf};
use varfrac_core::solver::solve_terminal_problem;
use varfrac_core::waiting::WaitingLaw;
use varfrac_core::{ChainConfig, ChainState, Grid, HeadKind, Model, ModelConfig, ScalarField};

fn variable_order() -> Model {
    let a = ScalarField::Trig {
        offset: 1.0,
        amplitude: 0.5,
        wavevector: vec![1.0],
        phase: 0.0,
        time_frequency: 0.0,
    };
    Model::new(ModelConfig::diffusion_1d(0.4, a, 0.5, 1.5, 1.0)).unwrap()
}

fn oracles(c: &mut Criterion) {
    c.bench_function("mittag_leffler 0.5 series", |b| {
        b.iter(|| mittag_leffler(0.5, black_box(-0.8)))
    });
    c.bench_function("mittag_leffler 0.5 integral", |b| {
        b.iter(|| mittag_leffler(0.5, black_box(-30.0)))
    });
    c.bench_function("subordinator_cdf 0.5", |b| {
        b.iter(|| subordinator_cdf(0.5, 1.0, black_box(3.0)))
    });
    c.bench_function("subordinator_cdf 0.8", |b| {
        b.iter(|| subordinator_cdf(0.8, 1.0, black_box(3.0)))
    });
}

fn chain(c: &mut Criterion) {
    let m = variable_order();
    let k = SpatialKernel::from_model(&m).unwrap();
    let law = WaitingLaw::new(0.2, 0.6, None, HeadKind::MomentMatched).unwrap();
    c.bench_function("step_chain", |b| {
        b.iter(|| {
            step_chain(
                ChainState::start(&[0.3], 0.0),
                1e-3,
                &m,
                &k,
                &law,
                black_box(0.4),
                black_box(0.6),
            )
        })
    });
    let ch = Chain::new(&m, &k, &law, ChainConfig::new(1e-2)).unwrap();
    c.bench_function("monte carlo 1000 paths tau=1e-2", |b| {
        b.iter(|| {
            estimate_functional(
                &ch,
                |x: &[f64]| x[0].cos(),
                &[0.0],
                0.0,
                1.0,
                1000,
                black_box(3),
            )
        })
    });
}

fn solver(c: &mut Criterion) {
    let m = variable_order();
    let stable = Model::new(ModelConfig::stable_1d(
        0.4,
        ScalarField::constant(1.0),
        1.0,
        1.0,
        1.5,
        1.0,
    ))
    .unwrap();
    let grid = Grid::new(128, std::f64::consts::TAU, 256, 1.0).unwrap();
    let mut g = c.benchmark_group("solver 128x256");
    g.sample_size(10);
    g.bench_function("diffusion, variable order", |b| {
        b.iter(|| solve_terminal_problem(&m, f64::cos, &grid))
    });
    g.bench_function("stable 1.5, constant order", |b| {
        b.iter(|| solve_terminal_problem(&stable, f64::cos, &grid))
    });
    g.finish();
}

criterion_group!(benches, oracles, chain, solver);
criterion_main!(benches);
