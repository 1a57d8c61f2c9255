// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! The enhanced chain `(X, S)`, its hitting time and the scaled CTRW.
//!
//! One step maps `(x, s)` to `(x + tau^{1/beta} y, s + tau^{1/gamma} r)`,
//! with `y ~ p(x, .)`, `r ~ Q_gamma` and `gamma = alpha a(s, x)` taken at
//! the pre-step state. The CTRW at horizon `t` is `X` at the first step
//! where `S >= t`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::JumpKernel;
use crate::model::Model;
use crate::rng::{open01, stream, StreamRng};
use crate::sum::NeumaierSum;
use crate::waiting::WaitingLaw;

pub const DEFAULT_STEP_BUDGET: u64 = 100_000_000;

/// Numerical settings shared by every trajectory of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainConfig {
    pub tau: f64,
    pub step_budget: u64,
    /// Round each waiting increment up to a multiple of `(t - s0) / n`.
    /// Used to compare against the exhaustive lattice recursion.
    pub time_lattice: Option<u32>,
}

impl ChainConfig {
    pub fn new(tau: f64) -> Self {
        Self {
            tau,
            step_budget: DEFAULT_STEP_BUDGET,
            time_lattice: None,
        }
    }

    pub fn with_step_budget(mut self, budget: u64) -> Self {
        self.step_budget = budget;
        self
    }

    pub fn with_time_lattice(mut self, cells: u32) -> Self {
        self.time_lattice = Some(cells);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::NonPositiveBound {
                name: "tau",
                value: self.tau,
            });
        }
        if self.time_lattice == Some(0) {
            return Err(Error::InvalidParameter(
                "time lattice needs at least one cell".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainState {
    pub x: [f64; 2],
    pub s: f64,
    pub k: u64,
}

impl ChainState {
    pub fn start(x0: &[f64], s0: f64) -> Self {
        let mut x = [0.0; 2];
        x[..x0.len()].copy_from_slice(x0);
        Self { x, s: s0, k: 0 }
    }
}

/// Everything a trajectory reads. Shared read-only across workers.
#[derive(Clone, Copy)]
pub struct Chain<'a> {
    pub model: &'a Model,
    pub kernel: &'a dyn JumpKernel,
    pub law: &'a WaitingLaw,
    pub config: ChainConfig,
}

impl<'a> Chain<'a> {
    pub fn new(
        model: &'a Model,
        kernel: &'a dyn JumpKernel,
        law: &'a WaitingLaw,
        config: ChainConfig,
    ) -> Result<Self> {
        config.validate()?;
        if kernel.dim() != model.dim() {
            return Err(Error::InvalidParameter(format!(
                "kernel dimension {} does not match model dimension {}",
                kernel.dim(),
                model.dim()
            )));
        }
        let (lo, hi) = model.gamma_range();
        let (law_lo, law_hi) = law.gamma_range();
        if lo < law_lo - 1e-12 || hi > law_hi + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "waiting law covers [{law_lo}, {law_hi}] but the model needs [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            model,
            kernel,
            law,
            config,
        })
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }
}

/// Spatial and temporal increments of one step, before they are added.
#[inline]
fn increments(
    state: &ChainState,
    tau: f64,
    model: &Model,
    kernel: &dyn JumpKernel,
    law: &WaitingLaw,
    u_jump: f64,
    u_wait: f64,
) -> ([f64; 2], f64) {
    let dim = model.dim();
    let x = &state.x[..dim];
    let y = kernel.sample(x, u_jump);
    let space = tau.powf(1.0 / kernel.beta());
    let gamma = model.gamma_at(state.s, x);
    let r = law.sample(gamma, u_wait);
    ([space * y[0], space * y[1]], tau.powf(1.0 / gamma) * r)
}

/// One transition of the enhanced chain.
pub fn step_chain(
    state: ChainState,
    tau: f64,
    model: &Model,
    kernel: &dyn JumpKernel,
    law: &WaitingLaw,
    u_jump: f64,
    u_wait: f64,
) -> ChainState {
    let (dx, ds) = increments(&state, tau, model, kernel, law, u_jump, u_wait);
    ChainState {
        x: [state.x[0] + dx[0], state.x[1] + dx[1]],
        s: state.s + ds,
        k: state.k + 1,
    }
}

/// Result of running one trajectory to a horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    /// `X` at the first step with `S >= t`.
    pub x: [f64; 2],
    /// `X` one step earlier.
    pub previous_x: [f64; 2],
    /// `T = n_steps * tau`.
    pub hit_time: f64,
    pub n_steps: u64,
    pub s: f64,
}

/// Iterate the chain from `(x0, s0)` until `S >= t`.
pub fn run_to_horizon(
    chain: &Chain,
    x0: &[f64],
    s0: f64,
    t: f64,
    rng: &mut StreamRng,
) -> Result<Outcome> {
    if !(t > s0) {
        return Err(Error::DomainError(format!(
            "horizon {t} must exceed start time {s0}"
        )));
    }
    let tau = chain.config.tau;
    let mut state = ChainState::start(x0, s0);
    // on the time lattice S is tracked as an integer cell index
    let lattice = chain
        .config
        .time_lattice
        .map(|m| (m as f64, (t - s0) / m as f64));
    let mut cell = 0.0f64;
    loop {
        if state.k >= chain.config.step_budget {
            return Err(Error::StepBudgetExceeded {
                budget: chain.config.step_budget,
            });
        }
        let u_jump = open01(rng);
        let u_wait = open01(rng);
        let (dx, ds) = increments(
            &state,
            tau,
            chain.model,
            chain.kernel,
            chain.law,
            u_jump,
            u_wait,
        );
        let previous = state.x;
        state.x = [previous[0] + dx[0], previous[1] + dx[1]];
        state.k += 1;
        let hit = match lattice {
            Some((cells, delta)) => {
                cell += (ds / delta).ceil().max(1.0);
                state.s = s0 + cell.min(cells) * delta;
                cell >= cells
            }
            None => {
                state.s += ds;
                state.s >= t
            }
        };
        if hit {
            return Ok(Outcome {
                x: state.x,
                previous_x: previous,
                hit_time: state.k as f64 * tau,
                n_steps: state.k,
                s: state.s,
            });
        }
    }
}

/// The visited states `(k, x, s)` of one trajectory, including the start.
pub fn trajectory_path(
    chain: &Chain,
    x0: &[f64],
    s0: f64,
    t: f64,
    seed: u64,
    index: u64,
) -> Result<Vec<ChainState>> {
    if !(t > s0) {
        return Err(Error::DomainError(format!(
            "horizon {t} must exceed start time {s0}"
        )));
    }
    let mut rng = stream(seed, index);
    let mut state = ChainState::start(x0, s0);
    let mut path = vec![state];
    while state.s < t {
        if state.k >= chain.config.step_budget {
            return Err(Error::StepBudgetExceeded {
                budget: chain.config.step_budget,
            });
        }
        let u_jump = open01(&mut rng);
        let u_wait = open01(&mut rng);
        state = step_chain(
            state,
            chain.config.tau,
            chain.model,
            chain.kernel,
            chain.law,
            u_jump,
            u_wait,
        );
        path.push(state);
    }
    Ok(path)
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_traj: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// Mean and `sample-std / sqrt(n)` of values listed in trajectory order.
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().copied().collect::<NeumaierSum>().value() / n;
        let ss: NeumaierSum = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if values.len() > 1 {
            ss.value() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n).sqrt(),
            n_traj: values.len() as u64,
            seed,
        }
    }
}

const MIN_TRAJECTORIES: u64 = 100;

/// Evaluate `g` on the outcome of every trajectory. Values come back in
/// trajectory order whatever the thread count.
pub fn outcomes_map<G>(
    chain: &Chain,
    x0: &[f64],
    s0: f64,
    t: f64,
    n_traj: u64,
    seed: u64,
    g: G,
) -> Result<Vec<f64>>
where
    G: Fn(&Outcome) -> f64 + Sync,
{
    if x0.len() != chain.dim() {
        return Err(Error::InvalidParameter(format!(
            "start point has {} coordinates, model dimension is {}",
            x0.len(),
            chain.dim()
        )));
    }
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            run_to_horizon(chain, x0, s0, t, &mut rng).map(|o| g(&o))
        })
        .collect()
}

/// Estimate `E F(X~(t))` started from `(x0, s0)`.
pub fn estimate_functional<F>(
    chain: &Chain,
    f: F,
    x0: &[f64],
    s0: f64,
    t: f64,
    n_traj: u64,
    seed: u64,
) -> Result<MCEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    estimate_truncated(chain, f, x0, s0, t, None, n_traj, seed)
}

/// Estimate `E F(X~(t)) 1(T in [1/K, K])`; `k = None` drops the indicator.
#[allow(clippy::too_many_arguments)]
pub fn estimate_truncated<F>(
    chain: &Chain,
    f: F,
    x0: &[f64],
    s0: f64,
    t: f64,
    k: Option<f64>,
    n_traj: u64,
    seed: u64,
) -> Result<MCEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n_traj < MIN_TRAJECTORIES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_TRAJECTORIES} trajectories, got {n_traj}"
        )));
    }
    let dim = chain.dim();
    let values = outcomes_map(chain, x0, s0, t, n_traj, seed, |o| match k {
        Some(k) if o.hit_time < 1.0 / k || o.hit_time > k => 0.0,
        _ => f(&o.x[..dim]),
    })?;
    Ok(MCEstimate::from_values(&values, seed))
}

/// Chain marginals `(X, S)` after each of the given step counts, one row
/// per trajectory.
pub fn sample_marginals(
    chain: &Chain,
    x0: &[f64],
    s0: f64,
    steps: &[u64],
    n_traj: u64,
    seed: u64,
) -> Result<Vec<Vec<ChainState>>> {
    if steps.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "step counts must be nondecreasing".into(),
        ));
    }
    let last = steps.last().copied().unwrap_or(0);
    if last > chain.config.step_budget {
        return Err(Error::StepBudgetExceeded {
            budget: chain.config.step_budget,
        });
    }
    let tau = chain.config.tau;
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let mut state = ChainState::start(x0, s0);
            let mut out = Vec::with_capacity(steps.len());
            for &target in steps {
                while state.k < target {
                    let u_jump = open01(&mut rng);
                    let u_wait = open01(&mut rng);
                    state = step_chain(
                        state,
                        tau,
                        chain.model,
                        chain.kernel,
                        chain.law,
                        u_jump,
                        u_wait,
                    );
                }
                out.push(state);
            }
            Ok(out)
        })
        .collect()
}

/// Histogram of a transition density `G(u; x, s; y, v)` for a fixed start,
/// or its exact cell masses. One slice per entry of `u_grid`, each of
/// `ny * nv` cells stored with `v` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub u_grid: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub v_edges: Vec<f64>,
    /// Probability of each cell.
    pub mass: Vec<Vec<f64>>,
    /// Probability outside the cells.
    pub overflow: Vec<f64>,
    /// Trajectory count for empirical grids; `None` for exact masses.
    pub n_traj: Option<u64>,
}

impl DensityGrid {
    pub fn ny(&self) -> usize {
        self.y_edges.len() - 1
    }

    pub fn nv(&self) -> usize {
        self.v_edges.len() - 1
    }

    #[inline]
    pub fn cell_mass(&self, iu: usize, iy: usize, iv: usize) -> f64 {
        self.mass[iu][iy * self.nv() + iv]
    }

    /// Histogram density value `mass / (dy dv)`.
    pub fn value(&self, iu: usize, iy: usize, iv: usize) -> f64 {
        let dy = self.y_edges[iy + 1] - self.y_edges[iy];
        let dv = self.v_edges[iv + 1] - self.v_edges[iv];
        self.cell_mass(iu, iy, iv) / (dy * dv)
    }

    /// Cell masses plus overflow of slice `iu`.
    pub fn slice_total(&self, iu: usize) -> f64 {
        self.mass[iu]
            .iter()
            .copied()
            .collect::<NeumaierSum>()
            .value()
            + self.overflow[iu]
    }

    /// Multinomial standard error of `sum_c w_c mass_c` over slice `iu`;
    /// zero for exact grids.
    pub fn slice_std_error(&self, iu: usize, weights: &[f64]) -> f64 {
        let Some(n) = self.n_traj else { return 0.0 };
        let mut first = NeumaierSum::new();
        let mut second = NeumaierSum::new();
        for (w, p) in weights.iter().zip(&self.mass[iu]) {
            first.add(w * p);
            second.add(w * w * p);
        }
        let var = (second.value() - first.value().powi(2)).max(0.0) / n as f64;
        var.sqrt()
    }
}

fn check_edges(name: &str, edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!(
            "{name} edges must be increasing with at least two entries"
        )));
    }
    Ok(())
}

fn locate(edges: &[f64], value: f64) -> Option<usize> {
    if value < edges[0] || value >= edges[edges.len() - 1] {
        return None;
    }
    Some(edges.partition_point(|e| *e <= value) - 1)
}

/// Histogram of the 1-D chain `(X, S)` at step counts `floor(u / tau)`,
/// normalised by the trajectory count.
#[allow(clippy::too_many_arguments)]
pub fn empirical_transition_density(
    chain: &Chain,
    x0: f64,
    s0: f64,
    u_grid: &[f64],
    y_edges: &[f64],
    v_edges: &[f64],
    n_traj: u64,
    seed: u64,
) -> Result<DensityGrid> {
    if chain.dim() != 1 {
        return Err(Error::DimensionUnsupported {
            kind: "transition density",
            dim: chain.dim(),
        });
    }
    check_edges("y", y_edges)?;
    check_edges("v", v_edges)?;
    if u_grid.iter().any(|u| !(*u >= 0.0)) || u_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "u grid must be nonnegative and nondecreasing".into(),
        ));
    }
    if n_traj == 0 {
        return Err(Error::InvalidParameter(
            "need at least one trajectory".into(),
        ));
    }
    let tau = chain.config.tau;
    let steps: Vec<u64> = u_grid.iter().map(|u| (u / tau).floor() as u64).collect();
    let rows = sample_marginals(chain, &[x0], s0, &steps, n_traj, seed)?;
    let nv = v_edges.len() - 1;
    let cells = (y_edges.len() - 1) * nv;
    let mut counts = vec![vec![0u64; cells]; u_grid.len()];
    let mut overflow = vec![0u64; u_grid.len()];
    for row in &rows {
        for (iu, state) in row.iter().enumerate() {
            match (locate(y_edges, state.x[0]), locate(v_edges, state.s)) {
                (Some(iy), Some(iv)) => counts[iu][iy * nv + iv] += 1,
                _ => overflow[iu] += 1,
            }
        }
    }
    let n = n_traj as f64;
    Ok(DensityGrid {
        u_grid: u_grid.to_vec(),
        y_edges: y_edges.to_vec(),
        v_edges: v_edges.to_vec(),
        mass: counts
            .iter()
            .map(|c| c.iter().map(|&k| k as f64 / n).collect())
            .collect(),
        overflow: overflow.iter().map(|&k| k as f64 / n).collect(),
        n_traj: Some(n_traj),
    })
}
