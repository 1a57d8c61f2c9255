// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Representation formulas: expectations of the CTRW as quadratures of the
//! chain's transition density against the tail functional
//! `theta(v) = (t - v)^{-gamma(v, y)} / gamma(v, y)`.

use rayon::prelude::*;
use statrs::function::erf::erf;

use crate::ctrw::DensityGrid;
use crate::error::{Error, Result};
use crate::model::{Model, SpatialConfig};
use crate::oracles;
use crate::sum::NeumaierSum;
use crate::waiting::WaitingLaw;

/// `int_{t-v}^inf w^{-1-gamma} dw` with `gamma = alpha a(v, y)`.
pub fn theta_tail(model: &Model, v: f64, y: &[f64], t: f64) -> Result<f64> {
    if !(v < t) {
        return Err(Error::DomainError(format!(
            "tail needs v < t, got v={v}, t={t}"
        )));
    }
    let g = model.gamma_at(v, y);
    Ok((t - v).powf(-g) / g)
}

/// Exact `int_a^b (t - v)^{-g} / g dv` for `a < b <= t`.
fn theta_cell_integral(g: f64, t: f64, a: f64, b: f64) -> f64 {
    ((t - a).powf(1.0 - g) - (t - b).powf(1.0 - g)) / (g * (1.0 - g))
}

/// Value and propagated sampling error of a quadrature over a
/// [`DensityGrid`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Per-cell weights `mass -> contribution` for each `y` row: the average
/// of `theta` over the part of the `v` cell below `t`, with `gamma` frozen
/// at the cell midpoint.
fn theta_weights(grid: &DensityGrid, model: &Model, s0: f64, t: f64) -> Result<Vec<f64>> {
    let edges = &grid.v_edges;
    let scale = (t - s0).abs().max(1.0);
    if edges[0] > s0 + 1e-12 * scale {
        return Err(Error::SingularityResolution(format!(
            "v grid starts at {} above the start time {s0}",
            edges[0]
        )));
    }
    if !edges.iter().any(|e| (e - t).abs() <= 1e-12 * scale) {
        return Err(Error::SingularityResolution(format!(
            "no v edge at the horizon t = {t}; the last cell before t is not resolved"
        )));
    }
    let nv = grid.nv();
    let ny = grid.ny();
    let mut w = vec![0.0; ny * nv];
    for iy in 0..ny {
        let y = 0.5 * (grid.y_edges[iy] + grid.y_edges[iy + 1]);
        for iv in 0..nv {
            let (a, b) = (edges[iv], edges[iv + 1]);
            if a >= t - 1e-12 * scale {
                continue;
            }
            let b_eff = b.min(t);
            let g = model.gamma_at(0.5 * (a + b_eff), &[y]);
            w[iy * nv + iv] = theta_cell_integral(g, t, a, b_eff) / (b - a);
        }
    }
    Ok(w)
}

/// Trapezoid weights on the part of `u_grid` inside `[1/K, K]`.
fn u_weights(u_grid: &[f64], k: Option<f64>) -> Vec<f64> {
    let inside: Vec<bool> = u_grid
        .iter()
        .map(|&u| k.is_none_or(|k| u >= 1.0 / k && u <= k))
        .collect();
    let mut w = vec![0.0; u_grid.len()];
    for i in 0..u_grid.len().saturating_sub(1) {
        if inside[i] && inside[i + 1] {
            let h = 0.5 * (u_grid[i + 1] - u_grid[i]);
            w[i] += h;
            w[i + 1] += h;
        }
    }
    w
}

fn check_grid(grid: &DensityGrid, model: &Model, s0: f64, t: f64) -> Result<()> {
    if model.dim() != 1 {
        return Err(Error::DimensionUnsupported {
            kind: "subordination quadrature",
            dim: model.dim(),
        });
    }
    if !(t > s0) {
        return Err(Error::DomainError(format!(
            "horizon {t} must exceed start time {s0}"
        )));
    }
    if grid.u_grid.len() < 2 {
        return Err(Error::InvalidParameter("need at least two u points".into()));
    }
    Ok(())
}

/// `E F(X~(t)) 1(T in [1/K, K])` by product integration over `v`, cell
/// midpoints in `y` and the trapezoid rule in `u`. The start point of the
/// grid is implicit in `grid`; `s0` fixes the lower `v` limit.
pub fn subordinated_expectation<F>(
    grid: &DensityGrid,
    model: &Model,
    f: F,
    s0: f64,
    t: f64,
    k: Option<f64>,
) -> Result<QuadratureEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_grid(grid, model, s0, t)?;
    let theta = theta_weights(grid, model, s0, t)?;
    let nv = grid.nv();
    let fy: Vec<f64> = (0..grid.ny())
        .map(|iy| f(0.5 * (grid.y_edges[iy] + grid.y_edges[iy + 1])))
        .collect();
    let cell_weights: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(c, w)| w * fy[c / nv])
        .collect();
    let wu = u_weights(&grid.u_grid, k);
    let slices: Vec<(f64, f64)> = (0..grid.u_grid.len())
        .into_par_iter()
        .map(|iu| {
            let v: NeumaierSum = cell_weights
                .iter()
                .zip(&grid.mass[iu])
                .map(|(w, m)| w * m)
                .collect();
            (v.value(), grid.slice_std_error(iu, &cell_weights))
        })
        .collect();
    let value: NeumaierSum = slices.iter().zip(&wu).map(|((v, _), w)| v * w).collect();
    let err: NeumaierSum = slices.iter().zip(&wu).map(|((_, e), w)| e * w).collect();
    Ok(QuadratureEstimate {
        value: value.value(),
        std_error: err.value(),
    })
}

/// Density of `X~(t)` on the `y` cells of the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct YDensity {
    pub y_centers: Vec<f64>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl YDensity {
    pub fn total_mass(&self, y_edges: &[f64]) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * (y_edges[i + 1] - y_edges[i]))
            .collect::<NeumaierSum>()
            .value()
    }
}

pub fn subordinated_density(
    grid: &DensityGrid,
    model: &Model,
    s0: f64,
    t: f64,
    k: Option<f64>,
) -> Result<YDensity> {
    check_grid(grid, model, s0, t)?;
    let theta = theta_weights(grid, model, s0, t)?;
    let nv = grid.nv();
    let wu = u_weights(&grid.u_grid, k);
    let ny = grid.ny();
    let rows: Vec<(f64, f64, f64)> = (0..ny)
        .into_par_iter()
        .map(|iy| {
            let dy = grid.y_edges[iy + 1] - grid.y_edges[iy];
            let mut weights = vec![0.0; theta.len()];
            weights[iy * nv..(iy + 1) * nv].copy_from_slice(&theta[iy * nv..(iy + 1) * nv]);
            let mut value = NeumaierSum::new();
            let mut err = NeumaierSum::new();
            for (iu, w) in wu.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let slice = &grid.mass[iu][iy * nv..(iy + 1) * nv];
                let v: f64 = theta[iy * nv..(iy + 1) * nv]
                    .iter()
                    .zip(slice)
                    .map(|(a, b)| a * b)
                    .sum();
                value.add(w * v);
                err.add(w * grid.slice_std_error(iu, &weights));
            }
            (
                0.5 * (grid.y_edges[iy] + grid.y_edges[iy + 1]),
                value.value() / dy,
                err.value() / dy,
            )
        })
        .collect();
    Ok(YDensity {
        y_centers: rows.iter().map(|r| r.0).collect(),
        values: rows.iter().map(|r| r.1).collect(),
        std_errors: rows.iter().map(|r| r.2).collect(),
    })
}

/// `c` for a 1-D diffusion model with constant `G = c`.
pub fn constant_diffusion(model: &Model) -> Result<f64> {
    match model.spatial() {
        SpatialConfig::Diffusion { g, .. } if model.dim() == 1 && g.is_constant() => {
            Ok(g.eval(&[0.0]).0)
        }
        _ => Err(Error::InvalidParameter(
            "this construction needs a 1-D diffusion model with constant G".into(),
        )),
    }
}

/// Exact cell masses of the limit density for constant order and constant
/// `G = c`: `X` is Brownian with variance `c u`, independent of `S`.
pub fn analytic_density_grid(
    model: &Model,
    x0: f64,
    s0: f64,
    u_grid: &[f64],
    y_edges: &[f64],
    v_edges: &[f64],
) -> Result<DensityGrid> {
    let c = constant_diffusion(model)?;
    if !model.has_constant_order() {
        return Err(Error::InvalidParameter(
            "analytic density needs a constant order".into(),
        ));
    }
    let gamma = model.gamma_at(s0, &[x0]);
    let nv = v_edges.len() - 1;
    let ny = y_edges.len() - 1;
    let slices: Vec<(Vec<f64>, f64)> = u_grid
        .par_iter()
        .map(|&u| -> Result<(Vec<f64>, f64)> {
            let mut mass = vec![0.0; ny * nv];
            if u <= 0.0 {
                let iy = y_edges.partition_point(|e| *e <= x0);
                let iv = v_edges.partition_point(|e| *e <= s0);
                if iy == 0 || iy > ny || iv == 0 || iv > nv {
                    return Ok((mass, 1.0));
                }
                mass[(iy - 1) * nv + iv - 1] = 1.0;
                return Ok((mass, 0.0));
            }
            let sd = (c * u).sqrt();
            let ycdf: Vec<f64> = y_edges
                .iter()
                .map(|y| 0.5 * (1.0 + erf((y - x0) / (sd * std::f64::consts::SQRT_2))))
                .collect();
            let vcdf = v_edges
                .iter()
                .map(|v| oracles::subordinator_cdf(gamma, u, v - s0))
                .collect::<Result<Vec<f64>>>()?;
            let mut total = NeumaierSum::new();
            for iy in 0..ny {
                let py = ycdf[iy + 1] - ycdf[iy];
                for iv in 0..nv {
                    let p = py * (vcdf[iv + 1] - vcdf[iv]).max(0.0);
                    mass[iy * nv + iv] = p;
                    total.add(p);
                }
            }
            Ok((mass, (1.0 - total.value()).max(0.0)))
        })
        .collect::<Result<_>>()?;
    Ok(DensityGrid {
        u_grid: u_grid.to_vec(),
        y_edges: y_edges.to_vec(),
        v_edges: v_edges.to_vec(),
        mass: slices.iter().map(|s| s.0.clone()).collect(),
        overflow: slices.iter().map(|s| s.1).collect(),
        n_traj: None,
    })
}

/// Default cap on lattice states `(position, time cell)`.
pub const DEFAULT_LATTICE_LIMIT: usize = 50_000_000;

/// Exact expectation for the chain on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeExpectation {
    pub value: f64,
    /// Contribution of trajectories that hit at step `k + 1`.
    pub per_step: Vec<f64>,
    /// Probability of hitting within `[1/K, K]`.
    pub hit_mass: f64,
}

/// Settings of the lattice recursion. Positions are `x0 + j sqrt(c tau)`
/// and waiting increments are rounded up to multiples of
/// `(t - s0) / time_cells`, as in [`crate::ctrw::ChainConfig::with_time_lattice`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeConfig {
    pub tau: f64,
    pub time_cells: u32,
    pub state_limit: usize,
}

/// `E F(X~(t)) 1(T in [1/K, K])` by forward recursion of the lattice chain.
/// Every step advances at least one time cell, so the recursion ends after
/// at most `time_cells` steps.
#[allow(clippy::too_many_arguments)]
pub fn discrete_subordinated_expectation<F>(
    model: &Model,
    law: &WaitingLaw,
    config: LatticeConfig,
    f: F,
    x0: f64,
    s0: f64,
    t: f64,
    k: Option<f64>,
) -> Result<LatticeExpectation>
where
    F: Fn(f64) -> f64 + Sync,
{
    let c = constant_diffusion(model)?;
    if !(t > s0) {
        return Err(Error::DomainError(format!(
            "horizon {t} must exceed start time {s0}"
        )));
    }
    if !(config.tau > 0.0) || config.time_cells == 0 {
        return Err(Error::InvalidParameter(
            "need tau > 0 and at least one time cell".into(),
        ));
    }
    let cells = config.time_cells as usize;
    let width = 2 * cells + 1;
    let states = width * cells;
    if states > config.state_limit {
        return Err(Error::LatticeOverflow {
            states,
            limit: config.state_limit,
        });
    }
    let tau = config.tau;
    let h = (c * tau).sqrt();
    let delta = (t - s0) / cells as f64;
    let pos = |j: usize| x0 + (j as f64 - cells as f64) * h;
    let fx: Vec<f64> = (0..width).map(|j| f(pos(j))).collect();

    // p[j * cells + m]: mass at position index j, time cell m < cells
    let mut p = vec![0.0; states];
    p[cells * cells] = 1.0;
    let mut per_step = Vec::new();
    let mut hit_mass = NeumaierSum::new();
    for step in 1..=cells {
        let counted = k.is_none_or(|k| {
            let time = step as f64 * tau;
            time >= 1.0 / k && time <= k
        });
        // Rows are independent: each builds its own outflow.
        let radius = step.min(cells);
        let lo = cells.saturating_sub(radius);
        let hi = (cells + radius).min(width - 1);
        let rows: Vec<(usize, Vec<f64>, f64)> = (lo..=hi)
            .into_par_iter()
            .filter_map(|j| {
                let row = &p[j * cells..(j + 1) * cells];
                if row.iter().all(|v| *v == 0.0) {
                    return None;
                }
                let mut moved = vec![0.0; cells];
                let mut hit = NeumaierSum::new();
                let x = [pos(j)];
                for (m, &mass) in row.iter().enumerate() {
                    if mass == 0.0 {
                        continue;
                    }
                    let g = model.gamma_at(s0 + m as f64 * delta, &x);
                    let shape = law.shape(g);
                    let scale = tau.powf(-1.0 / g);
                    let mut prev = 0.0;
                    for n in 1..(cells - m) {
                        let cdf = shape.cdf(n as f64 * delta * scale);
                        moved[m + n] += mass * (cdf - prev);
                        prev = cdf;
                    }
                    hit.add(mass * shape.tail_prob((cells - m - 1) as f64 * delta * scale));
                }
                Some((j, moved, hit.value()))
            })
            .collect();
        let mut next = vec![0.0; states];
        let mut contribution = NeumaierSum::new();
        let mut step_hit = NeumaierSum::new();
        for (j, moved, hit) in rows {
            for (jj, half) in [(j - 1, 0.5), (j + 1, 0.5)] {
                let dst = &mut next[jj * cells..(jj + 1) * cells];
                for (d, v) in dst.iter_mut().zip(&moved) {
                    *d += half * v;
                }
                step_hit.add(half * hit);
                contribution.add(half * hit * fx[jj]);
            }
        }
        per_step.push(if counted { contribution.value() } else { 0.0 });
        if counted {
            hit_mass.add(step_hit.value());
        }
        p = next;
        if p.iter().all(|v| *v == 0.0) {
            break;
        }
    }
    let value = per_step.iter().copied().collect::<NeumaierSum>().value();
    Ok(LatticeExpectation {
        value,
        per_step,
        hit_mass: hit_mass.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctrw::{empirical_transition_density, estimate_truncated, Chain, ChainConfig};
    use crate::field::ScalarField;
    use crate::kernels::SpatialKernel;
    use crate::model::ModelConfig;
    use crate::waiting::{build_waiting_law, HeadKind};

    fn half_order() -> Model {
        Model::new(ModelConfig::diffusion_1d(
            0.5,
            ScalarField::constant(1.0),
            1.0,
            1.0,
            1.0,
        ))
        .unwrap()
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn tail_values() {
        let m = half_order();
        assert!((theta_tail(&m, 0.0, &[0.0], 4.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((theta_tail(&m, 1.0, &[0.0], 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            theta_tail(&m, 2.0, &[0.0], 2.0),
            Err(Error::DomainError(_))
        ));
        let mut last = 0.0;
        for i in 0..100 {
            let v = theta_tail(&m, i as f64 / 100.0, &[0.0], 1.0).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn tail_integral_closed_form() {
        // int_s^t (t-v)^{-g}/g dv = (t-s)^{1-g} / (g (1-g))
        for g in [0.2, 0.5, 0.8] {
            let n = 64;
            let sum: f64 = (0..n)
                .map(|i| {
                    theta_cell_integral(
                        g,
                        3.0,
                        1.0 + 2.0 * i as f64 / n as f64,
                        1.0 + 2.0 * (i + 1) as f64 / n as f64,
                    )
                })
                .sum();
            let exact = 2f64.powf(1.0 - g) / (g * (1.0 - g));
            assert!((sum - exact).abs() < 1e-12 * exact);
        }
    }

    fn analytic_grid() -> (Model, DensityGrid) {
        let m = half_order();
        // quadratic spacing resolves the narrow Gaussians at small u
        let u: Vec<f64> = linspace(0.0, 2.0, 160).iter().map(|q| q * q).collect();
        let y = linspace(-6.0, 6.0, 240);
        let v = linspace(0.0, 1.0, 200);
        let g = analytic_density_grid(&m, 0.0, 0.0, &u, &y, &v).unwrap();
        (m, g)
    }

    #[test]
    fn analytic_grid_conserves_and_matches_oracle() {
        let (m, g) = analytic_grid();
        let one = subordinated_expectation(&g, &m, |_| 1.0, 0.0, 1.0, None).unwrap();
        assert!((one.value - 1.0).abs() < 1e-3, "{one:?}");
        assert_eq!(one.std_error, 0.0);
        let cos = subordinated_expectation(&g, &m, f64::cos, 0.0, 1.0, None).unwrap();
        let oracle = oracles::constant_order_solution(0.5, 1.0, 1.0, 1.0).unwrap();
        assert!(
            (cos.value - oracle).abs() < 1e-2,
            "{} vs {oracle}",
            cos.value
        );
        // linear in F
        let mix =
            subordinated_expectation(&g, &m, |x| 2.0 * x.cos() - 3.0, 0.0, 1.0, None).unwrap();
        assert!((mix.value - (2.0 * cos.value - 3.0 * one.value)).abs() < 1e-12);
    }

    #[test]
    fn truncation_monotone() {
        let (m, g) = analytic_grid();
        let a = subordinated_expectation(&g, &m, |_| 1.0, 0.0, 1.0, Some(2.0))
            .unwrap()
            .value;
        let b = subordinated_expectation(&g, &m, |_| 1.0, 0.0, 1.0, Some(3.0))
            .unwrap()
            .value;
        let c = subordinated_expectation(&g, &m, |_| 1.0, 0.0, 1.0, None)
            .unwrap()
            .value;
        assert!(a <= b && b <= c + 1e-15);
    }

    #[test]
    fn density_matches_gaussian_mixture() {
        let (m, g) = analytic_grid();
        let d = subordinated_density(&g, &m, 0.0, 1.0, None).unwrap();
        assert!((d.total_mass(&g.y_edges) - 1.0).abs() < 1e-3);
        for (i, y) in d.y_centers.iter().enumerate().step_by(12) {
            let oracle = oracles::time_changed_gaussian_density(0.5, 1.0, 1.0, 0.0, *y).unwrap();
            assert!(
                (d.values[i] - oracle).abs() < 0.02,
                "y={y}: {} vs {oracle}",
                d.values[i]
            );
        }
    }

    #[test]
    fn unresolved_horizon_rejected() {
        let (m, g) = analytic_grid();
        let err = subordinated_expectation(&g, &m, |_| 1.0, 0.0, 0.9975, None).unwrap_err();
        assert!(matches!(err, Error::SingularityResolution(_)));
    }

    #[test]
    fn empirical_grid_conserves_within_error() {
        let m = half_order();
        let kernel = SpatialKernel::from_model(&m).unwrap();
        let law = build_waiting_law(0.5, 0.5, None).unwrap();
        let chain = Chain::new(&m, &kernel, &law, ChainConfig::new(0.01)).unwrap();
        let u = linspace(0.01, 3.0, 60);
        let g = empirical_transition_density(
            &chain,
            0.0,
            0.0,
            &u,
            &linspace(-5.0, 5.0, 50),
            &linspace(0.0, 1.0, 50),
            20_000,
            3,
        )
        .unwrap();
        let one = subordinated_expectation(&g, &m, |_| 1.0, 0.0, 1.0, None).unwrap();
        // the grid starts at u = 0.01, which misses about 0.02 of the mass
        assert!(
            (one.value - 1.0).abs() < 3.0 * one.std_error + 0.03,
            "{one:?}"
        );
        let d = subordinated_density(&g, &m, 0.0, 1.0, None).unwrap();
        let n = d.values.len();
        for i in 0..n / 2 {
            let gap = (d.values[i] - d.values[n - 1 - i]).abs();
            assert!(gap <= 4.0 * (d.std_errors[i] + d.std_errors[n - 1 - i]) + 1e-12);
        }
    }

    fn lattice_model() -> (Model, WaitingLaw) {
        let m = Model::new(ModelConfig::diffusion_1d(
            0.4,
            ScalarField::Trig {
                offset: 1.0,
                amplitude: 0.5,
                wavevector: vec![1.0],
                phase: 0.0,
                time_frequency: 0.0,
            },
            0.5,
            1.5,
            1.0,
        ))
        .unwrap();
        let law = WaitingLaw::new(0.2, 0.6, None, HeadKind::MomentMatched).unwrap();
        (m, law)
    }

    #[test]
    fn lattice_recursion_is_stochastic() {
        let (m, law) = lattice_model();
        let cfg = LatticeConfig {
            tau: 0.05,
            time_cells: 60,
            state_limit: DEFAULT_LATTICE_LIMIT,
        };
        let r =
            discrete_subordinated_expectation(&m, &law, cfg, |_| 1.0, 0.3, 0.0, 1.0, None).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
        assert!((r.hit_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_first_step_by_hand() {
        let (m, law) = lattice_model();
        let cfg = LatticeConfig {
            tau: 0.05,
            time_cells: 20,
            state_limit: DEFAULT_LATTICE_LIMIT,
        };
        let r = discrete_subordinated_expectation(&m, &law, cfg, f64::cos, 0.3, 0.0, 1.0, None)
            .unwrap();
        let g = m.gamma_at(0.0, &[0.3]);
        let q = law.tail_prob(g, 19.0 * 0.05 * 0.05f64.powf(-1.0 / g));
        let h = 0.05f64.sqrt();
        let expected = q * 0.5 * ((0.3 + h).cos() + (0.3 - h).cos());
        assert!((r.per_step[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn lattice_matches_monte_carlo() {
        let (m, law) = lattice_model();
        let cfg = LatticeConfig {
            tau: 0.05,
            time_cells: 50,
            state_limit: DEFAULT_LATTICE_LIMIT,
        };
        let exact =
            discrete_subordinated_expectation(&m, &law, cfg, f64::cos, 0.3, 0.0, 1.0, Some(4.0))
                .unwrap();
        let kernel = SpatialKernel::from_model(&m).unwrap();
        let chain = Chain::new(
            &m,
            &kernel,
            &law,
            ChainConfig::new(0.05).with_time_lattice(50),
        )
        .unwrap();
        let mc = estimate_truncated(
            &chain,
            |x: &[f64]| x[0].cos(),
            &[0.3],
            0.0,
            1.0,
            Some(4.0),
            20_000,
            8,
        )
        .unwrap();
        assert!(
            (mc.mean - exact.value).abs() < 3.0 * mc.std_error,
            "{mc:?} vs {}",
            exact.value
        );
    }

    #[test]
    fn lattice_overflow_reported() {
        let (m, law) = lattice_model();
        let cfg = LatticeConfig {
            tau: 0.05,
            time_cells: 1000,
            state_limit: 1000,
        };
        let err = discrete_subordinated_expectation(&m, &law, cfg, f64::cos, 0.0, 0.0, 1.0, None)
            .unwrap_err();
        assert!(matches!(err, Error::LatticeOverflow { .. }));
    }
}
