// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Terminal-value problem `D^{gamma(s,x)}_{t-} F = L F`, `F(., t) = F_T`, on a
//! periodic grid.
//!
//! The right derivative is the generator form
//! `D g(s) = -int_0^{t-s} (g(s+r) - g(s)) r^{-1-gamma} dr - (g(t) - g(s)) (t-s)^{-gamma} / gamma`.
//! The memory integral uses product integration against piecewise-linear
//! `g`; each slice is solved implicitly. All weights are nonnegative, so the
//! discrete system is an M-matrix and the scheme conserves constants and
//! obeys the maximum principle.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{solve_cyclic_tridiagonal, solve_dense};
use crate::model::{Model, SpatialConfig};
use crate::sum::NeumaierSum;

/// `int_a^b rho^p d rho` for `0 < a < b`, accurate when `b / a` is near one.
fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    let l = (b / a).ln_1p_ratio();
    let q = p + 1.0;
    if q.abs() < 1e-14 {
        l
    } else {
        a.powf(q) * (q * l).exp_m1() / q
    }
}

trait LnRatio {
    fn ln_1p_ratio(self) -> f64;
}

impl LnRatio for f64 {
    /// `ln(self)` computed as `ln_1p(self - 1)`.
    #[inline]
    fn ln_1p_ratio(self) -> f64 {
        (self - 1.0).ln_1p()
    }
}

/// `int_0^1 z (m + z)^{-1-g} dz` for `m >= 1`.
fn linear_moment(g: f64, m: f64) -> f64 {
    if m < 8.0 {
        power_integral(-g, m, m + 1.0) - m * power_integral(-1.0 - g, m, m + 1.0)
    } else {
        // m^{-1-g} int_0^1 z (1 + z/m)^{-1-g} dz, expanded in 1/m
        let e = 1.0 / m;
        let mut sum = 0.0;
        let mut coef = 1.0;
        for k in 0..30 {
            // binomial(-1-g, k) e^k / (k + 2)
            let term = coef * e.powi(k) / (k as f64 + 2.0);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            coef *= (-1.0 - g - k as f64) / (k as f64 + 1.0);
        }
        m.powf(-1.0 - g) * sum
    }
}

/// Product-integration weights for one order `gamma` on a uniform `s` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeWeights {
    pub gamma: f64,
    pub ds: f64,
    /// `int_m^{m+1} rho^{-1-gamma}` for `m >= 1` (entry 0 unused).
    i0: Vec<f64>,
    /// `int_m^{m+1} (rho - m) rho^{-1-gamma}`.
    i1: Vec<f64>,
}

pub fn build_time_weights(gamma: f64, n_future: usize, ds: f64) -> Result<TimeWeights> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "order must lie in (0,1), got {gamma}"
        )));
    }
    if !(ds > 0.0) {
        return Err(Error::NonPositiveBound {
            name: "ds",
            value: ds,
        });
    }
    let mut i0 = vec![0.0; n_future.max(1)];
    let mut i1 = vec![0.0; n_future.max(1)];
    i1[0] = 1.0 / (1.0 - gamma);
    for m in 1..n_future {
        i0[m] = power_integral(-1.0 - gamma, m as f64, m as f64 + 1.0);
        i1[m] = linear_moment(gamma, m as f64);
    }
    Ok(TimeWeights { gamma, ds, i0, i1 })
}

impl TimeWeights {
    pub fn capacity(&self) -> usize {
        self.i1.len()
    }

    /// Weight of `g(s + n ds) - g(s)` when `n_future` cells remain.
    #[inline]
    pub fn weight(&self, n: usize, n_future: usize) -> f64 {
        let scale = self.ds.powf(-self.gamma);
        if n == n_future {
            scale * self.i1[n - 1]
        } else {
            scale * (self.i0[n] - self.i1[n] + self.i1[n - 1])
        }
    }

    pub fn weights(&self, n_future: usize) -> Vec<f64> {
        (1..=n_future).map(|n| self.weight(n, n_future)).collect()
    }

    /// `sum_n w_n` in closed form: `ds^{-gamma} ((1 - N^{-gamma}) / gamma + 1 / (1 - gamma))`.
    pub fn total(&self, n_future: usize) -> f64 {
        let g = self.gamma;
        self.ds.powf(-g) * (-(-g * (n_future as f64).ln()).exp_m1() / g + 1.0 / (1.0 - g))
    }

    /// `(t - s)^{-gamma} / gamma` with `t - s = n_future ds`.
    pub fn boundary(&self, n_future: usize) -> f64 {
        (n_future as f64 * self.ds).powf(-self.gamma) / self.gamma
    }

    /// Discrete `int_0^{N ds} (g(s + r) - g(s)) r^{-1-gamma} dr` for slices
    /// `g[0] = g(s), ..., g[N] = g(t)`.
    pub fn memory_integral(&self, g: &[f64]) -> f64 {
        let n_future = g.len() - 1;
        (1..=n_future)
            .map(|n| self.weight(n, n_future) * (g[n] - g[0]))
            .collect::<NeumaierSum>()
            .value()
    }
}

/// Discrete right derivative at the first entry of `g`, which runs from
/// `g(s_j)` to `g(t)`.
pub fn apply_right_derivative(weights: &TimeWeights, g: &[f64]) -> Result<f64> {
    let n_future = g
        .len()
        .checked_sub(1)
        .filter(|n| *n >= 1)
        .ok_or_else(|| Error::InvalidParameter("need at least one future slice".into()))?;
    if n_future > weights.capacity() {
        return Err(Error::InvalidParameter(format!(
            "weights cover {} cells, slice needs {n_future}",
            weights.capacity()
        )));
    }
    Ok(-weights.memory_integral(g) - weights.boundary(n_future) * (g[n_future] - g[0]))
}

/// Uniform periodic `x` grid and uniform `s` grid on `[0, t]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n_x: usize,
    pub period: f64,
    pub n_s: usize,
    pub t: f64,
}

impl Grid {
    pub fn new(n_x: usize, period: f64, n_s: usize, t: f64) -> Result<Self> {
        if n_x < 3 {
            return Err(Error::InvalidParameter(format!("need n_x >= 3, got {n_x}")));
        }
        if n_s < 16 {
            return Err(Error::InvalidParameter(format!(
                "need n_s >= 16 to resolve the singularity at s = t, got {n_s}"
            )));
        }
        if !(period > 0.0) || !(t > 0.0) {
            return Err(Error::InvalidParameter(
                "period and horizon must be positive".into(),
            ));
        }
        Ok(Self {
            n_x,
            period,
            n_s,
            t,
        })
    }

    pub fn dx(&self) -> f64 {
        self.period / self.n_x as f64
    }

    pub fn ds(&self) -> f64 {
        self.t / self.n_s as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn s(&self, j: usize) -> f64 {
        j as f64 * self.ds()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }
}

/// Solution values `F(x_i, s_j)`, one row per `s_j`, `j = 0..=n_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<Vec<f64>>,
}

impl Field {
    pub fn slice(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn initial(&self) -> &[f64] {
        &self.values[0]
    }

    /// Periodic linear interpolation of the `s_j` slice at `x`.
    pub fn interpolate(&self, j: usize, x: f64) -> f64 {
        let dx = self.grid.dx();
        let n = self.grid.n_x;
        let p = (x / dx).rem_euclid(n as f64);
        let i = (p.floor() as usize).min(n - 1);
        let w = p - i as f64;
        let row = &self.values[j];
        (1.0 - w) * row[i] + w * row[(i + 1) % n]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            })
    }

    /// CSV with columns `x, s, F`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,s,F")?;
        for (j, row) in self.values.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                writeln!(w, "{},{},{}", self.grid.x(i), self.grid.s(j), v)?;
            }
        }
        Ok(())
    }
}

/// Discrete spatial generator on the periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub enum SpatialOperator {
    /// Row `i`: `lower[i] f[i-1] + diag[i] f[i] + upper[i] f[i+1]`, cyclic.
    Tridiagonal {
        lower: Vec<f64>,
        diag: Vec<f64>,
        upper: Vec<f64>,
    },
    Dense(DMatrix<f64>),
}

impl SpatialOperator {
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        match self {
            SpatialOperator::Tridiagonal { lower, diag, upper } => {
                let n = f.len();
                (0..n)
                    .map(|i| {
                        lower[i] * f[(i + n - 1) % n] + diag[i] * f[i] + upper[i] * f[(i + 1) % n]
                    })
                    .collect()
            }
            SpatialOperator::Dense(m) => (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|k| m[(i, k)] * f[k])
                        .collect::<NeumaierSum>()
                        .value()
                })
                .collect(),
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let n = match self {
            SpatialOperator::Tridiagonal { diag, .. } => diag.len(),
            SpatialOperator::Dense(m) => m.nrows(),
        };
        self.apply(&vec![1.0; n])
    }
}

/// Periods of the jump integral treated by quadrature before the
/// mean-value far field takes over.
const JUMP_PERIODS: usize = 32;

/// Circulant stencil `c_k`, `k = 1..n-1`, of the jump integral
/// `int (f(x+y) - f(x)) |y|^{-1-beta} dy` for unit intensity.
fn jump_stencil(beta: f64, n: usize, dx: f64) -> Vec<f64> {
    let reach = JUMP_PERIODS * n;
    let mut c = vec![0.0; n];
    let scale = dx.powf(-beta);
    // d_k = f(x + k dx) + f(x - k dx) - 2 f(x); first cell even-quadratic
    let mut coeff = vec![0.0; reach + 1];
    coeff[1] = scale / (2.0 - beta);
    for m in 1..reach {
        let i0 = power_integral(-1.0 - beta, m as f64, m as f64 + 1.0);
        let i1 = linear_moment(beta, m as f64);
        coeff[m] += scale * (i0 - i1);
        coeff[m + 1] += scale * i1;
    }
    // Move weight onto the first difference so that even quadratics are
    // integrated exactly on [0, R]; this removes the O(dx^{2-beta}) error
    // of linear interpolation and keeps every weight nonnegative.
    let r_cells = reach as f64;
    let exact = r_cells.powf(2.0 - beta) / (2.0 - beta);
    let discrete: f64 = coeff
        .iter()
        .enumerate()
        .map(|(k, w)| w / scale * (k * k) as f64)
        .collect::<NeumaierSum>()
        .value();
    let corrected = coeff[1] + scale * (exact - discrete);
    if corrected >= 0.0 {
        coeff[1] = corrected;
    }
    for (k, w) in coeff.iter().enumerate().skip(1) {
        c[k % n] += w;
        c[(n - k % n) % n] += w;
    }
    // beyond R the periodic f is replaced by its mean
    let r = reach as f64 * dx;
    let far = 2.0 * r.powf(-beta) / beta;
    for v in c.iter_mut() {
        *v += far / n as f64;
    }
    c[0] = 0.0;
    c
}

pub fn build_spatial_operator(model: &Model, grid: &Grid) -> Result<SpatialOperator> {
    if model.dim() != 1 {
        return Err(Error::DimensionUnsupported {
            kind: "solver",
            dim: model.dim(),
        });
    }
    let n = grid.n_x;
    let dx = grid.dx();
    match model.spatial() {
        SpatialConfig::Diffusion { g, .. } => {
            let half: Vec<f64> = (0..n)
                .map(|i| 0.5 * g.eval(&[grid.x(i)]).0 / (dx * dx))
                .collect();
            Ok(SpatialOperator::Tridiagonal {
                lower: half.clone(),
                diag: half.iter().map(|h| -2.0 * h).collect(),
                upper: half,
            })
        }
        SpatialConfig::Stable1d { beta, m, .. } => {
            let c = jump_stencil(*beta, n, dx);
            let mut mat = DMatrix::zeros(n, n);
            for i in 0..n {
                let mi = m.eval(0.0, &[grid.x(i)]);
                let mut row = NeumaierSum::new();
                for k in 1..n {
                    let w = mi * c[k];
                    mat[(i, (i + k) % n)] = w;
                    row.add(w);
                }
                mat[(i, i)] = -row.value();
            }
            Ok(SpatialOperator::Dense(mat))
        }
    }
}

/// Weight tables keyed by the bit pattern of `gamma`.
struct WeightCache {
    tables: HashMap<u64, Arc<TimeWeights>>,
}

impl WeightCache {
    fn build(gammas: &[f64], n_s: usize, ds: f64) -> Result<Self> {
        let mut distinct: Vec<f64> = gammas.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let tables = distinct
            .par_iter()
            .map(|g| Ok((g.to_bits(), Arc::new(build_time_weights(*g, n_s, ds)?))))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(Self { tables })
    }

    fn get(&self, gamma: f64) -> &TimeWeights {
        &self.tables[&gamma.to_bits()]
    }
}

/// Largest number of distinct orders tabulated at once; beyond it, time
/// slices are tabulated one at a time.
const CACHE_LIMIT: usize = 1 << 14;

/// March `j = n_s - 1, ..., 0`, solving one implicit system per slice.
pub fn solve_terminal_problem<F>(model: &Model, terminal: F, grid: &Grid) -> Result<Field>
where
    F: Fn(f64) -> f64,
{
    let op = build_spatial_operator(model, grid)?;
    let n = grid.n_x;
    let ns = grid.n_s;
    let ds = grid.ds();
    let xs = grid.xs();
    let mut values = vec![vec![0.0; n]; ns + 1];
    values[ns] = xs.iter().map(|x| terminal(*x)).collect();
    if values[ns].iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "terminal data must be finite".into(),
        ));
    }
    let time_dependent = model.order_field().is_time_dependent();
    let gamma_at = |j: usize, i: usize| model.gamma_at(grid.s(j), &[xs[i]]);
    let global = if !time_dependent || n * ns <= CACHE_LIMIT {
        let all: Vec<f64> = if time_dependent {
            (0..ns)
                .flat_map(|j| (0..n).map(move |i| (j, i)))
                .map(|(j, i)| gamma_at(j, i))
                .collect()
        } else {
            (0..n).map(|i| gamma_at(0, i)).collect()
        };
        Some(WeightCache::build(&all, ns, ds)?)
    } else {
        None
    };

    for j in (0..ns).rev() {
        let n_future = ns - j;
        let gammas: Vec<f64> = (0..n).map(|i| gamma_at(j, i)).collect();
        let local;
        let cache = match &global {
            Some(c) => c,
            None => {
                local = WeightCache::build(&gammas, n_future, ds)?;
                &local
            }
        };
        let (future, _) = values.split_at(ns + 1);
        let rows: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let w = cache.get(gammas[i]);
                let b = w.boundary(n_future);
                let mut rhs = NeumaierSum::new();
                for k in 1..=n_future {
                    rhs.add(w.weight(k, n_future) * future[j + k][i]);
                }
                rhs.add(b * future[ns][i]);
                (w.total(n_future) + b, rhs.value())
            })
            .collect();
        let slice = match &op {
            SpatialOperator::Tridiagonal { lower, diag, upper } => {
                let d: Vec<f64> = rows.iter().zip(diag).map(|((a, _), l)| a - l).collect();
                let lo: Vec<f64> = lower.iter().map(|v| -v).collect();
                let up: Vec<f64> = upper.iter().map(|v| -v).collect();
                let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
                solve_cyclic_tridiagonal(&lo, &d, &up, &rhs)?
            }
            SpatialOperator::Dense(l) => {
                let mut a = -l.clone();
                for (i, r) in rows.iter().enumerate() {
                    a[(i, i)] += r.0;
                }
                solve_dense(a, &rows.iter().map(|r| r.1).collect::<Vec<_>>())?
            }
        };
        if slice.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolveFailure(format!(
                "non-finite values at slice {j}"
            )));
        }
        values[j] = slice;
    }
    Ok(Field {
        grid: *grid,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::model::ModelConfig;
    use crate::oracles;
    use statrs::function::gamma::gamma as gamma_fn;
    use std::f64::consts::PI;

    #[test]
    fn moments_match_quadrature() {
        for g in [0.2, 0.5, 0.9, 1.0, 1.5] {
            for m in [1usize, 3, 7, 8, 50, 4000] {
                let mf = m as f64;
                let direct = crate::quad::integrate(
                    |r| (r - mf) * r.powf(-1.0 - g),
                    mf,
                    mf + 1.0,
                    crate::quad::Tolerance::abs(1e-22).with_rel(1e-14),
                )
                .unwrap()
                .value;
                let got = linear_moment(g, mf);
                assert!(
                    (got - direct).abs() < 1e-12 * direct,
                    "g={g} m={m}: {got} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn weights_nonnegative_and_exact_for_linear() {
        let g = 0.5;
        let w = build_time_weights(g, 200, 0.01).unwrap();
        for n_future in [1, 2, 17, 200] {
            assert!(w.weights(n_future).iter().all(|v| *v >= 0.0));
            let total: f64 = w.weights(n_future).iter().sum();
            assert!((total - w.total(n_future)).abs() < 1e-12 * total);
            // g(s + r) = r
            let slice: Vec<f64> = (0..=n_future).map(|k| k as f64 * 0.01).collect();
            let r = n_future as f64 * 0.01;
            assert!((w.memory_integral(&slice) - 2.0 * r.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_constant_and_linear() {
        for g in [0.3, 0.7] {
            let w = build_time_weights(g, 64, 1.0 / 64.0).unwrap();
            assert_eq!(apply_right_derivative(&w, &[2.5; 65]).unwrap(), 0.0);
            // g(s) = t - s on s_j = j/64, t = 1
            for j in [0usize, 10, 40, 63] {
                let slice: Vec<f64> = (j..=64).map(|k| 1.0 - k as f64 / 64.0).collect();
                let sigma = 1.0 - j as f64 / 64.0;
                let exact = sigma.powf(1.0 - g) / (1.0 - g) + sigma.powf(1.0 - g) / g;
                let got = apply_right_derivative(&w, &slice).unwrap();
                assert!((got - exact).abs() < 1e-10, "g={g} j={j}");
            }
        }
    }

    #[test]
    fn eigenfunction_identity_converges() {
        // D g = -lambda g for g(s) = E_gamma(-lambda (t - s)^gamma / c), c = Gamma(1-g)/g
        let (g, lambda, t) = (0.5, 0.5, 1.0);
        let c = gamma_fn(1.0 - g) / g;
        let exact = |s: f64| oracles::mittag_leffler(g, -lambda * (t - s).powf(g) / c).unwrap();
        let mut last = f64::INFINITY;
        for n in [32usize, 64, 128, 256] {
            let w = build_time_weights(g, n, t / n as f64).unwrap();
            let slice: Vec<f64> = (0..=n).map(|k| exact(k as f64 * t / n as f64)).collect();
            let err = (apply_right_derivative(&w, &slice).unwrap() + lambda * slice[0]).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 5e-3, "{last}");
    }

    fn heat_model(order: ScalarField, alpha: f64, lo: f64, hi: f64) -> Model {
        Model::new(ModelConfig::diffusion_1d(alpha, order, lo, hi, 1.0)).unwrap()
    }

    #[test]
    fn diffusion_symbol() {
        let m = heat_model(ScalarField::constant(1.0), 0.5, 1.0, 1.0);
        let grid = Grid::new(64, 2.0 * PI, 16, 1.0).unwrap();
        let op = build_spatial_operator(&m, &grid).unwrap();
        let f: Vec<f64> = grid.xs().iter().map(|x| (3.0 * x).cos()).collect();
        let lf = op.apply(&f);
        let dx = grid.dx();
        let eig = -0.5 * (2.0 - 2.0 * (3.0 * dx).cos()) / (dx * dx);
        for (a, b) in lf.iter().zip(&f) {
            assert!((a - eig * b).abs() < 1e-10);
        }
        assert!(op.row_sums().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn stable_symbol_under_refinement() {
        for beta in [0.5, 1.0, 1.5] {
            let m = Model::new(ModelConfig::stable_1d(
                0.5,
                ScalarField::constant(1.0),
                1.0,
                1.0,
                beta,
                0.7,
            ))
            .unwrap();
            let c_beta = if beta == 1.0 {
                PI
            } else {
                2.0 * gamma_fn(1.0 - beta) * (PI * beta / 2.0).cos() / beta
            };
            let exact = -0.7 * c_beta;
            let mut last = f64::INFINITY;
            for n in [32usize, 64, 128] {
                let grid = Grid::new(n, 2.0 * PI, 16, 1.0).unwrap();
                let op = build_spatial_operator(&m, &grid).unwrap();
                assert!(op.row_sums().iter().all(|v| v.abs() < 1e-9));
                let f: Vec<f64> = grid.xs().iter().map(|x| x.cos()).collect();
                let lf = op.apply(&f);
                let err = (lf[0] / f[0] - exact).abs();
                assert!(err < last, "beta={beta} n={n}: {err}");
                last = err;
            }
            // second order once the quadratic moment is matched
            assert!(last < 2e-4 * exact.abs(), "beta={beta}: {last}");
        }
    }

    #[test]
    fn jump_stencil_is_nonnegative() {
        for beta in [0.05, 0.1, 0.3, 0.7, 1.0, 1.3, 1.7, 1.95] {
            for n in [8, 33, 128] {
                let c = jump_stencil(beta, n, 2.0 * PI / n as f64);
                assert!(c.iter().all(|v| *v >= 0.0), "beta={beta} n={n}");
            }
        }
    }

    #[test]
    fn constants_conserved_and_bounds_respected() {
        let m = heat_model(
            ScalarField::Trig {
                offset: 1.0,
                amplitude: 0.5,
                wavevector: vec![1.0],
                phase: 0.0,
                time_frequency: 0.0,
            },
            0.4,
            0.5,
            1.5,
        );
        let grid = Grid::new(32, 2.0 * PI, 32, 1.0).unwrap();
        let one = solve_terminal_problem(&m, |_| 1.0, &grid).unwrap();
        assert!(one.values.iter().flatten().all(|v| (v - 1.0).abs() < 1e-10));
        let sol = solve_terminal_problem(&m, f64::cos, &grid).unwrap();
        let (lo, hi) = sol.min_max();
        assert!(lo >= -1.0 && hi <= 1.0);
    }

    #[test]
    fn linear_in_terminal_data() {
        let m = Model::new(ModelConfig::stable_1d(
            0.5,
            ScalarField::constant(1.2),
            1.2,
            1.2,
            1.3,
            0.4,
        ))
        .unwrap();
        let grid = Grid::new(24, 2.0 * PI, 16, 1.0).unwrap();
        let a = solve_terminal_problem(&m, f64::cos, &grid).unwrap();
        let b = solve_terminal_problem(&m, |x| (2.0 * x).sin(), &grid).unwrap();
        let c =
            solve_terminal_problem(&m, |x| 2.0 * x.cos() - 3.0 * (2.0 * x).sin(), &grid).unwrap();
        for j in 0..=16 {
            for i in 0..24 {
                let lin = 2.0 * a.values[j][i] - 3.0 * b.values[j][i];
                assert!((c.values[j][i] - lin).abs() < 1e-10);
            }
        }
        let (lo, hi) = c.min_max();
        let bound = 5.0;
        assert!(lo >= -bound && hi <= bound);
    }

    #[test]
    fn time_dependent_order() {
        let m = heat_model(
            ScalarField::Trig {
                offset: 1.0,
                amplitude: 0.3,
                wavevector: vec![1.0],
                phase: 0.0,
                time_frequency: 2.0,
            },
            0.5,
            0.7,
            1.3,
        );
        let grid = Grid::new(16, 2.0 * PI, 20, 1.0).unwrap();
        let sol = solve_terminal_problem(&m, f64::cos, &grid).unwrap();
        let (lo, hi) = sol.min_max();
        assert!(lo >= -1.0 && hi <= 1.0);
        let one = solve_terminal_problem(&m, |_| 1.0, &grid).unwrap();
        assert!(one.values.iter().flatten().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn csv_export() {
        let m = heat_model(ScalarField::constant(1.0), 0.5, 1.0, 1.0);
        let grid = Grid::new(4, 2.0 * PI, 16, 1.0).unwrap();
        let sol = solve_terminal_problem(&m, |_| 1.0, &grid).unwrap();
        let mut out = Vec::new();
        sol.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("x,s,F\n0,0,1"));
        assert_eq!(text.lines().count(), 1 + 4 * 17);
    }
}
