// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! The named experiments. Each turns a config into result rows and plots.

use varfrac_core::ctrw::{
    empirical_transition_density, estimate_truncated, sample_marginals, Chain,
};
use varfrac_core::kernels::SpatialKernel;
use varfrac_core::oracles::{constant_order_solution, subordinator_cdf};
use varfrac_core::solver::solve_terminal_problem;
use varfrac_core::subordination::{
    analytic_density_grid, constant_diffusion, discrete_subordinated_expectation,
    subordinated_expectation, LatticeConfig, QuadratureEstimate, DEFAULT_LATTICE_LIMIT,
};
use varfrac_core::waiting::{check_rate, TestFunction};
use varfrac_core::{ChainConfig, DensityGrid, Field, Grid, MCEstimate, Model, WaitingLaw};

use crate::config::{ExperimentConfig, ExperimentKind, GridSize, RateFunction, Terminal};
use crate::error::CliError;
use crate::results::Row;
use crate::svg::LinePlot;

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    /// File name and plot.
    pub plots: Vec<(String, LinePlot)>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut ex = Experiment {
        cfg,
        name: cfg.experiment.name(),
        out: Outcome::default(),
    };
    match cfg.experiment {
        ExperimentKind::RateCheck | ExperimentKind::ExactnessWindow => ex.rate_check()?,
        ExperimentKind::Triangulation => ex.triangulation()?,
        ExperimentKind::SolverConvergence => ex.solver_convergence()?,
        ExperimentKind::VariableOrder => ex.variable_order()?,
        ExperimentKind::Conservation => ex.conservation()?,
        ExperimentKind::MaximumPrinciple => ex.maximum_principle()?,
        ExperimentKind::SubordinationIdentity => ex.subordination_identity()?,
        ExperimentKind::DiscreteIdentity => ex.discrete_identity()?,
        ExperimentKind::SubordinatorLaw => ex.subordinator_law()?,
        ExperimentKind::Determinism => ex.determinism()?,
    }
    Ok(ex.out)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

struct Experiment<'a> {
    cfg: &'a ExperimentConfig,
    name: &'static str,
    out: Outcome,
}

impl Experiment<'_> {
    fn row(&self, case: &str, quantity: &str, value: f64) -> Row {
        Row::new(self.name, case, quantity, value)
    }

    fn push(&mut self, row: Row) {
        self.out.rows.push(row);
    }

    fn plot(&mut self, file: &str, plot: LinePlot) {
        self.out
            .plots
            .push((format!("{}_{file}.svg", self.name), plot));
    }

    fn model(&self) -> Result<Model> {
        let config = self
            .cfg
            .model
            .clone()
            .ok_or_else(|| CliError::Validation("missing model block".into()))?;
        Ok(Model::new(config)?)
    }

    fn law(&self, model: &Model) -> Result<WaitingLaw> {
        let (lo, hi) = model.gamma_range();
        Ok(WaitingLaw::new(
            lo,
            hi,
            self.cfg.numerics.threshold,
            self.cfg.numerics.head,
        )?)
    }

    fn start(&self, model: &Model) -> Vec<f64> {
        let mut x = vec![0.0; model.dim()];
        x[0] = self.cfg.problem.x0;
        x
    }

    fn sigma(&self) -> f64 {
        self.cfg.problem.horizon - self.cfg.problem.s0
    }

    /// `F(x, s0) = amplitude * F(x, t)` when an exact solution exists.
    fn oracle_amplitude(&self, model: &Model, terminal: &Terminal) -> Result<Option<f64>> {
        let Ok(c) = constant_diffusion(model) else {
            return Ok(None);
        };
        if !model.has_constant_order() {
            return Ok(None);
        }
        let k = match terminal {
            Terminal::Cos { wavenumber } => *wavenumber,
            Terminal::Constant { .. } => 0.0,
            Terminal::SquareWave { .. } => return Ok(None),
        };
        let gamma = model.gamma_at(self.cfg.problem.s0, &self.start(model));
        Ok(Some(constant_order_solution(gamma, k, self.sigma(), c)?))
    }

    fn solve(&self, model: &Model, terminal: &Terminal, size: GridSize) -> Result<(Field, usize)> {
        let p = &self.cfg.problem;
        let grid = Grid::new(size.n_x, p.period, size.n_s, p.horizon)?;
        let j = (p.s0 / grid.ds()).round();
        if (j * grid.ds() - p.s0).abs() > 1e-9 * p.horizon {
            return Err(CliError::Validation(format!(
                "s0 = {} is not a node of the solver grid with n_s = {}",
                p.s0, size.n_s
            )));
        }
        let field = solve_terminal_problem(model, |x| terminal.eval(x), &grid)?;
        Ok((field, j as usize))
    }

    fn bounds_rows(&mut self, case: &str, field: &Field, terminal: &Terminal) {
        let g = field.grid;
        let (t_lo, t_hi) = g
            .xs()
            .iter()
            .map(|x| terminal.eval(*x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let (f_lo, f_hi) = field.min_max();
        for (q, v) in [
            ("terminal_min", t_lo),
            ("terminal_max", t_hi),
            ("field_min", f_lo),
            ("field_max", f_hi),
        ] {
            let row = self.row(case, q, v).grid(g.n_x, g.n_s);
            self.push(row);
        }
    }

    fn monte_carlo(
        &self,
        model: &Model,
        law: &WaitingLaw,
        terminal: &Terminal,
        tau: f64,
        k: Option<f64>,
    ) -> Result<MCEstimate> {
        let kernel = SpatialKernel::from_model(model)?;
        let chain = Chain::new(model, &kernel, law, ChainConfig::new(tau))?;
        let p = &self.cfg.problem;
        let n = &self.cfg.numerics;
        Ok(estimate_truncated(
            &chain,
            |x: &[f64]| terminal.eval(x[0]),
            &self.start(model),
            p.s0,
            p.horizon,
            k,
            n.n_traj,
            self.cfg.seed,
        )?)
    }

    fn mc_row(&self, case: &str, tau: f64, e: &MCEstimate) -> Row {
        self.row(case, "mc", e.mean)
            .tau(tau)
            .n_traj(e.n_traj)
            .uncertainty(e.std_error)
    }

    /// Transition density on the configured layout, exact or from the
    /// chain at step `tau`.
    fn density(
        &self,
        model: &Model,
        law: &WaitingLaw,
        empirical: Option<f64>,
    ) -> Result<DensityGrid> {
        let p = &self.cfg.problem;
        let d = &self.cfg.numerics.density;
        if d.u_points < 2
            || d.y_cells == 0
            || d.v_cells == 0
            || !(d.u_max > 0.0)
            || !(d.y_half_width > 0.0)
        {
            return Err(CliError::Validation(
                "density layout needs two u points and nonempty cells".into(),
            ));
        }
        let u: Vec<f64> = linspace(0.0, 1.0, d.u_points)
            .iter()
            .map(|q| d.u_max * q * q)
            .collect();
        let y = linspace(p.x0 - d.y_half_width, p.x0 + d.y_half_width, d.y_cells + 1);
        let v = linspace(p.s0, p.horizon, d.v_cells + 1);
        Ok(match empirical {
            None => analytic_density_grid(model, p.x0, p.s0, &u, &y, &v)?,
            Some(tau) => {
                let kernel = SpatialKernel::from_model(model)?;
                let chain = Chain::new(model, &kernel, law, ChainConfig::new(tau))?;
                // independent of the Monte Carlo estimates that use `seed`
                let seed = self.cfg.seed.wrapping_add(1);
                empirical_transition_density(
                    &chain,
                    p.x0,
                    p.s0,
                    &u,
                    &y,
                    &v,
                    self.cfg.numerics.n_traj,
                    seed,
                )?
            }
        })
    }

    fn subordination(
        &self,
        model: &Model,
        law: &WaitingLaw,
        terminal: &Terminal,
        empirical: Option<f64>,
        k: Option<f64>,
    ) -> Result<QuadratureEstimate> {
        let grid = self.density(model, law, empirical)?;
        let p = &self.cfg.problem;
        Ok(subordinated_expectation(
            &grid,
            model,
            |y| terminal.eval(y),
            p.s0,
            p.horizon,
            k,
        )?)
    }

    fn rate_check(&mut self) -> Result<()> {
        let n = &self.cfg.numerics;
        let h_max = n.h.iter().copied().fold(0.0, f64::max);
        let mut plot = LinePlot::new("generator rate", "h", "error").log_log();
        for &alpha in &n.alphas {
            let law = WaitingLaw::new(alpha, alpha, n.threshold, n.head)?;
            let f = match n.rate_function {
                RateFunction::YExp => TestFunction::y_exp(),
                RateFunction::BeyondThreshold => TestFunction::shifted(law.threshold() * h_max),
            };
            let report = check_rate(&law, alpha, &f, &n.h)?;
            let case = format!("alpha={alpha}");
            for ((h, e), b) in report
                .h_values
                .iter()
                .zip(&report.errors)
                .zip(&report.bound_values)
            {
                let rows = [
                    self.row(&case, "error", *e).h(*h),
                    self.row(&case, "bound", *b).h(*h),
                ];
                self.out.rows.extend(rows);
            }
            self.push(self.row(&case, "c_b", report.c_b));
            self.push(self.row(&case, "target_order", 1.0 - alpha));
            if let Some(order) = report.fitted_order {
                self.push(self.row(&case, "fitted_order", order));
            }
            let pts = |v: &[f64]| {
                report
                    .h_values
                    .iter()
                    .copied()
                    .zip(v.iter().copied())
                    .collect()
            };
            plot = plot
                .series(&format!("error {case}"), pts(&report.errors))
                .series(&format!("bound {case}"), pts(&report.bound_values));
        }
        self.plot("errors", plot);
        Ok(())
    }

    fn triangulation(&mut self) -> Result<()> {
        let model = self.model()?;
        let terminal = self.cfg.problem.terminal.clone();
        let amp = self.oracle_amplitude(&model, &terminal)?.ok_or_else(|| {
            CliError::Validation(
                "triangulation needs constant order, constant 1-D G and cos or constant terminal data".into(),
            )
        })?;
        let case = terminal.label();
        let x0 = self.cfg.problem.x0;
        self.push(self.row(&case, "oracle", amp * terminal.eval(x0)));
        self.push(self.row(&case, "oracle_amplitude", amp));

        let size = *self.cfg.numerics.grids.last().expect("validated");
        let (field, j) = self.solve(&model, &terminal, size)?;
        let xs = field.grid.xs();
        let sup = xs
            .iter()
            .zip(field.slice(j))
            .map(|(x, v)| (v - amp * terminal.eval(*x)).abs())
            .fold(0.0, f64::max);
        self.push(
            self.row(&case, "solver", field.interpolate(j, x0))
                .grid(size.n_x, size.n_s),
        );
        self.push(
            self.row(&case, "solver_sup_error", sup)
                .grid(size.n_x, size.n_s),
        );
        self.bounds_rows(&case, &field, &terminal);
        self.plot(
            "profile",
            LinePlot::new("solution at s0", "x", "F")
                .series(
                    "solver",
                    xs.iter()
                        .copied()
                        .zip(field.slice(j).iter().copied())
                        .collect(),
                )
                .series(
                    "oracle",
                    xs.iter().map(|x| (*x, amp * terminal.eval(*x))).collect(),
                ),
        );

        let law = self.law(&model)?;
        for &tau in &self.cfg.numerics.tau {
            let e = self.monte_carlo(&model, &law, &terminal, tau, None)?;
            self.push(self.mc_row(&case, tau, &e));
        }
        let q = self.subordination(&model, &law, &terminal, None, None)?;
        self.push(
            self.row(&case, "subordination", q.value)
                .uncertainty(q.std_error),
        );
        Ok(())
    }

    fn solver_convergence(&mut self) -> Result<()> {
        let model = self.model()?;
        let terminal = self.cfg.problem.terminal.clone();
        let amp = self.oracle_amplitude(&model, &terminal)?;
        let case = terminal.label();
        let x0 = self.cfg.problem.x0;
        let mut prev: Option<f64> = None;
        let mut errors = Vec::new();
        let mut diffs = Vec::new();
        let grids = self.cfg.numerics.grids.clone();
        let last = grids.len() - 1;
        for (i, size) in grids.into_iter().enumerate() {
            let (field, j) = self.solve(&model, &terminal, size)?;
            let value = field.interpolate(j, x0);
            self.push(self.row(&case, "solver", value).grid(size.n_x, size.n_s));
            if let Some(amp) = amp {
                let sup = field
                    .grid
                    .xs()
                    .iter()
                    .zip(field.slice(j))
                    .map(|(x, v)| (v - amp * terminal.eval(*x)).abs())
                    .fold(0.0, f64::max);
                self.push(self.row(&case, "sup_error", sup).grid(size.n_x, size.n_s));
                errors.push((size.n_x as f64, sup));
            }
            if let Some(p) = prev {
                let d = (value - p).abs();
                self.push(
                    self.row(&case, "self_difference", d)
                        .grid(size.n_x, size.n_s),
                );
                diffs.push((size.n_x as f64, d));
            }
            prev = Some(value);
            if i == last {
                self.bounds_rows(&case, &field, &terminal);
            }
        }
        let mut plot = LinePlot::new("solver convergence", "n_x", "error").log_log();
        if !errors.is_empty() {
            plot = plot.series("sup error vs oracle", errors);
        }
        self.plot("errors", plot.series("successive difference at x0", diffs));
        Ok(())
    }

    fn variable_order(&mut self) -> Result<()> {
        let model = self.model()?;
        let terminal = self.cfg.problem.terminal.clone();
        let case = terminal.label();
        let x0 = self.cfg.problem.x0;
        let grids = self.cfg.numerics.grids.clone();
        let mut values = Vec::new();
        for (i, &size) in grids.iter().enumerate() {
            let (field, j) = self.solve(&model, &terminal, size)?;
            let v = field.interpolate(j, x0);
            self.push(self.row(&case, "solver", v).grid(size.n_x, size.n_s));
            values.push(v);
            if i + 1 == grids.len() {
                self.bounds_rows(&case, &field, &terminal);
            }
        }
        let finest = *grids.last().expect("validated");
        let n = values.len();
        let self_conv = (values[n - 1] - values[n - 2]).abs();
        self.push(
            self.row(&case, "self_convergence", self_conv)
                .grid(finest.n_x, finest.n_s),
        );

        let law = self.law(&model)?;
        let mut gaps = Vec::new();
        for &tau in &self.cfg.numerics.tau {
            let e = self.monte_carlo(&model, &law, &terminal, tau, self.cfg.numerics.k)?;
            self.push(self.mc_row(&case, tau, &e));
            gaps.push((tau, (e.mean - values[n - 1]).abs()));
        }
        self.plot(
            "gap",
            LinePlot::new("Monte Carlo vs solver", "tau", "|MC - solver|")
                .log_log()
                .series("gap", gaps),
        );
        Ok(())
    }

    fn conservation(&mut self) -> Result<()> {
        let model = self.model()?;
        let one = Terminal::Constant { value: 1.0 };
        let case = one.label();
        let size = *self.cfg.numerics.grids.last().expect("validated");
        let (field, _) = self.solve(&model, &one, size)?;
        let dev = field
            .values
            .iter()
            .flatten()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max);
        self.push(
            self.row(&case, "solver_max_deviation", dev)
                .grid(size.n_x, size.n_s),
        );
        self.bounds_rows(&case, &field, &one);

        let law = self.law(&model)?;
        for &tau in &self.cfg.numerics.tau {
            let e = self.monte_carlo(&model, &law, &one, tau, None)?;
            self.push(self.mc_row(&case, tau, &e));
        }
        if self.oracle_amplitude(&model, &one)?.is_some() {
            let q = self.subordination(&model, &law, &one, None, None)?;
            self.push(
                self.row(&case, "subordination_analytic", q.value)
                    .uncertainty(q.std_error),
            );
        }
        if constant_diffusion(&model).is_ok() {
            let tau = self.cfg.numerics.tau[0];
            let q = self.subordination(&model, &law, &one, Some(tau), None)?;
            let row = self
                .row(&case, "subordination_empirical", q.value)
                .tau(tau)
                .n_traj(self.cfg.numerics.n_traj)
                .uncertainty(q.std_error);
            self.push(row);
        }
        Ok(())
    }

    fn maximum_principle(&mut self) -> Result<()> {
        let model = self.model()?;
        let period = self.cfg.problem.period;
        let size = *self.cfg.numerics.grids.last().expect("validated");
        let terminals = [
            self.cfg.problem.terminal.clone(),
            Terminal::SquareWave { period },
            Terminal::Cos {
                wavenumber: 3.0 * std::f64::consts::TAU / period,
            },
            Terminal::Constant { value: 1.0 },
        ];
        for terminal in terminals {
            let (field, _) = self.solve(&model, &terminal, size)?;
            self.bounds_rows(&terminal.label(), &field, &terminal);
        }
        Ok(())
    }

    fn subordination_identity(&mut self) -> Result<()> {
        let model = self.model()?;
        let law = self.law(&model)?;
        let terminal = self.cfg.problem.terminal.clone();
        let case = terminal.label();
        let k = self.cfg.numerics.k;
        let tau = self.cfg.numerics.tau[0];
        let n = self.cfg.numerics.n_traj;
        let q = self.subordination(&model, &law, &terminal, Some(tau), k)?;
        self.push(
            self.row(&case, "subordination_empirical", q.value)
                .tau(tau)
                .n_traj(n)
                .uncertainty(q.std_error),
        );
        let e = self.monte_carlo(&model, &law, &terminal, tau, k)?;
        self.push(self.mc_row(&case, tau, &e));
        if k.is_none() {
            if let Some(amp) = self.oracle_amplitude(&model, &terminal)? {
                let q = self.subordination(&model, &law, &terminal, None, None)?;
                self.push(
                    self.row(&case, "subordination_analytic", q.value)
                        .uncertainty(q.std_error),
                );
                self.push(self.row(&case, "oracle", amp * terminal.eval(self.cfg.problem.x0)));
            }
        }
        Ok(())
    }

    fn discrete_identity(&mut self) -> Result<()> {
        let model = self.model()?;
        let law = self.law(&model)?;
        let terminal = self.cfg.problem.terminal.clone();
        let case = terminal.label();
        let p = self.cfg.problem.clone();
        let n = &self.cfg.numerics;
        let tau = n.tau[0];
        let lattice = LatticeConfig {
            tau,
            time_cells: n.time_cells,
            state_limit: DEFAULT_LATTICE_LIMIT,
        };
        let exact = discrete_subordinated_expectation(
            &model,
            &law,
            lattice,
            |x| terminal.eval(x),
            p.x0,
            p.s0,
            p.horizon,
            n.k,
        )?;
        self.push(self.row(&case, "lattice", exact.value).tau(tau));
        self.push(self.row(&case, "hit_mass", exact.hit_mass).tau(tau));
        let kernel = SpatialKernel::from_model(&model)?;
        let chain = Chain::new(
            &model,
            &kernel,
            &law,
            ChainConfig::new(tau).with_time_lattice(n.time_cells),
        )?;
        let e = estimate_truncated(
            &chain,
            |x: &[f64]| terminal.eval(x[0]),
            &[p.x0],
            p.s0,
            p.horizon,
            n.k,
            n.n_traj,
            self.cfg.seed,
        )?;
        self.push(self.mc_row(&case, tau, &e));
        self.plot(
            "per_step",
            LinePlot::new("lattice contribution by step", "step", "contribution").series(
                "lattice",
                exact
                    .per_step
                    .iter()
                    .enumerate()
                    .map(|(i, v)| ((i + 1) as f64, *v))
                    .collect(),
            ),
        );
        Ok(())
    }

    fn subordinator_law(&mut self) -> Result<()> {
        let model = self.model()?;
        if !model.has_constant_order() {
            return Err(CliError::Validation(
                "subordinator law needs a constant order".into(),
            ));
        }
        let law = self.law(&model)?;
        let kernel = SpatialKernel::from_model(&model)?;
        let n = &self.cfg.numerics;
        let tau = n.tau[0];
        let s0 = self.cfg.problem.s0;
        let chain = Chain::new(&model, &kernel, &law, ChainConfig::new(tau))?;
        let rows = sample_marginals(
            &chain,
            &self.start(&model),
            s0,
            &[n.steps],
            n.n_traj,
            self.cfg.seed,
        )?;
        let mut s: Vec<f64> = rows.iter().map(|r| r[0].s - s0).collect();
        s.sort_by(f64::total_cmp);
        let gamma = model.gamma_at(s0, &self.start(&model));
        let elapsed = n.steps as f64 * tau;
        let cdf = s
            .iter()
            .map(|v| subordinator_cdf(gamma, elapsed, *v))
            .collect::<varfrac_core::Result<Vec<f64>>>()?;
        let m = s.len() as f64;
        let ks = cdf
            .iter()
            .enumerate()
            .map(|(i, f)| (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs()))
            .fold(0.0, f64::max);
        let case = format!("gamma={gamma}");
        self.push(self.row(&case, "ks", ks).tau(tau).n_traj(n.n_traj));
        let mut empirical = Vec::new();
        let mut oracle = Vec::new();
        for q in 1..40 {
            let i = (q * s.len()) / 40;
            let level = s[i];
            let e = (i + 1) as f64 / m;
            empirical.push((level, e));
            oracle.push((level, cdf[i]));
            let rows = [
                self.row(&case, "empirical_cdf", e).level(level),
                self.row(&case, "oracle_cdf", cdf[i]).level(level),
            ];
            self.out.rows.extend(rows);
        }
        self.plot(
            "cdf",
            LinePlot::new("S marginal", "level", "P(S <= level)")
                .series("chain", empirical)
                .series("inversion", oracle),
        );
        Ok(())
    }

    fn determinism(&mut self) -> Result<()> {
        let model = self.model()?;
        let law = self.law(&model)?;
        let terminal = self.cfg.problem.terminal.clone();
        let tau = self.cfg.numerics.tau[0];
        for &threads in &self.cfg.numerics.threads {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| {
                    CliError::Validation(format!("cannot start {threads} workers: {e}"))
                })?;
            let e = pool
                .install(|| self.monte_carlo(&model, &law, &terminal, tau, self.cfg.numerics.k))?;
            self.push(self.mc_row(&format!("threads={threads}"), tau, &e));
        }
        Ok(())
    }
}
