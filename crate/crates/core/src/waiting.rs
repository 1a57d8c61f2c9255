// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Waiting-time laws with an exact Pareto tail `r^{-1-gamma}` beyond a
//! threshold `B` shared by every exponent in range, and a bounded head on
//! `[0, B)`.
//!
//! Every law is sampled by inversion. The head is a uniform density on an
//! interval inside `[0, B)`:
//!
//! - [`HeadKind::Uniform`] spreads the head mass over all of `[0, B)`;
//! - [`HeadKind::MomentMatched`] places it so the head's first moment equals
//!   `B^{1-gamma} / (1-gamma)`, the first moment of the Levy density
//!   `r^{-1-gamma}` on `(0, B)`, when that is attainable with a density
//!   bounded by one. This cancels the leading drift error of the scaled
//!   chain when `B` is large.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadKind {
    #[default]
    Uniform,
    MomentMatched,
}

/// Resolved density for one exponent: uniform head of height `head_height`
/// on `[head_lo, head_hi)`, then `r^{-1-gamma}` on `[threshold, inf)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaitingShape {
    pub gamma: f64,
    pub threshold: f64,
    pub tail_mass: f64,
    pub head_mass: f64,
    pub head_lo: f64,
    pub head_hi: f64,
    pub head_height: f64,
}

impl WaitingShape {
    pub fn density(&self, r: f64) -> f64 {
        if r >= self.threshold {
            r.powf(-1.0 - self.gamma)
        } else if r >= self.head_lo && r < self.head_hi {
            self.head_height
        } else {
            0.0
        }
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r >= self.threshold {
            1.0 - r.powf(-self.gamma) / self.gamma
        } else if r <= self.head_lo {
            0.0
        } else {
            self.head_height * (r.min(self.head_hi) - self.head_lo)
        }
    }

    /// Exact survival function `P(T > t)`.
    pub fn tail_prob(&self, t: f64) -> f64 {
        if t >= self.threshold {
            t.powf(-self.gamma) / self.gamma
        } else if t <= self.head_lo {
            1.0
        } else {
            1.0 - self.head_height * (t.min(self.head_hi) - self.head_lo)
        }
    }

    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        if u < self.head_mass {
            self.head_lo + (u / self.head_mass) * (self.head_hi - self.head_lo)
        } else {
            (self.gamma * (1.0 - u)).powf(-1.0 / self.gamma)
        }
    }

    /// `int_0^B y p(y) dy`.
    pub fn head_first_moment(&self) -> f64 {
        self.head_mass * 0.5 * (self.head_lo + self.head_hi)
    }
}

/// Family of waiting-time densities `Q_gamma`, `gamma` in
/// `[gamma_lo, gamma_hi]`, with a common tail threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaitingLaw {
    threshold: f64,
    gamma_lo: f64,
    gamma_hi: f64,
    head: HeadKind,
}

/// Smallest threshold `B` with tail mass `B^{-gamma} / gamma <= 1`.
pub fn minimal_threshold(gamma: f64) -> f64 {
    gamma.powf(-1.0 / gamma)
}

fn tail_mass(threshold: f64, gamma: f64) -> f64 {
    threshold.powf(-gamma) / gamma
}

const MASS_SLACK: f64 = 1e-12;
const HEAD_EPS: f64 = 1e-12;

/// Build a law with a uniform head on `[0, B)`. When `threshold` is `None`
/// the smallest admissible `B` is used.
pub fn build_waiting_law(
    gamma_lo: f64,
    gamma_hi: f64,
    threshold: Option<f64>,
) -> Result<WaitingLaw> {
    WaitingLaw::new(gamma_lo, gamma_hi, threshold, HeadKind::Uniform)
}

impl WaitingLaw {
    pub fn new(
        gamma_lo: f64,
        gamma_hi: f64,
        threshold: Option<f64>,
        head: HeadKind,
    ) -> Result<Self> {
        if !(gamma_lo > 0.0 && gamma_lo <= gamma_hi && gamma_hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < gamma_lo <= gamma_hi < 1, got [{gamma_lo}, {gamma_hi}]"
            )));
        }
        let threshold = match threshold {
            Some(b) => {
                validate_threshold(b, gamma_lo, gamma_hi)?;
                b
            }
            None => default_threshold(gamma_lo, gamma_hi),
        };
        Ok(Self {
            threshold,
            gamma_lo,
            gamma_hi,
            head,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn gamma_range(&self) -> (f64, f64) {
        (self.gamma_lo, self.gamma_hi)
    }

    pub fn head(&self) -> HeadKind {
        self.head
    }

    pub fn with_head(mut self, head: HeadKind) -> Self {
        self.head = head;
        self
    }

    /// Density parameters for one exponent.
    #[inline]
    pub fn shape(&self, gamma: f64) -> WaitingShape {
        let b = self.threshold;
        let tail = tail_mass(b, gamma).min(1.0);
        // a head thinner than rounding noise is dropped
        let head_mass = if tail > 1.0 - HEAD_EPS {
            0.0
        } else {
            1.0 - tail
        };
        let (lo, width) = match self.head {
            HeadKind::Uniform => (0.0, b),
            HeadKind::MomentMatched if head_mass > 0.0 => {
                let target = b.powf(1.0 - gamma) / (1.0 - gamma) / head_mass;
                let half = (target.min(b - target)).max(0.5 * head_mass);
                let centre = target.clamp(half, b - half);
                (centre - half, 2.0 * half)
            }
            HeadKind::MomentMatched => (0.0, b),
        };
        WaitingShape {
            gamma,
            threshold: b,
            tail_mass: tail,
            head_mass,
            head_lo: lo,
            head_hi: (lo + width).min(b),
            head_height: if head_mass > 0.0 {
                head_mass / width
            } else {
                0.0
            },
        }
    }

    pub fn density(&self, gamma: f64, r: f64) -> f64 {
        self.shape(gamma).density(r)
    }

    pub fn cdf(&self, gamma: f64, r: f64) -> f64 {
        self.shape(gamma).cdf(r)
    }

    pub fn tail_prob(&self, gamma: f64, t: f64) -> f64 {
        self.shape(gamma).tail_prob(t)
    }

    /// Inverse-CDF sample for `u` in `(0, 1)`.
    #[inline]
    pub fn sample(&self, gamma: f64, u: f64) -> f64 {
        self.shape(gamma).sample(u)
    }
}

pub fn sample_waiting(law: &WaitingLaw, gamma: f64, u: f64) -> f64 {
    law.sample(gamma, u)
}

pub fn tail_prob(law: &WaitingLaw, gamma: f64, t: f64) -> f64 {
    law.tail_prob(gamma, t)
}

fn gamma_grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    const N: usize = 64;
    (0..=N).map(move |i| lo + (hi - lo) * i as f64 / N as f64)
}

fn default_threshold(lo: f64, hi: f64) -> f64 {
    // gamma -> gamma^{-1/gamma} decreases on (0,1); the endpoint maximum is
    // cross-checked against a grid.
    let endpoint = minimal_threshold(lo).max(minimal_threshold(hi));
    let grid = gamma_grid(lo, hi)
        .map(minimal_threshold)
        .fold(0.0, f64::max);
    debug_assert!(grid <= endpoint * (1.0 + 1e-12));
    endpoint.max(grid)
}

fn validate_threshold(b: f64, lo: f64, hi: f64) -> Result<()> {
    // log of the tail mass is convex in gamma, so the endpoints bound it.
    for gamma in gamma_grid(lo, hi) {
        let tail = tail_mass(b, gamma);
        let head_height = if b > 0.0 {
            (1.0 - tail) / b
        } else {
            f64::INFINITY
        };
        if !b.is_finite() || b < 1.0 || tail > 1.0 + MASS_SLACK || head_height > 1.0 {
            return Err(Error::InvalidTailMass {
                gamma,
                tail_mass: tail,
                head_height: head_height.max(b.powf(-1.0 - gamma)),
            });
        }
    }
    Ok(())
}

/// A test function for the generator-rate check.
pub struct TestFunction {
    pub name: String,
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `|f(y)| <= lipschitz * y` near zero.
    pub lipschitz: f64,
    /// `f` vanishes on `[0, support_start]`.
    pub support_start: f64,
    /// Length scale of decay at infinity, used to map the infinite range.
    pub decay_scale: f64,
}

impl TestFunction {
    pub fn new<F>(name: impl Into<String>, f: F, lipschitz: f64, support_start: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Box::new(f),
            lipschitz,
            support_start,
            decay_scale: 1.0,
        }
    }

    /// `f(y) = y e^{-y}`, `L = 1`.
    pub fn y_exp() -> Self {
        Self::new("y_exp", |y: f64| y * (-y).exp(), 1.0, 0.0)
    }

    /// `f(y) = (y - c)^2 e^{-y}` for `y >= c`, zero before.
    pub fn shifted(c: f64) -> Self {
        Self::new(
            format!("shifted_{c}"),
            move |y: f64| {
                if y <= c {
                    0.0
                } else {
                    (y - c).powi(2) * (-y).exp()
                }
            },
            0.0,
            c,
        )
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub h_values: Vec<f64>,
    pub errors: Vec<f64>,
    pub bound_values: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`; `None` when an
    /// error vanishes.
    pub fitted_order: Option<f64>,
    pub c_b: f64,
    pub lipschitz: f64,
}

impl RateReport {
    pub fn bound_holds(&self) -> bool {
        self.errors
            .iter()
            .zip(&self.bound_values)
            .all(|(e, b)| e <= b)
    }
}

const QUAD_TOL: f64 = 1e-13;

fn tol() -> Tolerance {
    Tolerance::abs(QUAD_TOL).with_rel(1e-13)
}

/// `int_0^inf f(y) y^{-1-alpha} dy`.
fn levy_integral(f: &TestFunction, alpha: f64) -> Result<f64> {
    let c = f.support_start;
    let split = c.max(1.0);
    // On (0, split] substitute y = w^{1/(1-alpha)} so the y^{-alpha}
    // behaviour at 0 becomes a bounded integrand.
    let p = 1.0 / (1.0 - alpha);
    let near = quad::integrate_with_breaks(
        |w: f64| {
            let y = w.powf(p);
            if y == 0.0 {
                0.0
            } else {
                p * f.eval(y) / y
            }
        },
        0.0,
        split.powf(1.0 - alpha),
        &[c.powf(1.0 - alpha)],
        tol(),
    )?;
    let far = quad::integrate_to_infinity_scaled(
        |y| f.eval(y) * y.powf(-1.0 - alpha),
        split,
        f.decay_scale,
        tol(),
    )?;
    Ok(near.value + far.value)
}

/// `h^{-alpha} int_0^inf f(h y) p(y) dy` for the waiting density `p`.
fn scaled_expectation(f: &TestFunction, shape: &WaitingShape, h: f64) -> Result<f64> {
    let alpha = shape.gamma;
    let head = if shape.head_mass > 0.0 {
        let breaks = [f.support_start / h];
        shape.head_height
            * quad::integrate_with_breaks(
                |y| f.eval(h * y),
                shape.head_lo,
                shape.head_hi,
                &breaks,
                tol(),
            )?
            .value
    } else {
        0.0
    };
    let b = shape.threshold;
    let start = b.max(f.support_start / h);
    let tail = quad::integrate_to_infinity_scaled(
        |y| f.eval(h * y) * y.powf(-1.0 - alpha),
        start,
        f.decay_scale / h,
        tol(),
    )?;
    Ok(h.powf(-alpha) * (head + tail.value))
}

/// Measure `|h^{-alpha} int f(hy) p(y) dy - int f(y) y^{-1-alpha} dy|`
/// against the bound `C_B L h^{1-alpha}` for each `h`.
pub fn check_rate(
    law: &WaitingLaw,
    alpha: f64,
    f: &TestFunction,
    h_values: &[f64],
) -> Result<RateReport> {
    let (lo, hi) = law.gamma_range();
    if (lo - alpha).abs() > 1e-15 || (hi - alpha).abs() > 1e-15 {
        return Err(Error::InvalidParameter(format!(
            "rate check needs a law with constant exponent {alpha}, got [{lo}, {hi}]"
        )));
    }
    if h_values.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::InvalidParameter("scales h must be positive".into()));
    }
    let shape = law.shape(alpha);
    let b = shape.threshold;
    let c_b = b.powf(1.0 - alpha) / (1.0 - alpha) + shape.head_first_moment();
    let limit = levy_integral(f, alpha)?;
    let mut errors = Vec::with_capacity(h_values.len());
    let mut bound_values = Vec::with_capacity(h_values.len());
    for &h in h_values {
        let approx = scaled_expectation(f, &shape, h)?;
        errors.push((approx - limit).abs());
        bound_values.push(c_b * f.lipschitz * h.powf(1.0 - alpha));
    }
    let fitted_order = log_log_slope(h_values, &errors);
    Ok(RateReport {
        h_values: h_values.to_vec(),
        errors,
        bound_values,
        fitted_order,
        c_b,
        lipschitz: f.lipschitz,
    })
}

/// Least-squares slope of `log y` on `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || y.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}
