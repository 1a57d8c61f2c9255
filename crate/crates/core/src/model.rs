// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Problem definition: fractional index, order field, spatial operator and
//! the regularity bounds every other module relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{MatrixField, ScalarField};

/// Box on which declared field bounds are verified by dense sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsCheck {
    pub points: usize,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for BoundsCheck {
    fn default() -> Self {
        Self {
            points: 10_000,
            t_max: 10.0,
            x_min: -10.0,
            x_max: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialConfig {
    /// `L f = 1/2 tr(G(x) D^2 f)`
    Diffusion {
        g: MatrixField,
        g_lo: f64,
        g_hi: f64,
    },
    /// `L f(x) = m(x) * int (f(x+y) - f(x)) |y|^{-1-beta} dy`
    Stable1d {
        beta: f64,
        m: ScalarField,
        m_lo: f64,
        m_hi: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub order_field: ScalarField,
    pub a_lo: f64,
    pub a_hi: f64,
    pub dim: usize,
    pub spatial: SpatialConfig,
    #[serde(default)]
    pub bounds_check: BoundsCheck,
}

/// A validated model. Immutable; share freely across workers.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    config: ModelConfig,
}

pub fn make_model(config: &ModelConfig) -> Result<Model> {
    Model::new(config.clone())
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Self> {
        validate(&config)?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn spatial(&self) -> &SpatialConfig {
        &self.config.spatial
    }

    pub fn order_field(&self) -> &ScalarField {
        &self.config.order_field
    }

    /// Spatial scaling index: 2 for diffusion, `beta` for stable-like jumps.
    pub fn beta(&self) -> f64 {
        match &self.config.spatial {
            SpatialConfig::Diffusion { .. } => 2.0,
            SpatialConfig::Stable1d { beta, .. } => *beta,
        }
    }

    #[inline]
    pub fn order_at(&self, s: f64, x: &[f64]) -> f64 {
        self.config.order_field.eval(s, x)
    }

    /// Local tail exponent `gamma(s, x) = alpha * a(s, x)`.
    #[inline]
    pub fn gamma_at(&self, s: f64, x: &[f64]) -> f64 {
        self.config.alpha * self.config.order_field.eval(s, x)
    }

    /// Range `[alpha * a_lo, alpha * a_hi]` of the local exponent.
    pub fn gamma_range(&self) -> (f64, f64) {
        (
            self.config.alpha * self.config.a_lo,
            self.config.alpha * self.config.a_hi,
        )
    }

    pub fn has_constant_order(&self) -> bool {
        self.config.order_field.is_constant()
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveBound { name, value })
    }
}

fn validate(c: &ModelConfig) -> Result<()> {
    if !(c.alpha > 0.0 && c.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1), got {}",
            c.alpha
        )));
    }
    positive("a_lo", c.a_lo)?;
    if c.a_hi * c.alpha >= 1.0 {
        return Err(Error::OrderBoundViolation {
            product: c.a_hi * c.alpha,
        });
    }
    if c.a_lo > c.a_hi {
        return Err(Error::InvalidParameter(format!(
            "a_lo = {} exceeds a_hi = {}",
            c.a_lo, c.a_hi
        )));
    }
    match &c.spatial {
        SpatialConfig::Diffusion { g, g_lo, g_hi } => {
            if !(1..=2).contains(&c.dim) {
                return Err(Error::DimensionUnsupported {
                    kind: "diffusion",
                    dim: c.dim,
                });
            }
            positive("g_lo", *g_lo)?;
            if g_lo > g_hi {
                return Err(Error::InvalidParameter(format!(
                    "g_lo = {g_lo} exceeds g_hi = {g_hi}"
                )));
            }
            if matches!(g, MatrixField::Symmetric2 { .. }) && c.dim != 2 {
                return Err(Error::InvalidParameter(
                    "a 2x2 diffusion matrix requires dim = 2".into(),
                ));
            }
            check_arity("g", g.spatial_arity(), c.dim)?;
        }
        SpatialConfig::Stable1d {
            beta,
            m,
            m_lo,
            m_hi,
        } => {
            if c.dim != 1 {
                return Err(Error::DimensionUnsupported {
                    kind: "stable_1d",
                    dim: c.dim,
                });
            }
            if !(*beta > 0.0 && *beta < 2.0) {
                return Err(Error::InvalidParameter(format!(
                    "beta must lie in (0,2), got {beta}"
                )));
            }
            positive("m_lo", *m_lo)?;
            if m_lo > m_hi {
                return Err(Error::InvalidParameter(format!(
                    "m_lo = {m_lo} exceeds m_hi = {m_hi}"
                )));
            }
            check_arity("m", m.spatial_arity(), c.dim)?;
        }
    }
    check_arity("order_field", c.order_field.spatial_arity(), c.dim)?;
    check_sampled_bounds(c)
}

fn check_arity(field: &str, arity: usize, dim: usize) -> Result<()> {
    if arity > dim {
        Err(Error::InvalidParameter(format!(
            "field `{field}` references {arity} coordinates but dim = {dim}"
        )))
    } else {
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |i| lo + step * i as f64)
}

/// Sample points `x` covering the bounds box in `dim` dimensions, roughly
/// `points` in total.
fn spatial_samples(b: &BoundsCheck, dim: usize, points: usize) -> Vec<[f64; 2]> {
    if dim == 1 {
        linspace(b.x_min, b.x_max, points.max(2))
            .map(|x| [x, 0.0])
            .collect()
    } else {
        let n = ((points as f64).sqrt().ceil() as usize).max(2);
        let xs: Vec<f64> = linspace(b.x_min, b.x_max, n).collect();
        xs.iter()
            .flat_map(|&x0| xs.iter().map(move |&x1| [x0, x1]))
            .collect()
    }
}

fn check_range(field: &'static str, value: f64, lo: f64, hi: f64, t: f64, x: &[f64]) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::FieldOutOfBounds {
            field,
            value,
            lo,
            hi,
            t,
            x: x.to_vec(),
        })
    }
}

fn check_sampled_bounds(c: &ModelConfig) -> Result<()> {
    let b = &c.bounds_check;
    let dim = c.dim;
    // Order field on (t, x): split the budget between time and space.
    let n_t = if c.order_field.is_time_dependent() {
        ((b.points as f64).powf(1.0 / (dim as f64 + 1.0)).ceil() as usize).max(2)
    } else {
        1
    };
    let xs = spatial_samples(b, dim, (b.points / n_t).max(2));
    for t in linspace(0.0, b.t_max, n_t) {
        for x in &xs {
            let v = c.order_field.eval(t, &x[..dim]);
            check_range("order_field", v, c.a_lo, c.a_hi, t, &x[..dim])?;
        }
    }
    let xs = spatial_samples(b, dim, b.points);
    match &c.spatial {
        SpatialConfig::Diffusion { g, g_lo, g_hi } => {
            for x in &xs {
                let x = &x[..dim];
                let (lo, hi) = if dim == 1 {
                    let g11 = g.eval(x).0;
                    (g11, g11)
                } else {
                    g.eigenvalues(x)
                };
                check_range("g", lo, *g_lo, *g_hi, 0.0, x)?;
                check_range("g", hi, *g_lo, *g_hi, 0.0, x)?;
            }
        }
        SpatialConfig::Stable1d { m, m_lo, m_hi, .. } => {
            for x in &xs {
                let v = m.eval(0.0, &x[..1]);
                check_range("m", v, *m_lo, *m_hi, 0.0, &x[..1])?;
            }
        }
    }
    Ok(())
}

/// Convenience constructors used by tests, presets and benches.
impl ModelConfig {
    /// Constant-coefficient diffusion `G = g` in `d = 1` with order field `a`.
    pub fn diffusion_1d(
        alpha: f64,
        order_field: ScalarField,
        a_lo: f64,
        a_hi: f64,
        g: f64,
    ) -> Self {
        Self {
            alpha,
            order_field,
            a_lo,
            a_hi,
            dim: 1,
            spatial: SpatialConfig::Diffusion {
                g: MatrixField::Isotropic(ScalarField::constant(g)),
                g_lo: g,
                g_hi: g,
            },
            bounds_check: BoundsCheck::default(),
        }
    }

    /// Constant-intensity stable-like jumps in `d = 1`.
    pub fn stable_1d(
        alpha: f64,
        order_field: ScalarField,
        a_lo: f64,
        a_hi: f64,
        beta: f64,
        m: f64,
    ) -> Self {
        Self {
            alpha,
            order_field,
            a_lo,
            a_hi,
            dim: 1,
            spatial: SpatialConfig::Stable1d {
                beta,
                m: ScalarField::constant(m),
                m_lo: m,
                m_hi: m,
            },
            bounds_check: BoundsCheck::default(),
        }
    }
}
