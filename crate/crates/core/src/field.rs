// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Coefficient fields selected by name from a small set of smooth presets.
//!
//! Fields are functions of `(t, x)`. Spatial coefficients (`G`, `m`) are
//! evaluated with `t = 0`.

use serde::{Deserialize, Serialize};

fn default_wavevector() -> Vec<f64> {
    vec![1.0]
}

/// A scalar coefficient field `(t, x) -> value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarField {
    Constant {
        value: f64,
    },
    /// `offset + time_slope * t + space_slope . x`
    Affine {
        offset: f64,
        #[serde(default)]
        time_slope: f64,
        #[serde(default)]
        space_slope: Vec<f64>,
    },
    /// `offset + amplitude * sin(k . x + phase) * cos(time_frequency * t)`
    Trig {
        offset: f64,
        amplitude: f64,
        #[serde(default = "default_wavevector")]
        wavevector: Vec<f64>,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        time_frequency: f64,
    },
    /// `offset + amplitude * exp(-|x - center|^2 / (2 width^2))`
    GaussianBump {
        offset: f64,
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(a, x)| a * x).sum()
}

impl ScalarField {
    pub fn constant(value: f64) -> Self {
        ScalarField::Constant { value }
    }

    #[inline]
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Affine {
                offset,
                time_slope,
                space_slope,
            } => offset + time_slope * t + dot(space_slope, x),
            ScalarField::Trig {
                offset,
                amplitude,
                wavevector,
                phase,
                time_frequency,
            } => {
                let spatial = (dot(wavevector, x) + phase).sin();
                let temporal = if *time_frequency == 0.0 {
                    1.0
                } else {
                    (time_frequency * t).cos()
                };
                offset + amplitude * spatial * temporal
            }
            ScalarField::GaussianBump {
                offset,
                amplitude,
                center,
                width,
            } => {
                let r2: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, xi)| {
                        let c = center.get(i).copied().unwrap_or(0.0);
                        (xi - c).powi(2)
                    })
                    .sum();
                offset + amplitude * (-r2 / (2.0 * width * width)).exp()
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ScalarField::Constant { .. })
    }

    /// Whether the field depends on `t`.
    pub fn is_time_dependent(&self) -> bool {
        match self {
            ScalarField::Affine { time_slope, .. } => *time_slope != 0.0,
            ScalarField::Trig { time_frequency, .. } => *time_frequency != 0.0,
            _ => false,
        }
    }

    /// Largest vector length referenced by the preset, used to reject fields
    /// written for a higher dimension than the model.
    pub fn spatial_arity(&self) -> usize {
        match self {
            ScalarField::Constant { .. } => 0,
            ScalarField::Affine { space_slope, .. } => space_slope.len(),
            ScalarField::Trig { wavevector, .. } => wavevector.len(),
            ScalarField::GaussianBump { center, .. } => center.len(),
        }
    }
}

/// The diffusion matrix `G(x)`: a scalar field in `d = 1` (or an isotropic
/// multiple of the identity), or three entries of a symmetric 2x2 matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixField {
    Symmetric2 {
        g11: ScalarField,
        g22: ScalarField,
        g12: ScalarField,
    },
    Isotropic(ScalarField),
}

impl MatrixField {
    /// Entries `(g11, g22, g12)` at `x`; in `d = 1` only `g11` is meaningful.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> (f64, f64, f64) {
        match self {
            MatrixField::Isotropic(f) => {
                let g = f.eval(0.0, x);
                (g, g, 0.0)
            }
            MatrixField::Symmetric2 { g11, g22, g12 } => {
                (g11.eval(0.0, x), g22.eval(0.0, x), g12.eval(0.0, x))
            }
        }
    }

    /// Eigenvalues of the symmetric 2x2 matrix, smallest first.
    pub fn eigenvalues(&self, x: &[f64]) -> (f64, f64) {
        let (a, d, b) = self.eval(x);
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d).powi(2) + b * b).sqrt();
        (mean - r, mean + r)
    }

    pub fn spatial_arity(&self) -> usize {
        match self {
            MatrixField::Isotropic(f) => f.spatial_arity(),
            MatrixField::Symmetric2 { g11, g22, g12 } => g11
                .spatial_arity()
                .max(g22.spatial_arity())
                .max(g12.spatial_arity()),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            MatrixField::Isotropic(f) => f.is_constant(),
            MatrixField::Symmetric2 { g11, g22, g12 } => {
                g11.is_constant() && g22.is_constant() && g12.is_constant()
            }
        }
    }
}
