// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Convergence target: stop once the error estimate is below
/// `max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn abs(abs: f64) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_intervals: 4000,
        }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel = rel;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureFailure {
                estimate: total_err,
                tolerance: tol.abs.max(tol.rel * total.abs()),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a.min(worst.b) && mid < worst.a.max(worst.b)) {
            // interval cannot be split further in floating point
            return Err(Error::QuadratureFailure {
                estimate: total_err,
                tolerance: tol.abs.max(tol.rel * total.abs()),
            });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        if heap.len() % 64 == 0 {
            // periodic re-sum keeps the running totals from drifting
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let mut parts: Vec<(f64, f64)> = heap.iter().map(|s| (s.a, s.value)).collect();
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    total = parts.iter().map(|p| p.1).sum();
    total_err = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value: total,
        error: total_err,
    })
}

/// Integrate over `[a, b]` split at the given interior breakpoints.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadResult> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    points.push(b);
    points.sort_by(f64::total_cmp);
    let pieces = (points.len() - 1) as f64;
    let sub = Tolerance {
        abs: tol.abs / pieces,
        ..tol
    };
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
    };
    for w in points.windows(2) {
        let r = integrate(&f, w[0], w[1], sub)?;
        out.value += r.value;
        out.error += r.error;
    }
    Ok(out)
}

/// Integrate `f` over `[a, inf)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    tol: Tolerance,
) -> Result<QuadResult> {
    integrate_to_infinity_scaled(f, a, 1.0, tol)
}

/// Power in the tail map; integrands decaying like `x^{-1-b}` become
/// `u^{4b-1}` near `u = 0`.
const TAIL_POWER: f64 = 4.0;

/// `[a, a + scale]` directly, the rest through `x = a + scale u^{-4}`,
/// `u` in `(0, 1]`. Pick `scale` near the length over which `f` decays.
pub fn integrate_to_infinity_scaled<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    tol: Tolerance,
) -> Result<QuadResult> {
    let half = Tolerance {
        abs: 0.5 * tol.abs,
        ..tol
    };
    let near = integrate(&f, a, a + scale, half)?;
    let far = integrate(
        |u| {
            if u == 0.0 {
                return 0.0;
            }
            let x = a + scale * u.powf(-TAIL_POWER);
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * scale * TAIL_POWER * u.powf(-TAIL_POWER - 1.0)
            }
        },
        0.0,
        1.0,
        half,
    )?;
    Ok(QuadResult {
        value: near.value + far.value,
        error: near.error + far.error,
    })
}
