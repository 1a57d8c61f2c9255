// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Independent references for the constant-order case: the Mittag-Leffler
//! function, Fourier-mode solutions, and the laws of the stable subordinator
//! with Levy density `r^{-1-gamma}` and of its inverse.
//!
//! The Levy density carries coefficient one, so the subordinator's Laplace
//! exponent is `Gamma(1-gamma) lambda^gamma / gamma` rather than the textbook
//! `lambda^gamma`. Every formula here states that convention explicitly.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::{gamma as gamma_fn, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::sum::NeumaierSum;

/// Largest `|z|` accepted by [`mittag_leffler`].
pub const ML_MAX_ABS_Z: f64 = 50.0;

/// `Gamma(1-gamma) / gamma`, the subordinator's Laplace-exponent
/// coefficient.
pub fn laplace_coefficient(gamma: f64) -> f64 {
    gamma_fn(1.0 - gamma) / gamma
}

/// One-parameter Mittag-Leffler function `E_gamma(z)` for real `z <= 0`.
///
/// Near the origin the power series is summed with compensation; once the
/// largest term would cost more than four digits to cancellation, the
/// positive integral
/// `E_gamma(-x) = sin(pi gamma)/(pi gamma) int_0^inf exp(-x^{1/gamma} w^{1/gamma}) / (w^2 + 2 w cos(pi gamma) + 1) dw`
/// is used instead.
pub fn mittag_leffler(gamma: f64, z: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) || z > 0.0 || z.abs() > ML_MAX_ABS_Z || !z.is_finite() {
        return Err(Error::AccuracyLoss { gamma, z });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if gamma == 1.0 {
        return Ok(z.exp());
    }
    if let Some(v) = ml_series(gamma, z) {
        return Ok(v);
    }
    ml_integral(gamma, -z)
}

fn ml_series(gamma: f64, z: f64) -> Option<f64> {
    let mut sum = NeumaierSum::new();
    let mut largest: f64 = 0.0;
    let ln_abs = z.abs().ln();
    for k in 0..2000usize {
        let kf = k as f64;
        let ln_term = kf * ln_abs - ln_gamma(gamma * kf + 1.0);
        let mag = ln_term.exp();
        let term = if k % 2 == 1 { -mag } else { mag };
        largest = largest.max(mag);
        sum.add(term);
        if k > 4 && mag < 1e-17 * sum.value().abs() {
            let value = sum.value();
            // accept only if cancellation left at least ~12 good digits
            return if largest * f64::EPSILON <= 1e-12 * value.abs() {
                Some(value)
            } else {
                None
            };
        }
    }
    None
}

fn ml_integral(gamma: f64, x: f64) -> Result<f64> {
    let s = x.powf(1.0 / gamma);
    let c = (PI * gamma).cos();
    let pref = (PI * gamma).sin() / (PI * gamma);
    let p = 1.0 / gamma;
    let r = quad::integrate_to_infinity_scaled(
        |w| (-s * w.powf(p)).exp() / (w * w + 2.0 * w * c + 1.0),
        0.0,
        1.0 / x.max(1.0),
        Tolerance::abs(1e-15).with_rel(1e-13),
    )?;
    Ok(pref * r.value)
}

/// Amplitude of `cos(kx)` after time-to-terminal `sigma` for the constant
/// order problem with diffusion coefficient `c` (generator `c/2 d^2/dx^2`):
/// `E_gamma(-(gamma / Gamma(1-gamma)) (c k^2 / 2) sigma^gamma)`.
pub fn constant_order_solution(gamma: f64, k: f64, sigma: f64, c: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need gamma in (0,1) and sigma >= 0, got gamma={gamma}, sigma={sigma}"
        )));
    }
    let rate = 0.5 * c * k * k;
    mittag_leffler(
        gamma,
        -rate * sigma.powf(gamma) / laplace_coefficient(gamma),
    )
}

/// Fixed Talbot inversion at `t > 0` of a Laplace transform given by its
/// logarithm, so that growth of the transform on the contour is absorbed
/// into `exp(s t)` before exponentiation.
pub fn talbot_inversion<F: Fn(Complex64) -> Complex64>(
    log_transform: F,
    t: f64,
    terms: usize,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InversionFailure(format!(
            "time must be positive, got {t}"
        )));
    }
    let m = terms as f64;
    let r = 2.0 * m / (5.0 * t);
    let mut acc = NeumaierSum::new();
    let mut magnitude = 0.0;
    let first = 0.5 * (log_transform(Complex64::new(r, 0.0)) + r * t).exp().re;
    acc.add(first);
    magnitude += first.abs();
    for k in 1..terms {
        let theta = k as f64 * PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let v = (s * t + log_transform(s)).exp() * Complex64::new(1.0, sigma);
        acc.add(v.re);
        magnitude += v.norm();
    }
    let value = r / m * acc.value();
    // round-off bound of the contour sum
    let noise = r / m * magnitude * f64::EPSILON * terms as f64;
    if value.is_finite() && noise.is_finite() && noise <= TALBOT_NOISE {
        Ok(value)
    } else {
        Err(Error::InversionFailure(format!(
            "contour sum at t={t} is dominated by round-off ({noise:e})"
        )))
    }
}

/// Largest accepted round-off bound of a Talbot sum.
const TALBOT_NOISE: f64 = 1e-9;

const TALBOT_TERMS: usize = 32;

/// Above this order `exp(-a s^gamma)` grows inside the Talbot contour's
/// sector and the positive Kanter integral is used instead.
const TALBOT_MAX_GAMMA: f64 = 0.5;

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "gamma must lie in (0,1), got {gamma}"
        )))
    }
}

/// Largest `x = a z^{-gamma}` at which the tail series is used.
const SERIES_LIMIT: f64 = 1.0;

/// Convergent large-`z` series of the stable law in `x = a z^{-gamma}`:
/// `z p(z)` when `density` is set, otherwise `P(S_1 > z)`.
fn tail_series(gamma: f64, x: f64, density: bool) -> f64 {
    let mut sum = NeumaierSum::new();
    let ln_x = x.ln();
    for k in 1..200usize {
        let kf = k as f64;
        let g = if density {
            kf * gamma + 1.0
        } else {
            kf * gamma
        };
        let ln_mag = kf * ln_x + ln_gamma(g) - ln_gamma(kf + 1.0);
        let mag = ln_mag.exp();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum.add(sign * mag * (kf * gamma * PI).sin() / PI);
        if mag < 1e-18 * sum.value().abs() {
            break;
        }
    }
    sum.value()
}

/// Kanter's function
/// `A(phi) = (sin(g phi)^g sin((1-g) phi)^{1-g} / sin(phi))^{1/(1-g)}`.
fn kanter(gamma: f64, phi: f64) -> f64 {
    let num = gamma * (gamma * phi).sin().ln() + (1.0 - gamma) * ((1.0 - gamma) * phi).sin().ln();
    ((num - phi.sin().ln()) / (1.0 - gamma)).exp()
}

/// CDF (or density, when `density` is set) of `S_1` at `z` from Kanter's
/// representation `P(S_1 <= z) = E exp(-A(U) (z / c)^{-g/(1-g)})`,
/// `U ~ U(0, pi)`, `c = a^{1/g}`.
fn kanter_integral(gamma: f64, z: f64, density: bool) -> Result<f64> {
    let c = laplace_coefficient(gamma).powf(1.0 / gamma);
    let e = gamma / (1.0 - gamma);
    let w = (z / c).powf(-e);
    let r = quad::integrate(
        |phi| {
            if phi <= 0.0 || phi >= PI {
                return 0.0;
            }
            let a = kanter(gamma, phi);
            let v = (-w * a).exp();
            if density {
                a * v
            } else {
                v
            }
        },
        0.0,
        PI,
        Tolerance::abs(1e-300).with_rel(1e-12),
    )?;
    let value = r.value / PI;
    Ok(if density { value * e * w / z } else { value })
}

/// `P(S_elapsed <= level)` for the subordinator with Laplace transform
/// `E exp(-lambda S_u) = exp(-u Gamma(1-gamma) lambda^gamma / gamma)`.
pub fn subordinator_cdf(gamma: f64, elapsed: f64, level: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if level <= 0.0 {
        return Ok(0.0);
    }
    if elapsed <= 0.0 {
        return Ok(1.0);
    }
    let a = laplace_coefficient(gamma);
    // self-similarity: S_u = u^{1/gamma} S_1, and a z^{-gamma} = a u level^{-gamma}
    let x = a * elapsed * level.powf(-gamma);
    if x <= SERIES_LIMIT {
        return Ok((1.0 - tail_series(gamma, x, false)).clamp(0.0, 1.0));
    }
    let z = level * elapsed.powf(-1.0 / gamma);
    let v = if gamma <= TALBOT_MAX_GAMMA {
        match talbot_inversion(|s| -a * s.powf(gamma) - s.ln(), z, TALBOT_TERMS) {
            Ok(v) => v,
            Err(_) => kanter_integral(gamma, z, false)?,
        }
    } else {
        kanter_integral(gamma, z, false)?
    };
    if !(-1e-6..=1.0 + 1e-6).contains(&v) {
        return Err(Error::InversionFailure(format!(
            "CDF value {v} outside [0,1] at level {level}"
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Density of `S_elapsed` at `level`.
pub fn subordinator_density(gamma: f64, elapsed: f64, level: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if level <= 0.0 || elapsed <= 0.0 {
        return Ok(0.0);
    }
    let a = laplace_coefficient(gamma);
    let x = a * elapsed * level.powf(-gamma);
    if x <= SERIES_LIMIT {
        return Ok(tail_series(gamma, x, true) / level);
    }
    let scale = elapsed.powf(1.0 / gamma);
    let z = level / scale;
    let v = if gamma <= TALBOT_MAX_GAMMA {
        match talbot_inversion(|s| -a * s.powf(gamma), z, TALBOT_TERMS) {
            Ok(v) => v,
            Err(_) => kanter_integral(gamma, z, true)?,
        }
    } else {
        kanter_integral(gamma, z, true)?
    };
    Ok(v.max(0.0) / scale)
}

/// Density at `u` of the hitting time `T(w) = inf{u : S_u >= w}`:
/// `w / (gamma u) * p_S(u, w)`.
pub fn inverse_subordinator_density(gamma: f64, level: f64, u: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if u <= 0.0 {
        return Ok(0.0);
    }
    let x = laplace_coefficient(gamma) * u * level.powf(-gamma);
    if x <= SERIES_LIMIT {
        // w p_S(u, w) is the density series, so no small powers of u appear
        return Ok(tail_series(gamma, x, true) / (gamma * u));
    }
    Ok(level / (gamma * u) * subordinator_density(gamma, u, level)?)
}

/// Density at `y` of `x0 + B(c T(w))`: a Gaussian with variance `c u`
/// mixed over the hitting-time law.
pub fn time_changed_gaussian_density(
    gamma: f64,
    c: f64,
    level: f64,
    x0: f64,
    y: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    let d2 = (y - x0).powi(2);
    // u = q^2 removes the u^{-1/2} behaviour of the Gaussian at u = 0.
    let integrand = |q: f64| -> f64 {
        let u = q * q;
        if u == 0.0 {
            return 0.0;
        }
        let var = c * u;
        let phi = (-d2 / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        if phi == 0.0 {
            return 0.0;
        }
        2.0 * q * phi * inverse_subordinator_density(gamma, level, u).unwrap_or(f64::NAN)
    };
    let q_max = hitting_time_upper(gamma, level)?.sqrt();
    let r = quad::integrate(integrand, 0.0, q_max, Tolerance::abs(1e-10).with_rel(1e-9))?;
    if r.value.is_nan() {
        return Err(Error::InversionFailure("density evaluation failed".into()));
    }
    Ok(r.value)
}

/// A time beyond which `P(T(w) > u) = P(S_u < w)` is below `1e-14`.
pub fn hitting_time_upper(gamma: f64, level: f64) -> Result<f64> {
    let mut u = level.powf(gamma);
    for _ in 0..200 {
        if subordinator_cdf(gamma, u, level)? < 1e-14 {
            return Ok(u);
        }
        u *= 1.5;
    }
    Err(Error::InversionFailure(
        "hitting-time tail does not decay".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    #[test]
    fn special_values() {
        for g in [0.1, 0.5, 0.9, 1.0] {
            assert_eq!(mittag_leffler(g, 0.0).unwrap(), 1.0);
        }
        assert!((mittag_leffler(1.0, -1.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        // E_{1/2}(z) = exp(z^2) erfc(-z); asymptotic erfcx beyond x = 20
        let erfcx = |x: f64| {
            if x <= 20.0 {
                (x * x).exp() * erfc(x)
            } else {
                let y = 1.0 / (2.0 * x * x);
                (1.0 - y + 3.0 * y * y - 15.0 * y.powi(3) + 105.0 * y.powi(4)) / (x * PI.sqrt())
            }
        };
        for x in [0.1f64, 1.0, 3.0, 7.5, 20.0, 35.0, 50.0] {
            let expected = erfcx(x);
            let v = mittag_leffler(0.5, -x).unwrap();
            assert!(
                (v - expected).abs() < 1e-8 * expected,
                "x={x}: {v} vs {expected}"
            );
        }
        assert!((mittag_leffler(0.5, -1.0).unwrap() - 0.427_583_576_155_807).abs() < 1e-12);
    }

    #[test]
    fn series_and_integral_agree() {
        for g in [0.2, 0.4, 0.6, 0.8, 0.95] {
            for x in [0.05, 0.3, 0.8] {
                let s = ml_series(g, -x).expect("series accepted near origin");
                let i = ml_integral(g, x).unwrap();
                assert!((s - i).abs() < 1e-10 * s, "g={g} x={x}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn decreasing_and_bounded() {
        for g in [0.2, 0.5, 0.8] {
            let mut last = 1.0;
            for i in 1..=100 {
                let v = mittag_leffler(g, -0.5 * i as f64).unwrap();
                assert!(v > 0.0 && v < last, "g={g} z={}", -0.5 * i as f64);
                last = v;
            }
        }
    }

    #[test]
    fn validated_range_enforced() {
        assert!(matches!(
            mittag_leffler(0.5, -51.0),
            Err(Error::AccuracyLoss { .. })
        ));
        assert!(matches!(
            mittag_leffler(0.5, 1.0),
            Err(Error::AccuracyLoss { .. })
        ));
        assert!(matches!(
            mittag_leffler(1.5, -1.0),
            Err(Error::AccuracyLoss { .. })
        ));
    }

    #[test]
    fn fourier_mode_amplitude() {
        assert_eq!(constant_order_solution(0.5, 1.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(constant_order_solution(0.3, 0.0, 2.0, 1.0).unwrap(), 1.0);
        // E_{1/2}(-0.25/sqrt(pi)) = exp(z^2) erfc(-z)
        let z: f64 = 0.25 / PI.sqrt();
        let expected = (z * z).exp() * erfc(z);
        let v = constant_order_solution(0.5, 1.0, 1.0, 1.0).unwrap();
        assert!((v - expected).abs() < 1e-13);
        assert!((v - 0.858_810_885_0).abs() < 1e-9);
    }

    #[test]
    fn near_one_recovers_heat_mode_in_rescaled_time() {
        // With Levy coefficient one the subordinator speeds up as gamma -> 1,
        // so the amplitude tends to one; in the rescaled time
        // gamma sigma^gamma / Gamma(1-gamma) it is the classical heat mode.
        let g = 0.99;
        let sigma = 1.0;
        let v = constant_order_solution(g, 1.0, sigma, 1.0).unwrap();
        let effective = sigma.powf(g) / laplace_coefficient(g);
        let heat = (-0.5 * effective).exp();
        assert!((v - heat).abs() < 0.02 * heat);
        assert!(constant_order_solution(0.999, 1.0, sigma, 1.0).unwrap() > v);
    }

    #[test]
    fn half_order_subordinator_closed_form() {
        // P(S_u <= v) = erfc(sqrt(pi) u / sqrt(v)) for gamma = 1/2
        for (u, v) in [(1.0, 13.8), (0.3, 0.5), (0.1, 0.02), (2.0, 100.0)] {
            let expected = erfc(PI.sqrt() * u / f64::sqrt(v));
            let got = subordinator_cdf(0.5, u, v).unwrap();
            assert!(
                (got - expected).abs() < 1e-8,
                "u={u} v={v}: {got} vs {expected}"
            );
            let a = 2.0 * PI.sqrt() * u;
            let dens = a / (2.0 * PI.sqrt()) * f64::powf(v, -1.5) * (-a * a / (4.0 * v)).exp();
            let got = subordinator_density(0.5, u, v).unwrap();
            assert!(
                (got - dens).abs() < 1e-8 * dens.max(1e-3),
                "density u={u} v={v}"
            );
        }
    }

    #[test]
    fn subordinator_self_similarity_and_limits() {
        for g in [0.3, 0.5, 0.7] {
            for (s, v) in [(0.5, 0.2), (2.0, 3.0), (0.1, 1e-3)] {
                let direct = subordinator_cdf(g, s, v).unwrap();
                let scaled = subordinator_cdf(g, 1.0, v * f64::powf(s, -1.0 / g)).unwrap();
                assert!((direct - scaled).abs() < 1e-6);
            }
            // heavy tail: P(S_1 > v) ~ v^{-g} / g
            let v: f64 = 1e8;
            let tail = 1.0 - subordinator_cdf(g, 1.0, v).unwrap();
            assert!((tail * g * v.powf(g) - 1.0).abs() < 1e-2, "g={g}: {tail}");
            assert!(subordinator_cdf(g, 1.0, 1e-6).unwrap() < 1e-6);
            let mut last = 0.0;
            for i in 1..60 {
                let v = subordinator_cdf(g, 1.0, 0.05 * f64::powi(1.3, i)).unwrap();
                assert!(v >= last - 1e-9);
                last = v;
            }
        }
    }

    #[test]
    fn inversion_agrees_with_kanter_integral() {
        for g in [0.2, 0.3, 0.4, 0.5] {
            let a = laplace_coefficient(g);
            for x in [1.5, 3.0, 6.0] {
                let z = f64::powf(a / x, 1.0 / g);
                let cdf = talbot_inversion(|s| -a * s.powf(g) - s.ln(), z, TALBOT_TERMS).unwrap();
                let dens = talbot_inversion(|s| -a * s.powf(g), z, TALBOT_TERMS).unwrap();
                assert!(
                    (cdf - kanter_integral(g, z, false).unwrap()).abs() < 1e-9,
                    "g={g} x={x}"
                );
                let k = kanter_integral(g, z, true).unwrap();
                assert!(
                    (dens - k).abs() < 1e-9 * k.max(1.0),
                    "g={g} x={x}: {dens} vs {k}"
                );
            }
        }
        // above one half, compare the Kanter route with a direct
        // quadrature of its own density
        for g in [0.6, 0.8] {
            let z = 1.3;
            let cdf = subordinator_cdf(g, 1.0, z).unwrap();
            let integral = quad::integrate(
                |y| subordinator_density(g, 1.0, y).unwrap(),
                1e-3,
                z,
                Tolerance::abs(1e-11),
            )
            .unwrap()
            .value
                + subordinator_cdf(g, 1.0, 1e-3).unwrap();
            assert!((cdf - integral).abs() < 1e-8, "g={g}: {cdf} vs {integral}");
        }
        let v = subordinator_cdf(0.7, 1.0, 0.02).unwrap();
        assert!((0.0..1e-12).contains(&v));
    }

    #[test]
    fn frozen_half_order_median() {
        // median of S_1 at gamma = 1/2: erfc(sqrt(pi/v)) = 1/2
        let (mut lo, mut hi) = (1.0, 100.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if subordinator_cdf(0.5, 1.0, mid).unwrap() < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let median = 0.5 * (lo + hi);
        // closed form: pi / erfcinv(1/2)^2
        assert!((median - 13.811_128_3).abs() < 1e-6, "{median}");
    }

    #[test]
    fn hitting_time_law_integrates_to_mittag_leffler() {
        // E exp(-c T(w) / 2) equals the Fourier-mode amplitude
        let (g, w, c) = (0.5, 1.0, 1.0);
        let upper = hitting_time_upper(g, w).unwrap();
        let mass = quad::integrate(
            |u| inverse_subordinator_density(g, w, u).unwrap(),
            0.0,
            upper,
            Tolerance::abs(1e-10),
        )
        .unwrap()
        .value;
        assert!((mass - 1.0).abs() < 1e-7, "{mass}");
        let laplace = quad::integrate(
            |u| (-0.5 * c * u).exp() * inverse_subordinator_density(g, w, u).unwrap(),
            0.0,
            upper,
            Tolerance::abs(1e-10),
        )
        .unwrap()
        .value;
        let ml = constant_order_solution(g, 1.0, w, c).unwrap();
        assert!((laplace - ml).abs() < 1e-7, "{laplace} vs {ml}");
    }

    #[test]
    fn mixture_density_is_normalised() {
        let total = quad::integrate(
            |y| time_changed_gaussian_density(0.5, 1.0, 1.0, 0.0, y).unwrap(),
            -12.0,
            12.0,
            Tolerance::abs(1e-7),
        )
        .unwrap()
        .value;
        assert!((total - 1.0).abs() < 1e-5, "{total}");
    }
}
