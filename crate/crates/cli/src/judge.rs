// Copyright 2026 The varfrac Developers.
//
// Licensed under the Apache License, Version 2.0 <LICENSE-APACHE or
// https://www.apache.org/licenses/LICENSE-2.0> or the MIT license
// <LICENSE-MIT or https://opensource.org/licenses/MIT>, at your
// option. This file may not be copied, modified, or distributed
// except according to those terms.

//! Acceptance thresholds applied to result rows.

use std::collections::BTreeMap;

use crate::config::ExperimentKind;
use crate::results::Row;

/// Fitted rate order may fall short of `1 - alpha` by this much.
pub const ORDER_SLACK: f64 = 0.1;
pub const EXACTNESS_TOL: f64 = 1e-10;
pub const SOLVER_REL_TOL: f64 = 0.02;
pub const SUBORDINATION_TOL: f64 = 1e-2;
pub const SOLVER_CONSERVATION_TOL: f64 = 1e-10;
pub const ANALYTIC_CONSERVATION_TOL: f64 = 1e-3;
pub const KS_TOL: f64 = 0.02;
pub const SIGMAS: f64 = 3.0;
/// Round-off allowance of the maximum principle, relative to the data range.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub experiment: String,
    /// Acceptance criterion this check belongs to, if any.
    pub criterion: Option<u8>,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        match self.criterion {
            Some(c) => write!(
                f,
                "{tag} [criterion {c}] {}: {}: {}",
                self.experiment, self.name, self.detail
            ),
            None => write!(
                f,
                "{tag} {}: {}: {}",
                self.experiment, self.name, self.detail
            ),
        }
    }
}

pub fn criterion_of(kind: ExperimentKind) -> Option<u8> {
    match kind {
        ExperimentKind::RateCheck => Some(1),
        ExperimentKind::ExactnessWindow => Some(2),
        ExperimentKind::Triangulation => Some(3),
        ExperimentKind::VariableOrder => Some(4),
        ExperimentKind::Conservation => Some(5),
        ExperimentKind::MaximumPrinciple => Some(6),
        ExperimentKind::DiscreteIdentity => Some(7),
        ExperimentKind::SubordinatorLaw => Some(8),
        ExperimentKind::Determinism => Some(9),
        ExperimentKind::SolverConvergence | ExperimentKind::SubordinationIdentity => None,
    }
}

struct Judge<'a> {
    experiment: &'a str,
    criterion: Option<u8>,
    checks: Vec<Check>,
}

impl Judge<'_> {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            experiment: self.experiment.into(),
            criterion: self.criterion,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn check_as(
        &mut self,
        criterion: u8,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) {
        let saved = self.criterion.replace(criterion);
        self.check(name, passed, detail);
        self.criterion = saved;
    }

    fn missing(&mut self, case: &str, what: &str) {
        self.check(format!("{case}: {what}"), false, "required rows missing");
    }
}

fn pick<'r>(rows: &[&'r Row], quantity: &str) -> Vec<&'r Row> {
    rows.iter()
        .copied()
        .filter(|r| r.quantity == quantity)
        .collect()
}

fn one<'r>(rows: &[&'r Row], quantity: &str) -> Option<&'r Row> {
    rows.iter().copied().find(|r| r.quantity == quantity)
}

type Cases<'r> = Vec<(String, Vec<&'r Row>)>;

/// Group rows by experiment, then by case, keeping first-seen order.
fn group(rows: &[Row]) -> Vec<(String, Cases<'_>)> {
    let mut out: Vec<(String, Cases)> = Vec::new();
    for r in rows {
        let e = match out.iter().position(|(e, _)| *e == r.experiment) {
            Some(i) => i,
            None => {
                out.push((r.experiment.clone(), Vec::new()));
                out.len() - 1
            }
        };
        let cases = &mut out[e].1;
        match cases.iter().position(|(c, _)| *c == r.case) {
            Some(i) => cases[i].1.push(r),
            None => cases.push((r.case.clone(), vec![r])),
        }
    }
    out
}

/// Experiments present in a results table, in first-seen order.
pub fn experiments(rows: &[Row]) -> Vec<String> {
    group(rows).into_iter().map(|(e, _)| e).collect()
}

pub fn judge(rows: &[Row]) -> Vec<Check> {
    let mut all = Vec::new();
    for (experiment, cases) in group(rows) {
        let kind = ExperimentKind::from_name(&experiment);
        let mut j = Judge {
            experiment: &experiment,
            criterion: kind.and_then(criterion_of),
            checks: Vec::new(),
        };
        match kind {
            None => j.check("known experiment", false, "unrecognised experiment name"),
            Some(kind) => judge_experiment(&mut j, kind, &cases),
        }
        for (case, rows) in &cases {
            max_principle(&mut j, case, rows);
        }
        all.extend(j.checks);
    }
    all
}

fn max_principle(j: &mut Judge, case: &str, rows: &[&Row]) {
    let get = |q| one(rows, q).map(|r| r.value);
    let (Some(t_lo), Some(t_hi), Some(f_lo), Some(f_hi)) = (
        get("terminal_min"),
        get("terminal_max"),
        get("field_min"),
        get("field_max"),
    ) else {
        return;
    };
    let slack = BOUND_SLACK * (t_hi - t_lo).abs().max(t_lo.abs()).max(t_hi.abs()).max(1.0);
    j.check_as(
        6,
        format!("{case}: maximum principle"),
        f_lo >= t_lo - slack && f_hi <= t_hi + slack,
        format!("solution in [{f_lo:.15}, {f_hi:.15}], terminal data in [{t_lo}, {t_hi}]"),
    );
}

fn judge_experiment(j: &mut Judge, kind: ExperimentKind, cases: &[(String, Vec<&Row>)]) {
    for (case, rows) in cases {
        let case = case.as_str();
        match kind {
            ExperimentKind::RateCheck => {
                let errors = pick(rows, "error");
                let bounds = pick(rows, "bound");
                if errors.is_empty() || errors.len() != bounds.len() {
                    j.missing(case, "error and bound per h");
                    continue;
                }
                let worst = errors
                    .iter()
                    .zip(&bounds)
                    .map(|(e, b)| e.value / b.value)
                    .fold(0.0, f64::max);
                j.check(
                    format!("{case}: error below bound"),
                    errors.iter().zip(&bounds).all(|(e, b)| e.value <= b.value),
                    format!("largest error/bound ratio {worst:.4}"),
                );
                match (one(rows, "fitted_order"), one(rows, "target_order")) {
                    (Some(f), Some(t)) => j.check(
                        format!("{case}: fitted order"),
                        f.value >= t.value - ORDER_SLACK,
                        format!(
                            "fitted {:.4}, need >= {:.4}",
                            f.value,
                            t.value - ORDER_SLACK
                        ),
                    ),
                    (None, Some(_)) => j.check(
                        format!("{case}: fitted order"),
                        false,
                        "no fit: an error vanished",
                    ),
                    _ => j.missing(case, "target order"),
                }
            }
            ExperimentKind::ExactnessWindow => {
                let errors = pick(rows, "error");
                if errors.is_empty() {
                    j.missing(case, "errors");
                    continue;
                }
                let worst = errors.iter().map(|r| r.value).fold(0.0, f64::max);
                j.check(
                    format!("{case}: exact past the threshold"),
                    worst <= EXACTNESS_TOL,
                    format!("largest error {worst:.3e}, tolerance {EXACTNESS_TOL:e}"),
                );
            }
            ExperimentKind::Triangulation => {
                let (Some(oracle), Some(amp)) =
                    (one(rows, "oracle"), one(rows, "oracle_amplitude"))
                else {
                    j.missing(case, "oracle");
                    continue;
                };
                match one(rows, "solver_sup_error") {
                    Some(e) => {
                        let rel = e.value / amp.value.abs();
                        j.check(
                            format!("{case}: solver vs oracle"),
                            rel <= SOLVER_REL_TOL,
                            format!("relative sup error {rel:.3e}, tolerance {SOLVER_REL_TOL}"),
                        );
                    }
                    None => j.missing(case, "solver sup error"),
                }
                let mcs = pick(rows, "mc");
                if mcs.is_empty() {
                    j.missing(case, "Monte Carlo");
                }
                for mc in mcs {
                    within_sigmas(j, case, "Monte Carlo vs oracle", mc, oracle.value, 0.0);
                }
                match one(rows, "subordination") {
                    Some(q) => {
                        let gap = (q.value - oracle.value).abs();
                        j.check(
                            format!("{case}: subordination vs oracle"),
                            gap <= SUBORDINATION_TOL,
                            format!("gap {gap:.3e}, tolerance {SUBORDINATION_TOL}"),
                        );
                    }
                    None => j.missing(case, "subordination"),
                }
            }
            ExperimentKind::SolverConvergence => {
                let errs = pick(rows, "sup_error");
                let seq = if errs.is_empty() {
                    pick(rows, "self_difference")
                } else {
                    errs
                };
                if seq.len() < 2 {
                    j.missing(case, "error sequence");
                    continue;
                }
                let values: Vec<f64> = seq.iter().map(|r| r.value).collect();
                j.check(
                    format!("{case}: errors decrease under refinement"),
                    values.windows(2).all(|w| w[1] < w[0]),
                    values
                        .iter()
                        .map(|v| format!("{v:.3e}"))
                        .collect::<Vec<_>>()
                        .join(", "),
                );
            }
            ExperimentKind::VariableOrder => {
                let solver = pick(rows, "solver");
                let (Some(finest), Some(sc)) = (solver.last(), one(rows, "self_convergence"))
                else {
                    j.missing(case, "solver ladder");
                    continue;
                };
                let mcs = pick(rows, "mc");
                if mcs.len() < 2 {
                    j.missing(case, "tau ladder");
                    continue;
                }
                for mc in &mcs {
                    let sigma = mc.uncertainty.unwrap_or(f64::NAN);
                    let allowed = (SIGMAS * sigma).max(2.0 * sc.value);
                    let gap = (mc.value - finest.value).abs();
                    j.check(
                        format!("{case}: tau={} agrees with solver", mc.tau.unwrap_or(f64::NAN)),
                        gap <= allowed,
                        format!("gap {gap:.3e}, allowed {allowed:.3e} (3 sigma {:.3e}, 2 x self-convergence {:.3e})", SIGMAS * sigma, 2.0 * sc.value),
                    );
                }
                let mut ladder: Vec<(f64, f64)> = mcs
                    .iter()
                    .map(|r| (r.tau.unwrap_or(f64::NAN), (r.value - finest.value).abs()))
                    .collect();
                ladder.sort_by(|a, b| b.0.total_cmp(&a.0));
                j.check(
                    format!("{case}: gap shrinks along the tau ladder"),
                    ladder.windows(2).all(|w| w[1].1 < w[0].1),
                    ladder
                        .iter()
                        .map(|(t, g)| format!("tau={t}: {g:.3e}"))
                        .collect::<Vec<_>>()
                        .join(", "),
                );
            }
            ExperimentKind::Conservation => {
                match one(rows, "solver_max_deviation") {
                    Some(d) => j.check(
                        format!("{case}: solver"),
                        d.value <= SOLVER_CONSERVATION_TOL,
                        format!("max |F - 1| = {:.3e}", d.value),
                    ),
                    None => j.missing(case, "solver"),
                }
                let mcs = pick(rows, "mc");
                if mcs.is_empty() {
                    j.missing(case, "Monte Carlo");
                }
                for mc in mcs {
                    j.check(
                        format!("{case}: Monte Carlo at tau={}", mc.tau.unwrap_or(f64::NAN)),
                        mc.value == 1.0 && mc.uncertainty == Some(0.0),
                        format!("mean {}, std error {:?}", mc.value, mc.uncertainty),
                    );
                }
                if let Some(q) = one(rows, "subordination_analytic") {
                    let gap = (q.value - 1.0).abs();
                    j.check(
                        format!("{case}: subordination, exact density"),
                        gap <= ANALYTIC_CONSERVATION_TOL,
                        format!("|value - 1| = {gap:.3e}, tolerance {ANALYTIC_CONSERVATION_TOL}"),
                    );
                }
                if let Some(q) = one(rows, "subordination_empirical") {
                    within_sigmas(j, case, "subordination, chain density", q, 1.0, 0.0);
                }
            }
            ExperimentKind::MaximumPrinciple => {
                if one(rows, "field_min").is_none() {
                    j.missing(case, "field bounds");
                }
            }
            ExperimentKind::SubordinationIdentity => {
                match (one(rows, "subordination_empirical"), one(rows, "mc")) {
                    (Some(q), Some(mc)) => within_sigmas(
                        j,
                        case,
                        "chain density vs Monte Carlo",
                        q,
                        mc.value,
                        mc.uncertainty.unwrap_or(0.0),
                    ),
                    _ => j.missing(case, "chain density and Monte Carlo"),
                }
                if let (Some(q), Some(o)) =
                    (one(rows, "subordination_analytic"), one(rows, "oracle"))
                {
                    let gap = (q.value - o.value).abs();
                    j.check(
                        format!("{case}: exact density vs oracle"),
                        gap <= SUBORDINATION_TOL,
                        format!("gap {gap:.3e}, tolerance {SUBORDINATION_TOL}"),
                    );
                }
            }
            ExperimentKind::DiscreteIdentity => match (one(rows, "lattice"), one(rows, "mc")) {
                (Some(l), Some(mc)) => {
                    within_sigmas(j, case, "lattice vs Monte Carlo", mc, l.value, 0.0)
                }
                _ => j.missing(case, "lattice and Monte Carlo"),
            },
            ExperimentKind::SubordinatorLaw => match one(rows, "ks") {
                Some(ks) => j.check(
                    format!("{case}: KS distance"),
                    ks.value <= KS_TOL,
                    format!("{:.4}, tolerance {KS_TOL}", ks.value),
                ),
                None => j.missing(case, "KS distance"),
            },
            ExperimentKind::Determinism => {}
        }
    }
    if kind == ExperimentKind::Determinism {
        let runs: Vec<&Row> = cases.iter().flat_map(|(_, r)| pick(r, "mc")).collect();
        let same = runs.len() >= 2
            && runs.windows(2).all(|w| {
                w[0].value.to_bits() == w[1].value.to_bits() && w[0].uncertainty == w[1].uncertainty
            });
        j.check(
            "estimates identical across worker counts",
            same,
            runs.iter()
                .zip(cases)
                .map(|(r, (c, _))| format!("{c}: {}", r.value))
                .collect::<Vec<_>>()
                .join(", "),
        );
    }
}

/// `|row - target| <= 3 sqrt(sigma_row^2 + sigma_target^2)`.
fn within_sigmas(j: &mut Judge, case: &str, name: &str, row: &Row, target: f64, target_sigma: f64) {
    let sigma = row.uncertainty.unwrap_or(0.0).hypot(target_sigma);
    let gap = (row.value - target).abs();
    let label = match row.tau {
        Some(t) => format!("{case}: {name} at tau={t}"),
        None => format!("{case}: {name}"),
    };
    j.check(
        label,
        gap <= SIGMAS * sigma,
        format!("gap {gap:.3e}, 3 sigma {:.3e}", SIGMAS * sigma),
    );
}

/// Whether every check passed, and per criterion.
pub fn by_criterion(checks: &[Check]) -> BTreeMap<u8, bool> {
    let mut out = BTreeMap::new();
    for c in checks {
        if let Some(k) = c.criterion {
            *out.entry(k).or_insert(true) &= c.passed;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(mc: f64, se: f64) -> Vec<Row> {
        let e = "triangulation";
        vec![
            Row::new(e, "c", "oracle", 0.85),
            Row::new(e, "c", "oracle_amplitude", 0.85),
            Row::new(e, "c", "solver_sup_error", 1e-4),
            Row::new(e, "c", "mc", mc).tau(1e-3).uncertainty(se),
            Row::new(e, "c", "subordination", 0.851),
        ]
    }

    #[test]
    fn mc_gap_beyond_three_sigma_fails_named_criterion() {
        assert!(judge(&tri(0.851, 1e-3)).iter().all(|c| c.passed));
        let checks = judge(&tri(0.86, 1e-3));
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].criterion, Some(3));
        assert!(failed[0].to_string().contains("Monte Carlo vs oracle"));
        assert_eq!(by_criterion(&checks).get(&3), Some(&false));
    }

    #[test]
    fn maximum_principle_applies_to_every_experiment() {
        let mut rows = tri(0.851, 1e-3);
        for (q, v) in [
            ("terminal_min", -1.0),
            ("terminal_max", 1.0),
            ("field_min", -0.9),
            ("field_max", 1.0 + 1e-9),
        ] {
            rows.push(Row::new("triangulation", "c", q, v));
        }
        let checks = judge(&rows);
        let mp = checks.iter().find(|c| c.criterion == Some(6)).unwrap();
        assert!(!mp.passed);
    }

    #[test]
    fn missing_rows_fail() {
        let rows = vec![Row::new("subordinator-law", "g", "empirical_cdf", 0.5)];
        assert!(!judge(&rows)[0].passed);
    }
}
