//! Smallest sample budget reaching a target success rate, and scaling fits.

use serde::{Deserialize, Serialize};

use super::experiment::{estimate_algorithm, ExperimentSpec, ResultRow};
use crate::algorithms::{build_algorithm, Model};
use crate::error::{Error, Result};
use crate::problems::ProblemKind;

/// Smallest budget the algorithm family accepts.
fn floor_budget(kind: ProblemKind, model: Model) -> usize {
    match (kind, model) {
        (ProblemKind::Collision, Model::Pdqp | Model::PdqpNaq) => 2,
        _ => 1,
    }
}

/// Success estimate at budget `p`, with the worst class deciding.
fn probe(spec: &ExperimentSpec, n: usize, p: usize) -> Result<ResultRow> {
    let algo = build_algorithm(spec.problem, spec.model, n, spec.q, Some(p))?;
    if algo.p != p {
        return Err(Error::InvalidParameters(format!(
            "{}/{} has a fixed budget P = {}",
            spec.problem, spec.model, algo.p
        )));
    }
    estimate_algorithm(&algo, &spec.classes_for(n), spec.trials, spec.seed)
}

/// Smallest `P` whose worst-class success rate reaches `spec.target`, found by
/// doubling and then bisecting. Returns the row measured at that budget.
///
/// Every probe reuses the spec's seed, so the per-trial instances are shared
/// across budgets.
pub fn minimal_budget(spec: &ExperimentSpec, n: usize) -> Result<ResultRow> {
    spec.validate()?;
    let meets = |row: &ResultRow| row.worst_rate >= spec.target;
    let mut lo = floor_budget(spec.problem, spec.model);
    if lo > spec.p_cap {
        return Err(Error::BudgetCapReached { cap: spec.p_cap });
    }
    let first = probe(spec, n, lo)?;
    if meets(&first) {
        return Ok(first);
    }
    // `lo` fails, `hi` passes.
    let (mut hi, mut best) = loop {
        let next = (lo * 2).min(spec.p_cap);
        if next == lo {
            return Err(Error::BudgetCapReached { cap: spec.p_cap });
        }
        let row = probe(spec, n, next)?;
        if meets(&row) {
            break (next, row);
        }
        lo = next;
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let row = probe(spec, n, mid)?;
        if meets(&row) {
            hi = mid;
            best = row;
        } else {
            lo = mid;
        }
    }
    Ok(best)
}

/// Ordinary least squares of `ln y` on `ln x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

pub fn loglog_fit(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 2 {
        return Err(Error::InvalidParameters("a fit needs at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParameters("log-log fit needs positive coordinates".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameters("all x values coincide".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let sse: f64 = logs.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum();
    Ok(LogLogFit {
        exponent,
        intercept,
        residual: (sse / k).sqrt(),
        points: logs.len(),
    })
}

/// Minimal budgets for every `N` of the spec and, with two or more points,
/// the fit of `ln(Q + P*)` against `ln N`.
pub fn budget_scaling(spec: &ExperimentSpec) -> Result<(Vec<ResultRow>, Option<LogLogFit>)> {
    let rows: Vec<ResultRow> = spec.n.iter().map(|&n| minimal_budget(spec, n)).collect::<Result<_>>()?;
    let fit = if rows.len() >= 2 {
        Some(loglog_fit(
            &rows.iter().map(|r| (r.n as f64, (r.q + r.p) as f64)).collect::<Vec<_>>(),
        )?)
    } else {
        None
    };
    Ok((rows, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [2.0, 5.0, 11.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(0.5))).collect();
        let fit = loglog_fit(&pts).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert!(loglog_fit(&[(1.0, 1.0)]).is_err());
        assert!(loglog_fit(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
        assert!(loglog_fit(&[(0.0, 1.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn collision_sixteen_needs_at_most_three() {
        // Error on two-to-one inputs is 2^{1−P}; P = 3 gives 0.25.
        let spec = ExperimentSpec {
            problem: ProblemKind::Collision,
            target: 0.75,
            trials: 4000,
            seed: 2,
            ..Default::default()
        };
        let row = minimal_budget(&spec, 16).unwrap();
        assert!(row.p <= 3, "{row:?}");
        assert!(row.p >= 2);
    }

    #[test]
    fn cap_is_reported() {
        let spec = ExperimentSpec {
            problem: ProblemKind::Search,
            q: Some(0),
            target: 0.99,
            trials: 200,
            p_cap: 4,
            ..Default::default()
        };
        assert_eq!(minimal_budget(&spec, 64), Err(Error::BudgetCapReached { cap: 4 }));
    }

    #[test]
    fn fixed_budget_family_is_rejected() {
        let spec = ExperimentSpec {
            problem: ProblemKind::Majority,
            model: Model::Cbqp,
            trials: 10,
            ..Default::default()
        };
        assert!(matches!(minimal_budget(&spec, 8), Err(Error::InvalidParameters(_))));
    }
}
