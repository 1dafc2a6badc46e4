//! Weights lifted to k-fold parallel queries.
//!
//! The lifted input `ᵏx` answers an index tuple `I = (i_1, …, i_k)` with
//! `x(I) = (x(i_1), …, x(i_k))`. Pairs keep their weight, `W(ᵏx, ᵏy) = w(x, y)`,
//! and the lifted per-index weight is `W′(x, y, I) = Σ_{j: x(i_j) ≠ y(i_j)} w′(x, y, i_j)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::relation::RelationInstance;
use super::weights::{load_profile, WeightScheme};
use crate::error::{Error, Result};

/// Largest `N^k · |X ∪ Y|` an exhaustive check will attempt.
pub const LIFTED_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleSelection {
    /// Every tuple in `[N]^k`.
    All,
    /// `count` uniform tuples per input.
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedReport {
    pub k: usize,
    /// `(input, I)` combinations compared.
    pub checked: usize,
    /// Combinations where no partner differs on `I`.
    pub skipped: usize,
    /// Failures of `WT(ᵏx) / V(ᵏx, I) ≥ (1/k) min_j wt(x) / v(x, i_j)`.
    pub violations: usize,
    /// Failures of `W′(x,y,I) W′(y,x,I) ≥ W(x,y)²`.
    pub product_violations: usize,
    /// Smallest ratio of left side to right side seen.
    pub min_ratio: f64,
}

impl LiftedReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.product_violations == 0
    }
}

struct Side<'a> {
    tables: &'a [Vec<usize>],
    /// Per member: `(partner table, weight, w′ towards partner by index, w′ back)`.
    partners: Vec<Vec<(&'a [usize], f64, Vec<f64>, Vec<f64>)>>,
    wt: Vec<f64>,
    v: Vec<Vec<f64>>,
}

pub fn verify_lifted_weights(
    relation: &RelationInstance,
    scheme: &WeightScheme,
    k: usize,
    selection: TupleSelection,
) -> Result<LiftedReport> {
    let n = relation.n;
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    let inputs = (relation.x.len() + relation.y.len()) as u128;
    let per_input = match selection {
        TupleSelection::All => (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX),
        TupleSelection::Sampled { count, .. } => count as u128,
    };
    let requested = per_input.saturating_mul(inputs);
    if k > 4 || requested > LIFTED_BUDGET {
        return Err(Error::EnumerationBudgetExceeded {
            requested,
            budget: LIFTED_BUDGET,
        });
    }
    let profile = load_profile(relation, scheme);
    let dense = |entries: &[(usize, f64, f64)], back: bool| {
        let mut v = vec![0.0; n];
        for &(i, a, b) in entries {
            v[i] = if back { b } else { a };
        }
        v
    };
    let mut xs = Side {
        tables: &relation.x,
        partners: vec![Vec::new(); relation.x.len()],
        wt: profile.wt_x.clone(),
        v: profile.v_x.clone(),
    };
    let mut ys = Side {
        tables: &relation.y,
        partners: vec![Vec::new(); relation.y.len()],
        wt: profile.wt_y.clone(),
        v: profile.v_y.clone(),
    };
    for (p, &(a, b)) in relation.pairs.iter().enumerate() {
        let fwd = dense(&scheme.w_prime[p], false);
        let back = dense(&scheme.w_prime[p], true);
        xs.partners[a].push((relation.y[b].as_slice(), scheme.w[p], fwd.clone(), back.clone()));
        ys.partners[b].push((relation.x[a].as_slice(), scheme.w[p], back, fwd));
    }
    let mut report = LiftedReport {
        k,
        checked: 0,
        skipped: 0,
        violations: 0,
        product_violations: 0,
        min_ratio: f64::INFINITY,
    };
    let mut rng = match selection {
        TupleSelection::Sampled { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        TupleSelection::All => None,
    };
    let mut tuple = vec![0usize; k];
    for side in [&xs, &ys] {
        for (u, table) in side.tables.iter().enumerate() {
            let mut remaining = per_input;
            tuple.iter_mut().for_each(|t| *t = 0);
            while remaining > 0 {
                remaining -= 1;
                if let Some(r) = rng.as_mut() {
                    tuple.iter_mut().for_each(|t| *t = r.random_range(0..n));
                }
                check_tuple(side, u, table, &tuple, &mut report);
                if rng.is_none() {
                    for slot in tuple.iter_mut().rev() {
                        *slot += 1;
                        if *slot < n {
                            break;
                        }
                        *slot = 0;
                    }
                }
            }
        }
    }
    Ok(report)
}

fn check_tuple(side: &Side<'_>, u: usize, x: &[usize], tuple: &[usize], report: &mut LiftedReport) {
    let k = tuple.len() as f64;
    let mut big_v = 0.0;
    for (z, w, fwd, back) in &side.partners[u] {
        let differing: Vec<usize> = tuple.iter().copied().filter(|&i| x[i] != z[i]).collect();
        if differing.is_empty() {
            continue;
        }
        let a: f64 = differing.iter().map(|&i| fwd[i]).sum();
        let b: f64 = differing.iter().map(|&i| back[i]).sum();
        if a * b < w * w * (1.0 - 1e-12) {
            report.product_violations += 1;
        }
        big_v += a;
    }
    if big_v == 0.0 {
        report.skipped += 1;
        return;
    }
    report.checked += 1;
    let lhs = side.wt[u] / big_v;
    let rhs = tuple
        .iter()
        .filter(|&&i| side.v[u][i] > 0.0)
        .map(|&i| side.wt[u] / side.v[u][i])
        .fold(f64::INFINITY, f64::min)
        / k;
    let ratio = lhs / rhs;
    report.min_ratio = report.min_ratio.min(ratio);
    if lhs < rhs * (1.0 - 1e-12) {
        report.violations += 1;
    }
}
