//! Weight schemes over a relation and the loads they induce.

use serde::{Deserialize, Serialize};

use super::relation::RelationInstance;

/// `w(x, y)` for every pair of the relation and, for every index where the
/// pair differs, `w′(x, y, i)` and `w′(y, x, i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub w: Vec<f64>,
    /// Per pair: `(i, w′(x, y, i), w′(y, x, i))` for each differing index `i`.
    pub w_prime: Vec<Vec<(usize, f64, f64)>>,
}

impl WeightScheme {
    /// `w = w′ = 1` everywhere.
    pub fn uniform(relation: &RelationInstance) -> Self {
        Self::from_fn(relation, |_| 1.0, |_, _| (1.0, 1.0))
    }

    /// Builds a scheme from `w(pair)` and `(w′(x,y,i), w′(y,x,i)) = f(pair, i)`.
    pub fn from_fn(
        relation: &RelationInstance,
        w: impl Fn(usize) -> f64,
        w_prime: impl Fn(usize, usize) -> (f64, f64),
    ) -> Self {
        let n = relation.pairs.len();
        WeightScheme {
            w: (0..n).map(&w).collect(),
            w_prime: (0..n)
                .map(|k| {
                    relation
                        .differing(k)
                        .into_iter()
                        .map(|i| {
                            let (a, b) = w_prime(k, i);
                            (i, a, b)
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    PositiveWeight,
    PositiveForward,
    PositiveBackward,
    Product,
    /// The scheme does not cover the relation (wrong pair or index set).
    Shape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub pair: usize,
    pub index: Option<usize>,
    pub condition: Condition,
    pub detail: String,
}

/// Checks every positivity and product condition. An empty list means valid.
pub fn validate_weight_scheme(scheme: &WeightScheme, relation: &RelationInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let pairs = relation.pairs.len();
    if scheme.w.len() != pairs || scheme.w_prime.len() != pairs {
        out.push(Violation {
            pair: 0,
            index: None,
            condition: Condition::Shape,
            detail: format!(
                "scheme covers {} / {} pairs, relation has {pairs}",
                scheme.w.len(),
                scheme.w_prime.len()
            ),
        });
        return out;
    }
    for k in 0..pairs {
        let w = scheme.w[k];
        if !(w > 0.0) {
            out.push(Violation {
                pair: k,
                index: None,
                condition: Condition::PositiveWeight,
                detail: format!("w = {w}"),
            });
        }
        let listed: Vec<usize> = scheme.w_prime[k].iter().map(|e| e.0).collect();
        if listed != relation.differing(k) {
            out.push(Violation {
                pair: k,
                index: None,
                condition: Condition::Shape,
                detail: format!("w′ given on {listed:?}"),
            });
            continue;
        }
        for &(i, a, b) in &scheme.w_prime[k] {
            let mut push = |condition, detail: String| {
                out.push(Violation {
                    pair: k,
                    index: Some(i),
                    condition,
                    detail,
                })
            };
            if !(a > 0.0) {
                push(Condition::PositiveForward, format!("w′(x,y,{i}) = {a}"));
            }
            if !(b > 0.0) {
                push(Condition::PositiveBackward, format!("w′(y,x,{i}) = {b}"));
            }
            if !(a * b >= w * w) {
                push(Condition::Product, format!("{a} · {b} < {w}²"));
            }
        }
    }
    out
}

/// `wt` and `v` for every member of X and Y, and the maximum loads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub wt_x: Vec<f64>,
    pub wt_y: Vec<f64>,
    /// `v(x, i)` indexed `[x][i]`.
    pub v_x: Vec<Vec<f64>>,
    pub v_y: Vec<Vec<f64>>,
    /// `max v(x, i) / wt(x)` over X.
    pub load_x: f64,
    pub load_y: f64,
    /// `√(load_x · load_y)`.
    pub v_max: f64,
    /// `Σ_R w(x, y)`.
    pub total_weight: f64,
}

pub fn load_profile(relation: &RelationInstance, scheme: &WeightScheme) -> LoadProfile {
    let n = relation.n;
    let mut wt_x = vec![0.0; relation.x.len()];
    let mut wt_y = vec![0.0; relation.y.len()];
    let mut v_x = vec![vec![0.0; n]; relation.x.len()];
    let mut v_y = vec![vec![0.0; n]; relation.y.len()];
    for (k, &(a, b)) in relation.pairs.iter().enumerate() {
        wt_x[a] += scheme.w[k];
        wt_y[b] += scheme.w[k];
        for &(i, fwd, back) in &scheme.w_prime[k] {
            v_x[a][i] += fwd;
            v_y[b][i] += back;
        }
    }
    let load = |wt: &[f64], v: &[Vec<f64>]| {
        wt.iter()
            .zip(v)
            .filter(|(w, _)| **w > 0.0)
            .flat_map(|(w, row)| row.iter().map(move |vi| vi / w))
            .fold(0.0, f64::max)
    };
    let load_x = load(&wt_x, &v_x);
    let load_y = load(&wt_y, &v_y);
    LoadProfile {
        total_weight: scheme.w.iter().sum(),
        wt_x,
        wt_y,
        v_x,
        v_y,
        load_x,
        load_y,
        v_max: (load_x * load_y).sqrt(),
    }
}
