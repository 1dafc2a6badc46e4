//! Lower bounds on query and sample budgets from relation degrees or weight schemes.

use serde::{Deserialize, Serialize};

use super::relation::{build_relation, closed_form_degrees, Construction, RelationDegrees, RelationInstance};
use super::weights::{load_profile, validate_weight_scheme, WeightScheme};
use crate::algorithms::Model;
use crate::error::{Error, Result};
use crate::problems::ProblemKind;

/// Error probability used for reported constants.
pub const DEFAULT_EPSILON: f64 = 1.0 / 3.0;

/// `C_ε = √((1 − 2√(ε(1−ε))) / 2)`.
pub fn c_epsilon(eps: f64) -> f64 {
    ((1.0 - 2.0 * (eps * (1.0 - eps)).sqrt()) / 2.0).sqrt()
}

/// Where the degrees of a report came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeSource {
    Enumerated,
    ClosedForm,
    Scheme,
}

/// One row of bound output.
///
/// `product_bound` is the right-hand side of `Q·P ≥ ·` for the two sampling
/// models and of `Q·2^P ≥ ·` for the copy model. `additive_bound` is the
/// implied lower bound on `Q + P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub problem: ProblemKind,
    pub model: Model,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub m_prime: usize,
    pub l: usize,
    pub l_prime: usize,
    pub product_bound: f64,
    pub additive_bound: f64,
    pub epsilon: f64,
    pub c_epsilon: f64,
    pub source: DegreeSource,
    /// Copy model only: `log₂` of the bound, the copies needed with one query.
    pub single_query_copies: Option<f64>,
}

/// `min_{Q ≥ 1} Q + max(0, log₂(B / Q))` over integer `Q`.
fn cbqp_additive(b: f64) -> f64 {
    let top = b.ceil().max(1.0) as usize;
    (1..=top)
        .map(|q| q as f64 + (b / q as f64).log2().max(0.0))
        .fold(f64::INFINITY, f64::min)
}

fn report(
    problem: ProblemKind,
    model: Model,
    n: usize,
    d: RelationDegrees,
    product: f64,
    eps: f64,
    source: DegreeSource,
) -> BoundReport {
    let (additive, single) = match model {
        Model::Cbqp => (cbqp_additive(product), Some(product.log2().max(0.0))),
        _ => (2.0 * product.sqrt(), None),
    };
    BoundReport {
        problem,
        model,
        n,
        m: d.m,
        m_prime: d.m_prime,
        l: d.l,
        l_prime: d.l_prime,
        product_bound: product,
        additive_bound: additive,
        epsilon: eps,
        c_epsilon: c_epsilon(eps),
        source,
        single_query_copies: single,
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidParameters(format!("ε must lie in [0, 1/2), got {eps}")));
    }
    Ok(())
}

/// Bounds with unit weights:
///
/// * PDQP: `Q·P ≥ C_ε √(m m′ / (l l′))`,
/// * PDQP with non-adaptive queries: `Q·P ≥ C_ε² max(m/l, m′/l′)`,
/// * CBQP: `Q·2^P ≥ C_ε √(m m′ / (l l′))`.
pub fn bounds_from_degrees(
    problem: ProblemKind,
    n: usize,
    d: RelationDegrees,
    model: Model,
    eps: f64,
    source: DegreeSource,
) -> Result<BoundReport> {
    check_eps(eps)?;
    if d.m == 0 || d.m_prime == 0 || d.l == 0 || d.l_prime == 0 {
        return Err(Error::InvalidParameters(format!("degenerate degrees {d:?}")));
    }
    let c = c_epsilon(eps);
    let (m, mp, l, lp) = (d.m as f64, d.m_prime as f64, d.l as f64, d.l_prime as f64);
    let product = match model {
        Model::Pdqp | Model::Cbqp => c * (m * mp / (l * lp)).sqrt(),
        Model::PdqpNaq => c * c * (m / l).max(mp / lp),
    };
    Ok(report(problem, model, n, d, product, eps, source))
}

/// Bounds for a relation with unit weights, using its enumerated degrees.
pub fn bounds_from_relation(relation: &RelationInstance, model: Model, eps: f64) -> Result<BoundReport> {
    bounds_from_degrees(
        relation.kind,
        relation.n,
        relation.degrees,
        model,
        eps,
        DegreeSource::Enumerated,
    )
}

/// Bounds from a weight scheme: `C_ε / v_max` for PDQP and CBQP, and
/// `C_ε² max(min_{x,i} wt(x)/v(x,i), min_{y,i} wt(y)/v(y,i))` without adaptivity.
/// Indices with zero load are skipped.
pub fn bounds_from_scheme(
    relation: &RelationInstance,
    scheme: &WeightScheme,
    model: Model,
    eps: f64,
) -> Result<BoundReport> {
    check_eps(eps)?;
    let violations = validate_weight_scheme(scheme, relation);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidScheme(format!(
            "{} violation(s), first on pair {}: {}",
            violations.len(),
            v.pair,
            v.detail
        )));
    }
    let p = load_profile(relation, scheme);
    if p.v_max == 0.0 {
        return Err(Error::InvalidScheme("zero maximum load".into()));
    }
    let c = c_epsilon(eps);
    let min_ratio = |wt: &[f64], v: &[Vec<f64>]| {
        wt.iter()
            .zip(v)
            .flat_map(|(w, row)| row.iter().filter(|&&vi| vi > 0.0).map(move |vi| w / vi))
            .fold(f64::INFINITY, f64::min)
    };
    let product = match model {
        Model::Pdqp | Model::Cbqp => c / p.v_max,
        Model::PdqpNaq => c * c * min_ratio(&p.wt_x, &p.v_x).max(min_ratio(&p.wt_y, &p.v_y)),
    };
    Ok(report(
        relation.kind,
        model,
        relation.n,
        relation.degrees,
        product,
        eps,
        DegreeSource::Scheme,
    ))
}

/// Bounds for the canonical relation of a problem: enumerated when small
/// enough, otherwise from the closed-form degrees.
pub fn compute_bounds(problem: ProblemKind, n: usize, model: Model, eps: f64) -> Result<BoundReport> {
    match build_relation(problem, n) {
        Ok(r) => bounds_from_relation(&r, model, eps),
        Err(Error::EnumerationBudgetExceeded { .. }) => bounds_from_degrees(
            problem,
            n,
            closed_form_degrees(problem, n, Construction::Canonical)?,
            model,
            eps,
            DegreeSource::ClosedForm,
        ),
        Err(e) => Err(e),
    }
}
