//! Adversary relations, weight schemes, bounds and inequality checks.

mod bounds;
mod inequalities;
mod lifted;
mod relation;
mod weights;

pub use bounds::{
    bounds_from_degrees, bounds_from_relation, bounds_from_scheme, c_epsilon, compute_bounds, BoundReport, DegreeSource,
    DEFAULT_EPSILON,
};
pub use inequalities::{
    progress, progress_trace, relation_states, sample_polynomial_triples, state_at_query, verify_hybrid_bound,
    verify_polynomial_inequality, verify_weight_identity, HybridReport, PolynomialReport, ProgressTrace, QueryRegisters,
    WeightIdentityReport, POLYNOMIAL_SLACK,
};
pub use lifted::{verify_lifted_weights, LiftedReport, TupleSelection, LIFTED_BUDGET};
pub use relation::{
    build_relation, build_relation_with, closed_form_degrees, sampled_degrees, Construction, RelationDegrees,
    RelationInstance, DEFAULT_ENUMERATION_BUDGET,
};
pub use weights::{load_profile, validate_weight_scheme, Condition, LoadProfile, Violation, WeightScheme};
