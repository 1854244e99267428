//! Monotonicity of a concurrence under a local flag measurement.
//!
//! A measure is monotone in the required sense iff for all `ψ, φ` and weights
//! the flag superposition `Ξ` satisfies `C(Ξ) ≥ |a|²C(ψ) + |b|²C(φ)`.

mod gap;
mod kappa;
mod region;
mod search;
mod witness;

pub use gap::{
    cauchy_schwarz_bound, flag_free_side, gap_direct, gap_expanded, squared_form, upsilon, upsilon_table,
    GapEvaluation, GapMethod, SquaredForm,
};
pub use kappa::{
    default_kappa_grid, kappa2, kappa_alpha, kappa_scan, kappa_spec, KappaPoint, KappaScanResult, BOUNDARY_RESOLUTION,
};
pub use region::{region_to_csv, triangle_inequalities, tripartite_region, RegionPoint, REGION_TOL};
pub use search::{search, search_violation, SearchCandidate, SearchConfig, SearchReport};
pub use witness::{
    positive_single_party, single_element_counterexample, tripartite_counterexample, ViolationWitness, WitnessJson,
};

use crate::concurrence::ConcurrenceSpec;

/// Slack allowed on `α_V ≤ 0`.
pub const SUFFICIENT_TOL: f64 = 1e-14;

/// `α_V ≤ 0` for every nontrivial `V` guarantees monotonicity. The converse
/// does not hold.
pub fn sufficient_criterion(spec: &ConcurrenceSpec) -> bool {
    let tol = SUFFICIENT_TOL * spec.alpha().iter().map(|(_, a)| a.abs()).fold(1.0, f64::max);
    spec.alpha()
        .iter()
        .filter(|(v, _)| v.is_nontrivial())
        .all(|(_, a)| a <= tol)
}
