//! Generalized concurrences: coefficient algebra, admissibility and
//! pure-state evaluation through reduced-state purities.

mod coeffs;
mod eval;
mod json;
mod spec;

pub use coeffs::{
    alpha_from_p, p_from_alpha, p_values_unchecked, CoefficientsAlpha, CoefficientsP, SignPattern, COEFF_TOL,
};
pub use eval::{concurrence_pure, purity_table, radicand, RADICAND_CLAMP, RADICAND_ERROR};
pub use json::{parse_spec, spec_to_json, SpecForm, SpecJson};
pub use spec::{validate, ConcurrenceSpec, ValidationReport, SPEC_TOL};

pub(crate) use eval::{check_parties, from_radicand, prefactor, weighted_sum};

/// `C_S` on `n` parties.
pub fn symmetric_spec(n: usize) -> crate::error::Result<ConcurrenceSpec> {
    ConcurrenceSpec::symmetric(n)
}
