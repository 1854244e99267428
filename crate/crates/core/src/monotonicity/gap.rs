//! The flag-superposition gap
//! `C(a|ψ⟩⊗|η₁⟩ + b|φ⟩⊗|η₂⟩) − |a|²C(ψ) − |b|²C(φ)`,
//! evaluated either by building the superposition or from purities and
//! cross-purities of `ψ` and `φ` alone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::concurrence::{check_parties, concurrence_pure, from_radicand, purity_table, weighted_sum, ConcurrenceSpec};
use crate::error::{Error, Result};
use crate::qstate::{cross_purity_unchecked, flag_superposition, PureState, SubsetMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Direct,
    Expanded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapEvaluation {
    pub gap: f64,
    /// `C(Ξ)`.
    pub lhs: f64,
    /// `|a|² C(ψ)`.
    pub rhs_psi_term: f64,
    /// `|b|² C(φ)`.
    pub rhs_phi_term: f64,
    pub method: GapMethod,
}

impl GapEvaluation {
    fn new(lhs: f64, rhs_psi_term: f64, rhs_phi_term: f64, method: GapMethod) -> Self {
        Self {
            gap: lhs - rhs_psi_term - rhs_phi_term,
            lhs,
            rhs_psi_term,
            rhs_phi_term,
            method,
        }
    }
}

fn check_inputs(spec: &ConcurrenceSpec, psi: &PureState, phi: &PureState, flag_party: usize) -> Result<()> {
    psi.check_same_dims(phi)?;
    check_parties(spec, psi)?;
    if flag_party >= psi.n_parties() {
        return Err(Error::IndexOutOfRange {
            what: "flag party",
            index: flag_party,
            bound: psi.n_parties(),
        });
    }
    Ok(())
}

/// Builds `Ξ` and evaluates all three concurrences.
pub fn gap_direct(
    spec: &ConcurrenceSpec,
    psi: &PureState,
    phi: &PureState,
    a: Complex64,
    b: Complex64,
    flag_party: usize,
) -> Result<GapEvaluation> {
    check_inputs(spec, psi, phi, flag_party)?;
    let xi = flag_superposition(psi, phi, a, b, flag_party)?;
    let lhs = concurrence_pure(spec, &xi)?;
    let c_psi = concurrence_pure(spec, psi)?;
    let c_phi = concurrence_pure(spec, phi)?;
    Ok(GapEvaluation::new(
        lhs,
        a.norm_sqr() * c_psi,
        b.norm_sqr() * c_phi,
        GapMethod::Direct,
    ))
}

/// Same gap without constructing `Ξ`:
/// `Tr(Tr_V |Ξ⟩⟨Ξ|)² = |a|⁴ P^ψ_V + |b|⁴ P^φ_V + 2|a|²|b|² Υ_V`.
pub fn gap_expanded(
    spec: &ConcurrenceSpec,
    psi: &PureState,
    phi: &PureState,
    a: Complex64,
    b: Complex64,
    flag_party: usize,
) -> Result<GapEvaluation> {
    check_inputs(spec, psi, phi, flag_party)?;
    let n = spec.n();
    let pp = purity_table(psi);
    let pf = purity_table(phi);
    let ups = upsilon_table(psi, phi, flag_party);
    let (x, y) = (a.norm_sqr(), b.norm_sqr());
    let xi_table: Vec<f64> = (0..pp.len())
        .map(|v| x * x * pp[v] + y * y * pf[v] + 2.0 * x * y * ups[v])
        .collect();
    let lhs = from_radicand(n, weighted_sum(spec, &xi_table))?;
    let c_psi = from_radicand(n, weighted_sum(spec, &pp))?;
    let c_phi = from_radicand(n, weighted_sum(spec, &pf))?;
    Ok(GapEvaluation::new(lhs, x * c_psi, y * c_phi, GapMethod::Expanded))
}

/// The parties whose reductions enter `Υ_V`: whichever of `V`, `V̄` does not
/// hold the flag.
pub fn flag_free_side(v: SubsetMask, flag_party: usize) -> SubsetMask {
    if v.contains(flag_party) {
        v.complement()
    } else {
        v
    }
}

/// `Υ_V`: cross-purity of `ψ` and `φ` on the flag-free side of the cut `V`.
pub fn upsilon(psi: &PureState, phi: &PureState, v: SubsetMask, flag_party: usize) -> Result<f64> {
    psi.check_same_dims(phi)?;
    if v.n() != psi.n_parties() {
        return Err(Error::dims(psi.n_parties(), v.n()));
    }
    Ok(cross_purity_unchecked(psi, phi, flag_free_side(v, flag_party)))
}

/// `Υ_V` for all `V`, indexed by mask bits.
pub fn upsilon_table(psi: &PureState, phi: &PureState, flag_party: usize) -> Vec<f64> {
    SubsetMask::all(psi.n_parties())
        .map(|v| cross_purity_unchecked(psi, phi, flag_free_side(v, flag_party)))
        .collect()
}

/// `½ (P^ψ_V + P^φ_V)`, the Cauchy–Schwarz ceiling on `Υ_V`.
pub fn cauchy_schwarz_bound(psi: &PureState, phi: &PureState, v: SubsetMask) -> Result<f64> {
    Ok(0.5 * (crate::qstate::purity(psi, v)? + crate::qstate::purity(phi, v)?))
}

/// The weight-free form of the gap inequality after squaring:
/// `Σ_V α_V Υ_V ≥ √(R_ψ R_φ)` with `R = Σ_V α_V P_V`.
///
/// For `0 < |a|, |b|` the gap is negative exactly when `value < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquaredForm {
    pub cross: f64,
    pub radicand_psi: f64,
    pub radicand_phi: f64,
}

impl SquaredForm {
    pub fn value(&self) -> f64 {
        self.cross - self.geometric_mean()
    }

    /// `value / √(R_ψ R_φ)`; zero when either radicand vanishes, where no
    /// violation is possible.
    pub fn relative(&self) -> f64 {
        let g = self.geometric_mean();
        if g <= 1e-14 {
            0.0
        } else {
            self.cross / g - 1.0
        }
    }

    fn geometric_mean(&self) -> f64 {
        (self.radicand_psi.max(0.0) * self.radicand_phi.max(0.0)).sqrt()
    }
}

pub fn squared_form(
    spec: &ConcurrenceSpec,
    psi: &PureState,
    phi: &PureState,
    flag_party: usize,
) -> Result<SquaredForm> {
    check_inputs(spec, psi, phi, flag_party)?;
    Ok(squared_form_unchecked(spec, psi, phi, flag_party))
}

pub(crate) fn squared_form_unchecked(
    spec: &ConcurrenceSpec,
    psi: &PureState,
    phi: &PureState,
    flag_party: usize,
) -> SquaredForm {
    SquaredForm {
        cross: weighted_sum(spec, &upsilon_table(psi, phi, flag_party)),
        radicand_psi: weighted_sum(spec, &purity_table(psi)),
        radicand_phi: weighted_sum(spec, &purity_table(phi)),
    }
}
