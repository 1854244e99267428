use super::ConcurrenceSpec;
use crate::error::{Error, Result};
use crate::qstate::{purity_unchecked, PureState, SubsetMask};

/// Radicands in `[−RADICAND_ERROR, 0)` are roundoff and clamp to zero.
pub const RADICAND_CLAMP: f64 = 1e-10;
/// Radicands below `−RADICAND_ERROR` mean the spec is not admissible.
pub const RADICAND_ERROR: f64 = 1e-8;

/// `Tr (Tr_V |ψ⟩⟨ψ|)²` for every subset `V`, indexed by mask bits.
///
/// Each complementary pair is evaluated once.
pub fn purity_table(psi: &PureState) -> Vec<f64> {
    let n = psi.n_parties();
    let mut table = vec![0.0; 1 << n];
    for v in SubsetMask::all(n) {
        let c = v.complement();
        if v.bits() < c.bits() {
            let p = purity_unchecked(psi, v);
            table[v.bits() as usize] = p;
            table[c.bits() as usize] = p;
        }
    }
    table
}

/// `Σ_V α_V Tr (Tr_V |ψ⟩⟨ψ|)²`.
pub fn radicand(spec: &ConcurrenceSpec, psi: &PureState) -> Result<f64> {
    check_parties(spec, psi)?;
    Ok(weighted_sum(spec, &purity_table(psi)))
}

pub(crate) fn weighted_sum(spec: &ConcurrenceSpec, table: &[f64]) -> f64 {
    spec.alpha().values().iter().zip(table).map(|(a, p)| a * p).sum()
}

/// `2^{1−N/2} √r` with the clamping policy applied to `r`.
pub(crate) fn from_radicand(n: usize, r: f64) -> Result<f64> {
    if r < -RADICAND_ERROR {
        return Err(Error::NegativeRadicand(r));
    }
    Ok(prefactor(n) * r.max(0.0).sqrt())
}

pub(crate) fn prefactor(n: usize) -> f64 {
    2f64.powf(1.0 - n as f64 / 2.0)
}

/// Pure-state concurrence `C_A(ψ) = 2^{1−N/2} √(Σ_V α_V Tr ρ_V̄²)`.
pub fn concurrence_pure(spec: &ConcurrenceSpec, psi: &PureState) -> Result<f64> {
    let r = radicand(spec, psi)?;
    from_radicand(spec.n(), r)
}

pub(crate) fn check_parties(spec: &ConcurrenceSpec, psi: &PureState) -> Result<()> {
    if spec.n() != psi.n_parties() {
        return Err(Error::dims(
            format!("{} parties", spec.n()),
            format!("{} parties", psi.n_parties()),
        ));
    }
    Ok(())
}
