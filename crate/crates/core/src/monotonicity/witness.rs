use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gap::{gap_direct, gap_expanded, GapEvaluation};
use crate::concurrence::{ConcurrenceSpec, SpecForm, SpecJson};
use crate::error::{Error, Result};
use crate::qstate::{PureState, SubsetMask};

/// A configuration on which the flag-superposition gap is negative.
#[derive(Clone, Debug, PartialEq)]
pub struct ViolationWitness {
    pub spec: ConcurrenceSpec,
    pub psi: PureState,
    pub phi: PureState,
    pub a: Complex64,
    pub b: Complex64,
    /// 0-based.
    pub flag_party: usize,
    pub gap: f64,
}

impl ViolationWitness {
    /// Evaluates the gap on the stored fields and keeps the result only if
    /// it is negative.
    pub fn new(
        spec: ConcurrenceSpec,
        psi: PureState,
        phi: PureState,
        a: Complex64,
        b: Complex64,
        flag_party: usize,
    ) -> Result<Self> {
        let g = gap_direct(&spec, &psi, &phi, a, b, flag_party)?;
        if g.gap >= 0.0 {
            return Err(Error::Inapplicable(format!(
                "configuration has non-negative gap {}",
                g.gap
            )));
        }
        Ok(Self {
            spec,
            psi,
            phi,
            a,
            b,
            flag_party,
            gap: g.gap,
        })
    }

    pub fn reevaluate(&self) -> Result<GapEvaluation> {
        gap_direct(&self.spec, &self.psi, &self.phi, self.a, self.b, self.flag_party)
    }

    pub fn reevaluate_expanded(&self) -> Result<GapEvaluation> {
        gap_expanded(&self.spec, &self.psi, &self.phi, self.a, self.b, self.flag_party)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&WitnessJson::from_witness(self)?)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: WitnessJson = serde_json::from_str(text)?;
        j.into_witness()
    }
}

/// Wire form; `flag_party` is 1-based like every party label on the wire.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub spec: SpecJson,
    pub psi: PureState,
    pub phi: PureState,
    pub a: Complex64,
    pub b: Complex64,
    pub flag_party: usize,
    pub gap: f64,
}

impl WitnessJson {
    pub fn from_witness(w: &ViolationWitness) -> Result<Self> {
        Ok(Self {
            spec: SpecJson::from_spec(&w.spec, SpecForm::Alpha)?,
            psi: w.psi.clone(),
            phi: w.phi.clone(),
            a: w.a,
            b: w.b,
            flag_party: w.flag_party + 1,
            gap: w.gap,
        })
    }

    pub fn into_witness(self) -> Result<ViolationWitness> {
        if self.flag_party == 0 {
            return Err(Error::InvalidSpec("flag_party is 1-based".into()));
        }
        Ok(ViolationWitness {
            spec: self.spec.to_spec()?,
            psi: self.psi,
            phi: self.phi,
            a: self.a,
            b: self.b,
            flag_party: self.flag_party - 1,
            gap: self.gap,
        })
    }
}

/// `ψ = |0⟩_k ⊗ Φ⁺_rest`, `φ = |0⟩_k ⊗ Φ⁻_rest` on qubits, equal weights and
/// flags on `k`, where `Φ^±` is the GHZ-type state of the other `N − 1`
/// parties. Needs `N ≥ 3` and `α_{k} > 0`.
pub fn single_element_counterexample(spec: &ConcurrenceSpec, k: usize) -> Result<ViolationWitness> {
    let n = spec.n();
    if n < 3 {
        return Err(Error::Inapplicable(format!("needs N >= 3, got {n}")));
    }
    if k >= n {
        return Err(Error::IndexOutOfRange {
            what: "party",
            index: k,
            bound: n,
        });
    }
    let ak = spec.alpha().get(SubsetMask::single(k, n)?);
    if ak <= 1e-14 {
        return Err(Error::Inapplicable(format!(
            "alpha{{{}}} = {ak} is not positive",
            k + 1
        )));
    }
    let psi = shared_zero_ghz(n, k, 1.0);
    let phi = shared_zero_ghz(n, k, -1.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    ViolationWitness::new(spec.clone(), psi, phi, h, h, k)
}

/// The `N = 3` case, applied to the single-party subset with the largest
/// positive `α` (lowest index on ties).
pub fn tripartite_counterexample(spec: &ConcurrenceSpec) -> Result<ViolationWitness> {
    if spec.n() != 3 {
        return Err(Error::Inapplicable(format!("needs N = 3, got {}", spec.n())));
    }
    let k =
        positive_single_party(spec).ok_or_else(|| Error::Inapplicable("no single-party alpha is positive".into()))?;
    single_element_counterexample(spec, k)
}

/// Party `k` with the largest positive `α_{k}`, if any.
pub fn positive_single_party(spec: &ConcurrenceSpec) -> Option<usize> {
    let n = spec.n();
    (0..n)
        .map(|k| (k, spec.alpha().get(SubsetMask::single(k, n).expect("k < n"))))
        .filter(|&(_, a)| a > 1e-14)
        .fold(None, |best: Option<(usize, f64)>, (k, a)| match best {
            Some((_, b)) if b >= a => best,
            _ => Some((k, a)),
        })
        .map(|(k, _)| k)
}

fn shared_zero_ghz(n: usize, k: usize, sign: f64) -> PureState {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    // party p sits at bit n-1-p
    let ones_but_k = ((1usize << n) - 1) ^ (1 << (n - 1 - k));
    amps[ones_but_k] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
    PureState::new(vec![2; n], amps).expect("qubit shape")
}
