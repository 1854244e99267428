use std::fmt;

use super::coeffs::{
    alpha_from_p, p_from_alpha, p_values_unchecked, CoefficientsAlpha, CoefficientsP, SignPattern, COEFF_TOL,
};
use crate::error::{Error, Result};
use crate::qstate::SubsetMask;

/// Relative tolerance for the sum rule, the complement symmetry and the
/// normalization check.
pub const SPEC_TOL: f64 = 1e-10;

/// A generalized concurrence, identified by its `α_V`.
///
/// Specs built through [`ConcurrenceSpec::from_alpha`] or
/// [`ConcurrenceSpec::from_p`] are admissible: complement symmetric,
/// `Σ α_V = 0` and every induced `p_s ≥ 0`. Normalization is tracked, not
/// required.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcurrenceSpec {
    alpha: CoefficientsAlpha,
    normalized: bool,
}

/// Outcome of checking an `α` table against the admissibility conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub n: usize,
    pub complement_symmetric: bool,
    /// `(V, α_V, α_{V̄})` for each asymmetric pair, listed once.
    pub asymmetric: Vec<(SubsetMask, f64, f64)>,
    pub sum_zero: bool,
    pub alpha_sum: f64,
    pub positive: bool,
    pub negative_p: Vec<(SignPattern, f64)>,
    pub normalized: bool,
    /// `Σ_s p_s`, which equals `α_∅`.
    pub p_sum: f64,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.complement_symmetric && self.sum_zero && self.positive
    }

    fn failures(&self) -> String {
        let mut out = Vec::new();
        if !self.complement_symmetric {
            let pairs: Vec<String> = self
                .asymmetric
                .iter()
                .map(|(v, a, b)| format!("α{v}={a} vs α{}={b}", v.complement()))
                .collect();
            out.push(format!("complement symmetry fails: {}", pairs.join(", ")));
        }
        if !self.sum_zero {
            out.push(format!("Σα = {} ≠ 0", self.alpha_sum));
        }
        if !self.positive {
            let ps: Vec<String> = self.negative_p.iter().map(|(s, v)| format!("p[{s}]={v}")).collect();
            out.push(format!("negative p: {}", ps.join(", ")));
        }
        out.join("; ")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(f, "complement symmetry: {}", mark(self.complement_symmetric))?;
        for (v, a, b) in &self.asymmetric {
            writeln!(f, "  alpha{v} = {a}, alpha{} = {b}", v.complement())?;
        }
        writeln!(
            f,
            "sum of alpha is zero: {} (sum = {})",
            mark(self.sum_zero),
            self.alpha_sum
        )?;
        writeln!(f, "p >= 0: {}", mark(self.positive))?;
        for (s, v) in &self.negative_p {
            writeln!(f, "  p[{s}] = {v}")?;
        }
        let target = (1u64 << (self.n - 1)) - 1;
        writeln!(
            f,
            "normalized (sum p = {target}): {} (sum p = {})",
            if self.normalized { "yes" } else { "no" },
            self.p_sum
        )
    }
}

/// Checks complement symmetry, `Σα = 0`, `p ≥ 0` and the normalization.
pub fn validate(alpha: &CoefficientsAlpha) -> ValidationReport {
    let n = alpha.n();
    let scale = alpha.max_abs().max(1.0);
    let tol = SPEC_TOL * scale;

    let mut asymmetric = Vec::new();
    for v in SubsetMask::all(n) {
        let c = v.complement();
        if v.bits() < c.bits() && (alpha.get(v) - alpha.get(c)).abs() > tol {
            asymmetric.push((v, alpha.get(v), alpha.get(c)));
        }
    }
    let alpha_sum = alpha.sum();
    let negative_p: Vec<(SignPattern, f64)> = p_values_unchecked(alpha)
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v < -COEFF_TOL * scale)
        .map(|(m, v)| (SignPattern::new(m as u64, n), v))
        .collect();
    let p_sum = alpha.get(SubsetMask::empty(n));
    ValidationReport {
        n,
        complement_symmetric: asymmetric.is_empty(),
        asymmetric,
        sum_zero: alpha_sum.abs() <= tol * (1u64 << n) as f64,
        alpha_sum,
        positive: negative_p.is_empty(),
        negative_p,
        normalized: is_normalized_sum(n, p_sum),
        p_sum,
    }
}

fn normalization_target(n: usize) -> f64 {
    ((1u64 << (n - 1)) - 1) as f64
}

fn is_normalized_sum(n: usize, p_sum: f64) -> bool {
    let target = normalization_target(n);
    (p_sum - target).abs() <= SPEC_TOL * target.max(1.0)
}

impl ConcurrenceSpec {
    pub fn from_alpha(alpha: CoefficientsAlpha) -> Result<Self> {
        let report = validate(&alpha);
        if !report.is_admissible() {
            return Err(Error::InvalidSpec(report.failures()));
        }
        Ok(Self {
            normalized: report.normalized,
            alpha,
        })
    }

    pub fn from_p(p: &CoefficientsP) -> Result<Self> {
        Self::from_alpha(alpha_from_p(p))
    }

    /// Wraps `alpha` without any admissibility check. Evaluation may then
    /// fail with a negative radicand.
    pub fn new_unchecked(alpha: CoefficientsAlpha) -> Self {
        let n = alpha.n();
        let normalized = is_normalized_sum(n, alpha.get(SubsetMask::empty(n)));
        Self { alpha, normalized }
    }

    /// `C_S`: `α_V = −1` on every nontrivial subset, `α_∅ = α_N = 2^{N−1} − 1`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "symmetric concurrence needs N >= 2, got {n}"
            )));
        }
        let top = normalization_target(n);
        let alpha = CoefficientsAlpha::from_size_fn(n, |k| if k == 0 || k == n { top } else { -1.0 })?;
        Self::from_alpha(alpha)
    }

    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    pub fn alpha(&self) -> &CoefficientsAlpha {
        &self.alpha
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn p(&self) -> Result<CoefficientsP> {
        p_from_alpha(&self.alpha)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.alpha)
    }

    /// Rescales so that `Σ_s p_s = 2^{N−1} − 1`.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.n();
        let p_sum = self.alpha.get(SubsetMask::empty(n));
        if p_sum.abs() <= COEFF_TOL * self.alpha.max_abs().max(1.0) {
            return Err(Error::ZeroSpec);
        }
        let alpha = self.alpha.scaled(normalization_target(n) / p_sum);
        Ok(Self {
            alpha,
            normalized: true,
        })
    }

    /// True when `α_V` depends on `|V|` only, so relabeling parties leaves the
    /// measure unchanged.
    pub fn is_permutation_symmetric(&self) -> bool {
        let n = self.n();
        let mut by_size = vec![None; n + 1];
        let tol = SPEC_TOL * self.alpha.max_abs().max(1.0);
        for (v, a) in self.alpha.iter() {
            match by_size[v.len()] {
                None => by_size[v.len()] = Some(a),
                Some(b) if (a - b).abs() > tol => return false,
                Some(_) => {}
            }
        }
        true
    }
}
