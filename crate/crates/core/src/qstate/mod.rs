//! Dense pure states on a finite tensor product `H_1 ⊗ .. ⊗ H_N`.
//!
//! Amplitudes are stored row-major with party 1 varying slowest. Vectors may
//! be sub-normalized; the norm carries an ensemble weight where that matters.

mod json;
mod random;
mod reduce;
mod subset;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use json::StateJson;
pub use random::{random_state, random_state_with, random_unitary};
pub use reduce::{cross_purity, partial_trace, purity, DensityMatrix};
pub use subset::{SubsetMask, MAX_PARTIES};

pub(crate) use random::gaussian;
pub(crate) use reduce::{cross_purity_unchecked, purity_unchecked};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let total = total_dim(&dims)?;
        if amps.len() != total {
            return Err(Error::dims(total, amps.len()));
        }
        Ok(Self { dims, amps })
    }

    /// All-zero vector of the given shape.
    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let total = total_dim(&dims)?;
        Ok(Self {
            dims,
            amps: vec![ZERO; total],
        })
    }

    /// Computational basis vector `|i_1 .. i_N⟩`.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(dims)?;
        if digits.len() != s.dims.len() {
            return Err(Error::dims(s.dims.len(), digits.len()));
        }
        let mut idx = 0;
        for (&d, &i) in s.dims.iter().zip(digits) {
            if i >= d {
                return Err(Error::IndexOutOfRange {
                    what: "basis digit",
                    index: i,
                    bound: d,
                });
            }
            idx = idx * d + i;
        }
        s.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy. A zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|z| z * c).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_dims(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum())
    }

    /// `self ⊗ other` with the parties of `other` appended after those of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for x in &self.amps {
            amps.extend(other.amps.iter().map(|y| x * y));
        }
        Self { dims, amps }
    }

    /// Applies a `d × d` operator (row-major) to one party.
    pub fn apply_local(&self, party: usize, op: &[Complex64]) -> Result<Self> {
        let d = self.party_dim(party)?;
        if op.len() != d * d {
            return Err(Error::dims(d * d, op.len()));
        }
        let (outer, inner) = self.outer_inner(party);
        let mut out = vec![ZERO; self.amps.len()];
        for o in 0..outer {
            for r in 0..inner {
                for i in 0..d {
                    let mut acc = ZERO;
                    for j in 0..d {
                        acc += op[i * d + j] * self.amps[(o * d + j) * inner + r];
                    }
                    out[(o * d + i) * inner + r] = acc;
                }
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            amps: out,
        })
    }

    /// Reorders the parties: party `k` of the result is party `order[k]` of `self`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_parties();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::dims(n, order.len()));
        }
        for &p in order {
            if p >= n || seen[p] {
                return Err(Error::InvalidDims(format!("{order:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let new_dims: Vec<usize> = order.iter().map(|&p| self.dims[p]).collect();
        let old_strides = strides(&self.dims);
        let mut amps = vec![ZERO; self.amps.len()];
        let mut digits = vec![0usize; n];
        for (idx, slot) in amps.iter_mut().enumerate() {
            let mut rem = idx;
            for k in (0..n).rev() {
                digits[k] = rem % new_dims[k];
                rem /= new_dims[k];
            }
            let old: usize = order.iter().zip(&digits).map(|(&p, &i)| i * old_strides[p]).sum();
            *slot = self.amps[old];
        }
        Ok(Self { dims: new_dims, amps })
    }

    pub(crate) fn party_dim(&self, party: usize) -> Result<usize> {
        self.dims.get(party).copied().ok_or(Error::IndexOutOfRange {
            what: "party",
            index: party,
            bound: self.dims.len(),
        })
    }

    pub(crate) fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::dims(&self.dims, &other.dims));
        }
        Ok(())
    }

    fn outer_inner(&self, party: usize) -> (usize, usize) {
        let outer = self.dims[..party].iter().product();
        let inner = self.dims[party + 1..].iter().product();
        (outer, inner)
    }
}

/// Embeds the flag basis vector `|flag_index⟩` of a `flag_dim`-dimensional
/// space into `party`. The party count is unchanged; the party's dimension
/// grows to `d · flag_dim`, with the flag as the fast-varying factor.
pub fn attach_flag(psi: &PureState, party: usize, flag_dim: usize, flag_index: usize) -> Result<PureState> {
    let d = psi.party_dim(party)?;
    if flag_index >= flag_dim {
        return Err(Error::IndexOutOfRange {
            what: "flag",
            index: flag_index,
            bound: flag_dim,
        });
    }
    let mut dims = psi.dims.clone();
    dims[party] = d * flag_dim;
    let (outer, inner) = psi.outer_inner(party);
    let mut amps = vec![ZERO; psi.amps.len() * flag_dim];
    for o in 0..outer {
        for i in 0..d {
            let src = (o * d + i) * inner;
            let dst = (o * d * flag_dim + i * flag_dim + flag_index) * inner;
            amps[dst..dst + inner].copy_from_slice(&psi.amps[src..src + inner]);
        }
    }
    Ok(PureState { dims, amps })
}

/// `a |ψ⟩⊗|η₁⟩ + b |φ⟩⊗|η₂⟩` with orthogonal qubit flags on `party`.
pub fn flag_superposition(
    psi: &PureState,
    phi: &PureState,
    a: Complex64,
    b: Complex64,
    party: usize,
) -> Result<PureState> {
    psi.check_same_dims(phi)?;
    let w = a.norm_sqr() + b.norm_sqr();
    if w > 1.0 + 1e-12 {
        return Err(Error::InvalidWeights(w));
    }
    let x = attach_flag(psi, party, 2, 0)?;
    let y = attach_flag(phi, party, 2, 1)?;
    let amps = x.amps.iter().zip(&y.amps).map(|(u, v)| a * u + b * v).collect();
    Ok(PureState { dims: x.dims, amps })
}

pub fn bell_phi_plus() -> PureState {
    ghz_signed(2, 1.0)
}

pub fn bell_phi_minus() -> PureState {
    ghz_signed(2, -1.0)
}

/// `(|0..0⟩ + |1..1⟩)/√2` on `n` qubits.
pub fn ghz(n: usize) -> Result<PureState> {
    check_multi(n)?;
    Ok(ghz_signed(n, 1.0))
}

/// `(|0..0⟩ − |1..1⟩)/√2` on `n` qubits.
pub fn ghz_minus(n: usize) -> Result<PureState> {
    check_multi(n)?;
    Ok(ghz_signed(n, -1.0))
}

/// Uniform superposition of the `n` single-excitation basis states.
pub fn w(n: usize) -> Result<PureState> {
    check_multi(n)?;
    let mut amps = vec![ZERO; 1 << n];
    let c = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amps[1 << k] = c;
    }
    Ok(PureState { dims: vec![2; n], amps })
}

/// Tensor product of local vectors, one per party.
pub fn product_state(locals: &[Vec<Complex64>]) -> Result<PureState> {
    let mut it = locals.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::InvalidDims("product of zero factors".into()))?;
    let mut acc = PureState::new(vec![first.len()], first.clone())?;
    for v in it {
        acc = acc.tensor(&PureState::new(vec![v.len()], v.clone())?);
    }
    Ok(acc)
}

fn ghz_signed(n: usize, sign: f64) -> PureState {
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
    PureState { dims: vec![2; n], amps }
}

fn check_multi(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDims(format!("need at least 2 parties, got {n}")));
    }
    if n > MAX_PARTIES {
        return Err(Error::InvalidDims(format!("{n} parties exceed {MAX_PARTIES}")));
    }
    Ok(())
}

pub(crate) fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.len() > MAX_PARTIES {
        return Err(Error::InvalidDims(format!(
            "party count {} outside 1..={MAX_PARTIES}",
            dims.len()
        )));
    }
    if let Some(d) = dims.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidDims(format!("local dimension {d} in {dims:?}")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidDims(format!("{dims:?} overflows")))
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}
