//! The two coefficient families of a generalized concurrence and the
//! Walsh–Hadamard pair that maps between them.
//!
//! A sign pattern `(s_1, .., s_N)` is stored as the bit mask of its `−`
//! entries, so `∏_{i∈V} s_i = (−1)^{|V ∩ minus|}` and both transforms are
//! the same ±1 matrix.

use std::fmt;

use crate::error::{Error, Result};
use crate::qstate::{SubsetMask, MAX_PARTIES};

/// Entry tolerance for the sign and vanishing conditions.
pub const COEFF_TOL: f64 = 1e-12;

/// `p_{s_1..s_N}`: weights of `P_{s_1} ⊗ .. ⊗ P_{s_N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientsP {
    n: usize,
    values: Vec<f64>,
}

/// `α_V` for every subset `V`, indexed by the subset's bit mask.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientsAlpha {
    n: usize,
    values: Vec<f64>,
}

/// A `±` pattern, bit `i` set iff `s_i = −`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPattern {
    minus: u64,
    n: usize,
}

impl SignPattern {
    pub fn new(minus: u64, n: usize) -> Self {
        Self { minus, n }
    }

    pub fn minus_bits(self) -> u64 {
        self.minus
    }

    pub fn minus_count(self) -> usize {
        self.minus.count_ones() as usize
    }

    /// `∏_{i∈V} s_i`.
    pub fn sign_on(self, v: SubsetMask) -> f64 {
        if (self.minus & v.bits()).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != n {
            return Err(Error::InvalidSpec(format!(
                "sign pattern {text:?} has {} entries, expected {n}",
                chars.len()
            )));
        }
        let mut minus = 0u64;
        for (i, c) in chars.into_iter().enumerate() {
            match c {
                '+' => {}
                '-' | '−' => minus |= 1 << i,
                _ => return Err(Error::InvalidSpec(format!("bad sign {c:?} in {text:?}"))),
            }
        }
        Ok(Self { minus, n })
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.minus >> i & 1 == 1 { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl CoefficientsP {
    /// Checks nonnegativity, that odd-`−` patterns vanish and that
    /// `p_{+..+} = 0`.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_len(n, values.len())?;
        let p = Self { n, values };
        let mut problems = Vec::new();
        for (s, v) in p.iter() {
            if !v.is_finite() {
                problems.push(format!("p[{s}] = {v} is not finite"));
            } else if v < -COEFF_TOL {
                problems.push(format!("p[{s}] = {v} < 0"));
            } else if s.minus_count() % 2 == 1 && v.abs() > COEFF_TOL {
                problems.push(format!("p[{s}] = {v} on an odd pattern must vanish"));
            } else if s.minus_count() == 0 && v.abs() > COEFF_TOL {
                problems.push(format!("p[{s}] = {v} must vanish"));
            }
        }
        if problems.is_empty() {
            Ok(p)
        } else {
            Err(Error::InvalidSpec(problems.join("; ")))
        }
    }

    /// Builds from `(pattern, value)` pairs; missing patterns are zero.
    pub fn from_patterns<'a>(n: usize, entries: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        check_len(n, 1 << n.min(MAX_PARTIES))?;
        let mut values = vec![0.0; 1 << n];
        for (k, v) in entries {
            let s = SignPattern::parse(k, n)?;
            values[s.minus as usize] = v;
        }
        Self::new(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: SignPattern) -> f64 {
        self.values[s.minus as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SignPattern, f64)> + '_ {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .map(move |(m, &v)| (SignPattern::new(m as u64, n), v))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

impl CoefficientsAlpha {
    /// Stores the values as given; use [`validate`](crate::concurrence::validate)
    /// to check them.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_len(n, values.len())?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("alpha value {v} is not finite")));
        }
        Ok(Self { n, values })
    }

    /// `α_V = f(|V|)`.
    pub fn from_size_fn(n: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        check_len(n, 1 << n.min(MAX_PARTIES))?;
        Self::new(n, SubsetMask::all(n).map(|v| f(v.len())).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: SubsetMask) -> f64 {
        self.values[v.bits() as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetMask, f64)> + '_ {
        SubsetMask::all(self.n).zip(self.values.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub(crate) fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `α_V = Σ_s p_s ∏_{i∈V} s_i`.
pub fn alpha_from_p(p: &CoefficientsP) -> CoefficientsAlpha {
    let mut values = p.values.clone();
    walsh_hadamard(&mut values);
    CoefficientsAlpha { n: p.n, values }
}

/// `p_s = 2^{−N} Σ_V α_V ∏_{i∈V} s_i`; fails if any `p_s < −1e-12`.
pub fn p_from_alpha(alpha: &CoefficientsAlpha) -> Result<CoefficientsP> {
    let values = p_values_unchecked(alpha);
    if let Some((m, &v)) = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < -COEFF_TOL)
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        return Err(Error::NotPositive {
            pattern: SignPattern::new(m as u64, alpha.n).to_string(),
            value: v,
        });
    }
    Ok(CoefficientsP { n: alpha.n, values })
}

/// The inverse transform without the sign check.
pub fn p_values_unchecked(alpha: &CoefficientsAlpha) -> Vec<f64> {
    let mut values = alpha.values.clone();
    walsh_hadamard(&mut values);
    let scale = 0.5f64.powi(alpha.n as i32);
    values.iter_mut().for_each(|v| *v *= scale);
    values
}

/// In-place unnormalized Walsh–Hadamard transform,
/// `out[V] = Σ_m (−1)^{|V ∩ m|} in[m]`.
fn walsh_hadamard(values: &mut [f64]) {
    let len = values.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (values[i], values[i + h]);
                values[i] = x + y;
                values[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n == 0 || n > MAX_PARTIES {
        return Err(Error::InvalidSpec(format!("party count {n} outside 1..={MAX_PARTIES}")));
    }
    if len != 1 << n {
        return Err(Error::InvalidSpec(format!(
            "{len} coefficients for N = {n}, expected {}",
            1u64 << n
        )));
    }
    Ok(())
}
