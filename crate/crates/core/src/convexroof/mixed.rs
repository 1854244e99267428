use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, PureState};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// A validated density operator: Hermitian, PSD and unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    rho: DensityMatrix,
}

impl MixedState {
    pub fn new(dims: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::from_density(DensityMatrix::new(dims, matrix)?)
    }

    pub fn from_density(rho: DensityMatrix) -> Result<Self> {
        if rho.dims().is_empty() {
            return Err(Error::InvalidMixedState("no parties".into()));
        }
        let herm = rho.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidMixedState(format!("not Hermitian (deviation {herm:e})")));
        }
        let low = rho.eigenvalues()[0];
        if low < -PSD_TOL {
            return Err(Error::NotPsd(low));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidMixedState(format!("trace {tr} is not 1")));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` for the normalized `ψ`.
    pub fn from_pure(psi: &PureState) -> Result<Self> {
        if psi.norm_sqr() == 0.0 {
            return Err(Error::InvalidMixedState("zero vector".into()));
        }
        Self::from_density(DensityMatrix::from_pure(&psi.normalized()))
    }

    /// `Σ_i p_i |ψ_i⟩⟨ψ_i|` over normalized `ψ_i`.
    pub fn from_ensemble(ensemble: &[(f64, PureState)]) -> Result<Self> {
        let (_, first) = ensemble
            .first()
            .ok_or_else(|| Error::InvalidMixedState("empty ensemble".into()))?;
        let d = first.dim();
        let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for (p, psi) in ensemble {
            first.check_same_dims(psi)?;
            if *p < 0.0 {
                return Err(Error::InvalidWeights(*p));
            }
            m += DensityMatrix::from_pure(&psi.normalized()).into_matrix() * Complex64::new(*p, 0.0);
        }
        Self::new(first.dims().to_vec(), m)
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let d: usize = dims.iter().product();
        let m = DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0));
        Self::new(dims.to_vec(), m)
    }

    pub fn dims(&self) -> &[usize] {
        self.rho.dims()
    }

    pub fn n_parties(&self) -> usize {
        self.rho.dims().len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.rho.matrix()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.rho.eigenvalues()
    }

    /// `ρ ⊗ |k⟩⟨k|` with a `flag_dim`-level flag on `party`.
    pub fn attach_flag(&self, party: usize, flag_dim: usize, flag_index: usize) -> Result<Self> {
        Ok(Self {
            rho: self.rho.attach_flag(party, flag_dim, flag_index)?,
        })
    }

    /// `p ρ + (1 − p) σ`.
    pub fn mix(&self, p: f64, other: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidWeights(p));
        }
        if self.dims() != other.dims() {
            return Err(Error::dims(self.dims(), other.dims()));
        }
        let m = self.matrix() * Complex64::new(p, 0.0) + other.matrix() * Complex64::new(1.0 - p, 0.0);
        Self::new(self.dims().to_vec(), m)
    }
}

/// `{"dims": [...], "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedStateJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&MixedState> for MixedStateJson {
    fn from(s: &MixedState) -> Self {
        let m = s.matrix();
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dims: s.dims().to_vec(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<MixedStateJson> for MixedState {
    type Error = Error;

    fn try_from(j: MixedStateJson) -> Result<Self> {
        let d = j.re.len();
        let ragged = |t: &Vec<Vec<f64>>| t.len() != d || t.iter().any(|r| r.len() != d);
        if ragged(&j.re) || ragged(&j.im) {
            return Err(Error::InvalidMixedState(
                "re and im must be square and of equal size".into(),
            ));
        }
        let m = DMatrix::from_fn(d, d, |r, c| Complex64::new(j.re[r][c], j.im[r][c]));
        MixedState::new(j.dims, m)
    }
}

impl Serialize for MixedState {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        MixedStateJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MixedState {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        MixedStateJson::deserialize(de)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}
