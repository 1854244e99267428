use nalgebra::DMatrix;
use num_complex::Complex64;

use super::mixed::MixedState;
use crate::concurrence::{concurrence_pure, ConcurrenceSpec};
use crate::error::{Error, Result};
use crate::qstate::PureState;

/// Eigenvalues at or below this are dropped from the eigen-ensemble.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Allowed deviation of `U†U` from the identity.
pub const ISOMETRY_TOL: f64 = 1e-10;

/// Sub-normalized vectors with `Σ_j |ψ_j⟩⟨ψ_j| = ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    vectors: Vec<PureState>,
    source: MixedState,
}

impl Decomposition {
    /// Checks the reconstruction to `1e-10` per entry.
    pub fn new(vectors: Vec<PureState>, source: MixedState) -> Result<Self> {
        let d = Self { vectors, source };
        for v in &d.vectors {
            if v.dims() != d.source.dims() {
                return Err(Error::dims(d.source.dims(), v.dims()));
            }
        }
        let err = d.reconstruction_error();
        if err > 1e-10 {
            return Err(Error::InvalidMixedState(format!("decomposition misses rho by {err:e}")));
        }
        Ok(d)
    }

    pub(crate) fn new_unchecked(vectors: Vec<PureState>, source: MixedState) -> Self {
        Self { vectors, source }
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn source(&self) -> &MixedState {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.source.matrix().nrows();
        let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for v in &self.vectors {
            let col = nalgebra::DVector::from_column_slice(v.amplitudes());
            m += &col * col.adjoint();
        }
        m
    }

    /// Largest entry of `Σ_j |ψ_j⟩⟨ψ_j| − ρ`.
    pub fn reconstruction_error(&self) -> f64 {
        (self.reconstruct() - self.source.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_j C(ψ_j)` with the weights folded into the vectors.
    pub fn average_concurrence(&self, spec: &ConcurrenceSpec) -> Result<f64> {
        self.vectors.iter().map(|v| concurrence_pure(spec, v)).sum()
    }
}

/// `√λ_i |e_i⟩` for every eigenpair with `λ_i > 1e-12`, largest first.
pub fn eigendecomposition_ensemble(rho: &MixedState) -> Result<Decomposition> {
    let m = rho.matrix();
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    if let Some(&low) = order.last() {
        let l = eig.eigenvalues[low];
        if l < -super::mixed::PSD_TOL {
            return Err(Error::NotPsd(l));
        }
    }
    let mut vectors = Vec::new();
    for i in order {
        let l = eig.eigenvalues[i];
        if l <= EIGEN_CUTOFF {
            continue;
        }
        let s = Complex64::new(l.sqrt(), 0.0);
        let amps: Vec<Complex64> = eig.eigenvectors.column(i).iter().map(|z| z * s).collect();
        vectors.push(PureState::new(rho.dims().to_vec(), amps)?);
    }
    Ok(Decomposition::new_unchecked(vectors, rho.clone()))
}

/// `ψ'_j = Σ_i U*_{ji} ψ_i` for an `m × r` isometry `U`.
pub fn mix_decomposition(dec: &Decomposition, isometry: &DMatrix<Complex64>) -> Result<Decomposition> {
    let r = dec.len();
    if isometry.ncols() != r {
        return Err(Error::dims(r, isometry.ncols()));
    }
    let gram = isometry.adjoint() * isometry;
    let dev = (gram - DMatrix::<Complex64>::identity(r, r))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if dev > ISOMETRY_TOL {
        return Err(Error::NotIsometry(dev));
    }
    Ok(mix_unchecked(dec, isometry))
}

pub(crate) fn mix_unchecked(dec: &Decomposition, u: &DMatrix<Complex64>) -> Decomposition {
    let dim = dec.source.matrix().nrows();
    let vectors = (0..u.nrows())
        .map(|j| {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            for (i, v) in dec.vectors.iter().enumerate() {
                let c = u[(j, i)].conj();
                for (a, x) in amps.iter_mut().zip(v.amplitudes()) {
                    *a += c * x;
                }
            }
            PureState::new(dec.source.dims().to_vec(), amps).expect("shape preserved")
        })
        .collect();
    Decomposition::new_unchecked(vectors, dec.source.clone())
}
