use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{total_dim, PureState, SubsetMask};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hermitian operator on the tensor product of the retained parties.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let total = if dims.is_empty() { 1 } else { total_dim(&dims)? };
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::dims((total, total), (matrix.nrows(), matrix.ncols())));
        }
        Ok(Self { dims, matrix })
    }

    /// Projector `|ψ⟩⟨ψ|` (not normalized).
    pub fn from_pure(psi: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Self {
            dims: psi.dims().to_vec(),
            matrix: &v * v.adjoint(),
        }
    }

    /// Per-party dimensions of the retained parties. Empty after a full trace.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entry of `ρ − ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.eigenvalues().first().is_none_or(|&l| l >= -tol)
    }

    /// Traces out `traced` (indexed over this operator's own parties).
    pub fn partial_trace(&self, traced: SubsetMask) -> Result<DensityMatrix> {
        if traced.n() != self.dims.len() {
            return Err(Error::dims(self.dims.len(), traced.n()));
        }
        let kept = traced.complement();
        let (ktab, ttab, dk, _dt) = index_tables(&self.dims, kept);
        let mut out = DMatrix::from_element(dk, dk, ZERO);
        let total = self.matrix.nrows();
        for i in 0..total {
            for j in 0..total {
                if ttab[i] == ttab[j] {
                    out[(ktab[i], ktab[j])] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            dims: kept.parties().map(|p| self.dims[p]).collect(),
            matrix: out,
        })
    }

    /// `ρ ⊗ |k⟩⟨k|` with the flag folded into `party` as its fast factor.
    pub fn attach_flag(&self, party: usize, flag_dim: usize, flag_index: usize) -> Result<Self> {
        let d = *self.dims.get(party).ok_or(Error::IndexOutOfRange {
            what: "party",
            index: party,
            bound: self.dims.len(),
        })?;
        if flag_index >= flag_dim {
            return Err(Error::IndexOutOfRange {
                what: "flag",
                index: flag_index,
                bound: flag_dim,
            });
        }
        let inner: usize = self.dims[party + 1..].iter().product();
        let embed = |idx: usize| {
            let r = idx % inner;
            let rest = idx / inner;
            let i = rest % d;
            let o = rest / d;
            (o * d * flag_dim + i * flag_dim + flag_index) * inner + r
        };
        let n = self.matrix.nrows();
        let mut out = DMatrix::from_element(n * flag_dim, n * flag_dim, ZERO);
        for i in 0..n {
            for j in 0..n {
                out[(embed(i), embed(j))] = self.matrix[(i, j)];
            }
        }
        let mut dims = self.dims.clone();
        dims[party] = d * flag_dim;
        Ok(Self { dims, matrix: out })
    }
}

/// `ρ^ψ` on the complement of `traced`: `Tr_traced |ψ⟩⟨ψ|`.
pub fn partial_trace(psi: &PureState, traced: SubsetMask) -> Result<DensityMatrix> {
    check_mask(psi, traced)?;
    let kept = traced.complement();
    let (dk, dt, m) = cut_matrix(psi, kept);
    let mut rho = DMatrix::from_element(dk, dk, ZERO);
    for i in 0..dk {
        for j in i..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                acc += m[i * dt + t] * m[j * dt + t].conj();
            }
            rho[(i, j)] = acc;
            rho[(j, i)] = acc.conj();
        }
    }
    Ok(DensityMatrix {
        dims: kept.parties().map(|p| psi.dims()[p]).collect(),
        matrix: rho,
    })
}

/// `Tr (Tr_traced |ψ⟩⟨ψ|)²`.
pub fn purity(psi: &PureState, traced: SubsetMask) -> Result<f64> {
    check_mask(psi, traced)?;
    Ok(purity_unchecked(psi, traced))
}

/// `Tr ρ^ψ ρ^φ` with both reductions onto `kept`.
pub fn cross_purity(psi: &PureState, phi: &PureState, kept: SubsetMask) -> Result<f64> {
    psi.check_same_dims(phi)?;
    check_mask(psi, kept)?;
    Ok(cross_purity_unchecked(psi, phi, kept))
}

/// Gram trick: the nonzero spectra of `M M†` and `M† M` agree, so the
/// square of whichever is smaller gives the purity.
pub(crate) fn purity_unchecked(psi: &PureState, traced: SubsetMask) -> f64 {
    let (dk, dt, m) = cut_matrix(psi, traced.complement());
    let (rows, cols, transpose) = if dk <= dt { (dk, dt, false) } else { (dt, dk, true) };
    let at = |r: usize, c: usize| if transpose { m[c * dt + r] } else { m[r * dt + c] };
    let mut total = 0.0;
    for i in 0..rows {
        for j in i..rows {
            let mut acc = ZERO;
            for c in 0..cols {
                acc += at(i, c) * at(j, c).conj();
            }
            let w = if i == j { 1.0 } else { 2.0 };
            total += w * acc.norm_sqr();
        }
    }
    total
}

pub(crate) fn cross_purity_unchecked(psi: &PureState, phi: &PureState, kept: SubsetMask) -> f64 {
    let (dk, dt, m) = cut_matrix(psi, kept);
    let (_, _, n) = cut_matrix(phi, kept);
    if dk <= dt {
        // Σ_ij ρψ_ij conj(ρφ_ij)
        let mut total = 0.0;
        for i in 0..dk {
            for j in 0..dk {
                let mut x = ZERO;
                let mut y = ZERO;
                for t in 0..dt {
                    x += m[i * dt + t] * m[j * dt + t].conj();
                    y += n[i * dt + t] * n[j * dt + t].conj();
                }
                total += (x * y.conj()).re;
            }
        }
        total
    } else {
        // ‖N† M‖_F²
        let mut total = 0.0;
        for s in 0..dt {
            for t in 0..dt {
                let mut acc = ZERO;
                for k in 0..dk {
                    acc += n[k * dt + s].conj() * m[k * dt + t];
                }
                total += acc.norm_sqr();
            }
        }
        total
    }
}

fn check_mask(psi: &PureState, mask: SubsetMask) -> Result<()> {
    if mask.n() != psi.n_parties() {
        return Err(Error::dims(psi.n_parties(), mask.n()));
    }
    Ok(())
}

/// Reshapes `ψ` into the `d_kept × d_traced` matrix `M[k, t]`.
fn cut_matrix(psi: &PureState, kept: SubsetMask) -> (usize, usize, Vec<Complex64>) {
    let (ktab, ttab, dk, dt) = index_tables(psi.dims(), kept);
    let mut m = vec![ZERO; dk * dt];
    for (i, &a) in psi.amplitudes().iter().enumerate() {
        m[ktab[i] * dt + ttab[i]] = a;
    }
    (dk, dt, m)
}

/// For every full index, its row-major index within the kept and within the
/// traced parties.
fn index_tables(dims: &[usize], kept: SubsetMask) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let n = dims.len();
    let mut kstride = vec![0usize; n];
    let mut tstride = vec![0usize; n];
    let (mut dk, mut dt) = (1usize, 1usize);
    for p in (0..n).rev() {
        if kept.contains(p) {
            kstride[p] = dk;
            dk *= dims[p];
        } else {
            tstride[p] = dt;
            dt *= dims[p];
        }
    }
    let total = dk * dt;
    let mut ktab = Vec::with_capacity(total);
    let mut ttab = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    let (mut ki, mut ti) = (0usize, 0usize);
    for _ in 0..total {
        ktab.push(ki);
        ttab.push(ti);
        // odometer, last party fastest
        for p in (0..n).rev() {
            digits[p] += 1;
            ki += kstride[p];
            ti += tstride[p];
            if digits[p] < dims[p] {
                break;
            }
            ki -= kstride[p] * dims[p];
            ti -= tstride[p] * dims[p];
            digits[p] = 0;
        }
    }
    (ktab, ttab, dk, dt)
}
