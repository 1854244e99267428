use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{total_dim, PureState};
use crate::error::Result;

/// Haar-random unit vector: i.i.d. standard complex Gaussians, normalized.
pub fn random_state(dims: &[usize], seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(&mut rng, dims)
}

pub fn random_state_with<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<PureState> {
    let total = total_dim(dims)?;
    loop {
        let amps: Vec<Complex64> = (0..total).map(|_| gaussian(rng)).collect();
        let s = PureState::new(dims.to_vec(), amps)?;
        if s.norm_sqr() > 0.0 {
            return Ok(s.normalized());
        }
    }
}

/// Haar-random `d × d` unitary from the QR decomposition of a Ginibre
/// matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}
