use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::decomposition::{eigendecomposition_ensemble, mix_unchecked, Decomposition};
use super::mixed::MixedState;
use crate::concurrence::ConcurrenceSpec;
use crate::error::{Error, Result};
use crate::monotonicity::sufficient_criterion;
use crate::qstate::{attach_flag, random_unitary};

#[derive(Clone, Debug, PartialEq)]
pub struct RoofConfig {
    /// Largest decomposition size `m`; defaults to twice the rank. Even
    /// restarts search size `rank`, odd restarts size `m`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Perturbation steps per restart.
    pub iters: usize,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 4,
            iters: 4000,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoofEstimate {
    /// Upper bound on the mixed-state concurrence.
    pub value: f64,
    pub decomposition: Decomposition,
    /// Running minimum after each step, across all restarts.
    pub history: Vec<f64>,
}

/// Smallest average concurrence found over decompositions of `rho`.
pub fn convex_roof_upper(spec: &ConcurrenceSpec, rho: &MixedState, cfg: &RoofConfig) -> Result<f64> {
    Ok(convex_roof_estimate(spec, rho, cfg, &[])?.value)
}

/// As [`convex_roof_upper`], with `candidates` taken into account as
/// additional decompositions of `rho`.
pub fn convex_roof_estimate(
    spec: &ConcurrenceSpec,
    rho: &MixedState,
    cfg: &RoofConfig,
    candidates: &[Decomposition],
) -> Result<RoofEstimate> {
    if spec.n() != rho.n_parties() {
        return Err(Error::dims(spec.n(), rho.n_parties()));
    }
    let eig = eigendecomposition_ensemble(rho)?;
    let r = eig.len();
    let m = cfg.ensemble_size.unwrap_or(2 * r).max(r);

    let mut best = eig.clone();
    let mut best_val = eig.average_concurrence(spec)?;
    for c in candidates {
        if c.source().dims() != rho.dims() {
            return Err(Error::dims(rho.dims(), c.source().dims()));
        }
        let v = c.average_concurrence(spec)?;
        if v < best_val {
            best_val = v;
            best = c.clone();
        }
    }
    let mut history = vec![best_val];
    if r <= 1 || cfg.restarts == 0 {
        return Ok(RoofEstimate {
            value: best_val,
            decomposition: best,
            history,
        });
    }

    let runs: Vec<Run> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| descend(spec, &eig, if k % 2 == 0 { r } else { m }, cfg, k))
        .collect::<Result<_>>()?;

    for step in 0..=cfg.iters {
        let v = runs.iter().map(|run| run.history[step]).fold(best_val, f64::min);
        history.push(v);
    }
    let winner = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, run)| run)
        .expect("restarts > 0");
    if winner.value < best_val {
        best_val = winner.value;
        best = winner.decomposition;
    }
    Ok(RoofEstimate {
        value: best_val,
        decomposition: best,
        history,
    })
}

struct Run {
    value: f64,
    decomposition: Decomposition,
    history: Vec<f64>,
}

/// Random-walk descent over `m × r` isometries, alternating a global
/// perturbation with a rotation of two rows. Restart 0 starts from the
/// eigen-ensemble itself, the others from Haar-random isometries. The step
/// grows after an accepted move and shrinks after a rejected one.
fn descend(spec: &ConcurrenceSpec, eig: &Decomposition, m: usize, cfg: &RoofConfig, k: usize) -> Result<Run> {
    let r = eig.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(k as u64);
    let mut u = if k == 0 {
        DMatrix::<Complex64>::identity(m, r)
    } else {
        random_unitary(&mut rng, m).columns(0, r).into_owned()
    };
    let mut dec = mix_unchecked(eig, &u);
    let mut val = dec.average_concurrence(spec)?;
    let mut history = Vec::with_capacity(cfg.iters + 1);
    history.push(val);
    let mut step = 0.3;
    for it in 0..cfg.iters {
        let trial_u = if it % 2 == 0 {
            let g = DMatrix::from_fn(m, r, |_, _| crate::qstate::gaussian(&mut rng));
            orthonormalize(&(&u + g * Complex64::new(step, 0.0)))
        } else {
            givens(&u, &mut rng, step)
        };
        let trial = mix_unchecked(eig, &trial_u);
        let tv = trial.average_concurrence(spec)?;
        if tv < val {
            u = trial_u;
            dec = trial;
            val = tv;
            step = (step * 1.5).min(1.0);
        } else {
            step *= 0.93;
            if step < 1e-9 {
                step = 0.1;
            }
        }
        history.push(val);
    }
    Ok(Run {
        value: val,
        decomposition: dec,
        history,
    })
}

/// Mixes two random rows of `u` by a random 2×2 unitary of angle up to
/// `step · π/2`.
fn givens(u: &DMatrix<Complex64>, rng: &mut ChaCha8Rng, step: f64) -> DMatrix<Complex64> {
    let m = u.nrows();
    let j = rng.random_range(0..m);
    let k = (j + rng.random_range(1..m)) % m;
    let t = rng.random_range(-1.0..1.0) * step * std::f64::consts::FRAC_PI_2;
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let (c, s) = (Complex64::new(t.cos(), 0.0), t.sin() * phase);
    let mut out = u.clone();
    for col in 0..u.ncols() {
        let (a, b) = (u[(j, col)], u[(k, col)]);
        out[(j, col)] = c * a - s.conj() * b;
        out[(k, col)] = s * a + c * b;
    }
    out
}

fn orthonormalize(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.clone().qr().q()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlagsCheck {
    /// Estimate of `C(p₁ ρ₁⊗|η₁⟩⟨η₁| + p₂ ρ₂⊗|η₂⟩⟨η₂|)`.
    pub lhs_estimate: f64,
    /// `p₁ C(ρ₁) + p₂ C(ρ₂)`, each term estimated.
    pub rhs_value: f64,
    /// `lhs_estimate − rhs_value`.
    pub residual: f64,
}

/// Compares the estimated concurrence of a flagged mixture with the
/// weighted estimates of its parts. The concatenation of the parts' best
/// decompositions, flagged, always competes for the left side, so
/// `lhs_estimate ≤ rhs_value` up to rounding.
pub fn flags_equality_check(
    spec: &ConcurrenceSpec,
    rho1: &MixedState,
    rho2: &MixedState,
    p1: f64,
    p2: f64,
    flag_party: usize,
    cfg: &RoofConfig,
) -> Result<FlagsCheck> {
    if !sufficient_criterion(spec) {
        return Err(Error::SpecNotSufficient);
    }
    if p1 < 0.0 || p2 < 0.0 || (p1 + p2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(p1 + p2));
    }
    if rho1.dims() != rho2.dims() {
        return Err(Error::dims(rho1.dims(), rho2.dims()));
    }
    if flag_party >= rho1.n_parties() {
        return Err(Error::IndexOutOfRange {
            what: "flag party",
            index: flag_party,
            bound: rho1.n_parties(),
        });
    }
    let e1 = convex_roof_estimate(spec, rho1, cfg, &[])?;
    let e2 = convex_roof_estimate(spec, rho2, cfg, &[])?;
    let rhs_value = p1 * e1.value + p2 * e2.value;

    let flagged = rho1
        .attach_flag(flag_party, 2, 0)?
        .mix(p1, &rho2.attach_flag(flag_party, 2, 1)?)?;
    let mut vectors = Vec::with_capacity(e1.decomposition.len() + e2.decomposition.len());
    for (p, dec, idx) in [(p1, &e1.decomposition, 0), (p2, &e2.decomposition, 1)] {
        for v in dec.vectors() {
            vectors.push(attach_flag(
                &v.scaled(Complex64::new(p.sqrt(), 0.0)),
                flag_party,
                2,
                idx,
            )?);
        }
    }
    let joined = Decomposition::new(vectors, flagged.clone())?;
    let lhs = convex_roof_estimate(spec, &flagged, cfg, &[joined])?;
    Ok(FlagsCheck {
        lhs_estimate: lhs.value,
        rhs_value,
        residual: lhs.value - rhs_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concurrence::concurrence_pure;
    use crate::qstate::{bell_phi_plus, random_state_with, PureState};

    fn bip() -> ConcurrenceSpec {
        ConcurrenceSpec::symmetric(2).unwrap()
    }

    #[test]
    fn exact_on_pure_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = ConcurrenceSpec::symmetric(3).unwrap();
        for _ in 0..5 {
            let psi = random_state_with(&mut rng, &[2, 2, 3]).unwrap();
            let rho = MixedState::from_pure(&psi).unwrap();
            let v = convex_roof_upper(&spec, &rho, &RoofConfig::default()).unwrap();
            assert!((v - concurrence_pure(&spec, &psi).unwrap()).abs() < 1e-10);
        }
        let v = convex_roof_upper(
            &bip(),
            &MixedState::from_pure(&bell_phi_plus()).unwrap(),
            &RoofConfig::default(),
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn separable_mixtures_reach_zero() {
        let a = PureState::basis(vec![2, 2], &[0, 0]).unwrap();
        let b = PureState::basis(vec![2, 2], &[1, 1]).unwrap();
        let cfg = RoofConfig {
            iters: 300,
            ..Default::default()
        };
        let classical = MixedState::from_ensemble(&[(0.5, a), (0.5, b)]).unwrap();
        assert!(convex_roof_upper(&bip(), &classical, &cfg).unwrap() <= 1e-6);
        let mm = MixedState::maximally_mixed(&[2, 2]).unwrap();
        assert!(convex_roof_upper(&bip(), &mm, &cfg).unwrap() <= 1e-6);
    }

    fn werner(p: f64) -> MixedState {
        MixedState::from_pure(&bell_phi_plus())
            .unwrap()
            .mix(p, &MixedState::maximally_mixed(&[2, 2]).unwrap())
            .unwrap()
    }

    #[test]
    fn separable_werner_state() {
        // entangled eigenvectors, separable state
        let e = convex_roof_estimate(&bip(), &werner(0.2), &RoofConfig::default(), &[]).unwrap();
        assert!(e.history[0] > 0.4);
        assert!(e.value < 1e-6, "{} {:?}", e.value, &e.history[e.history.len() - 5..]);
        assert!(e.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(e.decomposition.reconstruction_error() < 1e-10);
    }

    #[test]
    fn entangled_werner_matches_closed_form() {
        // two-qubit roof: max(0, (3p − 1)/2)
        let v = convex_roof_upper(&bip(), &werner(0.6), &RoofConfig::default()).unwrap();
        assert!((0.4 - 1e-9..0.4 + 1e-3).contains(&v), "{v}");
    }

    #[test]
    fn non_increasing_in_iters() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = MixedState::from_ensemble(&[
            (0.6, random_state_with(&mut rng, &[2, 2]).unwrap()),
            (0.4, random_state_with(&mut rng, &[2, 2]).unwrap()),
        ])
        .unwrap();
        let run = |iters| {
            convex_roof_upper(
                &bip(),
                &rho,
                &RoofConfig {
                    iters,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let (a, b, c) = (run(10), run(100), run(400));
        assert!(b <= a && c <= b);
        let eig = eigendecomposition_ensemble(&rho)
            .unwrap()
            .average_concurrence(&bip())
            .unwrap();
        assert!(c <= eig + 1e-12);
    }

    #[test]
    fn flags_bell_and_product() {
        let spec = bip();
        let rho1 = MixedState::from_pure(&bell_phi_plus()).unwrap();
        let rho2 = MixedState::from_pure(&PureState::basis(vec![2, 2], &[0, 0]).unwrap()).unwrap();
        let f = flags_equality_check(&spec, &rho1, &rho2, 0.5, 0.5, 0, &RoofConfig::default()).unwrap();
        assert!((f.rhs_value - 0.5).abs() < 1e-10);
        assert!(f.lhs_estimate <= f.rhs_value + 1e-9);
        assert!(f.residual.abs() <= 1e-3, "{f:?}");
    }

    #[test]
    fn flags_rejects_non_monotone() {
        let spec =
            ConcurrenceSpec::from_p(&crate::concurrence::CoefficientsP::from_patterns(3, [("+--", 3.0)]).unwrap())
                .unwrap();
        let rho = MixedState::maximally_mixed(&[2, 2, 2]).unwrap();
        assert!(matches!(
            flags_equality_check(&spec, &rho, &rho, 0.5, 0.5, 0, &RoofConfig::default()),
            Err(Error::SpecNotSufficient)
        ));
        assert!(flags_equality_check(
            &bip(),
            &MixedState::maximally_mixed(&[2, 2]).unwrap(),
            &MixedState::maximally_mixed(&[2, 2]).unwrap(),
            0.7,
            0.7,
            0,
            &RoofConfig::default()
        )
        .is_err());
    }
}
