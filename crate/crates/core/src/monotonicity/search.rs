//! Random-restart simplex search for a negative flag-superposition gap.
//!
//! Each restart draws Haar-random `ψ, φ` and runs two descents over their
//! real and imaginary parts. The first minimizes the relative squared-form
//! discriminant, which fixes the sign of the gap for every interior weight.
//! The second minimizes the gap itself, with `θ` (for `a = cos θ`,
//! `b = sin θ`) optimized exactly at every evaluation: the gap is convex in
//! `cos²θ` wherever it can go negative.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gap::{gap_direct, upsilon_table};
use super::witness::ViolationWitness;
use crate::concurrence::{prefactor, purity_table, weighted_sum, ConcurrenceSpec};
use crate::error::{Error, Result};
use crate::optimize::{golden_section, nelder_mead, NelderMeadConfig};
use crate::qstate::{random_state_with, PureState};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Restarts per flag party.
    pub restarts: usize,
    /// Objective evaluations per descent.
    pub max_iters: usize,
    pub seed: u64,
    /// Fixed flag party (0-based). `None` probes party 0 for
    /// permutation-symmetric specs and every party otherwise.
    pub flag_party: Option<usize>,
    /// A gap below `−tolerance` counts as a violation.
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 8_000,
            seed: 42,
            flag_party: None,
            tolerance: 1e-7,
        }
    }
}

/// Best configuration of one search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchCandidate {
    pub psi: PureState,
    pub phi: PureState,
    pub theta: f64,
    pub flag_party: usize,
    /// Gap recomputed from the constructed superposition.
    pub gap: f64,
    /// Global restart index, `flag_slot * restarts + r`.
    pub restart: usize,
}

impl SearchCandidate {
    pub fn weights(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.theta.cos().abs(), 0.0),
            Complex64::new(self.theta.sin().abs(), 0.0),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchReport {
    pub best: SearchCandidate,
    /// Best gap of every restart, in restart order.
    pub restart_gaps: Vec<f64>,
    pub evaluations: usize,
    pub flag_parties: Vec<usize>,
}

impl SearchReport {
    pub fn min_gap(&self) -> f64 {
        self.best.gap
    }

    pub fn witness(&self, spec: &ConcurrenceSpec, tolerance: f64) -> Result<Option<ViolationWitness>> {
        if self.best.gap >= -tolerance {
            return Ok(None);
        }
        let (a, b) = self.best.weights();
        ViolationWitness::new(
            spec.clone(),
            self.best.psi.clone(),
            self.best.phi.clone(),
            a,
            b,
            self.best.flag_party,
        )
        .map(Some)
    }
}

/// Runs the search and returns a witness iff the best gap is below
/// `−cfg.tolerance`.
pub fn search_violation(
    spec: &ConcurrenceSpec,
    dims: &[usize],
    cfg: &SearchConfig,
) -> Result<Option<ViolationWitness>> {
    search(spec, dims, cfg)?.witness(spec, cfg.tolerance)
}

/// Runs the search and reports the best configuration whatever its sign.
pub fn search(spec: &ConcurrenceSpec, dims: &[usize], cfg: &SearchConfig) -> Result<SearchReport> {
    if dims.len() != spec.n() {
        return Err(Error::dims(spec.n(), dims.len()));
    }
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDims(format!("local dimensions must be >= 2: {dims:?}")));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be positive".into()));
    }
    let flags: Vec<usize> = match cfg.flag_party {
        Some(f) if f >= dims.len() => {
            return Err(Error::IndexOutOfRange {
                what: "flag party",
                index: f,
                bound: dims.len(),
            })
        }
        Some(f) => vec![f],
        None if spec.is_permutation_symmetric() => vec![0],
        None => (0..dims.len()).collect(),
    };

    let jobs: Vec<(usize, usize)> = flags
        .iter()
        .enumerate()
        .flat_map(|(slot, &f)| (0..cfg.restarts).map(move |r| (slot * cfg.restarts + r, f)))
        .collect();
    let runs: Vec<RestartResult> = jobs
        .par_iter()
        .map(|&(idx, flag)| run_restart(spec, dims, cfg, idx, flag))
        .collect();

    let evaluations = runs.iter().map(|r| r.evals).sum();
    let restart_gaps: Vec<f64> = runs.iter().map(|r| r.gap).collect();
    let best = runs
        .into_iter()
        .min_by(|x, y| x.gap.total_cmp(&y.gap).then(x.index.cmp(&y.index)))
        .expect("at least one restart");

    let (a, b) = (best.theta.cos().abs(), best.theta.sin().abs());
    let direct = gap_direct(
        spec,
        &best.psi,
        &best.phi,
        Complex64::new(a, 0.0),
        Complex64::new(b, 0.0),
        best.flag,
    )?;
    Ok(SearchReport {
        best: SearchCandidate {
            psi: best.psi,
            phi: best.phi,
            theta: best.theta,
            flag_party: best.flag,
            gap: direct.gap,
            restart: best.index,
        },
        restart_gaps,
        evaluations,
        flag_parties: flags,
    })
}

struct RestartResult {
    index: usize,
    flag: usize,
    psi: PureState,
    phi: PureState,
    theta: f64,
    gap: f64,
    evals: usize,
}

fn run_restart(spec: &ConcurrenceSpec, dims: &[usize], cfg: &SearchConfig, index: usize, flag: usize) -> RestartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let psi0 = random_state_with(&mut rng, dims).expect("validated dims");
    let phi0 = random_state_with(&mut rng, dims).expect("validated dims");
    let dim = psi0.dim();

    let mut x0 = Vec::with_capacity(4 * dim);
    for s in [&psi0, &phi0] {
        for a in s.amplitudes() {
            x0.push(a.re);
            x0.push(a.im);
        }
    }
    let nm = NelderMeadConfig {
        max_evals: cfg.max_iters,
        ..Default::default()
    };

    let ev = Evaluator { spec, dims, flag, dim };
    let p1 = nelder_mead(|x| ev.tables(x).map_or(f64::INFINITY, |t| t.relative()), &x0, &nm);
    let p2 = nelder_mead(|x| ev.tables(x).map_or(f64::INFINITY, |t| t.best_gap().1), &p1.x, &nm);

    let (psi, phi) = ev.states(&p2.x).unwrap_or((psi0, phi0));
    let t = Tables::new(spec, &psi, &phi, flag);
    let (cos2, gap) = t.best_gap();
    RestartResult {
        index,
        flag,
        psi,
        phi,
        theta: cos2.sqrt().acos(),
        gap,
        evals: p1.evals + p2.evals,
    }
}

struct Evaluator<'a> {
    spec: &'a ConcurrenceSpec,
    dims: &'a [usize],
    flag: usize,
    dim: usize,
}

impl Evaluator<'_> {
    fn states(&self, x: &[f64]) -> Option<(PureState, PureState)> {
        let make = |chunk: &[f64]| {
            let amps: Vec<Complex64> = chunk.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            let s = PureState::new(self.dims.to_vec(), amps).ok()?;
            let n = s.norm();
            (n > 1e-150 && n.is_finite()).then(|| s.normalized())
        };
        Some((make(&x[..2 * self.dim])?, make(&x[2 * self.dim..])?))
    }

    fn tables(&self, x: &[f64]) -> Option<Tables> {
        let (psi, phi) = self.states(x)?;
        Some(Tables::new(self.spec, &psi, &phi, self.flag))
    }
}

/// Weighted sums that determine the gap for every weight.
struct Tables {
    pref: f64,
    r_psi: f64,
    r_phi: f64,
    cross: f64,
}

impl Tables {
    fn new(spec: &ConcurrenceSpec, psi: &PureState, phi: &PureState, flag: usize) -> Self {
        Self {
            pref: prefactor(spec.n()),
            r_psi: weighted_sum(spec, &purity_table(psi)).max(0.0),
            r_phi: weighted_sum(spec, &purity_table(phi)).max(0.0),
            cross: weighted_sum(spec, &upsilon_table(psi, phi, flag)),
        }
    }

    fn relative(&self) -> f64 {
        let g = (self.r_psi * self.r_phi).sqrt();
        if g <= 1e-14 {
            0.0
        } else {
            self.cross / g - 1.0
        }
    }

    /// Gap at `x = cos²θ`.
    fn gap(&self, x: f64) -> f64 {
        let y = 1.0 - x;
        let lhs = (x * x * self.r_psi + y * y * self.r_phi + 2.0 * x * y * self.cross).max(0.0);
        self.pref * (lhs.sqrt() - x * self.r_psi.sqrt() - y * self.r_phi.sqrt())
    }

    /// `(cos²θ, gap)` at the minimizing weight.
    fn best_gap(&self) -> (f64, f64) {
        golden_section(|x| self.gap(x), 0.0, 1.0, 1e-10)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::concurrence::CoefficientsP;
    use crate::monotonicity::gap_expanded;

    fn spec_from(patterns: &[(&str, f64)], n: usize) -> ConcurrenceSpec {
        ConcurrenceSpec::from_p(&CoefficientsP::from_patterns(n, patterns.iter().copied()).unwrap()).unwrap()
    }

    #[test]
    fn closed_form_matches_expanded_gap() {
        let spec = ConcurrenceSpec::symmetric(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_state_with(&mut rng, &[2, 2, 3]).unwrap();
        let phi = random_state_with(&mut rng, &[2, 2, 3]).unwrap();
        let t = Tables::new(&spec, &psi, &phi, 2);
        for x in [0.1, 0.5, 0.77] {
            let a = Complex64::new(f64::sqrt(x), 0.0);
            let b = Complex64::new(f64::sqrt(1.0 - x), 0.0);
            let e = gap_expanded(&spec, &psi, &phi, a, b, 2).unwrap();
            assert!((t.gap(x) - e.gap).abs() < 1e-12);
        }
    }

    #[test]
    fn finds_tripartite_violation() {
        let spec = spec_from(&[("+--", 3.0)], 3);
        let cfg = SearchConfig {
            restarts: 4,
            max_iters: 3000,
            ..Default::default()
        };
        let w = search_violation(&spec, &[2, 2, 2], &cfg).unwrap().expect("witness");
        assert!(w.gap < -0.1, "{}", w.gap);
        assert!((w.reevaluate().unwrap().gap - w.gap).abs() < 1e-12);
        // at least as deep as the analytic witness
        assert!(w.gap <= 3f64.sqrt() * (FRAC_1_SQRT_2 - 1.0) + 1e-6, "{}", w.gap);
    }

    #[test]
    fn symmetric_has_no_violation() {
        let spec = ConcurrenceSpec::symmetric(3).unwrap();
        let cfg = SearchConfig {
            restarts: 3,
            max_iters: 2000,
            ..Default::default()
        };
        let r = search(&spec, &[2, 2, 2], &cfg).unwrap();
        assert!(r.min_gap() >= -1e-9, "{}", r.min_gap());
        assert_eq!(r.flag_parties, vec![0]);
        assert!(r.witness(&spec, 1e-7).unwrap().is_none());
    }

    #[test]
    fn deterministic() {
        let spec = spec_from(&[("+--", 1.0), ("-+-", 2.0)], 3);
        let cfg = SearchConfig {
            restarts: 2,
            max_iters: 800,
            ..Default::default()
        };
        let a = search(&spec, &[2, 2, 2], &cfg).unwrap();
        let b = search(&spec, &[2, 2, 2], &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.restart_gaps.len(), 6);
    }

    #[test]
    fn config_checks() {
        let spec = ConcurrenceSpec::symmetric(3).unwrap();
        let cfg = SearchConfig::default();
        assert!(search(&spec, &[2, 2], &cfg).is_err());
        assert!(search(&spec, &[2, 1, 2], &cfg).is_err());
        let bad = SearchConfig {
            flag_party: Some(3),
            ..Default::default()
        };
        assert!(search(&spec, &[2, 2, 2], &bad).is_err());
    }
}
