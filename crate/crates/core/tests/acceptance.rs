//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use concurrence_lab::concurrence::{
    alpha_from_p, concurrence_pure, p_from_alpha, CoefficientsAlpha, CoefficientsP, ConcurrenceSpec, SignPattern,
};
use concurrence_lab::convexroof::{convex_roof_upper, flags_equality_check, MixedState, RoofConfig};
use concurrence_lab::monotonicity::{
    default_kappa_grid, gap_direct, gap_expanded, kappa_scan, search, sufficient_criterion, tripartite_counterexample,
    SearchConfig,
};
use concurrence_lab::qstate::{
    bell_phi_minus, bell_phi_plus, flag_superposition, random_state_with, PureState, SubsetMask,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn spec_from(n: usize, patterns: &[(&str, f64)]) -> ConcurrenceSpec {
    ConcurrenceSpec::from_p(&CoefficientsP::from_patterns(n, patterns.iter().copied()).unwrap()).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Random admissible spec: independent exponential weights on the allowed
/// sign patterns, some of them zeroed.
fn random_admissible(rng: &mut ChaCha8Rng, n: usize) -> ConcurrenceSpec {
    loop {
        let mut values = vec![0.0; 1 << n];
        for (m, v) in values.iter_mut().enumerate() {
            let minus = m.count_ones();
            if minus > 0 && minus % 2 == 0 && rng.random_bool(0.7) {
                *v = -rng.random::<f64>().ln();
            }
        }
        if values.iter().any(|&v| v > 0.0) {
            let p = CoefficientsP::new(n, values).unwrap();
            return ConcurrenceSpec::from_p(&p).unwrap();
        }
    }
}

/// Random spec with every nontrivial `α ≤ 0`: pick `α_V = −u_V` with
/// `u_V = u_{V̄} ≥ 0`, then `α_∅ = α_N` closes the sum rule.
fn random_sufficient(rng: &mut ChaCha8Rng, n: usize) -> ConcurrenceSpec {
    let full = (1u64 << n) - 1;
    let mut values = vec![0.0; 1 << n];
    for v in 1..full {
        let w = v ^ full;
        if v < w {
            let u = if rng.random_bool(0.25) {
                0.0
            } else {
                -rng.random::<f64>().ln()
            };
            values[v as usize] = -u;
            values[w as usize] = -u;
        }
    }
    if values.iter().all(|&v| v == 0.0) {
        return random_sufficient(rng, n);
    }
    let top = -values.iter().sum::<f64>() / 2.0;
    values[0] = top;
    values[full as usize] = top;
    ConcurrenceSpec::from_alpha(CoefficientsAlpha::new(n, values).unwrap()).unwrap()
}

fn random_dims(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(2..=3)).collect()
}

fn c1_bipartite_normalization() -> Outcome {
    let spec = ConcurrenceSpec::symmetric(2).unwrap();
    let v = concurrence_pure(&spec, &bell_phi_plus()).unwrap();
    check(
        spec.is_normalized() && (v - 1.0).abs() < 1e-10,
        format!("C(Φ⁺) = {v:.15}"),
    )
}

fn c2_four_party_values() -> Outcome {
    let spec = spec_from(4, &[("----", 1.0)]);
    let psi = bell_phi_plus().tensor(&bell_phi_plus());
    let phi = bell_phi_minus().tensor(&bell_phi_minus());
    let cp = concurrence_pure(&spec, &psi).unwrap();
    let cf = concurrence_pure(&spec, &phi).unwrap();
    let h = c(FRAC_1_SQRT_2);
    let xi = flag_superposition(&psi, &phi, h, h, 0).unwrap();
    let cx = concurrence_pure(&spec, &xi).unwrap();
    let gap = gap_direct(&spec, &psi, &phi, h, h, 0).unwrap().gap;
    let ok = !spec.is_normalized()
        && (cp - 0.5).abs() < 1e-10
        && (cf - 0.5).abs() < 1e-10
        && (cx - 0.353553390593).abs() < 1e-10
        && (gap + 0.146446609407).abs() < 1e-9;
    check(
        ok,
        format!("C(ψ) = {cp:.12}, C(φ) = {cf:.12}, C(Ξ) = {cx:.12}, gap = {gap:.12}"),
    )
}

fn c3_tripartite() -> Outcome {
    let spec = spec_from(3, &[("+--", 3.0)]);
    let w = tripartite_counterexample(&spec).map_err(|e| e.to_string())?;
    let zero = PureState::basis(vec![2], &[0]).unwrap();
    let shape = w.psi == zero.tensor(&bell_phi_plus())
        && w.phi == zero.tensor(&bell_phi_minus())
        && (w.a.re - FRAC_1_SQRT_2).abs() < 1e-15
        && (w.b.re - FRAC_1_SQRT_2).abs() < 1e-15;
    let t = Instant::now();
    let cfg = SearchConfig {
        restarts: 50,
        seed: 42,
        ..Default::default()
    };
    let r = search(&spec, &[2, 2, 2], &cfg).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    let ok = shape && w.gap < -1e-3 && r.min_gap() <= w.gap + 1e-6 && el < Duration::from_secs(30);
    check(
        ok,
        format!(
            "analytic gap = {:.12}, search gap = {:.12}, search time {:.1?}",
            w.gap,
            r.min_gap(),
            el
        ),
    )
}

fn c4_kappa_threshold() -> Outcome {
    let grid = default_kappa_grid();
    let r = kappa_scan(&grid, &[2; 4], &SearchConfig::default()).map_err(|e| e.to_string())?;
    let at = |k: f64| r.points.iter().find(|p| (p.kappa1 - k).abs() < 1e-12).cloned();
    let m1 = at(-1.0).ok_or("grid lacks κ₁ = −1")?;
    let m7 = at(-7.0).ok_or("grid lacks κ₁ = −7")?;
    let b = r.boundary_estimate;
    let ok = !m1.violated
        && m7.violated
        && b.is_some_and(|b| (b + 2.8).abs() <= 0.15)
        && r.points
            .iter()
            .all(|p| (8.0 * p.kappa1 + 6.0 * p.kappa2 + 14.0).abs() < 1e-12);
    check(
        ok,
        format!(
            "boundary = {b:?}, κ₁=−1 gap {:.2e}, κ₁=−7 gap {:.4}",
            m1.min_gap, m7.min_gap
        ),
    )
}

fn c5_sufficiency_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    let samples = 10_000;
    for i in 0..samples {
        let n = 2 + i % 3;
        let spec = if i % 50 == 0 {
            ConcurrenceSpec::symmetric(n).unwrap()
        } else {
            random_sufficient(&mut rng, n)
        };
        assert!(sufficient_criterion(&spec));
        let dims = random_dims(&mut rng, n);
        let psi = random_state_with(&mut rng, &dims).unwrap();
        let phi = random_state_with(&mut rng, &dims).unwrap();
        let theta: f64 = rng.random_range(0.0..FRAC_PI_2);
        let flag = rng.random_range(0..n);
        let g = gap_direct(&spec, &psi, &phi, c(theta.cos()), c(theta.sin()), flag).unwrap();
        worst = worst.min(g.gap);
    }
    check(worst >= -1e-9, format!("{samples} samples, min gap = {worst:.3e}"))
}

fn c6_dual_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 2 + i % 3;
        let spec = random_admissible(&mut rng, n);
        let dims = random_dims(&mut rng, n);
        let psi = random_state_with(&mut rng, &dims).unwrap();
        let phi = random_state_with(&mut rng, &dims).unwrap();
        let theta: f64 = rng.random_range(0.0..FRAC_PI_2);
        let (a, b) = (c(theta.cos()), c(theta.sin()));
        let flag = rng.random_range(0..n);
        let d = gap_direct(&spec, &psi, &phi, a, b, flag).unwrap();
        let e = gap_expanded(&spec, &psi, &phi, a, b, flag).unwrap();
        worst = worst.max((d.gap - e.gap).abs());
    }
    check(worst < 1e-10, format!("1000 configurations, max |Δgap| = {worst:.2e}"))
}

fn c7_coefficient_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 2 + i % 5;
        let spec = random_admissible(&mut rng, n);
        let p = spec.p().unwrap();
        let back = p_from_alpha(&alpha_from_p(&p)).unwrap();
        for (x, y) in p.values().iter().zip(back.values()) {
            worst = worst.max((x - y).abs());
        }
    }
    let six = alpha_from_p(&CoefficientsP::from_patterns(4, [("----", 1.0)]).unwrap());
    let pattern = six.iter().all(|(v, a)| a == if v.len() % 2 == 0 { 1.0 } else { -1.0 });
    let minus = SignPattern::parse("----", 4).unwrap();
    let p_back = p_from_alpha(&six).unwrap();
    let single = p_back.iter().all(|(s, v)| if s == minus { v == 1.0 } else { v == 0.0 });
    check(
        worst <= 1e-14 && pattern && single,
        format!("max round-trip error {worst:.1e} over 1000 specs (N ≤ 6); α = (−1)^|V| reproduced: {pattern}"),
    )
}

fn c8_extension_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 2;
        let dims = random_dims(&mut rng, n);
        let psi = random_state_with(&mut rng, &dims).unwrap();
        let d = rng.random_range(2..=3);
        let local = random_state_with(&mut rng, &[d]).unwrap();
        let small = concurrence_pure(&ConcurrenceSpec::symmetric(n).unwrap(), &psi).unwrap();
        let big = concurrence_pure(&ConcurrenceSpec::symmetric(n + 1).unwrap(), &psi.tensor(&local)).unwrap();
        worst = worst.max((small - big).abs());
    }
    check(worst < 1e-10, format!("100 states, max |ΔC_S| = {worst:.2e}"))
}

/// `P₊` and `P₋` on two copies of a qubit, from explicit (anti)symmetric
/// basis vectors; index `2·i + j` for copies `i`, `j`.
fn copy_projectors() -> [[[f64; 4]; 4]; 2] {
    let h = FRAC_1_SQRT_2;
    let sym = [[1.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let anti = [[0.0, h, -h, 0.0]];
    let proj = |basis: &[[f64; 4]]| {
        let mut m = [[0.0; 4]; 4];
        for v in basis {
            for r in 0..4 {
                for col in 0..4 {
                    m[r][col] += v[r] * v[col];
                }
            }
        }
        m
    };
    [proj(&sym), proj(&anti)]
}

/// `2 √(Σ_s p_s ⟨ψ|⟨ψ| ⊗_i P_{s_i} |ψ⟩|ψ⟩)` for qubits, applying the local
/// projectors one party at a time to `|ψ⟩⊗|ψ⟩`.
fn projector_oracle(p: &CoefficientsP, psi: &PureState) -> f64 {
    let n = psi.n_parties();
    let amps = psi.amplitudes();
    let dim = 1usize << n;
    // copy-pair layout: party k owns bits (2(n−1−k)+1, 2(n−1−k)) = (copy 1, copy 2)
    let mut pair = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut idx = 0usize;
            for k in 0..n {
                let bi = (i >> (n - 1 - k)) & 1;
                let bj = (j >> (n - 1 - k)) & 1;
                idx = (idx << 2) | (bi << 1) | bj;
            }
            pair[idx] = amps[i] * amps[j];
        }
    }
    let proj = copy_projectors();
    let mut total = 0.0;
    for (s, w) in p.iter() {
        if w == 0.0 {
            continue;
        }
        let mut v = pair.clone();
        for k in 0..n {
            let m = &proj[usize::from(s.sign_on(SubsetMask::single(k, n).unwrap()) < 0.0)];
            let stride = 1usize << (2 * (n - 1 - k));
            let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
            for (idx, o) in out.iter_mut().enumerate() {
                let local = (idx / stride) % 4;
                let base = idx - local * stride;
                for (l, &coef) in m[local].iter().enumerate() {
                    if coef != 0.0 {
                        *o += v[base + l * stride] * coef;
                    }
                }
            }
            v = out;
        }
        let expect: f64 = pair.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum();
        total += w * expect;
    }
    2.0 * total.max(0.0).sqrt()
}

fn c9_projector_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 2;
        let spec = random_admissible(&mut rng, n);
        let psi = random_state_with(&mut rng, &vec![2; n]).unwrap();
        let oracle = projector_oracle(&spec.p().unwrap(), &psi);
        let formula = concurrence_pure(&spec, &psi).unwrap();
        worst = worst.max((oracle - formula).abs());
    }
    check(worst < 1e-10, format!("100 specs/states, max |Δ| = {worst:.2e}"))
}

fn c10_convex_roof() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cfg = RoofConfig::default();
    let mut rank1 = 0.0f64;
    for i in 0..20 {
        let n = 2 + i % 2;
        let spec = random_admissible(&mut rng, n);
        let dims = random_dims(&mut rng, n);
        let psi = random_state_with(&mut rng, &dims).unwrap();
        let rho = MixedState::from_pure(&psi).unwrap();
        let est = convex_roof_upper(&spec, &rho, &cfg).unwrap();
        rank1 = rank1.max((est - concurrence_pure(&spec, &psi).unwrap()).abs());
    }
    let bip = ConcurrenceSpec::symmetric(2).unwrap();
    let zz = PureState::basis(vec![2, 2], &[0, 0]).unwrap();
    let oo = PureState::basis(vec![2, 2], &[1, 1]).unwrap();
    let classical = MixedState::from_ensemble(&[(0.5, zz.clone()), (0.5, oo)]).unwrap();
    let mm = MixedState::maximally_mixed(&[2, 2]).unwrap();
    let sep = convex_roof_upper(&bip, &classical, &cfg)
        .unwrap()
        .max(convex_roof_upper(&bip, &mm, &cfg).unwrap());

    let bell = MixedState::from_pure(&bell_phi_plus()).unwrap();
    let prod = MixedState::from_pure(&zz).unwrap();
    let f = flags_equality_check(&bip, &bell, &prod, 0.5, 0.5, 0, &cfg).unwrap();
    let mut worst_excess = f.residual;
    for i in 0..6 {
        let n = 2 + i % 2;
        let spec = random_sufficient(&mut rng, n);
        let dims = vec![2; n];
        let mix = |rng: &mut ChaCha8Rng| {
            let a = random_state_with(rng, &dims).unwrap();
            let b = random_state_with(rng, &dims).unwrap();
            MixedState::from_ensemble(&[(0.7, a), (0.3, b)]).unwrap()
        };
        let (r1, r2) = (mix(&mut rng), mix(&mut rng));
        let p1 = rng.random_range(0.1..0.9);
        let small = RoofConfig {
            iters: 500,
            ..Default::default()
        };
        let g = flags_equality_check(&spec, &r1, &r2, p1, 1.0 - p1, i % n, &small).unwrap();
        worst_excess = worst_excess.max(g.residual);
    }
    let ok = rank1 < 1e-10 && sep <= 1e-6 && worst_excess <= 1e-9 && f.residual.abs() <= 1e-3;
    check(
        ok,
        format!(
            "rank-1 max |Δ| = {rank1:.1e}, separable ≤ {sep:.1e}, Φ⁺/|00⟩ lhs = {:.6} rhs = {:.6}, max lhs−rhs = {worst_excess:.1e}",
            f.lhs_estimate, f.rhs_value
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("bipartite normalization", c1_bipartite_normalization),
        ("four-party exact values", c2_four_party_values),
        ("tripartite counterexample", c3_tripartite),
        ("four-party kappa threshold", c4_kappa_threshold),
        ("sufficiency property sweep", c5_sufficiency_sweep),
        ("dual-path gap agreement", c6_dual_path),
        ("coefficient algebra", c7_coefficient_algebra),
        ("symmetric extension invariance", c8_extension_invariance),
        ("projector oracle equivalence", c9_projector_oracle),
        ("convex-roof sanity", c10_convex_roof),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2} [PRIMARY] {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|x| label.contains(x.as_str())) {
            continue;
        }
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let el = t.elapsed();
        match res {
            Ok(d) => println!("{label}: PASS ({d}) [{el:.1?}]"),
            Err(d) => {
                failed += 1;
                println!("{label}: FAIL ({d}) [{el:.1?}]");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
