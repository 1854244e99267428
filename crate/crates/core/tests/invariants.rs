use std::f64::consts::FRAC_PI_2;

use concurrence_lab::concurrence::{alpha_from_p, concurrence_pure, p_from_alpha, CoefficientsP, ConcurrenceSpec};
use concurrence_lab::monotonicity::{gap_direct, gap_expanded};
use concurrence_lab::qstate::{random_state_with, PureState};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn state(seed: u64, dims: &[usize]) -> PureState {
    random_state_with(&mut ChaCha8Rng::seed_from_u64(seed), dims).unwrap()
}

/// Nonnegative weights on the even-minus patterns of `n` parties.
fn p_table(n: usize, raw: &[f64]) -> CoefficientsP {
    let values = (0..1usize << n)
        .map(|m| {
            let k = m.count_ones();
            if k > 0 && k % 2 == 0 {
                raw[m % raw.len()]
            } else {
                0.0
            }
        })
        .collect();
    CoefficientsP::new(n, values).unwrap()
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_concurrence_ignores_party_order(dims in dims_strategy(), seed: u64, shift in 0usize..4) {
        let n = dims.len();
        let psi = state(seed, &dims);
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let spec = ConcurrenceSpec::symmetric(n).unwrap();
        let a = concurrence_pure(&spec, &psi).unwrap();
        let b = concurrence_pure(&spec, &psi.permute_parties(&perm).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn product_states_have_zero_concurrence(dims in dims_strategy(), seed: u64) {
        let mut psi = state(seed, &dims[..1]);
        for (i, &d) in dims[1..].iter().enumerate() {
            psi = psi.tensor(&state(seed ^ (i as u64 + 1), &[d]));
        }
        let c = concurrence_pure(&ConcurrenceSpec::symmetric(dims.len()).unwrap(), &psi).unwrap();
        prop_assert!(c.abs() < 1e-7, "{c}");
    }

    #[test]
    fn coefficients_scale_as_square(n in 2usize..=4, raw in prop::collection::vec(0.0f64..3.0, 1..8), lambda in 0.1f64..10.0, seed: u64) {
        let p = p_table(n, &raw);
        prop_assume!(p.values().iter().any(|&v| v > 0.0));
        let scaled = CoefficientsP::new(n, p.values().iter().map(|v| v * lambda).collect()).unwrap();
        let psi = state(seed, &vec![2; n]);
        let c1 = concurrence_pure(&ConcurrenceSpec::from_p(&p).unwrap(), &psi).unwrap();
        let c2 = concurrence_pure(&ConcurrenceSpec::from_p(&scaled).unwrap(), &psi).unwrap();
        prop_assert!((c2 - lambda.sqrt() * c1).abs() < 1e-10 * (1.0 + c2));
    }

    #[test]
    fn transform_round_trip(n in 1usize..=6, raw in prop::collection::vec(0.0f64..5.0, 1..16)) {
        let p = p_table(n.max(2), &raw);
        let back = p_from_alpha(&alpha_from_p(&p)).unwrap();
        for (x, y) in p.values().iter().zip(back.values()) {
            prop_assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn gap_paths_agree(dims in dims_strategy(), raw in prop::collection::vec(0.0f64..3.0, 1..8), seed: u64, theta in 0.0f64..FRAC_PI_2, flag in 0usize..4) {
        let n = dims.len();
        let p = p_table(n, &raw);
        prop_assume!(p.values().iter().any(|&v| v > 0.0));
        let spec = ConcurrenceSpec::from_p(&p).unwrap();
        let psi = state(seed, &dims);
        let phi = state(seed.wrapping_add(1), &dims);
        let (a, b) = (Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0));
        let d = gap_direct(&spec, &psi, &phi, a, b, flag % n).unwrap().gap;
        let e = gap_expanded(&spec, &psi, &phi, a, b, flag % n).unwrap().gap;
        prop_assert!((d - e).abs() < 1e-10);
    }

    #[test]
    fn symmetric_gap_is_nonnegative(dims in dims_strategy(), seed: u64, theta in 0.0f64..FRAC_PI_2, flag in 0usize..4) {
        let n = dims.len();
        let spec = ConcurrenceSpec::symmetric(n).unwrap();
        let psi = state(seed, &dims);
        let phi = state(seed.wrapping_add(1), &dims);
        let (a, b) = (Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0));
        let g = gap_direct(&spec, &psi, &phi, a, b, flag % n).unwrap().gap;
        prop_assert!(g >= -1e-10, "{g}");
    }
}
