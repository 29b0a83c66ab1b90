mod common;

use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bell_hierarchy::inequality::build_hierarchy_inequality;
use bell_hierarchy::lhv::{check_nonsignaling, distribution_lhs};
use bell_hierarchy::quantum::{
    behavior, evaluate_lhs, ghz_state, term_probability, w_state, MeasurementAngles, NoisyState,
    StateVector,
};
use num_complex::Complex64;

fn angles(n: usize) -> impl Strategy<Value = MeasurementAngles> {
    let v = || prop::collection::vec(0.0..std::f64::consts::TAU, n);
    (v(), v()).prop_map(|(a, b)| MeasurementAngles::new(a, b).unwrap())
}

fn instance() -> impl Strategy<Value = (usize, usize, usize, u64, f64, MeasurementAngles)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), 2..=n, 1..=n, any::<u64>(), 0.0..=1.0f64, angles(n)))
}

fn random_psi(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::from_amplitudes(common::random_state(n, &mut rng)).unwrap()
}

/// Relabels parties `i` and `j` (0-based) of a state vector.
fn swap_parties(psi: &StateVector, i: usize, j: usize) -> StateVector {
    let n = psi.n();
    let (bi, bj) = (n - 1 - i, n - 1 - j);
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|x| {
            let (xi, xj) = (x >> bi & 1, x >> bj & 1);
            let y = (x & !(1 << bi) & !(1 << bj)) | (xj << bi) | (xi << bj);
            psi.amplitudes()[y]
        })
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lhs_is_affine_in_visibility((n, m, k, seed, _p, angles) in instance()) {
        let expr = build_hierarchy_inequality(n, m, k).unwrap();
        let psi = random_psi(n, seed);
        let at = |p| evaluate_lhs(&expr, &NoisyState::new(psi.clone(), p).unwrap(), &angles).unwrap();
        let (l0, lh, l1) = (at(0.0), at(0.5), at(1.0));
        prop_assert!((lh - 0.5 * (l0 + l1)).abs() < 1e-12);
        prop_assert!((l0 - expr.uniform_value()).abs() < 1e-12);
        prop_assert!(l0 < 0.0);
    }

    #[test]
    fn behavior_rows_are_complete((n, _m, _k, seed, p, angles) in instance()) {
        let state = NoisyState::new(random_psi(n, seed), p).unwrap();
        let table = behavior(&state, &angles).unwrap();
        let rows = 1usize << n;
        for s in 0..rows {
            let sum: f64 = (0..rows).map(|r| table.get(s, r)).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
        // quantum behaviors never signal
        prop_assert!(check_nonsignaling(&table).max_violation < 1e-12);
    }

    #[test]
    fn term_probabilities_are_probabilities((n, m, k, seed, p, angles) in instance()) {
        let expr = build_hierarchy_inequality(n, m, k).unwrap();
        let state = NoisyState::new(random_psi(n, seed), p).unwrap();
        for t in expr.terms() {
            let q = term_probability(&state, t, &angles).unwrap();
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&q));
        }
    }

    #[test]
    fn table_and_direct_evaluation_agree((n, m, k, seed, p, angles) in instance()) {
        let expr = build_hierarchy_inequality(n, m, k).unwrap();
        let state = NoisyState::new(random_psi(n, seed), p).unwrap();
        let direct = evaluate_lhs(&expr, &state, &angles).unwrap();
        let table = distribution_lhs(&expr, &behavior(&state, &angles).unwrap()).unwrap();
        prop_assert!((direct - table).abs() < 1e-10);
    }

    #[test]
    fn party_relabelling_invariance(
        (n, m, k, seed, p, angles) in instance(),
        pick in any::<(usize, usize)>(),
    ) {
        let (i, j) = (pick.0 % n, pick.1 % n);
        let expr = build_hierarchy_inequality(n, m, k).unwrap();
        let psi = random_psi(n, seed);
        let before = evaluate_lhs(&expr, &NoisyState::new(psi.clone(), p).unwrap(), &angles).unwrap();

        let (mut a, mut b) = (angles.theta_a().to_vec(), angles.theta_b().to_vec());
        a.swap(i, j);
        b.swap(i, j);
        let k_new = if k - 1 == i { j + 1 } else if k - 1 == j { i + 1 } else { k };
        let swapped = NoisyState::new(swap_parties(&psi, i, j), p).unwrap();
        let after = evaluate_lhs(
            &build_hierarchy_inequality(n, m, k_new).unwrap(),
            &swapped,
            &MeasurementAngles::new(a, b).unwrap(),
        )
        .unwrap();
        prop_assert!((before - after).abs() < 1e-12);
    }
}

#[test]
fn ghz_and_w_reference_values() {
    let expr = build_hierarchy_inequality(4, 4, 1).unwrap();
    let zero = MeasurementAngles::uniform(4, 0.0, 0.0).unwrap();
    let first = &expr.terms()[0];
    let ghz = NoisyState::pure(ghz_state(4).unwrap());
    let w = NoisyState::pure(w_state(4).unwrap());
    assert!((term_probability(&ghz, first, &zero).unwrap() - 0.5).abs() < 1e-15);
    assert!(term_probability(&w, first, &zero).unwrap().abs() < 1e-15);
}
