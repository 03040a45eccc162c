mod common;

use proptest::prelude::*;
use qdsig_core::qcore::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_state(qubits: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << qubits)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| Amplitude::new(a, b)).collect()).unwrap())
}

fn arb_correction() -> impl Strategy<Value = PauliCorrection> {
    (0u8..2, 0u8..2).prop_map(|(z, x)| PauliCorrection::new(z, x))
}

fn i_unit() -> Amplitude {
    Amplitude::new(0.0, 1.0)
}

fn max_amp_error(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn delta_pauli_algebra_is_exact() {
    for b in 0..2u8 {
        let d = delta_encode(b);
        let flipped = delta_encode(b ^ 1);
        let sign = if b == 0 { 1.0 } else { -1.0 };

        let z = apply_correction(&d, 0, PauliCorrection::new(1, 0)).unwrap();
        assert!(max_amp_error(&z, &flipped) <= ALGEBRA_TOL);

        let x = apply_correction(&d, 0, PauliCorrection::new(0, 1)).unwrap();
        let expected = flipped.with_global_phase(i_unit() * sign).unwrap();
        assert!(max_amp_error(&x, &expected) <= ALGEBRA_TOL);

        let zx = apply_correction(&d, 0, PauliCorrection::new(1, 1)).unwrap();
        let expected = d.with_global_phase(i_unit() * sign).unwrap();
        assert!(max_amp_error(&zx, &expected) <= ALGEBRA_TOL);
    }
}

#[test]
fn correction_matches_dense_matrices() {
    for z in 0..2u8 {
        for x in 0..2u8 {
            for b in 0..2u8 {
                let got = apply_correction(&delta_encode(b), 0, PauliCorrection::new(z, x)).unwrap();
                let want = common::apply(&common::correction(z, x), &common::delta(b));
                for (g, w) in got.amplitudes().iter().zip(&want) {
                    assert!((g - w).norm() <= ALGEBRA_TOL);
                }
            }
        }
    }
}

#[test]
fn teleportation_over_phi_plus_all_outcomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let phi = make_bell(BellLabel::PhiPlus);
    for _ in 0..200 {
        let psi = StateVector::normalized(
            (0..2)
                .map(|_| Amplitude::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let joint = tensor(&[&psi, &phi]).unwrap();
        for outcome in Bits2::ALL {
            let (p, post) = bsm_postselect(&joint, 0, 1, outcome).unwrap();
            assert!((p - 0.25).abs() < 1e-10);
            let receiver = extract_qubit(&post, 2).unwrap();
            let fixed = apply_correction(&receiver, 0, PauliCorrection::from(outcome)).unwrap();
            assert!(equal_up_to_global_phase(&fixed, &psi, STATE_TOL));
        }
    }
}

#[test]
fn bsm_postselect_agrees_with_dense_projector() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let amps: Vec<Amplitude> = (0..16)
            .map(|_| Amplitude::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0)))
            .collect();
        let s = StateVector::normalized(amps).unwrap();
        for (qi, qj) in [(1, 3), (0, 2), (3, 0)] {
            for o in Bits2::ALL {
                let proj = common::pair_projector(&common::bell(o.z_bit, o.x_bit), qi, qj, 4);
                let raw = common::apply(&proj, s.amplitudes());
                let p_ref = common::norm_sqr(&raw);
                let (p, post) = bsm_postselect(&s, qi, qj, o).unwrap();
                assert!((p - p_ref).abs() < 1e-12);
                let want = common::normalize(raw);
                for (g, w) in post.amplitudes().iter().zip(&want) {
                    assert!((g - w).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn measure_delta_frequencies_on_zero() {
    let trials = 100_000u64;
    let ones: u64 = (0..trials)
        .map(|seed| measure_delta(&StateVector::zero(), 0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().0 as u64)
        .sum();
    let sigma = (trials as f64 * 0.25).sqrt();
    assert!((ones as f64 - trials as f64 / 2.0).abs() <= 3.0 * sigma, "{ones}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn corrections_preserve_norm(s in arb_state(3), q in 0usize..3, corr in arb_correction()) {
        let out = apply_correction(&s, q, corr).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn measurements_preserve_norm(s in arb_state(3), seed in any::<u64>(), q in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, post) = bsm(&s, q, (q + 1) % 3, &mut rng).unwrap();
        prop_assert!((post.norm_sqr() - 1.0).abs() < 1e-10);
        let (_, post) = measure_delta(&s, q, &mut rng).unwrap();
        prop_assert!((post.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tensor_preserves_norm(a in arb_state(1), b in arb_state(2)) {
        let t = tensor(&[&a, &b]).unwrap();
        prop_assert_eq!(t.num_qubits(), 3);
        prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn delta_measurement_is_deterministic_on_eigenstates(
        bit in 0u8..2, theta in 0.0f64..std::f64::consts::TAU, seed in any::<u64>()
    ) {
        let s = delta_encode(bit).with_global_phase(Amplitude::from_polar(1.0, theta)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(measure_delta(&s, 0, &mut rng).unwrap().0, bit);
    }

    #[test]
    fn global_phase_is_invisible(s in arb_state(2), theta in 0.0f64..std::f64::consts::TAU) {
        let t = s.with_global_phase(Amplitude::from_polar(1.0, theta)).unwrap();
        prop_assert!(equal_up_to_global_phase(&s, &t, STATE_TOL));
    }
}

#[test]
fn bsm_completeness_over_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let amps: Vec<Amplitude> = (0..8)
            .map(|_| Amplitude::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0)))
            .collect();
        let s = StateVector::normalized(amps).unwrap();
        let total: f64 = bsm_probabilities(&s, 0, 2).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}
