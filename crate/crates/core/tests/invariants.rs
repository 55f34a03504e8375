use proptest::prelude::*;
use rand::Rng;

use skewcoh_core::channels::{
    incoherence_defect, k_invariant_channel, random_incoherent, KrausChannel,
};
use skewcoh_core::interferometry::{
    scheme2_sweep, swap_test_polarization, sweep_reconstruct, taylor_error,
};
use skewcoh_core::linalg::{computational_basis, ComplexMatrix};
use skewcoh_core::measures::{
    lower_bound, lower_bound_spectral, skew_information, skew_information_spectral, variance,
};
use skewcoh_core::operators::{gell_mann, swap_operator};
use skewcoh_core::random::{
    hs_random_density, random_integer_charge_with, random_observable, random_state_any, seeded_rng,
};
use skewcoh_core::shots::{sample_polarization, sample_projective};
use skewcoh_core::state::{overlap, partial_trace, purity, DensityMatrix, Observable};

fn pair(d: usize, seed: u64) -> (DensityMatrix, Observable) {
    let mut rng = seeded_rng(seed, 0);
    let rho = random_state_any(d, &mut rng);
    let k = random_observable(d, rng.random(), None).unwrap();
    (rho, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_holds(d in 2usize..=6, seed in any::<u64>()) {
        let (rho, k) = pair(d, seed);
        let il = lower_bound(&rho, &k).unwrap();
        let i = skew_information(&rho, &k).unwrap();
        let v = variance(&rho, &k).unwrap();
        prop_assert!(il >= 0.0);
        prop_assert!(il <= i + 1e-9);
        prop_assert!(i <= v + 1e-9);
    }

    #[test]
    fn commutator_and_spectral_forms_agree(d in 2usize..=6, seed in any::<u64>()) {
        let (rho, k) = pair(d, seed);
        prop_assert!((skew_information(&rho, &k).unwrap() - skew_information_spectral(&rho, &k).unwrap()).abs() <= 1e-10);
        prop_assert!((lower_bound(&rho, &k).unwrap() - lower_bound_spectral(&rho, &k).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn measures_scale_quadratically(d in 2usize..=5, seed in any::<u64>(), c in -3.0f64..3.0) {
        let (rho, k) = pair(d, seed);
        let scaled = Observable::new(k.matrix().scale_real(c)).unwrap();
        let i = skew_information(&rho, &k).unwrap();
        prop_assert!((skew_information(&rho, &scaled).unwrap() - c * c * i).abs() <= 1e-9 * (1.0 + c * c));
    }

    #[test]
    fn partial_trace_recovers_factors(da in 2usize..=4, db in 2usize..=4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let a = random_state_any(da, &mut rng);
        let b = random_state_any(db, &mut rng);
        let ab = a.tensor(&b);
        prop_assert!(partial_trace(&ab, &[da, db], &[0]).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-12);
        prop_assert!(partial_trace(&ab, &[da, db], &[1]).unwrap().matrix().max_abs_diff(b.matrix()) <= 1e-12);
    }

    #[test]
    fn swap_expectation_is_overlap(d in 2usize..=5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let a = random_state_any(d, &mut rng);
        let b = random_state_any(d, &mut rng);
        let ev = swap_operator(d).trace_product(&a.matrix().kron(b.matrix())).re;
        prop_assert!((ev - overlap(&a, &b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn bloch_round_trip(d in 2usize..=5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let rho = random_state_any(d, &mut rng);
        let basis = gell_mann(d).unwrap();
        let x = basis.bloch_vector(rho.matrix()).unwrap();
        let back = basis.state_from_bloch(&x).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
        let expect = 1.0 / d as f64 + (d as f64 - 1.0) / d as f64 * x.norm().powi(2);
        prop_assert!((purity(&rho) - expect).abs() <= 1e-12);
    }

    #[test]
    fn incoherent_channels_are_incoherent_and_trace_preserving(d in 2usize..=5, n in 1usize..=4, seed in any::<u64>()) {
        let ch = random_incoherent(d, n, seed).unwrap();
        prop_assert!(ch.completeness_defect() <= 1e-10);
        prop_assert!(incoherence_defect(&ch, &computational_basis(d)) <= 1e-10);
        let rho = hs_random_density(d, d, seed ^ 1).unwrap();
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn k_invariant_channels_never_raise_coherence(d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let ka = random_integer_charge_with(d, 2, &mut rng).unwrap();
        let kb = random_integer_charge_with(2, 2, &mut rng).unwrap();
        let tau = DensityMatrix::basis_state(2, 0);
        let tau = DensityMatrix::new(tau.matrix().in_basis(&kb.eigenvectors().adjoint())).unwrap();
        let (ch, _) = k_invariant_channel(&ka, &kb, &tau, seed).unwrap();
        let rho = random_state_any(d, &mut rng);
        let before = skew_information(&rho, &ka).unwrap();
        let after = skew_information(&ch.apply(&rho).unwrap(), &ka).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn scheme1_polarization_factorizes(d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let alpha = random_state_any(2, &mut rng);
        let a = random_state_any(d, &mut rng);
        let b = random_state_any(d, &mut rng);
        let sens = alpha.matrix()[(0, 0)].re - alpha.matrix()[(1, 1)].re;
        let m = swap_test_polarization(&alpha, &a, &b).unwrap();
        prop_assert!((m - sens * overlap(&a, &b).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn taylor_error_shrinks_quadratically(seed in any::<u64>()) {
        let (rho, k) = pair(3, seed);
        let e1 = taylor_error(&rho, &k, 1e-3).unwrap();
        prop_assert!(e1 <= 1e-5);
        if e1 > 1e-9 {
            let e2 = taylor_error(&rho, &k, 5e-4).unwrap();
            prop_assert!(e2 / e1 <= 0.75);
        }
    }

    #[test]
    fn ancilla_sweep_recovers_overlap(d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let a = random_state_any(d, &mut rng);
        let b = random_state_any(d, &mut rng);
        let v = sweep_reconstruct(&scheme2_sweep(&a, &b, &computational_basis(d)).unwrap()).unwrap();
        prop_assert!((v - overlap(&a, &b).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn shot_counts_are_reproducible(d in 2usize..=6, n in 1u64..50_000, seed in any::<u64>(), stream in 0u64..8) {
        let mut rng = seeded_rng(seed, 1);
        let mut probs: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        let s: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= s);
        let a = sample_projective(&probs, n, seed, stream).unwrap();
        let b = sample_projective(&probs, n, seed, stream).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.counts.iter().sum::<u64>(), n);
    }

    #[test]
    fn polarization_estimate_is_bounded(p in 0.0f64..=1.0, n in 1u64..10_000, seed in any::<u64>()) {
        let b = sample_polarization(p, n, seed, 0).unwrap();
        prop_assert!(b.estimate >= -1.0 && b.estimate <= 1.0);
        prop_assert!(b.stderr >= 0.0);
    }
}

#[test]
fn hadamard_creates_coherence_from_incoherent_input() {
    let h = KrausChannel::unitary(skewcoh_core::operators::hadamard()).unwrap();
    let rho = DensityMatrix::basis_state(2, 0);
    let k = Observable::sigma_z();
    let after = skew_information(&h.apply(&rho).unwrap(), &k).unwrap();
    assert!(skew_information(&rho, &k).unwrap() < 1e-12);
    assert!((after - 1.0).abs() < 1e-10);
    assert!(incoherence_defect(&h, &computational_basis(2)) > 0.1);
}

#[test]
fn swap_operator_is_a_permutation() {
    for d in 2..=5 {
        let v = swap_operator(d);
        assert!(v.matmul(&v).max_abs_diff(&ComplexMatrix::identity(d * d)) < 1e-15);
        assert!((v.trace().re - d as f64).abs() < 1e-15);
    }
}
