use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wignerkit::genmaps::{depolarizing, pseudo_depolarizing, wigner_map};
use wignerkit::matrix::{
    ginibre, haar_unitary, random_hermitian, random_rank_k_projection, spectral_decomp,
    unitarity_defect, validate_projection, ComplexMatrix,
};
use wignerkit::superop::SuperOp;
use wignerkit::wigner::{choi_least_eigenvalue, extract_unitary, lemma1_projections, Variant};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn variant(transpose: bool) -> Variant {
    if transpose {
        Variant::Transpose
    } else {
        Variant::Direct
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn spectral_reconstruction(n in 1usize..=8, seed in any::<u64>(), scale in 0.01f64..100.0) {
        let h = random_hermitian(n, &mut rng(seed)).scale_real(scale);
        let d = spectral_decomp(&h).unwrap();
        let tol = 1e-11 * h.frobenius_norm().max(1.0);
        prop_assert!(d.reconstruct().distance(&h) <= tol);
        prop_assert!(unitarity_defect(&d.eigenvectors) <= 1e-11);
        prop_assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn involutions_are_exact(n in 1usize..=8, seed in any::<u64>()) {
        let m = ginibre(n, &mut rng(seed));
        prop_assert_eq!(m.transpose().transpose(), m.clone());
        prop_assert_eq!(m.conjugate().conjugate(), m);
    }

    #[test]
    fn projection_trace_matches_rank(n in 2usize..=8, k_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize % (n - 1);
        let p = random_rank_k_projection(n, k, seed).unwrap();
        prop_assert_eq!(p.rank(), k);
        prop_assert!((p.matrix().trace() - Complex64::new(k as f64, 0.0)).norm() <= n as f64 * p.tol());
        let m = p.matrix();
        prop_assert!((&(m * m) - m).frobenius_norm() <= 10.0 * p.tol());
        prop_assert!((m - &m.adjoint()).frobenius_norm() <= 10.0 * p.tol());
    }

    #[test]
    fn apply_is_linear(n in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let map = SuperOp::new(n, ginibre(n * n, &mut r)).unwrap();
        let (a, b) = (ginibre(n, &mut r), ginibre(n, &mut r));
        let (alpha, beta) = (ginibre(1, &mut r)[(0, 0)], ginibre(1, &mut r)[(0, 0)]);
        let lhs = map.apply(&(&a.scale(alpha) + &b.scale(beta))).unwrap();
        let rhs = &map.apply(&a).unwrap().scale(alpha) + &map.apply(&b).unwrap().scale(beta);
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * (a.frobenius_norm() + b.frobenius_norm()));
    }

    #[test]
    fn choi_round_trip_is_a_permutation(n in 1usize..=5, seed in any::<u64>()) {
        let map = SuperOp::new(n, ginibre(n * n, &mut rng(seed))).unwrap();
        let choi = map.to_choi();
        prop_assert_eq!(SuperOp::from_choi(&choi), map.clone());
        let mut a: Vec<(u64, u64)> = map.matrix().inner().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect();
        let mut b: Vec<(u64, u64)> = choi.matrix().inner().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_choi_spectrum(n in 2usize..=5, seed in any::<u64>(), transpose in any::<bool>()) {
        let u = haar_unitary(n, seed);
        let map = wigner_map(&u, variant(transpose));
        let least = choi_least_eigenvalue(&map);
        if transpose {
            prop_assert!((least + 1.0).abs() <= 1e-9);
        } else {
            // rank-one PSD with trace n
            let d = spectral_decomp(map.to_choi().matrix()).unwrap();
            prop_assert!(least >= -1e-9);
            prop_assert!((d.eigenvalues[n * n - 1] - n as f64).abs() <= 1e-9);
            prop_assert!(d.eigenvalues[n * n - 2].abs() <= 1e-9);
        }
    }

    #[test]
    fn inverse_of_conjugation_is_adjoint_conjugation(n in 1usize..=5, seed in any::<u64>()) {
        let u = haar_unitary(n, seed);
        let inverse = wigner_map(&u, Variant::Direct).invert().unwrap();
        let expected = wigner_map(&u.adjoint(), Variant::Direct);
        prop_assert!(inverse.matrix().distance(expected.matrix()) <= 1e-10);
        let product = inverse.compose(&wigner_map(&u, Variant::Direct)).unwrap();
        prop_assert!(product.matrix().distance(SuperOp::identity(n).matrix()) <= 1e-10 * (n * n) as f64);
    }

    #[test]
    fn global_phase_does_not_change_the_map(n in 1usize..=6, seed in any::<u64>(), alpha in -10.0f64..10.0, transpose in any::<bool>()) {
        let u = haar_unitary(n, seed);
        let v = variant(transpose);
        let a = wigner_map(&u, v);
        let b = wigner_map(&u.with_phase(alpha), v);
        // Equal up to the rounding of the phase multiplication.
        prop_assert!(a.matrix().distance(b.matrix()) <= 1e-14 * n as f64);
        let fa = extract_unitary(&a, 1e-6).unwrap();
        let fb = extract_unitary(&b, 1e-6).unwrap();
        prop_assert_eq!(fa.variant, fb.variant);
        prop_assert!(fa.unitary.matrix().distance(fb.unitary.matrix()) <= 1e-12);
    }

    #[test]
    fn lemma_identity_holds(n in 2usize..=8, k_frac in 0.0f64..1.0, which in 0usize..8, seed in any::<u64>()) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize % (n - 1);
        let d = lemma1_projections(n, k, &haar_unitary(n, seed), which % n).unwrap();
        prop_assert!(d.residual <= 1e-12);
        prop_assert!(d.max_commutator() <= 1e-12);
        prop_assert!(d.projections.iter().all(|p| p.rank() == k));
        prop_assert_eq!(d.p.rank(), 1);
    }

    #[test]
    fn rank_one_images_are_recovered(n in 2usize..=7, k_frac in 0.0f64..1.0, seed in any::<u64>(), transpose in any::<bool>()) {
        // For a Wigner map the lemma's combination of φ(P_j) is again a rank-one projection.
        let k = 1 + ((n - 1) as f64 * k_frac) as usize % (n - 1);
        let map = wigner_map(&haar_unitary(n, seed), variant(transpose));
        let d = lemma1_projections(n, k, &haar_unitary(n, seed ^ 0x5eed), 0).unwrap();
        let images: Vec<ComplexMatrix> = d.projections.iter().map(|p| map.apply(p.matrix()).unwrap()).collect();
        let recovered = validate_projection(&d.combine(&images), 1e-10).unwrap();
        prop_assert_eq!(recovered.rank(), 1);
    }

    #[test]
    fn covariant_maps_commute_with_conjugation(n in 2usize..=6, seed in any::<u64>(), param in 0.0f64..1.0) {
        let v = haar_unitary(n, seed);
        let vm = v.matrix();
        let a = ginibre(n, &mut rng(seed ^ 1));
        for map in [depolarizing(n, param).unwrap(), pseudo_depolarizing(n, 3.0 * param).unwrap()] {
            let lhs = map.apply(&(&(vm * &a) * &vm.adjoint())).unwrap();
            let rhs = &(vm * &map.apply(&a).unwrap()) * &vm.adjoint();
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
        }
    }
}
