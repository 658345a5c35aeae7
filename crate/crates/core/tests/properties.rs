//! Randomized invariants spanning several modules.

use aqec::algebras::{random_catalog_algebra, Projector};
use aqec::channels::random_channel;
use aqec::correctability::{delta_estimate, exact_check, optimal_error};
use aqec::io::{algebra_from_str, algebra_to_value, channel_from_str, channel_to_value, to_canonical_string};
use aqec::random::{haar_unitary, random_hermitian, rng_from_seed};
use aqec::{compose, diamond_distance, AlgebraStructure, CMatrix, Channel};
use proptest::prelude::*;

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a.clone() - b.clone()).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn channel_documents_round_trip(seed in any::<u64>(), din in 1usize..5, dout in 1usize..5, rank in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let n = random_channel(din, dout, rank, &mut rng);
        let back = channel_from_str(&to_canonical_string(&channel_to_value(&n))).unwrap();
        for (a, b) in n.kraus().iter().zip(back.kraus()) {
            prop_assert!(max_diff(a, b) <= 1e-12);
        }
    }

    #[test]
    fn algebra_documents_round_trip(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = rng_from_seed(seed);
        let alg = random_catalog_algebra(d, &mut rng);
        let back = algebra_from_str(&to_canonical_string(&algebra_to_value(&alg))).unwrap();
        prop_assert!(alg.basis().span_distance(&back.basis()) <= 1e-12);
    }

    #[test]
    fn projector_channels_are_idempotent_and_trace_preserving(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let alg = random_catalog_algebra(d, &mut rng);
        let x = random_hermitian(d, &mut rng);
        for which in [Projector::Algebra, Projector::Commutant] {
            let p = alg.projector_channel(which).unwrap();
            prop_assert!(p.tp_defect() <= 1e-9);
            let once = p.apply(&x).unwrap();
            prop_assert!(max_diff(&p.apply(&once).unwrap(), &once) <= 1e-9);
            // Self-adjoint with respect to the Hilbert–Schmidt product.
            prop_assert!(max_diff(&p.apply_dual(&x).unwrap(), &once) <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn diamond_distance_is_a_bounded_symmetric_metric(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = random_channel(d, d, 2, &mut rng);
        let b = random_channel(d, d, 2, &mut rng);
        let c = random_channel(d, d, 1, &mut rng);
        let ab = diamond_distance(&a, &b, 1e-8).unwrap();
        let ba = diamond_distance(&b, &a, 1e-8).unwrap();
        let ac = diamond_distance(&a, &c, 1e-8).unwrap();
        let cb = diamond_distance(&c, &b, 1e-8).unwrap();
        prop_assert!((0.0..=2.0).contains(&ab));
        prop_assert!((ab - ba).abs() <= 1e-6);
        prop_assert!(ab <= ac + cb + 1e-6);
    }

    #[test]
    fn unitary_channels_are_exactly_and_optimally_correctable(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let n = Channel::unitary(&haar_unitary(d, &mut rng)).unwrap();
        let alg = AlgebraStructure::full(d);
        prop_assert!(exact_check(&n, &alg, 1e-8).unwrap().0);
        prop_assert!(delta_estimate(&n, &alg, 1e-8).unwrap() <= 1e-6);
        let (e, r) = optimal_error(&n, &alg, 1e-8).unwrap();
        prop_assert!(e <= 1e-5);
        let id = Channel::identity(d);
        prop_assert!(diamond_distance(&compose(&r, &n).unwrap(), &id, 1e-8).unwrap() <= 1e-5);
    }

    #[test]
    fn estimates_stay_in_range(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (n, alg) = aqec::correctability::random_instance(&mut rng);
        let delta = delta_estimate(&n, &alg, 1e-8).unwrap();
        let (e, r) = optimal_error(&n, &alg, 1e-8).unwrap();
        prop_assert!((-1e-7..=2.0 + 1e-7).contains(&delta));
        prop_assert!((0.0..=2.0).contains(&e));
        prop_assert!(r.tp_defect() <= 1e-9);
        prop_assert_eq!((r.dim_in(), r.dim_out()), (n.dim_out(), n.dim_in()));
    }
}
