//! Randomized invariants of the geometry kernel.

mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hull_of_hull_is_itself(seed in any::<u64>(), d in 2usize..=4) {
        let p = common::random_polytope(seed, d);
        prop_assert!(common::hull_idempotence(&p).is_ok(), "{:?}", common::hull_idempotence(&p));
    }

    #[test]
    fn double_polar_is_identity(seed in any::<u64>(), d in 2usize..=4) {
        let p = common::random_polytope(seed, d);
        let r = common::duality_round_trip(&p);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn euler_in_three_dimensions(seed in any::<u64>()) {
        let p = common::random_polytope(seed, 3);
        let r = common::euler_relation(&p);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn mean_width_formula(seed in any::<u64>(), d in 2usize..=3) {
        let p = common::random_polytope(seed, d);
        let r = common::mean_width_matches_quadrature(&p, seed, 20_000);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn volume_formula(seed in any::<u64>(), d in 2usize..=3) {
        let p = common::random_polytope(seed, d);
        let r = common::volume_matches_rejection(&p, seed, 160_000);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
