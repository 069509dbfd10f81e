//! The gap spectrum of `{i xi}` against the greedy prediction.

use diophant::cf::RealSpec;
use diophant::three_distance::{gaps_direct, verify};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn at_most_three_lengths(p in -10i64..10, d in 2i64..300, r in 1i64..8, q in 1u64..3000) {
        prop_assume!(((d as f64).sqrt() as i64).pow(2) != d);
        let x = RealSpec::surd(p, d, r).unwrap();
        let s = gaps_direct(&x, q).unwrap();
        prop_assert_eq!(s.total(), q + 1);
        prop_assert!(s.present().count() <= 3);
        prop_assert!(s.largest_is_sum());
        prop_assert!(verify(&x, q).unwrap().matches);
    }
}
