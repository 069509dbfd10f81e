//! Witness traces, Dirichlet scans and the badly approximable bound on random inputs.

use diophant::cf::RealSpec;
use diophant::uniform::{badly_witness, dirichlet_scan, witness, PsiSpec};
use diophant::Constraint;
use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

fn surd() -> impl Strategy<Value = RealSpec> {
    (0i64..6, 2i64..200, 1i64..5).prop_filter_map("square", |(p, d, r)| {
        let s = (d as f64).sqrt() as i64;
        (s * s != d && (s + 1) * (s + 1) != d).then(|| RealSpec::surd(p, d, r).unwrap())
    })
}

fn constraint() -> impl Strategy<Value = Constraint> {
    prop::sample::select(vec![(2u64, 2u64, 1u64, 1u64), (3, 4, 1, 2), (5, 3, 2, 1), (1, 1, 0, 0), (4, 2, 1, 1)])
        .prop_map(|(a, b, r, s)| Constraint::new(a, b, r, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_invariants(x in surd(), c in constraint(), q in 1u64..100_000) {
        let q = BigRational::from_integer((q + c.ab()).into());
        let t = witness(&x, &c, &q, &PsiSpec::reciprocal()).unwrap();
        prop_assert!(t.checks.all(), "{:?}", t.checks);
        prop_assert!(t.bound_value.hi_le(&t.constant));
        prop_assert!(BigRational::from_integer(t.denominator.clone()) <= q);
    }

    #[test]
    fn larger_psi_fails_less(x in surd(), c in constraint()) {
        let small = dirichlet_scan(&x, &c, &PsiSpec::reciprocal(), 1, 400).unwrap();
        let big = PsiSpec::power_log(BigRational::from_integer(4.into()), Rational64::from_integer(1), Rational64::from_integer(0)).unwrap();
        let large = dirichlet_scan(&x, &c, &big, 1, 400).unwrap();
        prop_assert!(small.undecided.is_empty() && large.undecided.is_empty());
        prop_assert!(large.failing.iter().all(|q| small.failing.contains(q)));
    }

    #[test]
    fn badly_bound_holds(x in surd(), q in 4u64..3000) {
        let c = Constraint::new(2, 2, 1, 1).unwrap();
        let w = badly_witness(&x, None, &c, &BigRational::from_integer(q.into())).unwrap();
        prop_assert!(w.holds);
    }
}
