//! Reproducibility of the seeded sample streams and trials.

use diophant::cf::Real;
use diophant::metric_lab::{khintchine_trial, uniform_survival, SampledReal};
use diophant::uniform::PsiSpec;
use diophant::Constraint;
use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_depend_only_on_seed_and_index(seed in any::<u64>(), i in 0u64..1_000_000) {
        let x = SampledReal::unit(seed, i);
        let y = SampledReal::unit(seed, i);
        prop_assert_eq!(x.digits(12).unwrap(), y.digits(12).unwrap());
        let e = x.enclose(100).unwrap();
        let f = x.enclose(200).unwrap();
        prop_assert!(e.contains_enclosure(&f));
        prop_assert!(e.lo() >= BigRational::from_integer(0.into()) && e.hi() <= BigRational::from_integer(1.into()));
    }

    #[test]
    fn trial_outcomes_extend(seed in any::<u64>()) {
        let c = Constraint::new(2, 2, 1, 1).unwrap();
        let psi = PsiSpec::power_log(BigRational::new(1.into(), 2.into()), Rational64::from_integer(2), Rational64::from_integer(0)).unwrap();
        let blocks = [(16, 32), (32, 64)];
        let small = khintchine_trial(&c, &psi, &blocks, 40, seed).unwrap();
        let large = khintchine_trial(&c, &psi, &blocks, 80, seed).unwrap();
        prop_assert_eq!(&small.outcomes[..], &large.outcomes[..40]);
        let s = uniform_survival(&c, &PsiSpec::reciprocal(), 30, &[100, 300], 1, seed).unwrap();
        prop_assert!(s.fractions[0].fraction >= s.fractions[1].fraction);
    }
}
