//! Orchard distances on random quadratic slopes.

use diophant::cf::RealSpec;
use diophant::orchard::{min_blocking_radius, visibility, DistanceMode, OrchardScene, RadiusModel, Verdict};
use diophant::Constraint;
use num_rational::BigRational;
use proptest::prelude::*;

fn slope() -> impl Strategy<Value = (RealSpec, f64)> {
    (0i64..4, 2i64..60, 1i64..5).prop_filter_map("square", |(p, d, r)| {
        let s = (d as f64).sqrt() as i64;
        (s * s != d && (s + 1) * (s + 1) != d).then(|| (RealSpec::surd(p, d, r).unwrap(), (p as f64 + (d as f64).sqrt()) / r as f64))
    })
}

fn scene(mode: DistanceMode, rho: BigRational) -> OrchardScene {
    OrchardScene::new(
        Constraint::new(3, 2, 1, 1).unwrap(),
        RadiusModel::Uniform(rho),
        400,
        BigRational::from_integer(2.into()),
        mode,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euclidean_is_vertical_over_stretch((x, xf) in slope()) {
        let rho = BigRational::new(1.into(), 10.into());
        let v = min_blocking_radius(&scene(DistanceMode::Vertical, rho.clone()), &x).unwrap().unwrap();
        let e = min_blocking_radius(&scene(DistanceMode::Euclidean, rho), &x).unwrap().unwrap();
        prop_assert!((v.mid_f64() / e.mid_f64() - (1.0 + xf * xf).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn visibility_threshold_is_min_radius((x, _) in slope(), num in 1i64..200) {
        let rho = BigRational::new(num.into(), 1000.into());
        for mode in [DistanceMode::Vertical, DistanceMode::Euclidean] {
            let s = scene(mode, rho.clone());
            let m = min_blocking_radius(&s, &x).unwrap().unwrap();
            prop_assume!(!m.contains(&rho));
            let visible = visibility(&s, &x).unwrap().verdict == Verdict::Visible;
            prop_assert_eq!(visible, m.lo_gt(&rho));
        }
    }
}
