mod common;

use std::f64::consts::TAU;
use common::cx;
use exq_core::analytic::MobiusMap;
use exq_core::appendix::{
    annulus_oracle, circularity, mobius_pair_identities, mu_samples, IdentityCheck, MobiusConformal, MuMap,
};
use exq_core::extremal::{extremality_report, BasisConfig, Verdict};
use exq_core::geometry::{Contour, Domain};
use exq_core::Complex64;
use proptest::prelude::*;

fn eccentric_map() -> impl Strategy<Value = (MobiusConformal<f64>, f64, f64)> {
    (1.5f64..4.0, 0.2f64..0.8, 1.5f64..3.0, 0.0f64..TAU, 0.5f64..2.0, 0.0f64..TAU, 0.0f64..0.5)
        .prop_map(|(r1, frac, far, arg_a, b, arg_b, c)| {
            let a = Complex64::from_polar(far * r1, arg_a);
            let m = MobiusMap::general(a, Complex64::from_polar(b, arg_b), cx(c, -c)).unwrap();
            (MobiusConformal::new(m).unwrap(), r1, frac * r1)
        })
}

fn fourier_curve() -> impl Strategy<Value = Contour<f64>> {
    (
        -1.0f64..1.0,
        -1.0f64..1.0,
        0.5f64..2.0,
        prop::collection::vec((-0.05f64..0.05, -0.05f64..0.05), 3),
    )
        .prop_filter_map("not a simple curve", |(x, y, r, pert)| {
            let modes = [(0, cx(x, y)), (1, cx(r, 0.0))]
                .into_iter()
                .chain([-1, 2, -2].into_iter().zip(pert).map(|(j, (a, b))| (j, cx(a * r, b * r))));
            Contour::new(modes).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_holds_for_random_radii(a in 0.1f64..10.0, b in 0.1f64..10.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let oracle = annulus_oracle(a.max(b), a.min(b)).unwrap();
        let res = oracle.residuals(512).unwrap();
        prop_assert!(res.boundary < 1e-10, "{:?}", res);
        prop_assert!(res.riccati < 1e-10, "{:?}", res);
        prop_assert!(res.lambda_formula < 1e-10, "{:?}", res);
    }

    #[test]
    fn mu_inverts_on_the_inner_boundary((h, r1, r2) in eccentric_map()) {
        let domain = h.annulus_preimage(r1, r2).unwrap();
        let mu = MuMap::new(h, r1, r2).unwrap();
        let inner: Vec<Complex64> = domain.component(1).grid_points().iter().step_by(8).copied().collect();
        for &z in &inner {
            let back = mu.inverse_apply(mu.apply(z).unwrap()).unwrap();
            prop_assert!((back - z).norm() < 1e-10 * domain.diameter());
        }
        let s = mu_samples(&mu, cx(1.0, 0.0), &inner, 1e-2 * domain.diameter()).unwrap();
        prop_assert!(s.root_residual < 1e-8);
    }

    #[test]
    fn mobius_pair_identities_hold(
        curve in fourier_curve(),
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (0.3f64..3.0, 0.0f64..TAU),
        c_offset in (0.0f64..TAU, prop_oneof![0.0f64..0.2, 2.5f64..4.0]),
    ) {
        let c = curve.modes()[0].1 + Complex64::from_polar(c_offset.1 * curve.diameter() / 2.0, c_offset.0);
        prop_assume!(curve.winding(c).is_some());
        let (d, _) = curve.distance(c);
        prop_assume!(d > 0.1 * curve.diameter());
        let mu = MobiusMap::general(cx(a.0, a.1), Complex64::from_polar(b.0, b.1), c).unwrap();
        let res = mobius_pair_identities(&mu, &curve).unwrap();
        prop_assert!(res.curvature_difference < 1e-6, "{:?}", res);
        prop_assert!(res.checks(1e-6).iter().all(IdentityCheck::passed), "{:?}", res);
        prop_assert!(res.polar_cartesian < 1e-8, "{:?}", res);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn extremal_annuli_are_round_and_concentric(
        r1 in 1.5f64..3.0,
        frac in 0.3f64..0.7,
        shift in (-1.0f64..1.0, -1.0f64..1.0),
    ) {
        let center = cx(shift.0, shift.1);
        let domain = Domain::new(
            Contour::circle(center, r1).unwrap(),
            vec![Contour::circle(center, frac * r1).unwrap()],
            None,
        ).unwrap();
        let config = BasisConfig { poly_degree: 6, pole_order: 6, samples: 256 };
        let report = extremality_report(&domain, &config).unwrap();
        prop_assert_eq!(report.verdict, Verdict::Extremal);
        let round = circularity(&domain).unwrap();
        prop_assert!(round.is_concentric_annulus(1e-4, 1e-6), "{:?}", round);
    }
}
