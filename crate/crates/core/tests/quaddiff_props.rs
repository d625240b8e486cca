mod common;

use std::f64::consts::TAU;
use common::{annulus, cx};
use exq_core::analytic::RationalFunction;
use exq_core::extremal::{fit_best_phi, BasisConfig};
use exq_core::quaddiff::{
    argument_principle_count, boundary_metric_check, find_zeros, stokes_graph, ArcKind, Disk,
    Rect, TraceOptions,
};
use exq_core::Complex64;
use proptest::prelude::*;

fn from_roots(roots: &[Complex64]) -> RationalFunction<f64> {
    let mut c = vec![cx(1.0, 0.0)];
    for r in roots {
        let mut next = vec![cx(0.0, 0.0); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += *a;
            next[k] -= *a * *r;
        }
        c = next;
    }
    RationalFunction::polynomial(c)
}

fn roots_strategy(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-0.9f64..0.9, -0.9f64..0.9), 1..=max)
        .prop_map(|v| v.into_iter().map(|(a, b)| cx(a, b)).collect::<Vec<_>>())
        .prop_filter("separated roots", |v| {
            v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| (*a - *b).norm() > 0.05))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_multiplicities_match_global_count(roots in roots_strategy(5)) {
        let f = from_roots(&roots);
        let rect = Rect::square(cx(0.0, 0.0), 1.3).unwrap();
        let zeros = find_zeros(&f, &rect).unwrap();
        let total: usize = zeros.iter().map(|z| z.order).sum();
        prop_assert_eq!(total, argument_principle_count(&f, &rect).unwrap());
        prop_assert_eq!(total, roots.len());
        for r in &roots {
            prop_assert!(zeros.iter().any(|z| (z.location - *r).norm() < 1e-9));
        }
        for z in &zeros {
            prop_assert!(f.eval(z.location).unwrap().norm() < 1e-10 * 2.6);
        }
    }

    #[test]
    fn arcs_per_zero_and_drift(roots in roots_strategy(2), rot in 0.0f64..TAU) {
        let mut f = from_roots(&roots);
        for a in f.poly.iter_mut() {
            *a *= Complex64::from_polar(1.0, rot);
        }
        let disk = Disk { center: cx(0.0, 0.0), radius: 1.5 };
        let g = stokes_graph(&f, &disk, &TraceOptions::default()).unwrap();
        for (id, z) in g.zeros.iter().enumerate() {
            prop_assert_eq!(g.arcs_from(id, ArcKind::Plus).count(), z.order + 2);
            prop_assert_eq!(g.arcs_from(id, ArcKind::Minus).count(), z.order + 2);
        }
        prop_assert!(g.max_relative_drift() < 1e-8);
        prop_assert!(g.bisector_defect() < 1e-3);
    }
}

#[test]
fn metric_identity_with_fitted_phi_on_extremal_annuli() {
    for (r1, r2) in [(2.0, 1.0), (3.0, 1.0), (3.0, 2.0)] {
        let d = annulus(r1, r2);
        let fit = fit_best_phi(&d, &BasisConfig::default()).unwrap();
        let res = boundary_metric_check(&d, &fit.phi, r1 - r2).unwrap();
        assert!(res.iter().all(|r| *r < 1e-9), "{res:?}");
    }
}
