mod common;

use common::{annulus, cx, random_domain};
use exq_core::analytic::RationalFunction;
use exq_core::extremal::{
    boundary_residual, fit_best_phi, monodromy_sum, riccati_residual, vacuum_solution,
    BasisConfig,
};
use exq_core::geometry::geometric_summary;
use exq_core::scalar::periodic_grid;
use exq_core::Complex64;
use proptest::prelude::*;

fn small_basis(n: usize) -> BasisConfig {
    BasisConfig {
        poly_degree: n,
        pole_order: n,
        samples: 256,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn annulus_oracle_satisfies_both_residual_forms(r2 in 0.1f64..5.0, gap in 0.05f64..5.0) {
        let r1 = r2 + gap;
        let d = annulus(r1, r2);
        let phi = RationalFunction::zero().with_pole(cx(0.0, 0.0), vec![cx(r1 * r2, 0.0)]);
        let dphi = phi.derivative();
        let lambda = r1 - r2;
        for k in 0..2 {
            for t in periodic_grid::<f64>(64) {
                prop_assert!(boundary_residual(&d, &phi, lambda, k, t).unwrap().norm() < 1e-10 * r1);
                prop_assert!(riccati_residual(&d, &dphi, lambda, k, t).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn monodromy_is_rigid_motion_invariant(
        d in random_domain(),
        rot in 0.0f64..6.3,
        sx in -5.0f64..5.0,
        sy in -5.0f64..5.0,
        lambda in 0.1f64..3.0,
    ) {
        let moved = d.transformed(Complex64::from_polar(1.0, rot), cx(sx, sy)).unwrap();
        let a = monodromy_sum(&d, lambda).unwrap();
        let b = monodromy_sum(&moved, lambda).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn vacuum_phases_rotate_uniformly(d in random_domain(), lambda in 0.2f64..3.0) {
        let vac = vacuum_solution(&d, lambda).unwrap();
        prop_assert!(vac.modulus_defect() < 1e-12);
        prop_assert!(vac.rate_defect() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fitted_norm_respects_lower_bound_and_basis_nesting(d in random_domain()) {
        let lambda_min = geometric_summary(&d).unwrap().lambda_min;
        let small = fit_best_phi(&d, &small_basis(2)).unwrap();
        let large = fit_best_phi(&d, &small_basis(5)).unwrap();
        let scale = d.diameter();
        prop_assert!(small.achieved_norm >= lambda_min - 1e-6 * scale);
        prop_assert!(large.achieved_norm >= lambda_min - 1e-6 * scale);
        prop_assert!(large.achieved_norm <= small.achieved_norm + 1e-8 * scale);
    }
}
