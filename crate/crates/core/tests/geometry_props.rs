mod common;

use std::f64::consts::TAU;

use common::{cx, random_domain};
use exq_core::geometry::{geometric_summary, isoperimetric_slack, turning, Contour};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn isoperimetric_slack_is_nonnegative(d in random_domain()) {
        let p = geometric_summary(&d).unwrap().perimeter;
        prop_assert!(isoperimetric_slack(&d).unwrap() >= -1e-9 * p);
    }

    #[test]
    fn every_component_turns_once(d in random_domain()) {
        for c in d.components() {
            prop_assert!((turning(c) - TAU).abs() < 1e-8);
        }
    }

    #[test]
    fn tangent_square_is_conjugate_ratio(d in random_domain(), t in 0.0f64..TAU) {
        for c in d.components() {
            let u = c.tangent(t).unwrap().conj();
            let g = c.derivative(t, 1);
            prop_assert!((u * u - g.conj() / g).norm() < 1e-12);
            prop_assert!((u.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_is_invariant_under_similarity(
        d in random_domain(),
        scale in 0.2f64..5.0,
        rot in 0.0f64..TAU,
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
    ) {
        let base = geometric_summary(&d).unwrap().lambda_min;
        let moved = d.transformed(cx(0.0, 0.0) + num_complex::Complex::from_polar(scale, rot), cx(x, y)).unwrap();
        let lambda = geometric_summary(&moved).unwrap().lambda_min;
        prop_assert!((lambda - scale * base).abs() < 1e-10 * scale * base);
    }
}

#[test]
fn sample_doubling_converges() {
    let c = Contour::new([(1, cx(1.0, 0.0)), (3, cx(0.08, 0.02)), (-2, cx(0.03, -0.05))]).unwrap();
    let coarse = c.resampled(64).unwrap();
    let fine = c.resampled(128).unwrap();
    let reference = c.resampled(1024).unwrap();
    let (lc, lf, lr) = (coarse.length(), fine.length(), reference.length());
    assert!((lf - lr).abs() <= (lc - lr).abs() + 1e-14);
    assert!((lf - lr).abs() < 1e-12 * lr);
    assert!((fine.signed_area() - reference.signed_area()).abs() < 1e-12);
}
