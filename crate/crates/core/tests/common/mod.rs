#![allow(dead_code)]

use exq_core::geometry::{Contour, Domain};
use exq_core::Complex64;
use proptest::prelude::*;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn annulus(r1: f64, r2: f64) -> Domain<f64> {
    Domain::new(
        Contour::circle(cx(0.0, 0.0), r1).unwrap(),
        vec![Contour::circle(cx(0.0, 0.0), r2).unwrap()],
        None,
    )
    .unwrap()
}

/// Smooth star-shaped outer contour of radius about `r`, optionally with an
/// elliptical hole near the origin.
pub fn random_domain() -> impl Strategy<Value = Domain<f64>> {
    (
        0.5f64..3.0,
        prop::collection::vec((-0.04f64..0.04, -0.04f64..0.04), 3),
        prop::option::of((0.15f64..0.35, 0.6f64..1.0, 0.0f64..3.1, -0.1f64..0.1, -0.1f64..0.1)),
    )
        .prop_filter_map("invalid domain", |(r, pert, hole)| {
            let modes = [(1, cx(r, 0.0))]
                .into_iter()
                .chain(
                    [-1, 2, 3]
                        .into_iter()
                        .zip(pert)
                        .map(|(j, (a, b))| (j, cx(a * r, b * r))),
                );
            let outer = Contour::new(modes).ok()?;
            let inners = match hole {
                None => vec![],
                Some((a, ratio, rot, x, y)) => {
                    let e = Contour::ellipse(cx(0.0, 0.0), a * r, ratio * a * r).ok()?;
                    vec![e
                        .transformed(Complex64::from_polar(1.0, rot), cx(x * r, y * r))
                        .ok()?]
                }
            };
            Domain::new(outer, inners, None).ok()
        })
}
