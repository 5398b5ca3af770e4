//! Invariants of the exact oracles and of the sampled closest-point map.

use approx::assert_relative_eq;
use lnelab::nearfield::{ClosestPointMap, ExactField};
use lnelab::probes::{estimate_lne_verdict, Lab};
use lnelab::{geom, Shape, ShapeSpec, SpatialIndex};
use proptest::prelude::*;

fn planar_specs() -> Vec<ShapeSpec> {
    vec![
        ShapeSpec::circle(1.0),
        ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.5]),
        ShapeSpec::cusp(1.0),
    ]
}

fn point2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 2)
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_one_lipschitz(k in 0usize..3, x in point2(), y in point2()) {
        let shape = Shape::new(&planar_specs()[k]).unwrap();
        let f = ExactField::new(&shape).unwrap();
        prop_assert!((f.distance(&x) - f.distance(&y)).abs() <= geom::dist(&x, &y) + 1e-9);
    }

    #[test]
    fn cone_distance_is_one_lipschitz(x in point3(), y in point3()) {
        let shape = Shape::new(&ShapeSpec::cone(1.0)).unwrap();
        let f = ExactField::new(&shape).unwrap();
        prop_assert!((f.distance(&x) - f.distance(&y)).abs() <= geom::dist(&x, &y) + 1e-9);
    }

    #[test]
    fn nearest_points_lie_on_the_set(k in 0usize..3, x in point2()) {
        let shape = Shape::new(&planar_specs()[k]).unwrap();
        let near = shape.exact_nearest(&x).unwrap();
        prop_assert!(!near.members.is_empty());
        for m in &near.members {
            prop_assert!(shape.contains(m), "{m:?} off the set");
            assert_relative_eq!(geom::dist(m, &x), near.distance, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn cusp_distance_is_reflection_symmetric(x in point2()) {
        let shape = Shape::new(&ShapeSpec::cusp(1.0)).unwrap();
        let up = shape.exact_nearest(&x).unwrap().distance;
        let down = shape.exact_nearest(&[x[0], -x[1]]).unwrap().distance;
        assert_relative_eq!(up, down, max_relative = 1e-12, epsilon = 1e-15);
    }

    #[test]
    fn cusp_distance_scales_with_the_set(x in point2(), s in 0.25..4.0f64) {
        let unit = Shape::new(&ShapeSpec::cusp(1.0)).unwrap();
        let big = Shape::new(&ShapeSpec::cusp(1.0).with("scale", s)).unwrap();
        let d = unit.exact_nearest(&x).unwrap().distance;
        let ds = big.exact_nearest(&geom::scale(&x, s)).unwrap().distance;
        assert_relative_eq!(ds, s * d, max_relative = 1e-8, epsilon = 1e-12);
    }

    #[test]
    fn cusp_medial_locus_scales_with_the_set(x in point2(), s in 0.25..4.0f64) {
        let unit = Shape::new(&ShapeSpec::cusp(1.0)).unwrap().exact_medial().unwrap();
        let big = Shape::new(&ShapeSpec::cusp(1.0).with("scale", s)).unwrap().exact_medial().unwrap();
        assert_relative_eq!(big.distance(&geom::scale(&x, s)), s * unit.distance(&x), max_relative = 1e-6, epsilon = 1e-9);
        assert_relative_eq!(unit.scaled(s).distance(&geom::scale(&x, s)), s * unit.distance(&x), max_relative = 1e-9, epsilon = 1e-12);
    }
}

#[test]
fn cloud_distance_brackets_the_exact_distance() {
    let shape = Shape::new(&ShapeSpec::circle(1.0)).unwrap();
    let cloud = shape.sample(2_000, 11).unwrap();
    let index = SpatialIndex::build(&cloud).unwrap();
    let exact = ExactField::new(&shape).unwrap();
    let h = cloud.fill_distance;
    proptest!(ProptestConfig::with_cases(128), |(x in point2())| {
        let (e, c) = (exact.distance(&x), index.distance(&x));
        prop_assert!(c >= e - 1e-12 && c <= e + h + 1e-12, "exact {e}, cloud {c}, h {h}");
    });
}

#[test]
fn lne_constants_are_scale_invariant() {
    let radii = [0.1, 0.05, 0.025];
    let run = |s: f64| {
        let lab = Lab::new(&ShapeSpec::cusp(0.25).with("scale", s), 8_001, 3).unwrap();
        let scaled: Vec<f64> = radii.iter().map(|r| r * s).collect();
        estimate_lne_verdict(lab.graph(), &[0.0, 0.0], &scaled, 8, 1).unwrap().constants
    };
    let (one, two) = (run(1.0), run(2.0));
    for (a, b) in one.iter().zip(&two) {
        assert_relative_eq!(*a, *b, max_relative = 0.05);
    }
}
