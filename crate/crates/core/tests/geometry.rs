use std::f64::consts::{FRAC_PI_2, PI, TAU};

use normlab::birkhoff::{is_birkhoff_orth, orth_cone, perp_point};
use normlab::{ConvexCurve, Error, Extreme, Mat2, NaturalParam, Norm, NormSpec, Side, Vec2};

fn n(spec: NormSpec) -> Norm {
    Norm::new(spec).unwrap()
}

fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
    (a - b).max_abs() <= tol
}

#[test]
fn norm_values() {
    let hex = n(NormSpec::Hexagonal);
    assert_eq!(hex.eval(Vec2::new(1.0, 1.0)), 1.0);
    assert_eq!(hex.eval(Vec2::new(1.0, -1.0)), 2.0);
    assert_eq!(n(NormSpec::p(2.0)).eval(Vec2::ZERO), 0.0);
    let diamond = n(NormSpec::PolygonGauge {
        vertices: vec![Vec2::E1, Vec2::E2, -Vec2::E1, -Vec2::E2],
    });
    assert!((diamond.eval(Vec2::new(1.0, 1.0)) - 2.0).abs() < 1e-12);
}

#[test]
fn invalid_specs_are_rejected() {
    let asym = NormSpec::PolygonGauge {
        vertices: vec![Vec2::E1, Vec2::E2, Vec2::new(-2.0, 0.0), -Vec2::E2],
    };
    assert!(matches!(Norm::new(asym), Err(Error::Config { .. })));
    let singular = NormSpec::pushforward(NormSpec::p(2.0), Mat2::new(1.0, 2.0, 2.0, 4.0));
    assert!(matches!(Norm::new(singular), Err(Error::Config { .. })));
    assert!(NormSpec::from_json_str(r#"{"family": "p", "p": 0.5}"#)
        .and_then(Norm::new)
        .is_err());
}

#[test]
fn strict_convexity() {
    assert!(n(NormSpec::p(2.0)).is_strictly_convex());
    assert!(!n(NormSpec::Hexagonal).is_strictly_convex());
    let m = Mat2::new(2.0, 1.0, 0.0, 1.0);
    assert!(n(NormSpec::pushforward(NormSpec::p(1.5), m)).is_strictly_convex());
}

#[test]
fn hexagon_vertices() {
    let hex = n(NormSpec::Hexagonal);
    let v = hex.sphere_vertices().unwrap();
    assert_eq!(v.len(), 6);
    for p in [
        (1.0, 0.0),
        (1.0, 1.0),
        (0.0, 1.0),
        (-1.0, 0.0),
        (-1.0, -1.0),
        (0.0, -1.0),
    ] {
        let p = Vec2::new(p.0, p.1);
        assert!(v.iter().any(|q| close(*q, p, 1e-12)), "missing vertex {p:?}");
        assert!((hex.eval(p) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn natural_parameterization() {
    let circle = ConvexCurve::unit_sphere(NormSpec::p(2.0)).unwrap();
    let pc = NaturalParam::new(&circle, Vec2::E1, 100_000).unwrap();
    assert!((pc.period() - TAU).abs() < 1e-6);
    assert!(close(pc.eval(pc.period() / 4.0), Vec2::E2, 1e-6));
    assert!(close(pc.eval(0.0), Vec2::E1, 1e-12));
    assert!(close(pc.side_derivative(0.0, Side::Right), Vec2::E2, 1e-6));

    let square = ConvexCurve::unit_sphere(NormSpec::p_inf()).unwrap();
    let ps = NaturalParam::new(&square, Vec2::new(1.0, 1.0), 512).unwrap();
    assert!((ps.period() - 8.0).abs() < 1e-9);
    assert!(close(ps.eval(2.0), Vec2::new(-1.0, 1.0), 1e-9));
    assert!(close(ps.side_derivative(0.0, Side::Right), -Vec2::E1, 1e-9));

    let diamond = ConvexCurve::unit_sphere(NormSpec::p(1.0)).unwrap();
    assert!((NaturalParam::new(&diamond, Vec2::E1, 512).unwrap().period() - 8.0).abs() < 1e-9);

    let off = NaturalParam::new(&circle, Vec2::new(2.0, 0.0), 512);
    assert!(matches!(off, Err(Error::Domain(_))));
}

#[test]
fn hexagon_corner_has_two_side_derivatives() {
    let hex = ConvexCurve::unit_sphere(NormSpec::Hexagonal).unwrap();
    let p = NaturalParam::new(&hex, Vec2::E2, 512).unwrap();
    let (l, r) = (p.side_derivative(0.0, Side::Left), p.side_derivative(0.0, Side::Right));
    assert!((l - r).max_abs() > 0.5);
}

#[test]
fn coordinate_extremes() {
    let circle = ConvexCurve::unit_sphere(NormSpec::p(2.0)).unwrap().extreme_points();
    assert!(circle.all_distinct_points());
    let Extreme::Point(w) = circle.w else {
        panic!("circle W should be a point")
    };
    assert!(close(w, -Vec2::E1, 1e-9));

    let hex = ConvexCurve::unit_sphere(NormSpec::Hexagonal).unwrap().extreme_points();
    let (a, b) = hex.e.endpoints();
    assert!(!hex.e.is_point());
    assert!(close(a, Vec2::E1, 1e-9) && close(b, Vec2::new(1.0, 1.0), 1e-9));

    let square = ConvexCurve::unit_sphere(NormSpec::p_inf()).unwrap().extreme_points();
    assert!(!square.w.is_point() && !square.s.is_point());
}

#[test]
fn birkhoff_orthogonality() {
    let l2 = n(NormSpec::p(2.0));
    let l1 = n(NormSpec::p(1.0));
    assert!(is_birkhoff_orth(&l2, Vec2::E1, Vec2::E2, 1e-9).unwrap());
    assert!(!is_birkhoff_orth(&l2, Vec2::E1, Vec2::new(1.0, 1.0), 1e-9).unwrap());
    assert!(is_birkhoff_orth(&l1, Vec2::E1, Vec2::new(1.0, 1.0), 1e-9).unwrap());
    assert!(is_birkhoff_orth(&l2, Vec2::ZERO, Vec2::E2, 1e-9).is_err());
}

#[test]
fn orthogonality_cones() {
    let circle = orth_cone(&n(NormSpec::p(2.0)), Vec2::E1, 720).unwrap();
    assert!(circle.is_single_pair());
    assert!((circle.intervals[0][0] - FRAC_PI_2).abs() < 1e-6);
    assert!((circle.intervals[1][0] - 3.0 * FRAC_PI_2).abs() < 1e-6);

    let diamond = orth_cone(&n(NormSpec::p(1.0)), Vec2::E1, 720).unwrap();
    assert!(!diamond.is_single_pair());
    for th in [PI / 4.0 + 0.01, FRAC_PI_2, 3.0 * PI / 4.0 - 0.01] {
        assert!(diamond.contains(th) && diamond.contains(th + PI));
    }
    assert!(!diamond.contains(0.3));

    assert!(!orth_cone(&n(NormSpec::Hexagonal), Vec2::E2, 720)
        .unwrap()
        .is_single_pair());
}

#[test]
fn perpendicular_points() {
    assert!(close(
        perp_point(&n(NormSpec::p(2.0)), Vec2::E1).unwrap(),
        -Vec2::E2,
        1e-9
    ));
    assert!(close(
        perp_point(&n(NormSpec::p(4.0)), Vec2::E1).unwrap(),
        -Vec2::E2,
        1e-9
    ));
    let t = Mat2::new(1.3, 0.4, -0.2, 0.9);
    let pushed = n(NormSpec::pushforward(NormSpec::p(2.0), t));
    let x = pushed.normalize(t.apply(Vec2::E1));
    let y = perp_point(&pushed, x).unwrap();
    assert!(y.x2 < 0.0);
    assert!(is_birkhoff_orth(&pushed, x, y, 1e-9).unwrap());
    assert!(perp_point(&n(NormSpec::Hexagonal), Vec2::E1).is_err());
}
