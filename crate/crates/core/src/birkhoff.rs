//! Birkhoff orthogonality: `x ⊥ y` iff `||x + l y|| >= ||x||` for every real `l`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::ConvexCurve;
use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::numeric::{bisect_predicate, golden_section_max, golden_section_min};
use crate::vec2::Vec2;

/// Default relative tolerance of [`is_birkhoff_orth`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Cones narrower than this (radians) are reported as a single direction pair.
pub const DEGENERATE_WIDTH: f64 = 1e-3;

/// Relative tolerance used when tracing cone boundaries.
const CONE_TOL: f64 = 1e-12;

/// `min_l ||x + l y||` and its minimizer, searched on `|l| <= 2 ||x|| / ||y||`
/// (outside that bracket the value exceeds `||x||`).
pub fn min_along(norm: &Norm, x: Vec2, y: Vec2) -> (f64, f64) {
    let bound = 2.0 * norm.eval(x) / norm.eval(y);
    golden_section_min(|l| norm.eval(x + y * l), -bound, bound, 1e-13 * bound.max(1e-300))
}

/// Relative orthogonality defect `(||x|| - min_l ||x + l y||) / ||x||`, never negative.
pub fn defect(norm: &Norm, x: Vec2, y: Vec2) -> f64 {
    let nx = norm.eval(x);
    let (_, m) = min_along(norm, x, y);
    ((nx - m) / nx).max(0.0)
}

/// Whether `x ⊥ y` up to the relative tolerance `tol`.
pub fn is_birkhoff_orth(norm: &Norm, x: Vec2, y: Vec2, tol: f64) -> Result<bool> {
    if x == Vec2::ZERO || y == Vec2::ZERO {
        return Err(Error::Domain("Birkhoff orthogonality needs non-zero vectors".into()));
    }
    Ok(defect(norm, x, y) <= tol)
}

/// Directions `y` (as angles) with `x ⊥ y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthCone {
    pub base_x: Vec2,
    /// Closed angular intervals in `[0, 2 pi)` (an interval and its antipode);
    /// a degenerate cone stores `[t, t]` twice.
    pub intervals: Vec<[f64; 2]>,
    /// Angular width of the traced interval before degenerate collapsing.
    pub width: f64,
}

impl OrthCone {
    /// True when the cone is a single line, i.e. the norm is smooth at `x`.
    pub fn is_single_pair(&self) -> bool {
        self.width <= DEGENERATE_WIDTH
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = theta.rem_euclid(2.0 * PI);
        self.intervals.iter().any(|&[a, b]| {
            let span = (b - a).rem_euclid(2.0 * PI);
            (t - a).rem_euclid(2.0 * PI) <= span + 1e-12
        })
    }
}

/// Trace the orthogonality cone of `x` by scanning `angular_resolution`
/// directions of a half-turn and bisecting the boundaries.
pub fn orth_cone(norm: &Norm, x: Vec2, angular_resolution: usize) -> Result<OrthCone> {
    if x == Vec2::ZERO {
        return Err(Error::Domain("orth_cone needs a non-zero vector".into()));
    }
    let nx = norm.eval(x);
    let score = |th: f64| {
        let (_, m) = min_along(norm, x, Vec2::from_angle(th));
        (m - nx) / nx
    };
    let inside = |th: f64| score(th) >= -CONE_TOL;

    // orthogonal directions lie strictly between the direction of x and its antipode
    let phi = x.angle();
    let m = angular_resolution.max(16);
    let step = PI / m as f64;
    let (best_k, _) = (1..m)
        .map(|k| (k, score(phi + k as f64 * step)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan");
    let (mut peak, val) = golden_section_max(
        score,
        phi + (best_k - 1) as f64 * step,
        phi + (best_k + 1) as f64 * step,
        1e-13,
    );
    if val < -CONE_TOL {
        // the flat top was missed by rounding; fall back to the scan maximum
        peak = phi + best_k as f64 * step;
        if !inside(peak) {
            return Err(Error::Internal("no orthogonal direction found".into()));
        }
    }
    let lo = bisect_predicate(inside, peak, phi, 1e-12);
    let hi = bisect_predicate(inside, peak, phi + PI, 1e-12);
    let width = hi - lo;
    let (a, b) = if width <= DEGENERATE_WIDTH {
        let mid = 0.5 * (lo + hi);
        (mid, mid)
    } else {
        (lo, hi)
    };
    let wrap = |t: f64| t.rem_euclid(2.0 * PI);
    Ok(OrthCone {
        base_x: x,
        intervals: vec![[wrap(a), wrap(b)], [wrap(a + PI), wrap(b + PI)]],
        width,
    })
}

/// The unit vector `z` with `z ⊥ x` and negative second coordinate (negative
/// first coordinate when the second vanishes). Needs a strictly convex norm.
pub fn perp_point(norm: &Norm, x: Vec2) -> Result<Vec2> {
    if !norm.is_strictly_convex() {
        return Err(Error::Precondition(format!(
            "perp_point needs a strictly convex norm, {} is not",
            norm.spec()
        )));
    }
    if (norm.eval(x) - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("perp_point expects a unit vector".into()));
    }
    // z ⊥ x means the line z + R x supports the ball at z
    let sphere = ConvexCurve::from_norm(norm);
    let mut z = sphere.support_point(x.perp());
    if z.x2 > 1e-12 || (z.x2.abs() <= 1e-12 && z.x1 > 0.0) {
        z = -z;
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;
    use crate::vec2::Mat2;

    fn norm(spec: NormSpec) -> Norm {
        Norm::new(spec).unwrap()
    }

    #[test]
    fn euclidean_and_taxicab_examples() {
        let l2 = norm(NormSpec::p(2.0));
        assert!(is_birkhoff_orth(&l2, Vec2::E1, Vec2::E2, DEFAULT_TOL).unwrap());
        assert!(!is_birkhoff_orth(&l2, Vec2::E1, Vec2::new(1.0, 1.0), DEFAULT_TOL).unwrap());
        let l1 = norm(NormSpec::p(1.0));
        assert!(is_birkhoff_orth(&l1, Vec2::E1, Vec2::new(1.0, 1.0), DEFAULT_TOL).unwrap());
        // brute-force grid agrees
        let grid_min = (0..=6000)
            .map(|k| -3.0 + k as f64 * 1e-3)
            .map(|l| l1.eval(Vec2::new(1.0 + l, l)))
            .fold(f64::INFINITY, f64::min);
        assert!((grid_min - 1.0).abs() < 1e-12);
        assert!(is_birkhoff_orth(&l1, Vec2::ZERO, Vec2::E1, DEFAULT_TOL).is_err());
    }

    #[test]
    fn euclidean_cone_is_a_line() {
        let cone = orth_cone(&norm(NormSpec::p(2.0)), Vec2::E1, 360).unwrap();
        assert!(cone.is_single_pair());
        let [a, b] = cone.intervals[0];
        assert!((a - PI / 2.0).abs() < 1e-6 && a == b);
        assert!((cone.intervals[1][0] - 1.5 * PI).abs() < 1e-6);
    }

    #[test]
    fn taxicab_cone_at_axis_point() {
        let cone = orth_cone(&norm(NormSpec::p(1.0)), Vec2::E1, 360).unwrap();
        assert!(!cone.is_single_pair());
        let [a, b] = cone.intervals[0];
        assert!((a - PI / 4.0).abs() < 1e-9, "{a}");
        assert!((b - 3.0 * PI / 4.0).abs() < 1e-9, "{b}");
        assert!(cone.contains(PI / 2.0) && cone.contains(1.5 * PI) && !cone.contains(0.1));
    }

    #[test]
    fn hexagonal_corner_cone_is_fat() {
        let cone = orth_cone(&norm(NormSpec::Hexagonal), Vec2::E2, 360).unwrap();
        assert!(cone.width > 0.1);
    }

    #[test]
    fn perp_points() {
        let z = perp_point(&norm(NormSpec::p(2.0)), Vec2::E1).unwrap();
        assert!((z - Vec2::new(0.0, -1.0)).euclid() < 1e-9);
        let z = perp_point(&norm(NormSpec::p(4.0)), Vec2::E1).unwrap();
        assert!((z - Vec2::new(0.0, -1.0)).euclid() < 1e-9);
        assert!(matches!(
            perp_point(&norm(NormSpec::Hexagonal), Vec2::E1),
            Err(Error::Precondition(_))
        ));

        let t = Mat2::new(2.0, 1.0, 0.0, 1.0);
        let push = norm(NormSpec::pushforward(NormSpec::p(2.0), t));
        let x = push.normalize(t.apply(Vec2::E1));
        let z = perp_point(&push, x).unwrap();
        let ty = t.apply(Vec2::E2);
        assert!(z.cross(ty).abs() < 1e-8 * ty.euclid());
        assert!(z.x2 < 0.0);
        assert!(is_birkhoff_orth(&push, z, x, 1e-9).unwrap());
    }

    #[test]
    fn orthogonality_is_homogeneous() {
        let n = norm(NormSpec::p(3.0));
        for k in 0..40 {
            let x = Vec2::from_angle(k as f64 * 0.17);
            let y = Vec2::from_angle(k as f64 * 0.31 + 1.0);
            let base = is_birkhoff_orth(&n, x, y, 1e-6).unwrap();
            for (a, b) in [(2.0, -3.0), (-0.5, 0.25)] {
                assert_eq!(is_birkhoff_orth(&n, x * a, y * b, 1e-6).unwrap(), base);
            }
        }
    }
}
