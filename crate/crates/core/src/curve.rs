//! Closed convex curves: unit spheres of norms and ingested polylines.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::norm::{Norm, NormSpec};
use crate::numeric::{bisect_root, golden_section_min};
use crate::vec2::{Mat2, Vec2};

/// Default tolerance for "point lies on the curve".
pub const CURVE_TOL: f64 = 1e-10;

/// Where a curve came from.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveSource {
    UnitSphere(NormSpec),
    Sampled { points: Vec<Vec2>, smooth: Vec<bool> },
}

#[derive(Clone, Debug)]
enum Shape {
    /// `center + { v : gauge(v) = 1 }` for a gauge with no flat pieces.
    Gauge { gauge: Norm, center: Vec2 },
    /// Closed anticlockwise polygon; `smooth[i]` marks vertices where the
    /// underlying curve has a tangent (dense samples of an arc).
    Polyline { points: Vec<Vec2>, smooth: Vec<bool> },
}

/// A closed convex Jordan curve together with the ambient norm used for
/// lengths and distances.
#[derive(Clone, Debug)]
pub struct ConvexCurve {
    source: CurveSource,
    ambient: Norm,
    shape: Shape,
}

/// Intersection of the curve with an axis-parallel line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LineMeet {
    Empty,
    /// Two crossing points ordered by the free coordinate (equal at a tangency).
    Points(Vec2, Vec2),
    /// The line contains a whole edge; endpoints ordered by the free coordinate.
    Segment(Vec2, Vec2),
}

/// An extreme of the curve in one coordinate direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extreme {
    Point(Vec2),
    /// Endpoints in anticlockwise order along the curve.
    Segment(Vec2, Vec2),
}

impl Extreme {
    pub fn is_point(&self) -> bool {
        matches!(self, Extreme::Point(_))
    }

    pub fn endpoints(&self) -> (Vec2, Vec2) {
        match *self {
            Extreme::Point(p) => (p, p),
            Extreme::Segment(a, b) => (a, b),
        }
    }
}

/// Leftmost, undermost, rightmost and uppermost parts of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub w: Extreme,
    pub s: Extreme,
    pub e: Extreme,
    pub n: Extreme,
}

impl Extremes {
    /// All four extremes are single points and no point is extreme in two directions.
    pub fn all_distinct_points(&self) -> bool {
        let pts: Vec<Vec2> = [self.w, self.s, self.e, self.n]
            .iter()
            .filter_map(|x| match x {
                Extreme::Point(p) => Some(*p),
                Extreme::Segment(..) => None,
            })
            .collect();
        if pts.len() != 4 {
            return false;
        }
        (0..4).all(|i| ((i + 1)..4).all(|j| (pts[i] - pts[j]).max_abs() > 1e-9))
    }
}

#[inline]
fn coord(v: Vec2, axis: usize) -> f64 {
    if axis == 0 {
        v.x1
    } else {
        v.x2
    }
}

#[inline]
fn with_coords(axis: usize, fixed: f64, free: f64) -> Vec2 {
    if axis == 0 {
        Vec2::new(fixed, free)
    } else {
        Vec2::new(free, fixed)
    }
}

impl ConvexCurve {
    /// Unit sphere of `spec`, with `spec` also the ambient norm.
    pub fn unit_sphere(spec: NormSpec) -> Result<Self> {
        Ok(Self::from_norm(&Norm::new(spec)?))
    }

    pub fn from_norm(norm: &Norm) -> Self {
        let shape = match norm.sphere_vertices() {
            Some(points) => {
                let smooth = vec![false; points.len()];
                Shape::Polyline { points, smooth }
            }
            None => Shape::Gauge {
                gauge: norm.clone(),
                center: Vec2::ZERO,
            },
        };
        ConvexCurve {
            source: CurveSource::UnitSphere(norm.spec().clone()),
            ambient: norm.clone(),
            shape,
        }
    }

    /// Polyline curve measured with `ambient`.
    pub fn sampled(points: Vec<Vec2>, smooth: Vec<bool>, ambient: NormSpec) -> Result<Self> {
        Self::sampled_with_norm(points, smooth, Norm::new(ambient)?)
    }

    fn sampled_with_norm(points: Vec<Vec2>, smooth: Vec<bool>, ambient: Norm) -> Result<Self> {
        if smooth.len() != points.len() {
            return Err(Error::config(
                "smooth",
                format!("expected {} flags, got {}", points.len(), smooth.len()),
            ));
        }
        validate_polyline(&points)?;
        Ok(ConvexCurve {
            source: CurveSource::Sampled {
                points: points.clone(),
                smooth: smooth.clone(),
            },
            ambient,
            shape: Shape::Polyline { points, smooth },
        })
    }

    /// Parse `{"points": [...], "smooth": [...], "ambient": {...}}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        let obj = v.as_object().ok_or_else(|| Error::config("$", "expected an object"))?;
        let points: Vec<Vec2> = serde_json::from_value(obj.get("points").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::config("points", e.to_string()))?;
        let smooth: Vec<bool> = match obj.get("smooth") {
            Some(s) => serde_json::from_value(s.clone()).map_err(|e| Error::config("smooth", e.to_string()))?,
            None => vec![false; points.len()],
        };
        let ambient = obj.get("ambient").ok_or_else(|| Error::config("ambient", "missing"))?;
        let ambient = NormSpec::from_value(ambient).and_then(Norm::new).map_err(|e| match e {
            Error::Config { path, reason } => Error::config(format!("ambient.{path}"), reason),
            other => other,
        })?;
        Self::sampled_with_norm(points, smooth, ambient)
    }

    /// Boundary of the convex hull of the Euclidean unit disk and `tips`,
    /// each tip outside the disk. Arcs are sampled by `arc_points` points per
    /// full turn; tips are corners, everything else is flagged smooth.
    pub fn disk_hull(tips: &[Vec2], arc_points: usize, ambient: NormSpec) -> Result<Self> {
        let mut hidden = Vec::new();
        let mut nodes: Vec<(f64, Vec2, bool)> = Vec::new();
        for (i, &p) in tips.iter().enumerate() {
            let r = p.euclid();
            if r <= 1.0 + 1e-9 {
                return Err(Error::config(
                    format!("tips[{i}]"),
                    "tip must lie outside the unit disk",
                ));
            }
            let half = (1.0 / r).acos();
            let mid = p.angle();
            hidden.push((mid, half));
            nodes.push((mid.rem_euclid(TAU), p, false));
            for a in [mid - half, mid + half] {
                nodes.push((a.rem_euclid(TAU), Vec2::from_angle(a), true));
            }
        }
        let is_hidden = |a: f64| {
            hidden.iter().any(|&(mid, half)| {
                let d = (a - mid + PI).rem_euclid(TAU) - PI;
                d.abs() < half + 1e-9
            })
        };
        for k in 0..arc_points {
            let a = TAU * k as f64 / arc_points as f64;
            if !is_hidden(a) {
                nodes.push((a, Vec2::from_angle(a), true));
            }
        }
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let points = nodes.iter().map(|n| n.1).collect();
        let smooth = nodes.iter().map(|n| n.2).collect();
        Self::sampled(points, smooth, ambient)
    }

    pub fn source(&self) -> &CurveSource {
        &self.source
    }

    pub fn ambient(&self) -> &Norm {
        &self.ambient
    }

    /// The norm whose unit sphere this is, if the curve is an untranslated sphere.
    pub fn sphere_norm(&self) -> Option<&Norm> {
        match (&self.source, &self.shape) {
            (CurveSource::UnitSphere(_), Shape::Gauge { center, .. }) if *center == Vec2::ZERO => Some(&self.ambient),
            (CurveSource::UnitSphere(_), Shape::Polyline { .. }) => Some(&self.ambient),
            _ => None,
        }
    }

    /// Polygon vertices and smoothness flags when the curve is stored as a polyline.
    pub fn polyline(&self) -> Option<(&[Vec2], &[bool])> {
        match &self.shape {
            Shape::Polyline { points, smooth } => Some((points, smooth)),
            Shape::Gauge { .. } => None,
        }
    }

    /// Gauge and center when the curve is a (translated) strictly convex sphere.
    pub fn gauge(&self) -> Option<(&Norm, Vec2)> {
        match &self.shape {
            Shape::Gauge { gauge, center } => Some((gauge, *center)),
            Shape::Polyline { .. } => None,
        }
    }

    /// A point strictly inside the enclosed region.
    pub fn interior_point(&self) -> Vec2 {
        match &self.shape {
            Shape::Gauge { center, .. } => *center,
            Shape::Polyline { points, .. } => {
                let sum = points.iter().fold(Vec2::ZERO, |acc, p| acc + *p);
                sum / points.len() as f64
            }
        }
    }

    /// Points where the curve has no tangent, known symbolically.
    pub fn corners(&self) -> Vec<Vec2> {
        match &self.shape {
            Shape::Gauge { gauge, center } => gauge.corners().into_iter().map(|c| c + *center).collect(),
            Shape::Polyline { points, smooth } => points
                .iter()
                .zip(smooth)
                .filter(|(_, s)| !**s)
                .map(|(p, _)| *p)
                .collect(),
        }
    }

    /// How far `p` is from the curve: `|gauge(p - center) - 1|` for spheres,
    /// Euclidean distance to the polygon otherwise.
    pub fn residual(&self, p: Vec2) -> f64 {
        match &self.shape {
            Shape::Gauge { gauge, center } => (gauge.eval(p - *center) - 1.0).abs(),
            Shape::Polyline { points, .. } => {
                let n = points.len();
                (0..n)
                    .map(|i| segment_distance(p, points[i], points[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.residual(p) <= tol
    }

    /// Minkowski functional of the enclosed region about [`Self::interior_point`]:
    /// below 1 inside, 1 on the curve, convex.
    pub fn gauge_at(&self, p: Vec2) -> f64 {
        match &self.shape {
            Shape::Gauge { gauge, center } => gauge.eval(p - *center),
            Shape::Polyline { points, .. } => {
                let o = self.interior_point();
                let q = p - o;
                let n = points.len();
                (0..n)
                    .map(|i| {
                        let a = points[i] - o;
                        let normal = -(points[(i + 1) % n] - points[i]).perp();
                        q.dot(normal) / a.dot(normal)
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// Endpoints `(lo, hi)` of the chord cut by the line `o + R dir`, ordered so
    /// that `hi - lo` is a non-negative multiple of `dir`; `None` if the line
    /// misses the region.
    pub fn chord(&self, o: Vec2, dir: Vec2) -> Option<(Vec2, Vec2)> {
        let f = |r: f64| self.gauge_at(o + dir * r) - 1.0;
        let c = self.interior_point();
        let spread = self
            .materialize(360)
            .iter()
            .fold(0.0f64, |m, p| m.max((*p - c).euclid()));
        let reach = 2.0 * ((o - c).euclid() + spread) / dir.euclid();
        let (mid, fmin) = golden_section_min(f, -reach, reach, 1e-14 * reach);
        if fmin > 0.0 {
            return None;
        }
        if fmin == 0.0 {
            let p = o + dir * mid;
            return Some((p, p));
        }
        let lo = bisect_root(f, -reach, mid, 1e-16 * reach)?;
        let hi = bisect_root(f, mid, reach, 1e-16 * reach)?;
        Some((o + dir * lo, o + dir * hi))
    }

    /// Point of the curve on the ray from the interior point at polar angle `theta`.
    pub fn radial_point(&self, theta: f64) -> Vec2 {
        match &self.shape {
            Shape::Gauge { gauge, center } => *center + gauge.radial(theta),
            Shape::Polyline { points, .. } => {
                let o = self.interior_point();
                let d = Vec2::from_angle(theta);
                let n = points.len();
                for i in 0..n {
                    let a = points[i] - o;
                    let b = points[(i + 1) % n] - o;
                    let ca = a.cross(d);
                    let cb = d.cross(b);
                    if ca >= 0.0 && cb >= 0.0 {
                        let e = b - a;
                        let denom = d.cross(e);
                        if denom.abs() > 0.0 {
                            let s = a.cross(e) / denom;
                            if s > 0.0 {
                                return o + d * s;
                            }
                        }
                    }
                }
                o
            }
        }
    }

    /// Sample of `n` curve points at equally spaced polar angles (polyline
    /// vertices are returned as stored).
    pub fn materialize(&self, n: usize) -> Vec<Vec2> {
        match &self.shape {
            Shape::Polyline { points, .. } => points.clone(),
            Shape::Gauge { .. } => (0..n)
                .map(|k| self.radial_point(-PI + TAU * k as f64 / n as f64))
                .collect(),
        }
    }

    /// Point maximizing `d . p` over the curve (one of them if the maximum is an edge).
    pub fn support_point(&self, d: Vec2) -> Vec2 {
        match &self.shape {
            Shape::Polyline { points, .. } => *points
                .iter()
                .max_by(|a, b| a.dot(d).total_cmp(&b.dot(d)))
                .expect("non-empty polyline"),
            Shape::Gauge { .. } => {
                let n = 720;
                let step = TAU / n as f64;
                let best = (0..n)
                    .map(|k| k as f64 * step)
                    .max_by(|&a, &b| self.radial_point(a).dot(d).total_cmp(&self.radial_point(b).dot(d)))
                    .unwrap_or(0.0);
                let (theta, _) = golden_section_min(|t| -self.radial_point(t).dot(d), best - step, best + step, 1e-12);
                let Shape::Gauge { gauge, center } = &self.shape else {
                    unreachable!()
                };
                // the value is flat at the maximum; settle the location where the
                // outward normal swings past d
                let turn = |t: f64| gauge.gradient(gauge.radial(t)).cross(d);
                let (mut lo, mut hi) = (best - step, best + step);
                if turn(lo) > 0.0 && turn(hi) < 0.0 {
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        let s = turn(mid);
                        if s > 0.0 {
                            lo = mid;
                        } else if s < 0.0 {
                            hi = mid;
                        } else {
                            return *center + gauge.radial(mid);
                        }
                    }
                    return *center + gauge.radial(0.5 * (lo + hi));
                }
                self.radial_point(theta)
            }
        }
    }

    /// Intersection with the vertical line `x1 = x`.
    pub fn meet_vertical(&self, x: f64) -> LineMeet {
        self.axis_meet(0, x)
    }

    /// Intersection with the horizontal line `x2 = y`.
    pub fn meet_horizontal(&self, y: f64) -> LineMeet {
        self.axis_meet(1, y)
    }

    fn axis_meet(&self, axis: usize, value: f64) -> LineMeet {
        match &self.shape {
            Shape::Polyline { points, .. } => polyline_axis_meet(points, axis, value),
            Shape::Gauge { gauge, center } => {
                let free_axis = 1 - axis;
                let u = value - coord(*center, axis);
                let c_free = coord(*center, free_axis);
                let r = 2.0 * gauge.ball_radii().1;
                let g = |s: f64| gauge.eval(with_coords(axis, u, s)) - 1.0;
                let (smin, gmin) = golden_section_min(g, -r, r, 1e-14);
                if gmin > 1e-13 {
                    return LineMeet::Empty;
                }
                if gmin >= -1e-13 {
                    let p = with_coords(axis, value, smin + c_free);
                    return LineMeet::Points(p, p);
                }
                let lo = bisect_root(g, -r, smin, 1e-15).unwrap_or(smin);
                let hi = bisect_root(g, smin, r, 1e-15).unwrap_or(smin);
                LineMeet::Points(
                    with_coords(axis, value, lo + c_free),
                    with_coords(axis, value, hi + c_free),
                )
            }
        }
    }

    /// Leftmost (W), undermost (S), rightmost (E) and uppermost (N) points or segments.
    pub fn extreme_points(&self) -> Extremes {
        Extremes {
            w: self.extreme(-Vec2::E1),
            s: self.extreme(-Vec2::E2),
            e: self.extreme(Vec2::E1),
            n: self.extreme(Vec2::E2),
        }
    }

    fn extreme(&self, d: Vec2) -> Extreme {
        match &self.shape {
            Shape::Gauge { .. } => Extreme::Point(self.support_point(d)),
            Shape::Polyline { points, .. } => {
                let n = points.len();
                let scale = points.iter().fold(0.0f64, |m, p| m.max(p.max_abs()));
                let best = points.iter().map(|p| p.dot(d)).fold(f64::NEG_INFINITY, f64::max);
                let on: Vec<bool> = points.iter().map(|p| p.dot(d) >= best - 1e-12 * scale).collect();
                let start = (0..n).find(|&i| on[i] && !on[(i + n - 1) % n]).unwrap_or(0);
                let mut end = start;
                while on[(end + 1) % n] && (end + 1) % n != start {
                    end = (end + 1) % n;
                }
                if end == start {
                    Extreme::Point(points[start])
                } else {
                    Extreme::Segment(points[start], points[end])
                }
            }
        }
    }

    /// Same curve translated by `offset`; the ambient norm is unchanged.
    pub fn translated(&self, offset: Vec2) -> ConvexCurve {
        let shape = match &self.shape {
            Shape::Gauge { gauge, center } => Shape::Gauge {
                gauge: gauge.clone(),
                center: *center + offset,
            },
            Shape::Polyline { points, smooth } => Shape::Polyline {
                points: points.iter().map(|p| *p + offset).collect(),
                smooth: smooth.clone(),
            },
        };
        let source = match &shape {
            Shape::Polyline { points, smooth } => CurveSource::Sampled {
                points: points.clone(),
                smooth: smooth.clone(),
            },
            Shape::Gauge { .. } => self.source.clone(),
        };
        ConvexCurve {
            source,
            ambient: self.ambient.clone(),
            shape,
        }
    }

    /// Image under the invertible matrix `m`, measured with `ambient`.
    pub fn linear_image(&self, m: Mat2, ambient: Norm) -> Result<ConvexCurve> {
        if m.inverse().is_none() {
            return Err(Error::Domain("singular matrix".into()));
        }
        let shape = match &self.shape {
            Shape::Gauge { gauge, center } => Shape::Gauge {
                gauge: Norm::new(NormSpec::pushforward(gauge.spec().clone(), m))?,
                center: m.apply(*center),
            },
            Shape::Polyline { points, smooth } => {
                let mut points: Vec<Vec2> = points.iter().map(|p| m.apply(*p)).collect();
                let mut smooth = smooth.clone();
                if m.det() < 0.0 {
                    points.reverse();
                    smooth.reverse();
                }
                Shape::Polyline { points, smooth }
            }
        };
        let source = match &shape {
            Shape::Polyline { points, smooth } => CurveSource::Sampled {
                points: points.clone(),
                smooth: smooth.clone(),
            },
            Shape::Gauge { gauge, .. } => CurveSource::UnitSphere(gauge.spec().clone()),
        };
        Ok(ConvexCurve { source, ambient, shape })
    }

    /// Whether `p` on the curve implies `-p` on the curve.
    pub fn is_centrally_symmetric(&self) -> bool {
        match &self.shape {
            Shape::Gauge { center, .. } => center.max_abs() <= 1e-12,
            Shape::Polyline { points, .. } => points.iter().all(|p| self.residual(-*p) <= 1e-9),
        }
    }
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = b - a;
    let len2 = e.dot(e);
    let s = if len2 > 0.0 {
        ((p - a).dot(e) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - a.lerp(b, s)).euclid()
}

fn polyline_axis_meet(points: &[Vec2], axis: usize, value: f64) -> LineMeet {
    let n = points.len();
    let free = 1 - axis;
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p.max_abs()));
    let tol = 1e-12 * scale;
    let mut hits: Vec<f64> = Vec::new();
    let mut on_line: Option<(f64, f64)> = None;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        let (dp, dq) = (coord(p, axis) - value, coord(q, axis) - value);
        if dp.abs() <= tol && dq.abs() <= tol {
            let (a, b) = (coord(p, free), coord(q, free));
            let (lo, hi) = on_line.unwrap_or((f64::INFINITY, f64::NEG_INFINITY));
            on_line = Some((lo.min(a.min(b)), hi.max(a.max(b))));
        } else if dp.abs() <= tol {
            hits.push(coord(p, free));
        } else if dq.abs() <= tol {
            hits.push(coord(q, free));
        } else if dp * dq < 0.0 {
            let s = dp / (dp - dq);
            hits.push(coord(p, free) + s * (coord(q, free) - coord(p, free)));
        }
    }
    if let Some((lo, hi)) = on_line {
        return LineMeet::Segment(with_coords(axis, value, lo), with_coords(axis, value, hi));
    }
    if hits.is_empty() {
        return LineMeet::Empty;
    }
    let lo = hits.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    LineMeet::Points(with_coords(axis, value, lo), with_coords(axis, value, hi))
}

/// Check an anticlockwise convex closed polyline: finite, pairwise distinct,
/// non-negative turns and total turning of one full revolution.
pub fn validate_polyline(points: &[Vec2]) -> Result<()> {
    let n = points.len();
    if n < 3 {
        return Err(Error::config("points", "need at least 3 points"));
    }
    for (i, p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::config(format!("points[{i}]"), "non-finite coordinate"));
        }
    }
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p.max_abs())).max(1e-300);
    for i in 0..n {
        let e = points[(i + 1) % n] - points[i];
        if e.max_abs() <= 1e-14 * scale {
            return Err(Error::Validation(format!("points {i} and {} coincide", (i + 1) % n)));
        }
    }
    let mut turning = 0.0;
    for i in 0..n {
        let e0 = points[(i + 1) % n] - points[i];
        let e1 = points[(i + 2) % n] - points[(i + 1) % n];
        let cross = e0.cross(e1);
        if cross < -1e-12 * e0.euclid() * e1.euclid() {
            return Err(Error::Validation(format!(
                "polyline is not convex and anticlockwise at point {}",
                (i + 1) % n
            )));
        }
        turning += cross.atan2(e0.dot(e1));
    }
    if (turning - TAU).abs() > 1e-6 {
        return Err(Error::Validation(format!(
            "total turning is {turning:.6} rad, expected one anticlockwise revolution"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(spec: NormSpec) -> ConvexCurve {
        ConvexCurve::unit_sphere(spec).unwrap()
    }

    #[test]
    fn linf_sphere_is_the_square() {
        let c = sphere(NormSpec::p_inf());
        let (pts, smooth) = c.polyline().unwrap();
        assert_eq!(pts.len(), 4);
        assert!(smooth.iter().all(|s| !s));
        for v in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            assert!(pts.contains(&Vec2::new(v.0, v.1)));
        }
    }

    #[test]
    fn hexagonal_sphere_vertices_have_norm_one() {
        let c = sphere(NormSpec::Hexagonal);
        let (pts, _) = c.polyline().unwrap();
        assert_eq!(pts.len(), 6);
        for p in pts {
            assert_eq!(c.ambient().eval(*p), 1.0);
        }
        validate_polyline(pts).unwrap();
    }

    #[test]
    fn circle_materializes_within_tolerance() {
        let c = sphere(NormSpec::p(2.0));
        for p in c.materialize(1000) {
            assert!((p.euclid() - 1.0).abs() <= CURVE_TOL);
        }
        validate_polyline(&c.materialize(1000)).unwrap();
    }

    #[test]
    fn extremes_of_square_circle_and_hexagon() {
        let sq = sphere(NormSpec::p_inf()).extreme_points();
        assert_eq!(sq.w, Extreme::Segment(Vec2::new(-1.0, 1.0), Vec2::new(-1.0, -1.0)));
        assert_eq!(sq.s, Extreme::Segment(Vec2::new(-1.0, -1.0), Vec2::new(1.0, -1.0)));
        let circ = sphere(NormSpec::p(2.0)).extreme_points();
        for (ex, want) in [
            (circ.w, -Vec2::E1),
            (circ.s, -Vec2::E2),
            (circ.e, Vec2::E1),
            (circ.n, Vec2::E2),
        ] {
            let Extreme::Point(p) = ex else { panic!("{ex:?}") };
            assert!((p - want).euclid() < 1e-9);
        }
        assert!(circ.all_distinct_points());
        let hex = sphere(NormSpec::Hexagonal).extreme_points();
        assert_eq!(hex.e, Extreme::Segment(Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0)));
        assert!(!hex.all_distinct_points());
    }

    #[test]
    fn axis_meets() {
        let circ = sphere(NormSpec::p(2.0));
        let LineMeet::Points(a, b) = circ.meet_vertical(0.6) else {
            panic!()
        };
        assert!((a - Vec2::new(0.6, -0.8)).euclid() < 1e-12);
        assert!((b - Vec2::new(0.6, 0.8)).euclid() < 1e-12);
        assert_eq!(circ.meet_horizontal(1.5), LineMeet::Empty);
        let sq = sphere(NormSpec::p_inf());
        assert_eq!(
            sq.meet_vertical(1.0),
            LineMeet::Segment(Vec2::new(1.0, -1.0), Vec2::new(1.0, 1.0))
        );
        assert_eq!(
            sq.meet_horizontal(0.25),
            LineMeet::Points(Vec2::new(-1.0, 0.25), Vec2::new(1.0, 0.25))
        );
    }

    #[test]
    fn rejects_clockwise_and_nonconvex() {
        let mut pts = vec![
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ];
        validate_polyline(&pts).unwrap();
        pts.reverse();
        assert!(validate_polyline(&pts).is_err());
        let dent = vec![
            Vec2::new(1.0, 0.0),
            Vec2::new(0.1, 0.1),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ];
        assert!(validate_polyline(&dent).is_err());
    }

    #[test]
    fn disk_hull_has_corner_tips_only() {
        let c = ConvexCurve::disk_hull(&[Vec2::new(2.0, 2.0), Vec2::new(-2.0, -2.0)], 720, NormSpec::p(1.0)).unwrap();
        let corners = c.corners();
        assert_eq!(corners.len(), 2);
        let ex = c.extreme_points();
        assert_eq!(ex.e, Extreme::Point(Vec2::new(2.0, 2.0)));
        assert_eq!(ex.n, Extreme::Point(Vec2::new(2.0, 2.0)));
        assert_eq!(ex.w, Extreme::Point(Vec2::new(-2.0, -2.0)));
    }

    #[test]
    fn json_ingestion() {
        let c = ConvexCurve::from_json_str(
            r#"{"points":[[1,0],[0,1],[-1,0],[0,-1]],"smooth":[false,false,false,false],"ambient":{"family":"p","p":1}}"#,
        )
        .unwrap();
        assert_eq!(c.corners().len(), 4);
        let err = ConvexCurve::from_json_str(r#"{"points":[[1,0],[0,1],[-1,0]],"ambient":{"family":"p","p":0}}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "ambient.p"));
    }

    #[test]
    fn translation_and_symmetry() {
        let c = sphere(NormSpec::p(3.0));
        assert!(c.is_centrally_symmetric());
        let t = c.translated(Vec2::new(3.0, -2.0));
        assert!(!t.is_centrally_symmetric());
        assert!(t.contains(Vec2::new(4.0, -2.0), 1e-12));
        let h = sphere(NormSpec::Hexagonal).translated(Vec2::new(3.0, -2.0));
        assert!(h.contains(Vec2::new(4.0, -1.0), 1e-12));
    }
}
