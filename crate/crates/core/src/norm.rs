//! Two-dimensional norms described symbolically and evaluated as gauges of
//! their unit balls.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::vec2::{Mat2, Vec2};

/// Exponent of an `l_p` norm. Infinity is its own variant rather than a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

/// Symbolic description of a norm on the plane.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    PNorm(Exponent),
    /// Gauge of an origin-symmetric convex polygon, vertices listed anticlockwise.
    PolygonGauge {
        vertices: Vec<Vec2>,
    },
    /// `max(|a|,|b|)` when `ab >= 0`, `|a|+|b|` otherwise.
    Hexagonal,
    /// Gauge of the intersection of equal-radius Euclidean disks.
    DiskIntersection {
        centers: Vec<Vec2>,
        radius: f64,
    },
    /// `||v|| = ||M^{-1} v||_base`, so that `M` is a linear isometry from the base norm.
    Pushforward {
        base: Box<NormSpec>,
        matrix: Mat2,
    },
}

impl NormSpec {
    pub fn p(p: f64) -> Self {
        NormSpec::PNorm(Exponent::Finite(p))
    }

    pub fn p_inf() -> Self {
        NormSpec::PNorm(Exponent::Infinity)
    }

    pub fn pushforward(base: NormSpec, matrix: Mat2) -> Self {
        NormSpec::Pushforward {
            base: Box::new(base),
            matrix,
        }
    }

    /// Regular `n`-gon gauge with a vertex at `(1, 0)`; `n` must be even.
    pub fn regular_polygon(n: usize) -> Self {
        let vertices = (0..n)
            .map(|k| Vec2::from_angle(2.0 * PI * k as f64 / n as f64))
            .collect();
        NormSpec::PolygonGauge { vertices }
    }

    /// Intersection of `n` disks of radius `radius` centered on the circle of
    /// radius `offset`, the first center on the positive first axis.
    pub fn symmetric_disks(n: usize, offset: f64, radius: f64) -> Self {
        let centers = (0..n)
            .map(|k| Vec2::from_angle(2.0 * PI * k as f64 / n as f64) * offset)
            .collect();
        NormSpec::DiskIntersection { centers, radius }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        parse_spec(v, "")
    }

    pub fn to_value(&self) -> Value {
        match self {
            NormSpec::PNorm(Exponent::Finite(p)) => json!({"family": "p", "p": p}),
            NormSpec::PNorm(Exponent::Infinity) => json!({"family": "p", "p": "inf"}),
            NormSpec::PolygonGauge { vertices } => json!({
                "family": "polygon",
                "vertices": vertices.iter().map(|v| [v.x1, v.x2]).collect::<Vec<_>>(),
            }),
            NormSpec::Hexagonal => json!({"family": "hexagonal"}),
            NormSpec::DiskIntersection { centers, radius } => json!({
                "family": "disk_intersection",
                "centers": centers.iter().map(|v| [v.x1, v.x2]).collect::<Vec<_>>(),
                "radius": radius,
            }),
            NormSpec::Pushforward { base, matrix } => json!({
                "family": "pushforward",
                "matrix": matrix.rows,
                "base": base.to_value(),
            }),
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            NormSpec::PNorm(Exponent::Finite(p)) => format!("l{p}"),
            NormSpec::PNorm(Exponent::Infinity) => "linf".to_string(),
            NormSpec::PolygonGauge { vertices } => format!("polygon{}", vertices.len()),
            NormSpec::Hexagonal => "hexagonal".to_string(),
            NormSpec::DiskIntersection { centers, .. } => format!("disks{}", centers.len()),
            NormSpec::Pushforward { base, .. } => format!("push({})", base.label()),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        NormSpec::from_value(&v).map_err(serde::de::Error::custom)
    }
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

pub(crate) fn parse_vec2(v: &Value, path: &str) -> Result<Vec2> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::config(path, "expected a pair [x, y]"))?;
    let x = arr[0]
        .as_f64()
        .ok_or_else(|| Error::config(format!("{path}[0]"), "expected a number"))?;
    let y = arr[1]
        .as_f64()
        .ok_or_else(|| Error::config(format!("{path}[1]"), "expected a number"))?;
    Ok(Vec2::new(x, y))
}

fn parse_points(v: Option<&Value>, path: &str) -> Result<Vec<Vec2>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| Error::config(path, "expected an array of pairs"))?;
    arr.iter()
        .enumerate()
        .map(|(i, p)| parse_vec2(p, &format!("{path}[{i}]")))
        .collect()
}

pub(crate) fn parse_matrix(v: Option<&Value>, path: &str) -> Result<Mat2> {
    let rows = v
        .and_then(Value::as_array)
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::config(path, "expected [[a, b], [c, d]]"))?;
    let r0 = parse_vec2(&rows[0], &format!("{path}[0]"))?;
    let r1 = parse_vec2(&rows[1], &format!("{path}[1]"))?;
    Ok(Mat2::new(r0.x1, r0.x2, r1.x1, r1.x2))
}

fn parse_spec(v: &Value, path: &str) -> Result<NormSpec> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::config(if path.is_empty() { "$" } else { path }, "expected an object"))?;
    let family = obj
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::config(join(path, "family"), "missing or not a string"))?;
    match family {
        "p" => {
            let p_path = join(path, "p");
            match obj.get("p") {
                Some(Value::String(s)) if s == "inf" => Ok(NormSpec::p_inf()),
                Some(Value::Number(n)) => Ok(NormSpec::p(n.as_f64().unwrap_or(f64::NAN))),
                _ => Err(Error::config(p_path, "expected a number or \"inf\"")),
            }
        }
        "polygon" => Ok(NormSpec::PolygonGauge {
            vertices: parse_points(obj.get("vertices"), &join(path, "vertices"))?,
        }),
        "hexagonal" => Ok(NormSpec::Hexagonal),
        "disk_intersection" => {
            let centers = parse_points(obj.get("centers"), &join(path, "centers"))?;
            let radius = obj
                .get("radius")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::config(join(path, "radius"), "expected a number"))?;
            Ok(NormSpec::DiskIntersection { centers, radius })
        }
        "pushforward" => {
            let matrix = parse_matrix(obj.get("matrix"), &join(path, "matrix"))?;
            let base_path = join(path, "base");
            let base = obj.get("base").ok_or_else(|| Error::config(&base_path, "missing"))?;
            Ok(NormSpec::pushforward(parse_spec(base, &base_path)?, matrix))
        }
        other => Err(Error::config(join(path, "family"), format!("unknown family `{other}`"))),
    }
}

/// Gauge of an origin-symmetric convex polygon, with vertices sorted by polar
/// angle for logarithmic-time edge lookup.
#[derive(Clone, Debug)]
struct PolygonTable {
    vertices: Vec<Vec2>,
    angles: Vec<f64>,
    /// outward edge normal `n_i` and offset `n_i . v_i` of edge `(v_i, v_{i+1})`
    edges: Vec<(Vec2, f64)>,
}

impl PolygonTable {
    fn new(ccw: &[Vec2]) -> Self {
        let start = (0..ccw.len())
            .min_by(|&i, &j| ccw[i].angle().total_cmp(&ccw[j].angle()))
            .unwrap_or(0);
        let vertices: Vec<Vec2> = (0..ccw.len()).map(|k| ccw[(start + k) % ccw.len()]).collect();
        let angles = vertices.iter().map(|v| v.angle()).collect();
        let n = vertices.len();
        let edges = (0..n)
            .map(|i| {
                let e = vertices[(i + 1) % n] - vertices[i];
                let normal = Vec2::new(e.x2, -e.x1);
                (normal, normal.dot(vertices[i]))
            })
            .collect();
        Self {
            vertices,
            angles,
            edges,
        }
    }

    fn eval(&self, v: Vec2) -> f64 {
        if v == Vec2::ZERO {
            return 0.0;
        }
        let theta = v.angle();
        let n = self.angles.len();
        // edge i spans angles [angles[i], angles[i+1]); the last edge wraps
        let k = self.angles.partition_point(|&a| a <= theta);
        let i = if k == 0 { n - 1 } else { k - 1 };
        let (normal, offset) = self.edges[i];
        normal.dot(v) / offset
    }

    fn gradient(&self, v: Vec2) -> Vec2 {
        let theta = v.angle();
        let n = self.angles.len();
        let k = self.angles.partition_point(|&a| a <= theta);
        let i = if k == 0 { n - 1 } else { k - 1 };
        let (normal, offset) = self.edges[i];
        normal / offset
    }
}

#[derive(Clone, Debug)]
enum Kind {
    P(Exponent),
    Polygon(PolygonTable),
    Hexagonal,
    Disks {
        centers: Vec<Vec2>,
        radius: f64,
    },
    Pushforward {
        base: Box<Norm>,
        matrix: Mat2,
        inverse: Mat2,
    },
}

/// A validated norm, ready for evaluation.
#[derive(Clone, Debug)]
pub struct Norm {
    spec: NormSpec,
    kind: Kind,
    /// Euclidean radii of the unit ball: `(min, max)` over directions (sampled, padded).
    radii: (f64, f64),
}

const SYM_TOL: f64 = 1e-9;

impl Norm {
    /// Validate `spec` and precompute evaluation tables.
    pub fn new(spec: NormSpec) -> Result<Self> {
        Self::build(spec, "")
    }

    fn build(spec: NormSpec, path: &str) -> Result<Self> {
        let kind = match &spec {
            NormSpec::PNorm(Exponent::Finite(p)) => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::config(
                        join(path, "p"),
                        format!("p must lie in [1, inf], got {p}"),
                    ));
                }
                Kind::P(Exponent::Finite(*p))
            }
            NormSpec::PNorm(Exponent::Infinity) => Kind::P(Exponent::Infinity),
            NormSpec::PolygonGauge { vertices } => {
                validate_polygon(vertices, &join(path, "vertices"))?;
                Kind::Polygon(PolygonTable::new(vertices))
            }
            NormSpec::Hexagonal => Kind::Hexagonal,
            NormSpec::DiskIntersection { centers, radius } => {
                validate_disks(centers, *radius, path)?;
                Kind::Disks {
                    centers: centers.clone(),
                    radius: *radius,
                }
            }
            NormSpec::Pushforward { base, matrix } => {
                let mpath = join(path, "matrix");
                if !matrix.is_finite() {
                    return Err(Error::config(mpath, "entries must be finite"));
                }
                let scale = matrix.rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
                if matrix.det().abs() <= 1e-12 * scale * scale {
                    return Err(Error::config(mpath, "matrix is singular"));
                }
                let inverse = matrix
                    .inverse()
                    .ok_or_else(|| Error::config(join(path, "matrix"), "matrix is singular"))?;
                let base = Norm::build((**base).clone(), &join(path, "base"))?;
                Kind::Pushforward {
                    base: Box::new(base),
                    matrix: *matrix,
                    inverse,
                }
            }
        };
        let mut norm = Norm {
            spec,
            kind,
            radii: (0.0, 0.0),
        };
        norm.radii = norm.sample_radii();
        Ok(norm)
    }

    fn sample_radii(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in 0..3600 {
            let d = Vec2::from_angle(2.0 * PI * k as f64 / 3600.0);
            let r = 1.0 / self.eval(d);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (0.95 * lo, 1.05 * hi)
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    /// Minkowski functional of the unit ball.
    pub fn eval(&self, v: Vec2) -> f64 {
        debug_assert!(v.is_finite(), "non-finite vector {v:?}");
        match &self.kind {
            Kind::P(Exponent::Infinity) => v.max_abs(),
            Kind::P(Exponent::Finite(p)) => p_norm(v, *p),
            Kind::Polygon(table) => table.eval(canonical(v)),
            Kind::Hexagonal => {
                let (a, b) = (v.x1, v.x2);
                if a * b >= 0.0 {
                    a.abs().max(b.abs())
                } else {
                    a.abs() + b.abs()
                }
            }
            Kind::Disks { centers, radius } => {
                let v = canonical(v);
                centers.iter().map(|c| disk_gauge(v, *c, *radius)).fold(0.0, f64::max)
            }
            Kind::Pushforward { base, inverse, .. } => base.eval(inverse.apply(v)),
        }
    }

    /// A gradient of the norm at `v != 0`; at corners, one of the subgradients.
    pub fn gradient(&self, v: Vec2) -> Vec2 {
        match &self.kind {
            Kind::P(Exponent::Infinity) => {
                if v.x1.abs() >= v.x2.abs() {
                    Vec2::new(v.x1.signum(), 0.0)
                } else {
                    Vec2::new(0.0, v.x2.signum())
                }
            }
            Kind::P(Exponent::Finite(p)) if *p == 1.0 => Vec2::new(v.x1.signum(), v.x2.signum()),
            Kind::P(Exponent::Finite(p)) => {
                let m = v.max_abs();
                let (s, t) = (v.x1.abs() / m, v.x2.abs() / m);
                let sum = s.powf(*p) + t.powf(*p);
                let k = sum.powf((*p - 1.0) / *p);
                Vec2::new(v.x1.signum() * s.powf(*p - 1.0), v.x2.signum() * t.powf(*p - 1.0)) / k
            }
            Kind::Polygon(table) => {
                let c = canonical(v);
                let g = table.gradient(c);
                if c == v {
                    g
                } else {
                    -g
                }
            }
            Kind::Hexagonal => {
                let (a, b) = (v.x1, v.x2);
                if a * b >= 0.0 {
                    if a.abs() >= b.abs() {
                        Vec2::new(a.signum(), 0.0)
                    } else {
                        Vec2::new(0.0, b.signum())
                    }
                } else {
                    Vec2::new(a.signum(), b.signum())
                }
            }
            Kind::Disks { centers, radius } => {
                let c = canonical(v);
                let active = centers
                    .iter()
                    .max_by(|a, b| disk_gauge(c, **a, *radius).total_cmp(&disk_gauge(c, **b, *radius)))
                    .expect("non-empty centers");
                let u = c / disk_gauge(c, *active, *radius) - *active;
                let g = u / (active.dot(u) + radius * radius);
                if c == v {
                    g
                } else {
                    -g
                }
            }
            Kind::Pushforward { base, inverse, .. } => {
                let w = base.gradient(inverse.apply(v));
                let [[a, b], [c, d]] = inverse.rows;
                Vec2::new(a * w.x1 + c * w.x2, b * w.x1 + d * w.x2)
            }
        }
    }

    /// Distance `||a - b||`.
    #[inline]
    pub fn dist(&self, a: Vec2, b: Vec2) -> f64 {
        self.eval(a - b)
    }

    /// `v / ||v||`.
    pub fn normalize(&self, v: Vec2) -> Vec2 {
        v / self.eval(v)
    }

    /// Point of the unit sphere on the ray of polar angle `theta`.
    #[inline]
    pub fn radial(&self, theta: f64) -> Vec2 {
        let d = Vec2::from_angle(theta);
        d / self.eval(d)
    }

    /// Padded lower and upper bounds on the Euclidean radius of the unit ball.
    pub fn ball_radii(&self) -> (f64, f64) {
        self.radii
    }

    /// Closed-form strict convexity verdict per family.
    pub fn is_strictly_convex(&self) -> bool {
        match &self.kind {
            Kind::P(Exponent::Finite(p)) => *p > 1.0,
            Kind::P(Exponent::Infinity) => false,
            Kind::Polygon(_) | Kind::Hexagonal => false,
            Kind::Disks { .. } => true,
            Kind::Pushforward { base, .. } => base.is_strictly_convex(),
        }
    }

    /// True when the unit sphere is a polygon.
    pub fn is_polygonal(&self) -> bool {
        match &self.kind {
            Kind::P(Exponent::Finite(p)) => *p == 1.0,
            Kind::P(Exponent::Infinity) | Kind::Polygon(_) | Kind::Hexagonal => true,
            Kind::Disks { .. } => false,
            Kind::Pushforward { base, .. } => base.is_polygonal(),
        }
    }

    /// Vertices of a polygonal unit sphere in anticlockwise order, starting
    /// from the one with the smallest polar angle in `(-pi, pi]`.
    pub fn sphere_vertices(&self) -> Option<Vec<Vec2>> {
        let mut verts = match &self.kind {
            Kind::P(Exponent::Finite(p)) if *p == 1.0 => {
                vec![Vec2::E1, Vec2::E2, -Vec2::E1, -Vec2::E2]
            }
            Kind::P(Exponent::Infinity) => vec![
                Vec2::new(1.0, 1.0),
                Vec2::new(-1.0, 1.0),
                Vec2::new(-1.0, -1.0),
                Vec2::new(1.0, -1.0),
            ],
            Kind::Polygon(t) => t.vertices.clone(),
            Kind::Hexagonal => vec![
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(-1.0, 0.0),
                Vec2::new(-1.0, -1.0),
                Vec2::new(0.0, -1.0),
            ],
            Kind::Pushforward { base, matrix, .. } => {
                let mut v: Vec<Vec2> = base.sphere_vertices()?.into_iter().map(|p| matrix.apply(p)).collect();
                if matrix.det() < 0.0 {
                    v.reverse();
                }
                v
            }
            _ => return None,
        };
        let start = (0..verts.len())
            .min_by(|&i, &j| verts[i].angle().total_cmp(&verts[j].angle()))
            .unwrap_or(0);
        verts.rotate_left(start);
        Some(verts)
    }

    /// Points of the unit sphere where the norm is not differentiable, known in
    /// closed form for every family.
    pub fn corners(&self) -> Vec<Vec2> {
        let mut pts = match &self.kind {
            Kind::P(Exponent::Finite(p)) if *p > 1.0 => Vec::new(),
            Kind::Disks { centers, radius } => {
                let mut out: Vec<Vec2> = Vec::new();
                for i in 0..centers.len() {
                    for j in (i + 1)..centers.len() {
                        for p in circle_intersections(centers[i], centers[j], *radius) {
                            if (self.eval(p) - 1.0).abs() <= 1e-12 && !out.iter().any(|q| (*q - p).euclid() < 1e-9) {
                                out.push(p);
                            }
                        }
                    }
                }
                out
            }
            Kind::Pushforward { base, matrix, .. } => base.corners().into_iter().map(|p| matrix.apply(p)).collect(),
            _ => self.sphere_vertices().unwrap_or_default(),
        };
        pts.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
        pts
    }
}

/// Representative of `{v, -v}` in the closed upper half-plane, so that tabulated
/// gauges are exactly even even when their data is symmetric only to rounding.
#[inline]
fn canonical(v: Vec2) -> Vec2 {
    if v.x2 < 0.0 || (v.x2 == 0.0 && v.x1 < 0.0) {
        -v
    } else {
        v
    }
}

fn p_norm(v: Vec2, p: f64) -> f64 {
    let (a, b) = (v.x1.abs(), v.x2.abs());
    if p == 1.0 {
        return a + b;
    }
    if p == 2.0 {
        return a.hypot(b);
    }
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    let (s, t) = (a / m, b / m);
    m * (s.powf(p) + t.powf(p)).powf(1.0 / p)
}

/// Gauge at `v` of the disk centered `c` with radius `r`, `|c| < r`: the value
/// `g > 0` with `|v/g - c| = r`.
fn disk_gauge(v: Vec2, c: Vec2, r: f64) -> f64 {
    let vv = v.dot(v);
    if vv == 0.0 {
        return 0.0;
    }
    let vc = v.dot(c);
    let k = r * r - c.dot(c);
    let disc = (vc * vc + vv * k).sqrt();
    // two algebraically equal forms; pick the one without cancellation
    if vc >= 0.0 {
        vv / (vc + disc)
    } else {
        (disc - vc) / k
    }
}

fn circle_intersections(a: Vec2, b: Vec2, r: f64) -> Vec<Vec2> {
    let d = (b - a).euclid();
    if d == 0.0 || d >= 2.0 * r {
        return Vec::new();
    }
    let mid = (a + b) * 0.5;
    let h = (r * r - 0.25 * d * d).sqrt();
    let u = ((b - a) / d).perp();
    vec![mid + u * h, mid - u * h]
}

fn contains_approx(set: &[Vec2], p: Vec2, tol: f64) -> bool {
    set.iter().any(|q| (*q - p).max_abs() <= tol)
}

fn validate_polygon(vertices: &[Vec2], path: &str) -> Result<()> {
    let n = vertices.len();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::config(
            path,
            format!("need an even number (>= 4) of vertices, got {n}"),
        ));
    }
    let scale = vertices.iter().fold(0.0f64, |m, v| m.max(v.max_abs()));
    for (i, v) in vertices.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::config(format!("{path}[{i}]"), "non-finite coordinate"));
        }
        if v.max_abs() <= 1e-12 * scale.max(1e-300) {
            return Err(Error::config(format!("{path}[{i}]"), "vertex at the origin"));
        }
        if !contains_approx(vertices, -*v, SYM_TOL * scale) {
            return Err(Error::config(
                format!("{path}[{i}]"),
                "polygon is not origin-symmetric: -v is missing",
            ));
        }
    }
    let mut winding = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let turn = (b - a).cross(c - b);
        if turn <= 1e-12 * scale * scale {
            return Err(Error::config(
                format!("{path}[{}]", (i + 1) % n),
                "vertices are not in strictly convex anticlockwise position",
            ));
        }
        let d = b.angle() - a.angle();
        winding += d.rem_euclid(2.0 * PI);
    }
    if (winding - 2.0 * PI).abs() > 1e-6 {
        return Err(Error::config(path, "vertices wind around the origin more than once"));
    }
    Ok(())
}

fn validate_disks(centers: &[Vec2], radius: f64, path: &str) -> Result<()> {
    let rpath = join(path, "radius");
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::config(rpath, "radius must be positive and finite"));
    }
    let cpath = join(path, "centers");
    if centers.is_empty() {
        return Err(Error::config(cpath, "need at least one center"));
    }
    for (i, c) in centers.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::config(format!("{cpath}[{i}]"), "non-finite coordinate"));
        }
        if c.euclid() >= radius {
            return Err(Error::config(
                format!("{cpath}[{i}]"),
                "disk does not contain a neighbourhood of the origin",
            ));
        }
        if !contains_approx(centers, -*c, SYM_TOL * radius) {
            return Err(Error::config(
                format!("{cpath}[{i}]"),
                "centers are not origin-symmetric",
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l1_polygon() -> Norm {
        Norm::new(NormSpec::PolygonGauge {
            vertices: vec![Vec2::E1, Vec2::E2, -Vec2::E1, -Vec2::E2],
        })
        .unwrap()
    }

    #[test]
    fn hexagonal_branches() {
        let h = Norm::new(NormSpec::Hexagonal).unwrap();
        assert_eq!(h.eval(Vec2::new(1.0, 1.0)), 1.0);
        assert_eq!(h.eval(Vec2::new(1.0, -1.0)), 2.0);
        assert_eq!(h.eval(Vec2::new(-0.5, 0.25)), 0.75);
        assert_eq!(h.eval(Vec2::new(-0.5, -0.25)), 0.5);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        for spec in [
            NormSpec::p(2.0),
            NormSpec::p_inf(),
            NormSpec::Hexagonal,
            NormSpec::regular_polygon(8),
        ] {
            assert_eq!(Norm::new(spec).unwrap().eval(Vec2::ZERO), 0.0);
        }
    }

    #[test]
    fn polygon_l1_cross_check() {
        let poly = l1_polygon();
        assert!((poly.eval(Vec2::new(1.0, 1.0)) - 2.0).abs() < 1e-15);
        for k in 0..100 {
            let v = Vec2::from_angle(k as f64 * 0.0731) * (1.0 + k as f64 * 0.1);
            assert!((poly.eval(v) - v.l1()).abs() < 1e-12 * v.l1());
        }
    }

    /// Brute-force gauge: maximum over all edge functionals.
    fn polygon_oracle(vertices: &[Vec2], v: Vec2) -> f64 {
        let n = vertices.len();
        (0..n)
            .map(|i| {
                let e = vertices[(i + 1) % n] - vertices[i];
                let normal = Vec2::new(e.x2, -e.x1);
                normal.dot(v) / normal.dot(vertices[i])
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn polygon_binary_search_matches_edge_maximum() {
        let spec = NormSpec::regular_polygon(12);
        let NormSpec::PolygonGauge { vertices } = &spec else {
            unreachable!()
        };
        let norm = Norm::new(spec.clone()).unwrap();
        for k in 0..2000 {
            let theta = -PI + 2.0 * PI * k as f64 / 2000.0;
            let v = Vec2::from_angle(theta) * 1.7;
            let exact = polygon_oracle(vertices, v);
            assert!((norm.eval(v) - exact).abs() < 1e-12, "theta={theta}");
        }
        // vertex directions themselves
        for v in vertices {
            assert!((norm.eval(*v) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn infinity_is_a_distinct_exponent() {
        let n = Norm::new(NormSpec::p_inf()).unwrap();
        assert_eq!(n.eval(Vec2::new(1e300, -3.0)), 1e300);
        let big = Norm::new(NormSpec::p(400.0)).unwrap();
        assert!((big.eval(Vec2::new(1.0, 1.0)) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn strict_convexity_per_family() {
        let sc = |s: NormSpec| Norm::new(s).unwrap().is_strictly_convex();
        assert!(sc(NormSpec::p(2.0)));
        assert!(!sc(NormSpec::Hexagonal));
        assert!(!sc(NormSpec::p(1.0)));
        assert!(!sc(NormSpec::p_inf()));
        assert!(sc(NormSpec::symmetric_disks(2, 0.5, 1.2)));
        assert!(sc(NormSpec::pushforward(
            NormSpec::p(1.5),
            Mat2::new(2.0, 1.0, 0.0, 1.0)
        )));
        assert!(!sc(NormSpec::pushforward(
            NormSpec::regular_polygon(6),
            Mat2::new(2.0, 1.0, 0.0, 1.0)
        )));
    }

    #[test]
    fn disk_gauge_solves_circle_equation() {
        let c = Vec2::new(0.5, 0.0);
        for k in 0..64 {
            let v = Vec2::from_angle(k as f64 * 0.1) * 0.8;
            let g = disk_gauge(v, c, 1.2);
            assert!(((v / g - c).euclid() - 1.2).abs() < 1e-13);
        }
    }

    #[test]
    fn lens_has_two_corner_tips() {
        let lens = Norm::new(NormSpec::symmetric_disks(2, 0.5, 1.2)).unwrap();
        let corners = lens.corners();
        assert_eq!(corners.len(), 2);
        let tip = (1.44f64 - 0.25).sqrt();
        assert!(corners.iter().any(|p| (*p - Vec2::new(0.0, tip)).euclid() < 1e-12));
        let six = Norm::new(NormSpec::symmetric_disks(6, 0.5, 1.2)).unwrap();
        assert_eq!(six.corners().len(), 6);
    }

    #[test]
    fn validation_reports_field_paths() {
        let err = Norm::new(NormSpec::PolygonGauge {
            vertices: vec![Vec2::E1, Vec2::E2, -Vec2::E1, Vec2::new(0.0, -2.0)],
        })
        .unwrap_err();
        assert!(
            matches!(err, Error::Config { ref path, .. } if path.starts_with("vertices[")),
            "{err}"
        );

        let err = Norm::new(NormSpec::pushforward(NormSpec::p(2.0), Mat2::new(1.0, 2.0, 2.0, 4.0))).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "matrix"));

        let nested = NormSpec::pushforward(
            NormSpec::DiskIntersection {
                centers: vec![Vec2::new(0.5, 0.0)],
                radius: 1.2,
            },
            Mat2::IDENTITY,
        );
        let err = Norm::new(nested).unwrap_err();
        assert!(
            matches!(err, Error::Config { ref path, .. } if path == "base.centers[0]"),
            "{err}"
        );

        let err = Norm::new(NormSpec::p(0.5)).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "p"));

        // clockwise order is rejected
        let mut cw = vec![Vec2::E1, Vec2::E2, -Vec2::E1, -Vec2::E2];
        cw.reverse();
        assert!(Norm::new(NormSpec::PolygonGauge { vertices: cw }).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = r#"{"family":"pushforward","matrix":[[2,1],[0,1]],"base":{"family":"p","p":"inf"}}"#;
        let spec = NormSpec::from_json_str(text).unwrap();
        assert_eq!(
            spec,
            NormSpec::pushforward(NormSpec::p_inf(), Mat2::new(2.0, 1.0, 0.0, 1.0))
        );
        let back = NormSpec::from_value(&spec.to_value()).unwrap();
        assert_eq!(back, spec);

        let err = NormSpec::from_json_str(
            r#"{"family":"pushforward","matrix":[[1,0],[0,1]],"base":{"family":"p","p":"big"}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "base.p"));
        let err = NormSpec::from_json_str(r#"{"family":"polygon","vertices":[[1,0],[0,"x"]]}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "vertices[1][1]"));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-7;
        for n in corpus() {
            for k in 0..64 {
                let v = Vec2::from_angle(0.05 + k as f64 * 0.0981) * 1.3;
                let fd = Vec2::new(
                    (n.eval(v + Vec2::E1 * h) - n.eval(v - Vec2::E1 * h)) / (2.0 * h),
                    (n.eval(v + Vec2::E2 * h) - n.eval(v - Vec2::E2 * h)) / (2.0 * h),
                );
                let g = n.gradient(v);
                // Euler: grad . v = ||v||
                assert!((g.dot(v) - n.eval(v)).abs() < 1e-9, "{}", n.spec());
                if !n.is_polygonal() {
                    assert!((g - fd).max_abs() < 1e-6, "{} at {v:?}: {g:?} vs {fd:?}", n.spec());
                }
            }
        }
    }

    #[test]
    fn pushforward_makes_matrix_an_isometry() {
        let m = Mat2::new(2.0, 1.0, -0.5, 1.0);
        let base = Norm::new(NormSpec::p(3.0)).unwrap();
        let push = Norm::new(NormSpec::pushforward(NormSpec::p(3.0), m)).unwrap();
        for k in 0..50 {
            let v = Vec2::from_angle(k as f64 * 0.37) * (0.3 + k as f64 * 0.05);
            assert!((push.eval(m.apply(v)) - base.eval(v)).abs() < 1e-13);
        }
    }

    fn corpus() -> Vec<Norm> {
        [
            NormSpec::p(1.0),
            NormSpec::p(1.5),
            NormSpec::p(2.0),
            NormSpec::p(3.0),
            NormSpec::p_inf(),
            NormSpec::Hexagonal,
            NormSpec::regular_polygon(12),
            NormSpec::symmetric_disks(2, 0.5, 1.2),
            NormSpec::symmetric_disks(6, 0.5, 1.2),
            NormSpec::pushforward(NormSpec::Hexagonal, Mat2::new(1.3, 0.4, -0.2, 0.9)),
        ]
        .into_iter()
        .map(|s| Norm::new(s).unwrap())
        .collect()
    }

    #[test]
    fn hexagonal_matches_two_branch_formula_on_sign_grid() {
        let h = Norm::new(NormSpec::Hexagonal).unwrap();
        let vals: [f64; 7] = [-2.5, -1.0, -0.25, 0.0, 0.25, 1.0, 2.5];
        for &a in &vals {
            for &b in &vals {
                let expected = if a * b >= 0.0 {
                    f64::max(a.abs(), b.abs())
                } else {
                    a.abs() + b.abs()
                };
                assert_eq!(h.eval(Vec2::new(a, b)), expected);
            }
        }
    }

    #[test]
    fn equivalence_constants_exist() {
        for n in corpus() {
            let (lo, hi) = n.ball_radii();
            for k in 0..500 {
                let v = Vec2::from_angle(k as f64 * 0.01257) * 2.0;
                // ||v|| between |v|_2 / hi and |v|_2 / lo
                let val = n.eval(v);
                assert!(val >= v.euclid() / hi && val <= v.euclid() / lo);
            }
        }
    }

    proptest! {
        #[test]
        fn homogeneity_and_symmetry(x in -10.0f64..10.0, y in -10.0f64..10.0) {
            let v = Vec2::new(x, y);
            for n in corpus() {
                let base = n.eval(v);
                prop_assert_eq!(n.eval(-v), base);
                for alpha in [-2.0, -0.5, 3.0] {
                    let scaled = n.eval(v * alpha);
                    prop_assert!((scaled - alpha.abs() * base).abs() <= 1e-12 * base.max(1e-300) * 4.0 + 1e-300);
                }
            }
        }

        #[test]
        fn triangle_inequality(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0) {
            let u = Vec2::new(a, b);
            let v = Vec2::new(c, d);
            for n in corpus() {
                prop_assert!(n.eval(u + v) <= n.eval(u) + n.eval(v) + 1e-12);
            }
        }
    }
}
