//! Natural parameterization: anticlockwise, unit speed in the ambient norm,
//! periodic with period equal to the ambient length of the curve.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::curve::ConvexCurve;
use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::numeric::{illinois_root, richardson, wrap};
use crate::vec2::Vec2;

/// Difference-quotient steps for one-sided derivatives on analytic spheres.
pub const DERIVATIVE_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// Relative tolerance for adaptive arc-length refinement.
const ARC_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A one-sided derivative together with the spread of its extrapolants
/// (zero when it is an exact edge direction).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivative {
    pub value: Vec2,
    pub disagreement: f64,
}

#[derive(Clone, Debug)]
enum Mode {
    Polyline {
        points: Vec<Vec2>,
        smooth: Vec<bool>,
        cum: Vec<f64>,
        per_edge: usize,
    },
    Gauge {
        gauge: Norm,
        center: Vec2,
        thetas: Vec<f64>,
        cum: Vec<f64>,
        /// polar angles of corners, lifted into `[theta0, theta0 + 2 pi]` and sorted
        corners: Vec<f64>,
    },
}

/// Natural parameterization `gamma` of a convex curve based at a chosen point.
#[derive(Clone, Debug)]
pub struct NaturalParam {
    curve: ConvexCurve,
    basepoint: Vec2,
    period: f64,
    mode: Mode,
}

impl NaturalParam {
    /// Build the parameterization with at least `resolution` breakpoints.
    pub fn new(curve: &ConvexCurve, basepoint: Vec2, resolution: usize) -> Result<Self> {
        let tol = 1e-9 * (1.0 + basepoint.max_abs());
        if !basepoint.is_finite() || !curve.contains(basepoint, tol) {
            return Err(Error::Domain(format!(
                "basepoint ({}, {}) is not on the curve",
                basepoint.x1, basepoint.x2
            )));
        }
        let resolution = resolution.max(8);
        let ambient = curve.ambient();
        let mode = match (curve.polyline(), curve.gauge()) {
            (Some((pts, flags)), _) => build_polyline(ambient, pts, flags, basepoint, resolution),
            (None, Some((gauge, center))) => build_gauge(ambient, gauge, center, basepoint, resolution),
            (None, None) => unreachable!("curve has a shape"),
        };
        let period = match &mode {
            Mode::Polyline { cum, .. } | Mode::Gauge { cum, .. } => *cum.last().expect("non-empty table"),
        };
        Ok(NaturalParam {
            curve: curve.clone(),
            basepoint,
            period,
            mode,
        })
    }

    pub fn curve(&self) -> &ConvexCurve {
        &self.curve
    }

    pub fn basepoint(&self) -> Vec2 {
        self.basepoint
    }

    /// Ambient length `L` of the curve.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Breakpoint table `(t, gamma(t))`, `t` increasing from 0 to `L`.
    pub fn breakpoints(&self) -> Vec<(f64, Vec2)> {
        match &self.mode {
            Mode::Polyline {
                points, cum, per_edge, ..
            } => {
                let n = points.len();
                let mut rows = Vec::with_capacity(n * per_edge + 1);
                for i in 0..n {
                    for k in 0..*per_edge {
                        let s = k as f64 / *per_edge as f64;
                        rows.push((
                            cum[i] + s * (cum[i + 1] - cum[i]),
                            points[i].lerp(points[(i + 1) % n], s),
                        ));
                    }
                }
                rows.push((cum[n], points[0]));
                rows
            }
            Mode::Gauge {
                gauge,
                center,
                thetas,
                cum,
                ..
            } => cum
                .iter()
                .zip(thetas)
                .map(|(t, th)| (*t, *center + gauge.radial(*th)))
                .collect(),
        }
    }

    /// `gamma(t)`, with `t` reduced modulo `L`.
    pub fn eval(&self, t: f64) -> Vec2 {
        let t = wrap(t, self.period);
        if t == 0.0 {
            return self.basepoint;
        }
        match &self.mode {
            Mode::Polyline { points, cum, .. } => {
                let i = segment_index(cum, t);
                let n = points.len();
                let len = cum[i + 1] - cum[i];
                let s = if len > 0.0 { (t - cum[i]) / len } else { 0.0 };
                points[i].lerp(points[(i + 1) % n], s)
            }
            Mode::Gauge { gauge, center, .. } => *center + gauge.radial(self.theta_of(t)),
        }
    }

    /// Polar angle (about the curve center) of `gamma(t)`; analytic spheres only.
    fn theta_of(&self, t: f64) -> f64 {
        let Mode::Gauge { thetas, cum, .. } = &self.mode else {
            unreachable!("theta_of on polyline")
        };
        let i = segment_index(cum, t);
        let s = t - cum[i];
        if s <= 0.0 {
            return thetas[i];
        }
        if t >= cum[i + 1] {
            return thetas[i + 1];
        }
        let (a, b) = (thetas[i], thetas[i + 1]);
        illinois_root(|th| self.arc(a, th) - s, a, b, 1e-15).unwrap_or(a + (b - a) * s / (cum[i + 1] - cum[i]))
    }

    fn arc(&self, a: f64, b: f64) -> f64 {
        let Mode::Gauge { gauge, center, .. } = &self.mode else {
            unreachable!()
        };
        romberg_chord(self.curve.ambient(), gauge, *center, a, b)
    }

    /// Parameter of the curve point `p` (`p` is first projected radially onto the curve).
    pub fn param_of(&self, p: Vec2) -> f64 {
        match &self.mode {
            Mode::Polyline { points, cum, .. } => {
                let n = points.len();
                let (i, _) = (0..n)
                    .map(|i| (i, seg_dist(p, points[i], points[(i + 1) % n])))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty polyline");
                let e = points[(i + 1) % n] - points[i];
                let len2 = e.dot(e);
                let s = ((p - points[i]).dot(e) / len2).clamp(0.0, 1.0);
                wrap(cum[i] + s * (cum[i + 1] - cum[i]), self.period)
            }
            Mode::Gauge {
                center, thetas, cum, ..
            } => {
                let th0 = thetas[0];
                let th = th0 + wrap((p - *center).angle() - th0, TAU);
                let i = thetas
                    .partition_point(|&x| x <= th)
                    .saturating_sub(1)
                    .min(thetas.len() - 2);
                wrap(cum[i] + self.arc(thetas[i], th), self.period)
            }
        }
    }

    /// Parameters of the curve's known corners, sorted in `[0, L)`.
    pub fn corner_params(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = match &self.mode {
            Mode::Polyline { smooth, cum, .. } => smooth
                .iter()
                .enumerate()
                .filter(|(_, s)| !**s)
                .map(|(i, _)| cum[i])
                .collect(),
            Mode::Gauge {
                thetas, cum, corners, ..
            } => corners
                .iter()
                .filter(|&&c| c < thetas[0] + TAU)
                .map(|&c| {
                    let i = thetas.partition_point(|&x| x <= c).saturating_sub(1);
                    cum[i] + self.arc(thetas[i], c)
                })
                .collect(),
        };
        ts.iter_mut().for_each(|t| *t = wrap(*t, self.period));
        ts.sort_by(f64::total_cmp);
        ts
    }

    /// One-sided derivative of `gamma` at `t`, normalized to ambient norm 1.
    pub fn side_derivative(&self, t: f64, side: Side) -> Vec2 {
        self.side_derivative_detail(t, side).value
    }

    pub fn side_derivative_detail(&self, t: f64, side: Side) -> Derivative {
        let ambient = self.curve.ambient();
        let t = wrap(t, self.period);
        match &self.mode {
            Mode::Polyline {
                points, smooth, cum, ..
            } => {
                let n = points.len();
                let at_node = |i: usize| (t - cum[i]).abs() <= 1e-12 * self.period.max(1.0);
                let mut i = segment_index(cum, t);
                let node = if at_node(i) {
                    Some(i)
                } else if at_node(i + 1) {
                    i += 1;
                    Some(i % n)
                } else {
                    None
                };
                let dir = match node {
                    Some(k) if smooth[k] => points[(k + 1) % n] - points[(k + n - 1) % n],
                    Some(k) => match side {
                        Side::Right => points[(k + 1) % n] - points[k],
                        Side::Left => points[k] - points[(k + n - 1) % n],
                    },
                    None => points[(i + 1) % n] - points[i],
                };
                Derivative {
                    value: ambient.normalize(dir),
                    disagreement: 0.0,
                }
            }
            Mode::Gauge {
                gauge,
                center,
                thetas,
                corners,
                ..
            } => {
                let mut th = self.theta_of(t);
                // snap onto a corner so that both sides see clean edges
                if let Some(c) = corners.iter().find(|&&c| angle_gap(c, th) < CORNER_SNAP) {
                    th = lift(*c, thetas[0]);
                }
                let room = corner_room(corners, th, side);
                let sign = match side {
                    Side::Right => 1.0,
                    Side::Left => -1.0,
                };
                let steps: Vec<f64> = DERIVATIVE_STEPS.iter().map(|h| h.min(0.5 * room)).collect();
                let r0 = *center + gauge.radial(th);
                let quot: Vec<Vec2> = steps
                    .iter()
                    .map(|h| (*center + gauge.radial(th + sign * h) - r0) / (sign * h))
                    .collect();
                let ex1 = richardson(&steps, &quot.iter().map(|q| q.x1).collect::<Vec<_>>());
                let ex2 = richardson(&steps, &quot.iter().map(|q| q.x2).collect::<Vec<_>>());
                let raw = Vec2::new(ex1.value, ex2.value);
                let scale = ambient.eval(raw);
                let quotient = Derivative {
                    value: raw / scale,
                    disagreement: ex1.disagreement.max(ex2.disagreement) / scale,
                };
                if quotient.disagreement <= GRADIENT_FALLBACK {
                    return quotient;
                }
                // quotients converging slower than linearly (e.g. l_p, p < 2, at
                // the axes): tangent of the level set just beside th
                let tangent = |eta: f64| ambient.normalize(gauge.gradient(gauge.radial(th + sign * eta)).perp());
                let near = tangent(GRADIENT_STEP.min(0.5 * room));
                let far = tangent((100.0 * GRADIENT_STEP).min(0.5 * room));
                let d = ambient.dist(near, far);
                if d < quotient.disagreement {
                    Derivative {
                        value: near,
                        disagreement: d,
                    }
                } else {
                    quotient
                }
            }
        }
    }
}

/// Quotient spread above which the gradient tangent is tried instead.
const GRADIENT_FALLBACK: f64 = 1e-7;
/// Angular offset of the gradient tangent from the evaluated point.
const GRADIENT_STEP: f64 = 1e-13;

/// Angular distance below which a point is identified with a known corner;
/// arc-length inversion places corners only to about 1e-10 rad.
const CORNER_SNAP: f64 = 1e-9;

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = wrap(a - b, TAU);
    d.min(TAU - d)
}

fn lift(th: f64, th0: f64) -> f64 {
    th0 + wrap(th - th0, TAU)
}

/// Angular distance from `th` to the nearest corner strictly on `side`.
fn corner_room(corners: &[f64], th: f64, side: Side) -> f64 {
    let mut room = f64::INFINITY;
    for &c in corners {
        let d = wrap(c - th, TAU);
        let d = match side {
            Side::Right => d,
            Side::Left => wrap(-d, TAU),
        };
        if d > CORNER_SNAP {
            room = room.min(d);
        }
    }
    room
}

fn segment_index(cum: &[f64], t: f64) -> usize {
    cum.partition_point(|&c| c <= t).saturating_sub(1).min(cum.len() - 2)
}

fn seg_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = b - a;
    let s = ((p - a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
    (p - a.lerp(b, s)).euclid()
}

fn build_polyline(ambient: &Norm, pts: &[Vec2], flags: &[bool], base: Vec2, resolution: usize) -> Mode {
    let n = pts.len();
    let scale = pts.iter().fold(0.0f64, |m, p| m.max(p.max_abs()));
    // rotate so that the basepoint is node 0, inserting it on its edge if needed
    let (edge, _) = (0..n)
        .map(|i| (i, seg_dist(base, pts[i], pts[(i + 1) % n])))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty polyline");
    let mut points = Vec::with_capacity(n + 1);
    let mut smooth = Vec::with_capacity(n + 1);
    let start = if (pts[edge] - base).max_abs() <= 1e-12 * scale {
        edge
    } else if (pts[(edge + 1) % n] - base).max_abs() <= 1e-12 * scale {
        (edge + 1) % n
    } else {
        points.push(base);
        smooth.push(true);
        (edge + 1) % n
    };
    for k in 0..n {
        points.push(pts[(start + k) % n]);
        smooth.push(flags[(start + k) % n]);
    }
    let mut cum = Vec::with_capacity(points.len() + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for i in 0..points.len() {
        acc += ambient.dist(points[(i + 1) % points.len()], points[i]);
        cum.push(acc);
    }
    // the exposed breakpoint table subdivides edges to reach `resolution` rows
    let per_edge = resolution.div_ceil(points.len()).max(1);
    Mode::Polyline {
        points,
        smooth,
        cum,
        per_edge,
    }
}

/// Chord sums over 1, 2 and 4 pieces combined by Romberg extrapolation
/// (chord-sum error expands in even powers of the step on smooth arcs).
fn romberg_chord(ambient: &Norm, gauge: &Norm, center: Vec2, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let p: Vec<Vec2> = (0..=4)
        .map(|k| center + gauge.radial(a + (b - a) * k as f64 / 4.0))
        .collect();
    let d = |i: usize, j: usize| ambient.dist(p[j], p[i]);
    let s1 = d(0, 4);
    let s2 = d(0, 2) + d(2, 4);
    let s4 = d(0, 1) + d(1, 2) + d(2, 3) + d(3, 4);
    let r1 = (4.0 * s2 - s1) / 3.0;
    let r2 = (4.0 * s4 - s2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

fn build_gauge(ambient: &Norm, gauge: &Norm, center: Vec2, base: Vec2, resolution: usize) -> Mode {
    let th0 = (base - center).angle();
    let mut corners: Vec<f64> = gauge.corners().into_iter().map(|c| lift(c.angle(), th0)).collect();
    corners.sort_by(f64::total_cmp);
    let mut coarse: Vec<f64> = (0..resolution)
        .map(|k| th0 + TAU * k as f64 / resolution as f64)
        .collect();
    coarse.extend(corners.iter().copied().filter(|&c| c > th0 + 1e-12));
    coarse.push(th0 + TAU);
    coarse.sort_by(f64::total_cmp);
    coarse.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut thetas = vec![coarse[0]];
    let mut cum = vec![0.0];
    for w in coarse.windows(2) {
        refine(ambient, gauge, center, w[0], w[1], 0, &mut thetas, &mut cum);
    }
    Mode::Gauge {
        gauge: gauge.clone(),
        center,
        thetas,
        cum,
        corners,
    }
}

/// Append the arc `[a, b]` to the table, splitting until the Romberg chord
/// estimate of the whole agrees with the sum of its halves.
#[allow(clippy::too_many_arguments)]
fn refine(
    ambient: &Norm,
    gauge: &Norm,
    center: Vec2,
    a: f64,
    b: f64,
    depth: u32,
    thetas: &mut Vec<f64>,
    cum: &mut Vec<f64>,
) {
    let whole = romberg_chord(ambient, gauge, center, a, b);
    let m = 0.5 * (a + b);
    let left = romberg_chord(ambient, gauge, center, a, m);
    let right = romberg_chord(ambient, gauge, center, m, b);
    if depth >= 30 || (left + right - whole).abs() <= ARC_RTOL * whole.max(1e-300) {
        let last = *cum.last().expect("seeded");
        thetas.push(b);
        cum.push(last + left + right);
    } else {
        refine(ambient, gauge, center, a, m, depth + 1, thetas, cum);
        refine(ambient, gauge, center, m, b, depth + 1, thetas, cum);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;
    use std::f64::consts::PI;

    fn param(spec: NormSpec, base: Vec2) -> NaturalParam {
        let c = ConvexCurve::unit_sphere(spec).unwrap();
        NaturalParam::new(&c, base, 2000).unwrap()
    }

    #[test]
    fn circle_has_circumference_two_pi() {
        let p = param(NormSpec::p(2.0), Vec2::E1);
        assert!((p.period() - 2.0 * PI).abs() < 1e-9);
        assert!((p.eval(p.period() / 4.0) - Vec2::E2).euclid() < 1e-9);
        assert!((p.side_derivative(0.0, Side::Right) - Vec2::E2).euclid() < 1e-6);
    }

    #[test]
    fn square_and_diamond_have_length_eight() {
        let sq = param(NormSpec::p_inf(), Vec2::new(1.0, 1.0));
        assert!((sq.period() - 8.0).abs() < 1e-12);
        assert!((sq.eval(2.0) - Vec2::new(-1.0, 1.0)).euclid() < 1e-9);
        assert_eq!(sq.side_derivative(0.0, Side::Right), Vec2::new(-1.0, 0.0));
        assert_eq!(sq.side_derivative(0.0, Side::Left), Vec2::new(0.0, 1.0));
        let di = param(NormSpec::p(1.0), Vec2::E1);
        assert!((di.period() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn hexagon_corner_has_distinct_sides() {
        let hx = param(NormSpec::Hexagonal, Vec2::E2);
        assert!((hx.period() - 6.0).abs() < 1e-12);
        let l = hx.side_derivative(0.0, Side::Left);
        let r = hx.side_derivative(0.0, Side::Right);
        assert_eq!(r, Vec2::new(-1.0, -1.0));
        assert_eq!(l, Vec2::new(-1.0, 0.0));
        assert_ne!(l, r);
    }
}
