//! Detection of non-differentiable (corner) points of a sphere: a derivative
//! oracle, a test that only looks at distances, and a far-field test on the
//! slopes of `t -> ||gamma_z(t) - y||`.

use serde::{Deserialize, Serialize};

use crate::curve::ConvexCurve;
use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::numeric::richardson;
use crate::param::{NaturalParam, Side};
use crate::vec2::{coords_in_basis, Vec2};

/// Side-derivative gap above which a point is a corner.
pub const CORNER_GAP: f64 = 1e-3;
/// Side-derivative gap below which a point is smooth.
pub const SMOOTH_GAP: f64 = 1e-5;
/// Default radii of the metric test.
pub const EPS_GRID: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];
/// Radii of the metric classification: [`EPS_GRID`] extended to 0.002 so that
/// smooth points of unbounded curvature (l_p, p < 2, at the axes) fall below
/// the delta grid.
pub const CLASSIFY_EPS_GRID: [f64; 7] = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002];
/// Slope gap above which `G` is declared non-differentiable.
pub const SLOPE_GAP: f64 = 1e-3;
/// Slope gap below which `G` is declared differentiable.
pub const SLOPE_SMOOTH: f64 = 1e-5;
/// Extrapolation spread above which a slope estimate is not trusted.
pub const SLOPE_SPREAD: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NdStatus {
    Smooth,
    Corner,
    Unreliable,
}

/// Side derivatives at a curve point and the resulting classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReading {
    pub status: NdStatus,
    pub left: Vec2,
    pub right: Vec2,
    /// `||left - right||` in the ambient norm.
    pub gap: f64,
    /// Largest extrapolation spread of the two derivatives.
    pub spread: f64,
}

/// Classify `gamma(t)` from its one-sided derivatives: corner when the gap
/// exceeds `threshold`, smooth below [`SMOOTH_GAP`], unreliable in between or
/// when the derivative extrapolants disagree by more than `threshold / 10`.
pub fn nd_oracle(param: &NaturalParam, t: f64, threshold: f64) -> OracleReading {
    let l = param.side_derivative_detail(t, Side::Left);
    let r = param.side_derivative_detail(t, Side::Right);
    let gap = param.curve().ambient().dist(l.value, r.value);
    let spread = l.disagreement.max(r.disagreement);
    let status = if spread > threshold / 10.0 {
        NdStatus::Unreliable
    } else if gap > threshold {
        NdStatus::Corner
    } else if gap < SMOOTH_GAP {
        NdStatus::Smooth
    } else {
        NdStatus::Unreliable
    };
    OracleReading {
        status,
        left: l.value,
        right: r.value,
        gap,
        spread,
    }
}

/// Frame at a corner `x`: `y` the right derivative, `z` the left derivative,
/// signs fixed so that `x = -l y + m z` with `l, m > 0`, and the coordinates of
/// `z` in the basis `{x, y}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerBasis {
    pub x: Vec2,
    pub y: Vec2,
    pub z: Vec2,
    pub z_coords: (f64, f64),
    /// `z1 / (2 z2)`: a slope certified to pass the metric test.
    pub delta_cert: f64,
}

pub fn corner_basis(param: &NaturalParam, t: f64) -> Result<CornerBasis> {
    let reading = nd_oracle(param, t, CORNER_GAP);
    if reading.status != NdStatus::Corner {
        return Err(Error::Precondition(format!(
            "corner basis requested at a {:?} point (gap {:.3e})",
            reading.status, reading.gap
        )));
    }
    let x = param.eval(t);
    let (mut y, mut z) = (reading.right, reading.left);
    let (a, b) = coords_in_basis(x, y, z).ok_or_else(|| Error::Internal("side derivatives are parallel".into()))?;
    if a > 0.0 {
        y = -y;
    }
    if b < 0.0 {
        z = -z;
    }
    let (z1, z2) = coords_in_basis(z, x, y).ok_or_else(|| Error::Internal("basis {x, y} is degenerate".into()))?;
    if !(z1 > 0.0 && z2 > 0.0) {
        return Err(Error::Internal(format!("corner frame has z = ({z1}, {z2})")));
    }
    Ok(CornerBasis {
        x,
        y,
        z,
        z_coords: (z1, z2),
        delta_cert: z1 / (2.0 * z2),
    })
}

/// A finite sample of a sphere seen only through its metric.
pub trait MetricSample {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn dist(&self, i: usize, j: usize) -> f64;
    /// Index of the antipode of sample point `i`.
    fn antipode(&self, i: usize) -> usize;
    /// Largest distance from a sphere point to the sample.
    fn resolution(&self) -> f64;
}

/// Equally spaced (in arc length) sample of a centrally symmetric sphere: the
/// first half is `gamma(t0 + i L / n)`, the second half its exact negatives.
#[derive(Clone, Debug)]
pub struct SphereSample {
    norm: Norm,
    points: Vec<Vec2>,
    params: Vec<f64>,
    resolution: f64,
}

impl SphereSample {
    pub fn new(param: &NaturalParam, n: usize, t0: f64) -> Result<Self> {
        let curve = param.curve();
        if !curve.is_centrally_symmetric() {
            return Err(Error::Precondition(
                "metric sample needs a centrally symmetric curve".into(),
            ));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::Domain(format!("sample size must be even and >= 4, got {n}")));
        }
        let l = param.period();
        let half = n / 2;
        let mut points = Vec::with_capacity(n);
        let mut params = Vec::with_capacity(n);
        for i in 0..half {
            let t = t0 + l * i as f64 / n as f64;
            points.push(param.eval(t));
            params.push(t);
        }
        for i in 0..half {
            points.push(-points[i]);
            params.push(params[i] + 0.5 * l);
        }
        let norm = curve.ambient().clone();
        // a point of the arc between neighbours is within half the step of one of them
        let resolution = (0..n)
            .map(|i| norm.dist(points[i], points[(i + 1) % n]))
            .fold(0.0, f64::max);
        Ok(SphereSample {
            norm,
            points,
            params,
            resolution,
        })
    }

    pub fn point(&self, i: usize) -> Vec2 {
        self.points[i]
    }

    /// Natural parameter of sample point `i` (unreduced).
    pub fn param(&self, i: usize) -> f64 {
        self.params[i]
    }
}

impl MetricSample for SphereSample {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.norm.dist(self.points[i], self.points[j])
    }

    fn antipode(&self, i: usize) -> usize {
        (i + self.points.len() / 2) % self.points.len()
    }

    fn resolution(&self) -> f64 {
        self.resolution
    }
}

/// Best witness pair found at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub eps: f64,
    /// Sample indices of the witnesses `u` (near `x`) and `v` (near `-x`).
    pub u: Option<usize>,
    pub v: Option<usize>,
    /// Smallest `d(u, v)` over admissible pairs.
    pub chord: f64,
    /// Threshold `2 - delta eps` (absent when no delta is under test).
    pub bound: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricOutcome {
    pub passed: bool,
    pub transcript: Vec<WitnessRow>,
}

fn check_grid(sample: &dyn MetricSample, eps_grid: &[f64]) -> Result<()> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Domain("eps grid must be non-empty and positive".into()));
    }
    let min_eps = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if sample.resolution() > min_eps / 4.0 {
        return Err(Error::Precondition(format!(
            "sample resolution {:.3e} is coarser than min(eps)/4 = {:.3e}",
            sample.resolution(),
            min_eps / 4.0
        )));
    }
    Ok(())
}

/// Largest candidate window searched exhaustively; wider windows are thinned
/// to every k-th sample point.
const WINDOW_CAP: usize = 256;

/// For each radius, the closest pair `u ~ x`, `v ~ -x` (both within `eps`,
/// neither equal to `x` or `-x`), found exhaustively over the window.
fn metric_profile(sample: &dyn MetricSample, x: usize, eps_grid: &[f64]) -> Vec<WitnessRow> {
    let xa = sample.antipode(x);
    let max_eps = eps_grid.iter().copied().fold(0.0, f64::max);
    let us: Vec<(usize, f64)> = (0..sample.len())
        .filter(|&i| i != x && i != xa)
        .map(|i| (i, sample.dist(i, x)))
        .filter(|&(_, d)| d <= max_eps)
        .collect();
    eps_grid
        .iter()
        .map(|&eps| {
            let window: Vec<usize> = us.iter().filter(|&&(_, d)| d <= eps).map(|&(i, _)| i).collect();
            let stride = window.len().div_ceil(WINDOW_CAP).max(1);
            let window: Vec<usize> = window.into_iter().step_by(stride).collect();
            // the antipodal map is an isometry, so the points near -x are the
            // antipodes of those near x and d(u, -w) = d(w, -u)
            let mut best: Option<(usize, usize, f64)> = None;
            for (a, &u) in window.iter().enumerate() {
                for &w in &window[a..] {
                    let d = sample.dist(u, sample.antipode(w));
                    if best.is_none_or(|(_, _, b)| d < b) {
                        best = Some((u, sample.antipode(w), d));
                    }
                }
            }
            WitnessRow {
                eps,
                u: best.map(|b| b.0),
                v: best.map(|b| b.1),
                chord: best.map_or(f64::INFINITY, |b| b.2),
                bound: None,
                passed: false,
            }
        })
        .collect()
}

/// Whether, at every `eps` of the grid, some `u`, `v` with `d(u,x), d(v,-x) <= eps`
/// satisfy `d(u,v) <= 2 - delta eps`. Uses the sample only as a metric space.
pub fn metric_nd_test(sample: &dyn MetricSample, x: usize, delta: f64, eps_grid: &[f64]) -> Result<MetricOutcome> {
    check_grid(sample, eps_grid)?;
    let transcript: Vec<WitnessRow> = metric_profile(sample, x, eps_grid)
        .into_iter()
        .map(|mut row| {
            let bound = 2.0 - delta * row.eps;
            row.bound = Some(bound);
            row.passed = row.chord <= bound;
            row
        })
        .collect();
    Ok(MetricOutcome {
        passed: transcript.iter().all(|r| r.passed),
        transcript,
    })
}

/// Metric classification of one probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricVerdict {
    pub index: usize,
    pub corner: bool,
    /// Largest delta for which the test passes on the whole grid:
    /// `min over eps of (2 - chord(eps)) / eps`.
    pub delta_star: f64,
    pub transcript: Vec<WitnessRow>,
}

/// Classify each probe as a corner iff the metric test passes for some delta
/// of `delta_grid`.
pub fn nd_classify_metric(
    sample: &dyn MetricSample,
    probes: &[usize],
    delta_grid: &[f64],
    eps_grid: &[f64],
) -> Result<Vec<MetricVerdict>> {
    check_grid(sample, eps_grid)?;
    if delta_grid.is_empty() || delta_grid.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::Domain("delta grid must be non-empty and positive".into()));
    }
    let delta_min = delta_grid.iter().copied().fold(f64::INFINITY, f64::min);
    probes
        .iter()
        .map(|&x| {
            let mut rows = metric_profile(sample, x, eps_grid);
            let delta_star = rows
                .iter()
                .map(|r| (2.0 - r.chord) / r.eps)
                .fold(f64::INFINITY, f64::min);
            // the test passes for delta iff delta <= delta_star; record it at the smallest grid value
            for r in rows.iter_mut() {
                let bound = 2.0 - delta_min * r.eps;
                r.bound = Some(bound);
                r.passed = r.chord <= bound;
            }
            Ok(MetricVerdict {
                index: x,
                corner: delta_star >= delta_min,
                delta_star,
                transcript: rows,
            })
        })
        .collect()
}

/// `n` values spaced logarithmically from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Default delta grid of the metric classification: six values from 0.1 to 1.
/// Down to eps = 0.002 on fine samples, smooth points reach delta* of a few
/// hundredths, corners stay above 0.3.
pub fn default_delta_grid() -> Vec<f64> {
    log_grid(0.1, 1.0, 6)
}

/// One-sided slopes of `G(t) = ||gamma(t) - y||` at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub left: f64,
    pub right: f64,
    pub spread: f64,
}

pub fn g_slopes(param: &NaturalParam, y: Vec2, h_grid: &[f64]) -> Slopes {
    let norm = param.curve().ambient();
    let g = |t: f64| norm.dist(param.eval(t), y);
    let g0 = g(0.0);
    let right: Vec<f64> = h_grid.iter().map(|h| (g(*h) - g0) / h).collect();
    let left: Vec<f64> = h_grid.iter().map(|h| (g0 - g(-*h)) / h).collect();
    let r = richardson(h_grid, &right);
    let l = richardson(h_grid, &left);
    Slopes {
        left: l.value,
        right: r.value,
        spread: l.disagreement.max(r.disagreement),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarVerdict {
    Differentiable,
    NotDifferentiable,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarTest {
    pub verdict: FarVerdict,
    pub slopes: Slopes,
}

/// Classify a slope pair with the dead band `[SLOPE_SMOOTH, SLOPE_GAP]`.
pub fn far_verdict(slopes: &Slopes) -> FarVerdict {
    let gap = (slopes.right - slopes.left).abs();
    if slopes.spread > SLOPE_SPREAD {
        FarVerdict::Inconclusive
    } else if gap > SLOPE_GAP {
        FarVerdict::NotDifferentiable
    } else if gap < SLOPE_SMOOTH {
        FarVerdict::Differentiable
    } else {
        FarVerdict::Inconclusive
    }
}

/// Far-field test at `x` through the chord `z - y = l x`, `0 < l < 2`, with `z`
/// a smooth point: differentiability of `G(t) = ||gamma_z(t) - y||` at 0.
pub fn far_test_g(norm: &Norm, x: Vec2, y: Vec2, z: Vec2, h_grid: &[f64]) -> Result<FarTest> {
    let sphere = ConvexCurve::from_norm(norm);
    for (name, p) in [("x", x), ("y", y), ("z", z)] {
        if (norm.eval(p) - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("{name} is not on the unit sphere")));
        }
    }
    let d = z - y;
    let lambda = d.dot(x) / x.dot(x);
    if (d - x * lambda).max_abs() > 1e-9 * (1.0 + d.max_abs()) {
        return Err(Error::Precondition("z - y is not parallel to x".into()));
    }
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::Precondition(format!(
            "z - y = {lambda} x with the factor outside (0, 2)"
        )));
    }
    let param = NaturalParam::new(&sphere, z, 512)?;
    let reading = nd_oracle(&param, 0.0, CORNER_GAP);
    if reading.status != NdStatus::Smooth {
        return Err(Error::Precondition(format!("z is a {:?} point", reading.status)));
    }
    let slopes = g_slopes(&param, y, h_grid);
    Ok(FarTest {
        verdict: far_verdict(&slopes),
        slopes,
    })
}

/// Predicted left slope of `G` at a corner `x`: the second coordinate of
/// `gamma_z'(0)` in the basis `{-gamma_x,-'(0), x}`.
pub fn predicted_left_slope(norm: &Norm, x: Vec2, z: Vec2) -> Result<f64> {
    let sphere = ConvexCurve::from_norm(norm);
    let px = NaturalParam::new(&sphere, x, 512)?;
    let pz = NaturalParam::new(&sphere, z, 512)?;
    let xl = px.side_derivative(0.0, Side::Left);
    let dz = pz.side_derivative(0.0, Side::Right);
    let (_, z2) = coords_in_basis(dz, -xl, x).ok_or_else(|| Error::Internal("degenerate slope basis".into()))?;
    Ok(z2)
}

/// Chords of the unit sphere parallel to the unit vector `x`: `count` triples
/// `(x, y, z)` with `z - y = l x`, `0 < l < 2`, offsets spread across the ball.
pub fn admissible_triples(norm: &Norm, x: Vec2, count: usize) -> Vec<(Vec2, Vec2, Vec2)> {
    let sphere = ConvexCurve::from_norm(norm);
    let n = x.perp() / x.euclid();
    let width = sphere.support_point(n).dot(n);
    let mut out = Vec::with_capacity(count);
    let half = count.div_ceil(2);
    for k in 1..=half {
        for sign in [1.0, -1.0] {
            if out.len() == count {
                break;
            }
            let s = sign * width * k as f64 / (half + 1) as f64;
            if let Some((y, z)) = chord_along(norm, n * s, x) {
                out.push((x, y, z));
            }
        }
    }
    out
}

/// Endpoints `(y, z)` of the chord of the unit sphere on the line `o + R x`,
/// ordered so that `z - y` is a positive multiple of `x`.
pub fn chord_along(norm: &Norm, o: Vec2, x: Vec2) -> Option<(Vec2, Vec2)> {
    let f = |r: f64| norm.eval(o + x * r) - 1.0;
    let reach = 4.0 * norm.ball_radii().1 / x.euclid();
    let (mid, fmin) = crate::numeric::golden_section_min(f, -reach, reach, 1e-14);
    if fmin >= 0.0 {
        return None;
    }
    let lo = crate::numeric::bisect_root(f, -reach, mid, 1e-16)?;
    let hi = crate::numeric::bisect_root(f, mid, reach, 1e-16)?;
    // snap onto the sphere radially to remove bisection residue
    let y = norm.normalize(o + x * lo);
    let z = norm.normalize(o + x * hi);
    Some((y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;
    use crate::param::DERIVATIVE_STEPS;

    fn sphere_param(spec: NormSpec, base: Vec2) -> NaturalParam {
        let c = ConvexCurve::unit_sphere(spec).unwrap();
        NaturalParam::new(&c, base, 1024).unwrap()
    }

    #[test]
    fn oracle_examples() {
        let hx = sphere_param(NormSpec::Hexagonal, Vec2::E2);
        assert_eq!(nd_oracle(&hx, 0.0, CORNER_GAP).status, NdStatus::Corner);
        let sq = sphere_param(NormSpec::p_inf(), Vec2::new(1.0, 1.0));
        assert_eq!(nd_oracle(&sq, 0.0, CORNER_GAP).status, NdStatus::Corner);
        assert_eq!(nd_oracle(&sq, 1.0, CORNER_GAP).status, NdStatus::Smooth);
        let l2 = sphere_param(NormSpec::p(2.0), Vec2::E1);
        for k in 0..50 {
            assert_eq!(nd_oracle(&l2, k as f64 * 0.13, CORNER_GAP).status, NdStatus::Smooth);
        }
    }

    #[test]
    fn corner_bases_by_hand() {
        let sq = sphere_param(NormSpec::p_inf(), Vec2::new(1.0, 1.0));
        let cb = corner_basis(&sq, 0.0).unwrap();
        assert_eq!(cb.y, Vec2::new(-1.0, 0.0));
        assert_eq!(cb.z, Vec2::new(0.0, 1.0));
        assert_eq!(cb.z_coords, (1.0, 1.0));
        assert_eq!(cb.delta_cert, 0.5);

        let hx = sphere_param(NormSpec::Hexagonal, Vec2::E2);
        let cb = corner_basis(&hx, 0.0).unwrap();
        assert_eq!(cb.y, Vec2::new(-1.0, -1.0));
        assert_eq!(cb.z, Vec2::new(-1.0, 0.0));
        assert_eq!(cb.delta_cert, 0.5);

        assert!(matches!(corner_basis(&sq, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn metric_test_hexagon_corner_and_circle() {
        let hx = sphere_param(NormSpec::Hexagonal, Vec2::E2);
        let sample = SphereSample::new(&hx, 2400, 0.0).unwrap();
        let cb = corner_basis(&hx, 0.0).unwrap();
        let grid = [0.2, 0.1, 0.05, 0.02];
        assert!(metric_nd_test(&sample, 0, cb.delta_cert, &grid).unwrap().passed);

        let l2 = sphere_param(NormSpec::p(2.0), Vec2::E1);
        let sample = SphereSample::new(&l2, 2400, 0.0).unwrap();
        let out = metric_nd_test(&sample, 0, 0.5, &grid).unwrap();
        assert!(!out.passed);
        assert!(!out.transcript.last().unwrap().passed);
    }

    #[test]
    fn coarse_sample_is_rejected() {
        let l2 = sphere_param(NormSpec::p(2.0), Vec2::E1);
        let sample = SphereSample::new(&l2, 64, 0.0).unwrap();
        assert!(matches!(
            metric_nd_test(&sample, 0, 0.5, &EPS_GRID),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hexagon_far_test_is_blind_to_the_corner() {
        let hex = Norm::new(NormSpec::Hexagonal).unwrap();
        let (x, y, z) = (Vec2::E2, Vec2::new(1.0, 1.0 / 3.0), Vec2::new(1.0, 2.0 / 3.0));
        let out = far_test_g(&hex, x, y, z, &DERIVATIVE_STEPS).unwrap();
        assert_eq!(out.verdict, FarVerdict::Differentiable);
        assert!((out.slopes.left - 1.0).abs() < 1e-9 && (out.slopes.right - 1.0).abs() < 1e-9);
        assert!(far_test_g(&hex, x, y, Vec2::new(1.0, 1.0), &DERIVATIVE_STEPS).is_err());
    }

    #[test]
    fn admissible_triples_are_chords() {
        let n = Norm::new(NormSpec::p(3.0)).unwrap();
        let x = n.normalize(Vec2::new(0.3, 1.0));
        let triples = admissible_triples(&n, x, 20);
        assert_eq!(triples.len(), 20);
        for (x, y, z) in triples {
            let d = z - y;
            assert!(d.cross(x).abs() < 1e-9);
            assert!(d.dot(x) > 0.0);
            assert!((n.eval(y) - 1.0).abs() < 1e-12 && (n.eval(z) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.25, 1.0, 5);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 0.25).abs() < 1e-15 && (g[4] - 1.0).abs() < 1e-15);
    }
}
