//! Maps between convex curves: isometry checks, linear and affine fits, and the
//! coordinate-sharing constructions (chord triples, zigzags, staircases).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curve::{ConvexCurve, Extreme, LineMeet};
use crate::diff::{far_verdict, g_slopes, FarVerdict, Slopes};
use crate::error::{Error, Result};
use crate::norm::{parse_matrix, parse_vec2, Norm};
use crate::numeric::{bisect_root, golden_section_min, wrap};
use crate::param::{NaturalParam, DERIVATIVE_STEPS};
use crate::vec2::{Mat2, Vec2};

/// Breakpoint resolution of the parameterizations built by this module.
pub const MAP_RESOLUTION: usize = 512;

/// How a sphere map is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum MapForm {
    /// Periodic piecewise-linear correspondence `t -> s` between natural parameters.
    ParamTable { pairs: Vec<[f64; 2]>, reversing: bool },
    /// Restriction of a linear map.
    Linear { matrix: Mat2 },
}

/// A map from one convex curve onto another.
#[derive(Clone, Debug)]
pub struct SphereMap {
    source: NaturalParam,
    target: NaturalParam,
    form: MapForm,
}

impl SphereMap {
    /// `u -> m u`; every sampled image must lie on `target` within `1e-7`.
    pub fn linear(source: &ConvexCurve, target: &ConvexCurve, m: Mat2) -> Result<Self> {
        if m.inverse().is_none() || !m.is_finite() {
            return Err(Error::Domain("linear map must be finite and invertible".into()));
        }
        let base = source.radial_point(0.0);
        let source = NaturalParam::new(source, base, MAP_RESOLUTION)?;
        let image = m.apply(base);
        if !target.contains(image, 1e-7 * (1.0 + image.max_abs())) {
            return Err(Error::Validation(
                "the matrix does not map the source onto the target".into(),
            ));
        }
        let target = NaturalParam::new(target, image, MAP_RESOLUTION)?;
        let l = source.period();
        for k in 0..256 {
            let p = m.apply(source.eval(l * k as f64 / 256.0));
            if !target.curve().contains(p, 1e-7 * (1.0 + p.max_abs())) {
                return Err(Error::Validation(format!(
                    "image ({:.6}, {:.6}) of a source point is off the target",
                    p.x1, p.x2
                )));
            }
        }
        Ok(SphereMap {
            source,
            target,
            form: MapForm::Linear { matrix: m },
        })
    }

    /// Correspondence of natural parameters given by `pairs`, extended
    /// periodically and interpolated linearly.
    pub fn param_table(source: NaturalParam, target: NaturalParam, pairs: Vec<[f64; 2]>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::config("pairs", "need at least two (t, s) pairs"));
        }
        if pairs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::config("pairs", "entries must be finite"));
        }
        let (lx, ly) = (source.period(), target.period());
        let increasing_t = pairs.windows(2).all(|w| w[1][0] > w[0][0]);
        if !increasing_t || pairs[pairs.len() - 1][0] - pairs[0][0] >= lx {
            return Err(Error::config(
                "pairs",
                "source parameters must increase strictly within one period",
            ));
        }
        let up = pairs.windows(2).all(|w| w[1][1] > w[0][1]);
        let down = pairs.windows(2).all(|w| w[1][1] < w[0][1]);
        if !(up || down) || (pairs[pairs.len() - 1][1] - pairs[0][1]).abs() >= ly {
            return Err(Error::config(
                "pairs",
                "target parameters must be strictly monotone within one period",
            ));
        }
        Ok(SphereMap {
            source,
            target,
            form: MapForm::ParamTable { pairs, reversing: down },
        })
    }

    /// Table form of the linear map `m`, with `nodes` equally spaced source parameters.
    pub fn table_from_linear(source: &ConvexCurve, target: &ConvexCurve, m: Mat2, nodes: usize) -> Result<Self> {
        let lin = SphereMap::linear(source, target, m)?;
        let l = lin.source.period();
        let reversing = m.det() < 0.0;
        let ly = lin.target.period();
        let mut pairs: Vec<[f64; 2]> = Vec::with_capacity(nodes);
        for k in 0..nodes.max(2) {
            let t = l * k as f64 / nodes.max(2) as f64;
            let mut s = lin.target.param_of(lin.image_at(t));
            // unwrap so the table stays monotone
            if let Some(prev) = pairs.last() {
                let prev = prev[1];
                if reversing {
                    while s >= prev {
                        s -= ly;
                    }
                } else {
                    while s <= prev {
                        s += ly;
                    }
                }
            }
            pairs.push([t, s]);
        }
        SphereMap::param_table(lin.source, lin.target, pairs)
    }

    /// Copy of a table map with every target parameter moved by an independent
    /// uniform offset of size up to `amplitude`; the nodes must stay monotone.
    pub fn with_noise(&self, amplitude: f64, seed: u64) -> Result<Self> {
        let MapForm::ParamTable { pairs, .. } = &self.form else {
            return Err(Error::Precondition("noise applies to table maps".into()));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = pairs
            .iter()
            .map(|&[t, s]| [t, s + amplitude * rng.gen_range(-1.0..=1.0)])
            .collect();
        SphereMap::param_table(self.source.clone(), self.target.clone(), pairs)
    }

    pub fn source(&self) -> &NaturalParam {
        &self.source
    }

    pub fn target(&self) -> &NaturalParam {
        &self.target
    }

    pub fn form(&self) -> &MapForm {
        &self.form
    }

    /// Image of the source point with natural parameter `t`.
    pub fn image_at(&self, t: f64) -> Vec2 {
        match &self.form {
            MapForm::Linear { matrix } => matrix.apply(self.source.eval(t)),
            MapForm::ParamTable { pairs, reversing } => self.target.eval(self.table_value(pairs, *reversing, t)),
        }
    }

    /// Image of a source curve point.
    pub fn apply(&self, u: Vec2) -> Vec2 {
        match &self.form {
            MapForm::Linear { matrix } => matrix.apply(u),
            MapForm::ParamTable { .. } => self.image_at(self.source.param_of(u)),
        }
    }

    fn table_value(&self, pairs: &[[f64; 2]], reversing: bool, t: f64) -> f64 {
        let (lx, ly) = (self.source.period(), self.target.period());
        let t0 = pairs[0][0];
        let u = t0 + wrap(t - t0, lx);
        let k = pairs.partition_point(|p| p[0] <= u);
        let (a, b) = if k < pairs.len() {
            (pairs[k - 1], pairs[k])
        } else {
            let first = pairs[0];
            let s_end = if reversing { first[1] - ly } else { first[1] + ly };
            (pairs[pairs.len() - 1], [first[0] + lx, s_end])
        };
        let w = (u - a[0]) / (b[0] - a[0]);
        a[1] + w * (b[1] - a[1])
    }

    /// Source parameters worth probing: table nodes and interval midpoints.
    fn table_params(&self) -> Vec<f64> {
        match &self.form {
            MapForm::Linear { .. } => Vec::new(),
            MapForm::ParamTable { pairs, .. } => {
                let l = self.source.period();
                let n = pairs.len();
                (0..n)
                    .flat_map(|i| {
                        let t = pairs[i][0];
                        let next = if i + 1 < n { pairs[i + 1][0] } else { pairs[0][0] + l };
                        [t, 0.5 * (t + next)]
                    })
                    .collect()
            }
        }
    }
}

/// Parsed map file: `{"form": "param_table", "pairs": [[t, s], ...]}` or
/// `{"form": "linear", "matrix": [[a, b], [c, d]]}`, with optional
/// `source_base` / `target_base` points fixing where parameters start.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFile {
    pub form: MapFileForm,
    pub source_base: Option<Vec2>,
    pub target_base: Option<Vec2>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapFileForm {
    ParamTable(Vec<[f64; 2]>),
    Linear(Mat2),
}

impl MapFile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        let obj = v.as_object().ok_or_else(|| Error::config("$", "expected an object"))?;
        let form = match obj.get("form").and_then(Value::as_str) {
            Some("param_table") => {
                let arr = obj
                    .get("pairs")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::config("pairs", "expected an array of [t, s] pairs"))?;
                let pairs = arr
                    .iter()
                    .enumerate()
                    .map(|(i, p)| parse_vec2(p, &format!("pairs[{i}]")).map(|v| [v.x1, v.x2]))
                    .collect::<Result<Vec<_>>>()?;
                MapFileForm::ParamTable(pairs)
            }
            Some("linear") => MapFileForm::Linear(parse_matrix(obj.get("matrix"), "matrix")?),
            Some(other) => return Err(Error::config("form", format!("unknown form `{other}`"))),
            None => return Err(Error::config("form", "missing")),
        };
        let base = |key: &str| obj.get(key).map(|v| parse_vec2(v, key)).transpose();
        Ok(MapFile {
            form,
            source_base: base("source_base")?,
            target_base: base("target_base")?,
        })
    }

    /// Build the map between `source` and `target`. Missing bases default to
    /// the curve point at polar angle 0 about the interior point.
    pub fn build(&self, source: &ConvexCurve, target: &ConvexCurve) -> Result<SphereMap> {
        match &self.form {
            MapFileForm::Linear(m) => SphereMap::linear(source, target, *m),
            MapFileForm::ParamTable(pairs) => {
                let sb = self.source_base.unwrap_or_else(|| source.radial_point(0.0));
                let tb = self.target_base.unwrap_or_else(|| target.radial_point(0.0));
                let sp = NaturalParam::new(source, sb, MAP_RESOLUTION)?;
                let tp = NaturalParam::new(target, tb, MAP_RESOLUTION)?;
                SphereMap::param_table(sp, tp, pairs.clone())
            }
        }
    }
}

/// Count of distortions per decade: `exponent` is `floor(log10(d))`, with
/// zero and anything below `1e-16` reported as `-17`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecadeBin {
    pub exponent: i32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub max: f64,
    pub pairs: usize,
    /// Source points of the worst pair.
    pub worst: (Vec2, Vec2),
    pub histogram: Vec<DecadeBin>,
}

fn histogram(values: &[f64]) -> Vec<DecadeBin> {
    let mut bins: std::collections::BTreeMap<i32, usize> = std::collections::BTreeMap::new();
    for &v in values {
        let e = if v < 1e-16 { -17 } else { v.log10().floor() as i32 };
        *bins.entry(e).or_default() += 1;
    }
    bins.into_iter()
        .map(|(exponent, count)| DecadeBin { exponent, count })
        .collect()
}

/// Source parameter of the antipode of `gamma(t)`, or `t + L/2` on curves
/// without central symmetry.
fn antipode_param(p: &NaturalParam, t: f64) -> f64 {
    if p.curve().is_centrally_symmetric() {
        p.param_of(-p.eval(t))
    } else {
        t + 0.5 * p.period()
    }
}

/// Largest `| d_Y(tau u, tau v) - d_X(u, v) |` over `samples` random pairs,
/// the same number of near-coincident and of near-antipodal pairs, and the
/// table nodes and midpoints paired with random partners.
pub fn check_isometry(map: &SphereMap, samples: usize, seed: u64) -> Distortion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = map.source.period();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(3 * samples);
    for _ in 0..samples {
        pairs.push((rng.gen_range(0.0..l), rng.gen_range(0.0..l)));
    }
    for _ in 0..samples {
        let t = rng.gen_range(0.0..l);
        pairs.push((t, t + rng.gen_range(1e-6..1e-2) * l));
    }
    for _ in 0..samples {
        let t = rng.gen_range(0.0..l);
        pairs.push((t, antipode_param(&map.source, t) + rng.gen_range(-1e-3..1e-3) * l));
    }
    for t in map.table_params() {
        pairs.push((t, rng.gen_range(0.0..l)));
    }
    let dx = map.source.curve().ambient();
    let dy = map.target.curve().ambient();
    let mut values = Vec::with_capacity(pairs.len());
    let mut worst = (0.0, (Vec2::ZERO, Vec2::ZERO));
    for (s, t) in pairs {
        let (u, v) = (map.source.eval(s), map.source.eval(t));
        let d = (dy.dist(map.image_at(s), map.image_at(t)) - dx.dist(u, v)).abs();
        if d > worst.0 || values.is_empty() {
            worst = (d, (u, v));
        }
        values.push(d);
    }
    Distortion {
        max: worst.0,
        pairs: values.len(),
        worst: worst.1,
        histogram: histogram(&values),
    }
}

/// `max ||tau(-x) + tau(x)||_Y` over `samples` equally spaced source points.
pub fn check_antipodes(map: &SphereMap, samples: usize) -> Result<f64> {
    if !map.source.curve().is_centrally_symmetric() || !map.target.curve().is_centrally_symmetric() {
        return Err(Error::Precondition(
            "antipodes need centrally symmetric source and target".into(),
        ));
    }
    let l = map.source.period();
    let norm = map.target.curve().ambient();
    Ok((0..samples.max(1))
        .map(|k| {
            let t = l * k as f64 / samples.max(1) as f64;
            norm.eval(map.image_at(t) + map.image_at(antipode_param(&map.source, t)))
        })
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub matrix: Mat2,
    /// `max ||tau(u) - T u||_Y` over the probed source points.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub matrix: Mat2,
    pub offset: Vec2,
    pub residual: f64,
}

fn probe_params(map: &SphereMap, samples: usize) -> Vec<f64> {
    let l = map.source.period();
    let n = samples.max(1);
    let mut ts: Vec<f64> = (0..n).map(|k| l * (k as f64 + 0.5) / n as f64).collect();
    ts.extend(map.table_params());
    ts
}

fn residual_of(map: &SphereMap, samples: usize, f: impl Fn(Vec2) -> Vec2) -> f64 {
    let norm = map.target.curve().ambient();
    probe_params(map, samples)
        .into_iter()
        .map(|t| norm.dist(map.image_at(t), f(map.source.eval(t))))
        .fold(0.0, f64::max)
}

/// The linear `T` with `T x = tau(x)`, `T xbar = tau(xbar)`, and how far `tau`
/// is from `T` on `samples` source points.
pub fn fit_linear(map: &SphereMap, x: Vec2, xbar: Vec2, samples: usize) -> Result<LinearFit> {
    let bx = Mat2::from_columns(x, xbar);
    let inv = bx
        .inverse()
        .filter(|_| x.cross(xbar).abs() > 1e-12 * x.euclid() * xbar.euclid())
        .ok_or_else(|| Error::Domain("basis vectors are linearly dependent".into()))?;
    let by = Mat2::from_columns(map.apply(x), map.apply(xbar));
    let t = by.mul(&inv);
    let residual = residual_of(map, samples, |u| t.apply(u));
    Ok(LinearFit { matrix: t, residual })
}

/// The affine map through the images of three anchors, and its residual.
pub fn fit_affine(map: &SphereMap, anchors: [Vec2; 3], samples: usize) -> Result<AffineFit> {
    let [a, b, c] = anchors;
    let (e1, e2) = (b - a, c - a);
    let scale = e1.euclid() * e2.euclid();
    let area = e1.cross(e2).abs();
    if area.is_nan() || area <= 1e-12 * scale {
        return Err(Error::Domain("anchor points are collinear".into()));
    }
    let [ta, tb, tc] = anchors.map(|p| map.apply(p));
    let inv = Mat2::from_columns(e1, e2).inverse().expect("non-collinear anchors");
    let t = Mat2::from_columns(tb - ta, tc - ta).mul(&inv);
    let offset = ta - t.apply(a);
    let residual = residual_of(map, samples, |u| t.apply(u) + offset);
    Ok(AffineFit {
        matrix: t,
        offset,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TripleOutcome {
    /// Triples with every pairwise distance at least `target - margin`.
    Found { triples: Vec<[Vec2; 3]> },
    /// No triple of the net, nor of the sphere, reaches `target - margin`.
    CertifiedAbsent,
    /// Neither found nor excluded at the finest searched level.
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSearch {
    pub target: f64,
    pub margin: f64,
    /// Arc-length spacing `h` of the net the claim is about.
    pub net_spacing: f64,
    pub net_points: usize,
    /// Spacing of the finest sub-net searched exhaustively.
    pub searched_spacing: f64,
    pub searched_points: usize,
    /// Largest smallest-pairwise-distance over the searched sub-net.
    pub best: f64,
    /// `best + searched_spacing`: bounds the same quantity on the full net.
    pub upper_bound: f64,
    pub outcome: TripleOutcome,
}

const MAX_TRIPLES: usize = 8;

/// Look for triples of sphere points at pairwise distance `target`.
///
/// The sphere is netted by `net_points` points equally spaced in arc length
/// (spacing at most `h`). Nested sub-nets of 480, 960, ... points are searched
/// exhaustively; a sub-net best `B` at spacing `H` bounds the full net by
/// `B + H`, and absence is certified once `B + H < target - margin - 4h`.
pub fn equilateral_triples(norm: &Norm, target: f64, margin: f64, h: f64) -> Result<TripleSearch> {
    if !(h > 0.0 && margin >= 0.0 && target > 0.0) {
        return Err(Error::Domain("need h > 0, margin >= 0 and target > 0".into()));
    }
    let sphere = ConvexCurve::from_norm(norm);
    let base = norm.corners().first().copied().unwrap_or_else(|| norm.radial(0.0));
    let param = NaturalParam::new(&sphere, base, MAP_RESOLUTION)?;
    let l = param.period();
    let mut m = 480usize;
    let net_points = m * ((l / (h * m as f64)).ceil() as usize).max(1);
    let h_eff = l / net_points as f64;
    let goal = target - margin;
    loop {
        let pts: Vec<Vec2> = (0..m).map(|k| param.eval(l * k as f64 / m as f64)).collect();
        let d: Vec<f64> = (0..m * m).map(|ij| norm.dist(pts[ij / m], pts[ij % m])).collect();
        let (best, triples) = best_triple(&pts, &d, goal);
        let spacing = l / m as f64;
        let upper_bound = best + spacing;
        let outcome = if !triples.is_empty() {
            Some(TripleOutcome::Found { triples })
        } else if upper_bound < goal - 4.0 * h_eff {
            Some(TripleOutcome::CertifiedAbsent)
        } else if m >= net_points || m >= 1920 {
            Some(TripleOutcome::Undecided)
        } else {
            None
        };
        if let Some(outcome) = outcome {
            return Ok(TripleSearch {
                target,
                margin,
                net_spacing: h_eff,
                net_points,
                searched_spacing: spacing,
                searched_points: m,
                best,
                upper_bound,
                outcome,
            });
        }
        m *= 2;
    }
}

/// Exhaustive max-min triple over `pts` with the distance table `d`, and up
/// to [`MAX_TRIPLES`] triples reaching `goal`.
fn best_triple(pts: &[Vec2], d: &[f64], goal: f64) -> (f64, Vec<[Vec2; 3]>) {
    let m = pts.len();
    let mut best = 0.0f64;
    let mut found = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let dij = d[i * m + j];
            if dij <= best && dij < goal {
                continue;
            }
            for k in (j + 1)..m {
                let v = dij.min(d[i * m + k]).min(d[j * m + k]);
                if v > best {
                    best = v;
                }
                if v >= goal && found.len() < MAX_TRIPLES {
                    found.push([pts[i], pts[j], pts[k]]);
                }
            }
        }
    }
    (best, found)
}

/// Points `u, v, w` of a curve with `u - v = t x`, `w1 = u1` and `w2 = v2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordTriple {
    pub u: Vec2,
    pub v: Vec2,
    pub w: Vec2,
    pub t: f64,
}

impl ChordTriple {
    /// Largest violation of the three defining identities.
    pub fn defect(&self, x: Vec2) -> f64 {
        ((self.u - self.v) - x * self.t)
            .max_abs()
            .max((self.w.x1 - self.u.x1).abs())
            .max((self.w.x2 - self.v.x2).abs())
    }
}

/// The other point of the curve on the axis-parallel line through `p`
/// (`axis` 0: vertical line, 1: horizontal), `p` itself at a tangency.
fn far_partner(curve: &ConvexCurve, p: Vec2, axis: usize) -> Vec2 {
    let meet = if axis == 0 {
        curve.meet_vertical(p.x1)
    } else {
        curve.meet_horizontal(p.x2)
    };
    match meet {
        LineMeet::Empty => p,
        LineMeet::Points(lo, hi) | LineMeet::Segment(lo, hi) => {
            if (lo - p).euclid() >= (hi - p).euclid() {
                lo
            } else {
                hi
            }
        }
    }
}

/// A chord of direction `x` whose endpoints `u` (ahead) and `v` are joined by
/// a vertical step from `u` and a horizontal step from `v` meeting on the
/// curve at `w`. Needs the four coordinate extremes to be distinct points.
pub fn chord_triple(curve: &ConvexCurve, x: Vec2) -> Result<ChordTriple> {
    if !(x.is_finite() && x.euclid() > 0.0) {
        return Err(Error::Domain("direction must be a non-zero vector".into()));
    }
    let c = curve.interior_point();
    let scale = x.max_abs();
    let build = |o: Vec2| -> Option<ChordTriple> {
        let (v, u) = curve.chord(o, x)?;
        let t = (u - v).dot(x) / x.dot(x);
        Some(ChordTriple { u, v, w: u, t })
    };
    if x.x2.abs() <= 1e-15 * scale {
        // horizontal chords: w = u
        return build(c).ok_or_else(|| Error::Internal("no chord through the interior point".into()));
    }
    if x.x1.abs() <= 1e-15 * scale {
        // vertical chords: w = v
        let mut tr = build(c).ok_or_else(|| Error::Internal("no chord through the interior point".into()))?;
        tr.w = tr.v;
        return Ok(tr);
    }
    if !curve.extreme_points().all_distinct_points() {
        return Err(Error::Precondition(
            "some point is extreme in two coordinate directions; use zigzag instead".into(),
        ));
    }
    let n = x.perp();
    let hmax = curve.support_point(n).dot(n);
    let hmin = curve.support_point(-n).dot(n);
    let at = |s: f64| -> Option<ChordTriple> {
        let level = hmin + s * (hmax - hmin);
        let o = c + n * ((level - c.dot(n)) / n.dot(n));
        let mut tr = build(o)?;
        tr.w = far_partner(curve, tr.u, 0);
        Some(tr)
    };
    let gap = |s: f64| at(s).map_or(f64::NAN, |tr| tr.w.x2 - tr.v.x2);
    let grid: Vec<f64> = (0..=64).map(|k| 1e-4 + (1.0 - 2e-4) * k as f64 / 64.0).collect();
    let values: Vec<f64> = grid.iter().map(|&s| gap(s)).collect();
    let k = (0..64)
        .find(|&k| values[k].is_finite() && values[k + 1].is_finite() && values[k] * values[k + 1] <= 0.0)
        .ok_or_else(|| Error::Internal("no sign change of the step gap along the chord family".into()))?;
    let s = bisect_root(gap, grid[k], grid[k + 1], 1e-16).expect("bracketed");
    at(s).ok_or_else(|| Error::Internal("chord family lost at the root".into()))
}

/// Tip of [`drop_curve`] that is extreme both to the east and to the north.
pub const DROP_TIP: Vec2 = Vec2::new(2.0, 2.0);

/// Convex hull of the Euclidean unit disk and the tips `(2, 2)`, `(-2, -2)`,
/// measured in the Euclidean norm. Each tip is a strict extreme in two
/// coordinate directions.
pub fn drop_curve(arc_points: usize) -> Result<ConvexCurve> {
    ConvexCurve::disk_hull(&[DROP_TIP, -DROP_TIP], arc_points, crate::norm::NormSpec::p(2.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZigzagVerdict {
    /// Reached `||a_n - c|| <= 1e-6`.
    Converged,
    /// The start never moves.
    Fixed,
    /// Stopped moving away from `c`.
    Stalled,
    MaxIter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zigzag {
    pub iterates: Vec<Vec2>,
    pub verdict: ZigzagVerdict,
    /// Both coordinates of the iterates are monotone.
    pub monotone: bool,
}

/// Distance to `c` at which a zigzag counts as converged.
pub const ZIGZAG_TOL: f64 = 1e-6;

/// Curve points sharing a coordinate with `p`, vertical line first; a whole
/// edge on the line contributes its point closest to `c` and its endpoints.
fn coordinate_partners(curve: &ConvexCurve, p: Vec2, c: Vec2) -> Vec<Vec2> {
    let norm = curve.ambient();
    let mut out = Vec::with_capacity(6);
    for meet in [curve.meet_vertical(p.x1), curve.meet_horizontal(p.x2)] {
        match meet {
            LineMeet::Empty => {}
            LineMeet::Points(lo, hi) => out.extend([lo, hi]),
            LineMeet::Segment(lo, hi) => {
                let (s, _) = golden_section_min(|s| norm.dist(lo.lerp(hi, s), c), 0.0, 1.0, 1e-15);
                out.extend([lo.lerp(hi, s), lo, hi]);
            }
        }
    }
    out
}

fn is_doubly_extreme(curve: &ConvexCurve, c: Vec2) -> bool {
    let ex = curve.extreme_points();
    let tol = 1e-9 * (1.0 + c.max_abs());
    [ex.w, ex.s, ex.e, ex.n]
        .iter()
        .filter(|e| match e {
            Extreme::Point(p) => (*p - c).max_abs() <= tol,
            Extreme::Segment(a, b) => (*a - c).max_abs() <= tol || (*b - c).max_abs() <= tol,
        })
        .count()
        >= 2
}

fn monotone(values: impl Iterator<Item = f64> + Clone) -> bool {
    let v: Vec<f64> = values.collect();
    let up = v.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let down = v.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    up || down
}

/// Iterate `a_{n+1}` = the curve point closest to `c` among those sharing a
/// coordinate with `a_n`, preferring the vertical line on ties.
pub fn zigzag(curve: &ConvexCurve, c: Vec2, a: Vec2, max_iter: usize) -> Result<Zigzag> {
    let tol = 1e-9 * (1.0 + a.max_abs().max(c.max_abs()));
    if !curve.contains(c, tol) || !curve.contains(a, tol) {
        return Err(Error::Domain("c and a must lie on the curve".into()));
    }
    if !is_doubly_extreme(curve, c) {
        return Err(Error::Precondition(
            "c is not extreme in two coordinate directions".into(),
        ));
    }
    let norm = curve.ambient();
    let mut iterates = vec![a];
    let mut cur = a;
    let mut verdict = ZigzagVerdict::MaxIter;
    for n in 0..=max_iter {
        if norm.dist(cur, c) <= ZIGZAG_TOL {
            verdict = ZigzagVerdict::Converged;
            break;
        }
        if n == max_iter {
            break;
        }
        let cands = coordinate_partners(curve, cur, c);
        let here = norm.dist(cur, c);
        let best = cands.iter().map(|p| norm.dist(*p, c)).fold(here, f64::min);
        let slack = 1e-14 * (1.0 + best);
        let next = cands
            .iter()
            .copied()
            .find(|p| norm.dist(*p, c) <= best + slack)
            .unwrap_or(cur);
        if (next - cur).max_abs() <= 1e-12 * (1.0 + cur.max_abs()) || here <= best + slack {
            verdict = if n == 0 {
                ZigzagVerdict::Fixed
            } else {
                ZigzagVerdict::Stalled
            };
            break;
        }
        cur = next;
        iterates.push(cur);
    }
    let monotone = monotone(iterates.iter().map(|p| p.x1)) && monotone(iterates.iter().map(|p| p.x2));
    Ok(Zigzag {
        iterates,
        verdict,
        monotone,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StairStep {
    pub index: i64,
    pub point: Vec2,
}

/// Partner of `p` on the axis-parallel line through it. On a whole edge the
/// endpoints other than `p` are candidates and the one further along the curve
/// (anticlockwise from `p`) wins.
fn stair_partner(curve: &ConvexCurve, p: Vec2, axis: usize) -> Result<Vec2> {
    let meet = if axis == 0 {
        curve.meet_vertical(p.x1)
    } else {
        curve.meet_horizontal(p.x2)
    };
    match meet {
        LineMeet::Segment(lo, hi) => {
            let tol = 1e-12 * (1.0 + p.max_abs());
            let cands: Vec<Vec2> = [lo, hi].into_iter().filter(|q| (*q - p).max_abs() > tol).collect();
            match cands.len() {
                0 => Ok(p),
                1 => Ok(cands[0]),
                _ => {
                    let param = NaturalParam::new(curve, p, MAP_RESOLUTION)?;
                    let l = param.period();
                    let ahead = |q: Vec2| wrap(param.param_of(q), l);
                    Ok(if ahead(cands[0]) >= ahead(cands[1]) {
                        cands[0]
                    } else {
                        cands[1]
                    })
                }
            }
        }
        _ => Ok(far_partner(curve, p, axis)),
    }
}

/// The staircase through `a`: forward steps alternate horizontal then
/// vertical partners, backward steps vertical then horizontal. Returns the
/// points with index in `[n_min, n_max]` (the range is widened to contain 0).
pub fn staircase(curve: &ConvexCurve, a: Vec2, n_min: i64, n_max: i64) -> Result<Vec<StairStep>> {
    if !curve.contains(a, 1e-9 * (1.0 + a.max_abs())) {
        return Err(Error::Domain("a must lie on the curve".into()));
    }
    let (lo, hi) = (n_min.min(0), n_max.max(0));
    let mut back = Vec::new();
    let mut p = a;
    for k in 1..=(-lo) {
        p = stair_partner(curve, p, if k % 2 == 1 { 0 } else { 1 })?;
        back.push(StairStep { index: -k, point: p });
    }
    back.reverse();
    let mut steps = back;
    steps.push(StairStep { index: 0, point: a });
    let mut p = a;
    for k in 1..=hi {
        p = stair_partner(curve, p, if k % 2 == 1 { 1 } else { 0 })?;
        steps.push(StairStep { index: k, point: p });
    }
    Ok(steps
        .into_iter()
        .filter(|s| s.index >= n_min && s.index <= n_max)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NdifPoint {
    pub b: Vec2,
    /// Natural parameter of `b` from `a`.
    pub param: f64,
    pub verdict: FarVerdict,
    pub slopes: Slopes,
}

/// Classify `samples` points `b` equally spaced from `a` by whether
/// `t -> ||gamma_a(t) - b||` is differentiable at 0.
pub fn ndif_set(curve: &ConvexCurve, a: Vec2, samples: usize) -> Result<Vec<NdifPoint>> {
    let param = NaturalParam::new(curve, a, MAP_RESOLUTION)?;
    let l = param.period();
    let n = samples.max(1);
    Ok((0..n)
        .map(|k| {
            let t = l * k as f64 / n as f64;
            let b = param.eval(t);
            let slopes = g_slopes(&param, b, &DERIVATIVE_STEPS);
            NdifPoint {
                b,
                param: t,
                verdict: far_verdict(&slopes),
                slopes,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

    use super::*;
    use crate::norm::NormSpec;

    fn sphere(spec: NormSpec) -> ConvexCurve {
        ConvexCurve::unit_sphere(spec).unwrap()
    }

    fn pushforward_map(spec: NormSpec, m: Mat2) -> SphereMap {
        let src = sphere(spec.clone());
        let dst = sphere(NormSpec::pushforward(spec, m));
        SphereMap::linear(&src, &dst, m).unwrap()
    }

    #[test]
    fn pushforward_is_an_isometry() {
        let m = Mat2::new(1.3, 0.4, -0.2, 0.9);
        let map = pushforward_map(NormSpec::p(3.0), m);
        assert!(check_isometry(&map, 300, 7).max <= 1e-9);
        assert!(check_antipodes(&map, 200).unwrap() <= 1e-9);
        let fit = fit_linear(&map, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), 400).unwrap();
        assert!(fit.residual <= 1e-8);
        assert!(fit.matrix.max_abs_diff(&m) <= 1e-9);
    }

    #[test]
    fn identity_on_the_hexagon() {
        let hex = sphere(NormSpec::Hexagonal);
        let map = SphereMap::linear(&hex, &hex, Mat2::IDENTITY).unwrap();
        assert_eq!(check_isometry(&map, 100, 1).max, 0.0);
        assert!(check_antipodes(&map, 100).unwrap() <= 1e-12);
        let fit = fit_linear(&map, Vec2::E1, Vec2::E2, 200).unwrap();
        assert_eq!(fit.matrix, Mat2::IDENTITY);
        assert_eq!(fit.residual, 0.0);
        assert!(matches!(
            fit_linear(&map, Vec2::E1, -Vec2::E1, 10),
            Err(Error::Domain(_))
        ));
    }

    fn wobble_map() -> SphereMap {
        let circle = sphere(NormSpec::p(2.0));
        let p = NaturalParam::new(&circle, Vec2::E1, MAP_RESOLUTION).unwrap();
        let pairs = (0..720)
            .map(|k| {
                let t = TAU * k as f64 / 720.0;
                [t, t + 0.3 * t.sin()]
            })
            .collect();
        SphereMap::param_table(p.clone(), p, pairs).unwrap()
    }

    #[test]
    fn wobbled_circle_is_rejected() {
        let map = wobble_map();
        assert!(check_isometry(&map, 300, 3).max > 0.01);
        assert!(check_antipodes(&map, 200).unwrap() > 0.01);
        let fit = fit_linear(&map, Vec2::E1, Vec2::E2, 400).unwrap();
        assert!(fit.residual > 0.01);
    }

    #[test]
    fn table_of_a_linear_map_matches_it() {
        for m in [Mat2::new(1.3, 0.4, -0.2, 0.9), Mat2::new(0.0, 1.0, 1.0, 0.0)] {
            let src = sphere(NormSpec::symmetric_disks(2, 0.5, 1.2));
            let dst = sphere(NormSpec::pushforward(NormSpec::symmetric_disks(2, 0.5, 1.2), m));
            let map = SphereMap::table_from_linear(&src, &dst, m, 4096).unwrap();
            assert!(check_isometry(&map, 200, 5).max < 1e-5);
            let coarse = SphereMap::table_from_linear(&src, &dst, m, 128).unwrap();
            let noisy = coarse.with_noise(1e-2, 9).unwrap();
            assert!(check_isometry(&noisy, 200, 5).max > 1e-3);
        }
    }

    #[test]
    fn translation_is_affine() {
        let src = sphere(NormSpec::symmetric_disks(6, 0.5, 1.2));
        let b = Vec2::new(3.0, -2.0);
        let dst = src.translated(b);
        let base = src.radial_point(0.0);
        let sp = NaturalParam::new(&src, base, MAP_RESOLUTION).unwrap();
        let tp = NaturalParam::new(&dst, base + b, MAP_RESOLUTION).unwrap();
        let map = SphereMap::param_table(sp, tp, vec![[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let anchors = [src.radial_point(0.3), src.radial_point(2.0), src.radial_point(4.0)];
        let fit = fit_affine(&map, anchors, 300).unwrap();
        assert!(fit.residual <= 1e-9, "{}", fit.residual);
        assert!(fit.matrix.max_abs_diff(&Mat2::IDENTITY) <= 1e-9);
        assert!((fit.offset - b).max_abs() <= 1e-9);
        let collinear = [Vec2::E1, Vec2::ZERO, -Vec2::E1];
        assert!(matches!(fit_affine(&map, collinear, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn map_files() {
        let f = MapFile::from_json_str(r#"{"form":"linear","matrix":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(f.form, MapFileForm::Linear(Mat2::IDENTITY));
        let f = MapFile::from_json_str(r#"{"form":"param_table","pairs":[[0,0],[1,1]],"source_base":[1,0]}"#).unwrap();
        assert_eq!(f.source_base, Some(Vec2::E1));
        let err = MapFile::from_json_str(r#"{"form":"param_table","pairs":[[0,0],[1]]}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "pairs[1]"));
        let err = MapFile::from_json_str(r#"{"form":"spiral"}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "form"));
        let circle = sphere(NormSpec::p(2.0));
        let bad = MapFile::from_json_str(r#"{"form":"param_table","pairs":[[0,0],[1,2],[2,1]]}"#).unwrap();
        assert!(bad.build(&circle, &circle).is_err());
    }

    #[test]
    fn equilateral_triples_examples() {
        let linf = Norm::new(NormSpec::p_inf()).unwrap();
        let r = equilateral_triples(&linf, 2.0, 1e-6, 1e-4).unwrap();
        let TripleOutcome::Found { triples } = r.outcome else {
            panic!("{r:?}")
        };
        for [a, b, c] in triples {
            for (p, q) in [(a, b), (a, c), (b, c)] {
                assert!(linf.dist(p, q) >= 2.0 - 1e-6);
            }
        }
        let hex = Norm::new(NormSpec::Hexagonal).unwrap();
        assert!(matches!(
            equilateral_triples(&hex, 2.0, 1e-6, 1e-4).unwrap().outcome,
            TripleOutcome::Found { .. }
        ));
        let l2 = Norm::new(NormSpec::p(2.0)).unwrap();
        let r = equilateral_triples(&l2, 2.0, 1e-3, 1e-4).unwrap();
        assert_eq!(r.outcome, TripleOutcome::CertifiedAbsent);
        assert!(r.net_spacing <= 1e-4);
        assert!((r.best - 3f64.sqrt()).abs() < 0.02);
    }

    #[test]
    fn chord_triples_on_the_circle() {
        let circle = sphere(NormSpec::p(2.0));
        let x = Vec2::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let tr = chord_triple(&circle, x).unwrap();
        assert!(tr.defect(x) <= 1e-9);
        assert!((tr.w.angle() + PI / 4.0).abs() < 1e-6, "{:?}", tr.w);
        let tr = chord_triple(&circle, Vec2::E1).unwrap();
        assert_eq!(tr.w, tr.u);
        assert!(tr.t > 0.0 && tr.defect(Vec2::E1) <= 1e-12);
        let hex = sphere(NormSpec::Hexagonal);
        let tr = chord_triple(&hex, Vec2::E2).unwrap();
        assert_eq!(tr.w, tr.v);
        assert!(matches!(
            chord_triple(&hex, Vec2::new(1.0, 2.0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zigzag_on_the_drop() {
        let drop = drop_curve(720).unwrap();
        let a = drop.radial_point(PI);
        let z = zigzag(&drop, DROP_TIP, a, 10_000).unwrap();
        assert_eq!(z.verdict, ZigzagVerdict::Converged);
        assert!(z.monotone);
        let fixed = zigzag(&drop, DROP_TIP, -DROP_TIP, 100).unwrap();
        assert_eq!(fixed.verdict, ZigzagVerdict::Fixed);
        assert_eq!(fixed.iterates, vec![-DROP_TIP]);
        let at_c = zigzag(&drop, DROP_TIP, DROP_TIP, 100).unwrap();
        assert_eq!(at_c.iterates, vec![DROP_TIP]);
        assert!(matches!(
            zigzag(&drop, drop.radial_point(0.3), a, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn staircase_on_circle_and_square() {
        let circle = sphere(NormSpec::p(2.0));
        let th = 0.4;
        let a = Vec2::from_angle(th);
        let st = staircase(&circle, a, -2, 4).unwrap();
        assert_eq!(st.first().unwrap().index, -2);
        let at = |i: i64| st.iter().find(|s| s.index == i).unwrap().point;
        assert!((at(1) - Vec2::from_angle(PI - th)).euclid() < 1e-9);
        assert!((at(2) - Vec2::from_angle(th - PI)).euclid() < 1e-9);
        assert!((at(4) - a).euclid() < 1e-9);
        assert!((at(-1) - Vec2::from_angle(-th)).euclid() < 1e-9);

        let square = sphere(NormSpec::p_inf());
        let st = staircase(&square, Vec2::E2, 0, 2).unwrap();
        assert_eq!(st[1].point, Vec2::new(1.0, 1.0));
        assert_eq!(st[2].point, Vec2::new(1.0, -1.0));
    }

    #[test]
    fn ndif_contains_its_base() {
        let l3 = sphere(NormSpec::p(3.0));
        let a = l3.radial_point(0.7);
        let set = ndif_set(&l3, a, 200).unwrap();
        assert_eq!(set[0].verdict, FarVerdict::NotDifferentiable);
        let nd = set
            .iter()
            .filter(|p| p.verdict == FarVerdict::NotDifferentiable)
            .count();
        assert!(nd <= 3, "{nd}");

        let lens = sphere(NormSpec::symmetric_disks(2, 0.5, 1.2));
        let tip = Norm::new(NormSpec::symmetric_disks(2, 0.5, 1.2)).unwrap().corners()[0];
        let set = ndif_set(&lens, tip, 200).unwrap();
        let nd = set
            .iter()
            .filter(|p| p.verdict == FarVerdict::NotDifferentiable)
            .count();
        assert!(nd >= 190, "{nd}");
    }
}
