//! Corpus-level sweeps behind the `nd` and `corpus` commands.

use normlab::birkhoff::{min_along, orth_cone};
use normlab::diff::{
    admissible_triples, corner_basis, default_delta_grid, far_test_g, metric_nd_test, nd_classify_metric, nd_oracle,
    predicted_left_slope, CornerBasis, FarVerdict, MetricSample, NdStatus, Slopes, SphereSample, WitnessRow,
    CLASSIFY_EPS_GRID, CORNER_GAP, EPS_GRID,
};
use normlab::isometry::{check_antipodes, check_isometry, fit_linear, SphereMap};
use normlab::param::{NaturalParam, Side, DERIVATIVE_STEPS};
use normlab::{ConvexCurve, Mat2, Norm, NormSpec, Result, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Breakpoint resolution of the parameterizations used by the sweeps.
pub const SWEEP_RESOLUTION: usize = 2048;

/// Parameterization of the unit sphere based at its first known corner (at
/// polar angle 0 when there is none), so symmetric samples contain the corners.
pub fn corner_based_param(norm: &Norm) -> Result<NaturalParam> {
    let sphere = ConvexCurve::from_norm(norm);
    let base = norm.corners().first().copied().unwrap_or_else(|| norm.radial(0.0));
    NaturalParam::new(&sphere, base, SWEEP_RESOLUTION)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricConfig {
    /// Points of the metric sample (even).
    pub sample_points: usize,
    /// Probed sample points, equally spaced.
    pub probes: usize,
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    /// Oracle corner threshold.
    pub threshold: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            sample_points: 20160,
            probes: 240,
            eps_grid: CLASSIFY_EPS_GRID.to_vec(),
            delta_grid: default_delta_grid(),
            threshold: CORNER_GAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NdEntry {
    pub index: usize,
    pub param: f64,
    pub point: Vec2,
    pub status: NdStatus,
    pub gap: f64,
    pub left: Vec2,
    pub right: Vec2,
    pub corner_basis: Option<CornerBasis>,
    /// Metric classification (metric mode only).
    pub metric_corner: Option<bool>,
    pub delta_star: Option<f64>,
    /// Metric test with the certified delta over the default eps grid (oracle corners).
    pub certified: Option<bool>,
    /// Metric and oracle agree (reliable points in metric mode).
    pub agree: Option<bool>,
    pub transcript: Option<Vec<WitnessRow>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct NdSummary {
    pub probes: usize,
    pub reliable: usize,
    pub oracle_corners: usize,
    pub metric_corners: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub certified_pass: usize,
    pub certified_fail: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NdReport {
    pub curve: String,
    pub mode: String,
    pub period: f64,
    pub sample_points: usize,
    pub resolution: f64,
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub entries: Vec<NdEntry>,
    pub summary: NdSummary,
}

impl NdReport {
    /// Every reliable probe agrees and every certified delta passes.
    pub fn passed(&self) -> bool {
        self.summary.disagreements == 0 && self.summary.certified_fail == 0
    }
}

/// Oracle classification of equally spaced probes, and with `metric` also the
/// metric-only classification on a symmetric sample and its agreement.
pub fn nd_sweep(norm: &Norm, cfg: &MetricConfig, metric: bool) -> Result<NdReport> {
    let param = corner_based_param(norm)?;
    let n = cfg.sample_points;
    let sample = SphereSample::new(&param, n, 0.0)?;
    let probes: Vec<usize> = (0..cfg.probes).map(|k| k * n / cfg.probes).collect();
    let verdicts = if metric {
        Some(nd_classify_metric(&sample, &probes, &cfg.delta_grid, &cfg.eps_grid)?)
    } else {
        None
    };
    let mut summary = NdSummary {
        probes: probes.len(),
        ..NdSummary::default()
    };
    let mut entries = Vec::with_capacity(probes.len());
    for (k, &i) in probes.iter().enumerate() {
        let t = sample.param(i);
        let r = nd_oracle(&param, t, cfg.threshold);
        let basis = if r.status == NdStatus::Corner {
            Some(corner_basis(&param, t)?)
        } else {
            None
        };
        let certified = match (&basis, metric) {
            (Some(b), true) => Some(metric_nd_test(&sample, i, b.delta_cert, &EPS_GRID)?.passed),
            _ => None,
        };
        let v = verdicts.as_ref().map(|vs| &vs[k]);
        let agree = match (v, r.status) {
            (Some(_), NdStatus::Unreliable) | (None, _) => None,
            (Some(v), s) => Some(v.corner == (s == NdStatus::Corner)),
        };
        if r.status != NdStatus::Unreliable {
            summary.reliable += 1;
        }
        if r.status == NdStatus::Corner {
            summary.oracle_corners += 1;
        }
        if v.is_some_and(|v| v.corner) {
            summary.metric_corners += 1;
        }
        match agree {
            Some(true) => summary.agreements += 1,
            Some(false) => summary.disagreements += 1,
            None => {}
        }
        match certified {
            Some(true) => summary.certified_pass += 1,
            Some(false) => summary.certified_fail += 1,
            None => {}
        }
        entries.push(NdEntry {
            index: i,
            param: t,
            point: sample.point(i),
            status: r.status,
            gap: r.gap,
            left: r.left,
            right: r.right,
            corner_basis: basis,
            metric_corner: v.map(|v| v.corner),
            delta_star: v.map(|v| v.delta_star),
            certified,
            agree,
            transcript: v.map(|v| v.transcript.clone()),
        });
    }
    Ok(NdReport {
        curve: norm.spec().label(),
        mode: if metric { "metric" } else { "oracle" }.into(),
        period: param.period(),
        sample_points: n,
        resolution: sample.resolution(),
        eps_grid: cfg.eps_grid.clone(),
        delta_grid: cfg.delta_grid.clone(),
        entries,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarEntry {
    pub x: Vec2,
    pub y: Vec2,
    pub z: Vec2,
    pub oracle: NdStatus,
    pub verdict: FarVerdict,
    pub slopes: Slopes,
    /// Second coordinate of the derivative at `z` in the basis `{-left derivative at x, x}`.
    pub predicted_left: Option<f64>,
    pub slope_error: Option<f64>,
    /// Verdict matches the oracle (absent when either side is inconclusive).
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FarSummary {
    pub triples: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub inconclusive: usize,
    /// Triples whose chord ended at a corner `z` (test not applicable).
    pub skipped: usize,
    pub max_slope_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarReport {
    pub curve: String,
    pub strictly_convex: bool,
    pub entries: Vec<FarEntry>,
    pub summary: FarSummary,
}

impl FarReport {
    pub fn passed(&self, slope_tol: f64) -> bool {
        self.summary.disagreements == 0 && self.summary.inconclusive == 0 && self.summary.max_slope_error <= slope_tol
    }
}

/// Probe points for the far test: the corners and the points halfway (in arc
/// length) between consecutive probes of an equally spaced ring of `ring` points.
fn far_bases(norm: &Norm, ring: usize) -> Result<Vec<Vec2>> {
    let param = corner_based_param(norm)?;
    let l = param.period();
    let mut xs = norm.corners();
    xs.extend((0..ring).map(|k| param.eval(l * (k as f64 + 0.5) / ring as f64)));
    Ok(xs)
}

/// Run `far_test_g` over `per_x` chords parallel to each base point and
/// compare with the oracle at the base point.
pub fn far_sweep(norm: &Norm, ring: usize, per_x: usize) -> Result<FarReport> {
    let sphere = ConvexCurve::from_norm(norm);
    let mut entries = Vec::new();
    let mut summary = FarSummary::default();
    for x in far_bases(norm, ring)? {
        let px = NaturalParam::new(&sphere, x, SWEEP_RESOLUTION)?;
        let oracle = nd_oracle(&px, 0.0, CORNER_GAP).status;
        for (x, y, z) in admissible_triples(norm, x, per_x) {
            let test = match far_test_g(norm, x, y, z, &DERIVATIVE_STEPS) {
                Ok(t) => t,
                Err(normlab::Error::Precondition(_)) => {
                    summary.skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let agree = match (test.verdict, oracle) {
                (FarVerdict::Inconclusive, _) | (_, NdStatus::Unreliable) => None,
                (v, s) => Some((v == FarVerdict::NotDifferentiable) == (s == NdStatus::Corner)),
            };
            let predicted_left = if test.verdict == FarVerdict::NotDifferentiable {
                Some(predicted_left_slope(norm, x, z)?)
            } else {
                None
            };
            let slope_error = predicted_left.map(|p| (p - test.slopes.left).abs());
            summary.triples += 1;
            match agree {
                Some(true) => summary.agreements += 1,
                Some(false) => summary.disagreements += 1,
                None => summary.inconclusive += 1,
            }
            if let Some(e) = slope_error {
                summary.max_slope_error = summary.max_slope_error.max(e);
            }
            entries.push(FarEntry {
                x,
                y,
                z,
                oracle,
                verdict: test.verdict,
                slopes: test.slopes,
                predicted_left,
                slope_error,
                agree,
            });
        }
    }
    Ok(FarReport {
        curve: norm.spec().label(),
        strictly_convex: norm.is_strictly_convex(),
        entries,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthEntry {
    pub point: Vec2,
    pub status: NdStatus,
    /// `min_l ||x + l d||` for the left and right derivatives `d`.
    pub min_left: f64,
    pub min_right: f64,
    pub cone_width: f64,
    pub degenerate: bool,
    /// Cone degeneracy matches oracle smoothness (absent at unreliable points).
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthReport {
    pub curve: String,
    pub entries: Vec<OrthEntry>,
    pub min_norm_along_tangents: f64,
    pub disagreements: usize,
}

impl OrthReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.disagreements == 0 && self.min_norm_along_tangents >= 1.0 - tol
    }
}

/// Side derivatives against the basepoint, and orthogonality cones against
/// oracle smoothness, at `points` equally spaced sphere points.
pub fn orth_sweep(norm: &Norm, points: usize, angular_resolution: usize) -> Result<OrthReport> {
    let param = corner_based_param(norm)?;
    let l = param.period();
    let mut entries = Vec::with_capacity(points);
    for k in 0..points {
        let t = l * k as f64 / points as f64;
        let x = param.eval(t);
        let r = nd_oracle(&param, t, CORNER_GAP);
        let min_left = min_along(norm, x, param.side_derivative(t, Side::Left)).1;
        let min_right = min_along(norm, x, param.side_derivative(t, Side::Right)).1;
        let cone = orth_cone(norm, x, angular_resolution)?;
        let degenerate = cone.is_single_pair();
        let agree = match r.status {
            NdStatus::Unreliable => None,
            s => Some(degenerate == (s == NdStatus::Smooth)),
        };
        entries.push(OrthEntry {
            point: x,
            status: r.status,
            min_left,
            min_right,
            cone_width: cone.width,
            degenerate,
            agree,
        });
    }
    Ok(OrthReport {
        curve: norm.spec().label(),
        min_norm_along_tangents: entries
            .iter()
            .map(|e| e.min_left.min(e.min_right))
            .fold(f64::INFINITY, f64::min),
        disagreements: entries.iter().filter(|e| e.agree == Some(false)).count(),
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoTrial {
    pub matrix: Mat2,
    pub distortion: f64,
    pub antipodes: f64,
    pub linear_residual: f64,
    pub matrix_error: f64,
    /// Distortion of the noisy table version of the same map.
    pub perturbed_distortion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoReport {
    pub curve: String,
    pub seed: u64,
    pub noise: f64,
    pub trials: Vec<IsoTrial>,
}

/// Tolerances of the isometry suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsoTolerances {
    pub distortion: f64,
    pub antipodes: f64,
    pub residual: f64,
    /// Perturbed maps must distort by at least this much.
    pub rejection: f64,
}

impl Default for IsoTolerances {
    fn default() -> Self {
        IsoTolerances {
            distortion: 1e-8,
            antipodes: 1e-8,
            residual: 1e-7,
            rejection: 1e-3,
        }
    }
}

impl IsoReport {
    pub fn passed(&self, tol: &IsoTolerances) -> bool {
        self.trials.iter().all(|t| {
            t.distortion <= tol.distortion
                && t.antipodes <= tol.antipodes
                && t.linear_residual <= tol.residual
                && t.perturbed_distortion >= tol.rejection
        })
    }
}

/// Random invertible matrix with entries in `[-2, 2]` and `|det| >= 0.25`.
pub fn random_matrix(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let m = Mat2::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        if m.det().abs() >= 0.25 {
            return m;
        }
    }
}

/// `trials` random linear maps onto pushforward spheres, each checked for
/// distortion, antipodes and linear recovery, plus a noisy table copy of each
/// (parameter noise `noise`) that must be rejected.
pub fn iso_sweep(spec: &NormSpec, trials: usize, noise: f64, seed: u64) -> Result<IsoReport> {
    let source = ConvexCurve::unit_sphere(spec.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = (source.radial_point(0.3), source.radial_point(1.9));
    let mut out = Vec::with_capacity(trials);
    for k in 0..trials {
        let m = random_matrix(&mut rng);
        let target = ConvexCurve::unit_sphere(NormSpec::pushforward(spec.clone(), m))?;
        let map = SphereMap::linear(&source, &target, m)?;
        let distortion = check_isometry(&map, 300, seed.wrapping_add(k as u64)).max;
        let antipodes = check_antipodes(&map, 300)?;
        let fit = fit_linear(&map, basis.0, basis.1, 400)?;
        let noisy = SphereMap::table_from_linear(&source, &target, m, 128)?.with_noise(noise, seed ^ (k as u64 + 1))?;
        let perturbed_distortion = check_isometry(&noisy, 300, seed.wrapping_add(k as u64)).max;
        out.push(IsoTrial {
            matrix: m,
            distortion,
            antipodes,
            linear_residual: fit.residual,
            matrix_error: fit.matrix.max_abs_diff(&m),
            perturbed_distortion,
        });
    }
    Ok(IsoReport {
        curve: spec.label(),
        seed,
        noise,
        trials: out,
    })
}

/// Self-circumference of a unit sphere.
pub fn circumference(norm: &Norm) -> Result<f64> {
    Ok(corner_based_param(norm)?.period())
}
