//! Commands of the `normlab` binary. Each command returns the report text and
//! an exit code: 0 pass, 2 input error, 3 disagreement or rejection.

pub mod report;
pub mod suites;

use std::fs;
use std::path::Path;

use normlab::birkhoff::orth_cone;
use normlab::diff::{far_test_g, nd_oracle, predicted_left_slope, FarVerdict, NdStatus, CORNER_GAP};
use normlab::isometry::{
    check_antipodes, check_isometry, drop_curve, equilateral_triples, fit_affine, fit_linear, staircase, zigzag,
    MapFile, TripleOutcome,
};
use normlab::param::{NaturalParam, DERIVATIVE_STEPS};
use normlab::plot::{render_svg, Overlay};
use normlab::{ConvexCurve, Norm, NormSpec, Vec2};
use serde::Serialize;

use crate::report::Report;
use crate::suites::{FarEntry, FarReport, FarSummary, MetricConfig, SWEEP_RESOLUTION};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<normlab::Error> for CliError {
    fn from(e: normlab::Error) -> Self {
        match e {
            normlab::Error::Internal(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
    Svg,
}

/// A finished command: what to print or write, and the exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

impl Outcome {
    fn of<R: Report + Serialize>(report: &R, passed: bool, format: Format) -> CliResult<Outcome> {
        let body = match format {
            Format::Json => serde_json::to_string_pretty(report).map_err(|e| CliError::Internal(e.to_string()))? + "\n",
            Format::Text => report.text(),
            Format::Svg => return Err(CliError::Input("svg output is only available for plot".into())),
        };
        Ok(Outcome {
            code: if passed { EXIT_PASS } else { EXIT_DISAGREE },
            body,
        })
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn load_norm(path: &Path) -> CliResult<Norm> {
    let spec = NormSpec::from_json_str(&read(path)?)?;
    Ok(Norm::new(spec)?)
}

/// Parse `a,b` into a vector.
pub fn parse_pair(s: &str) -> CliResult<Vec2> {
    let v = parse_list(s)?;
    match v[..] {
        [a, b] => Ok(Vec2::new(a, b)),
        _ => Err(CliError::Input(format!(
            "expected two comma-separated numbers, got `{s}`"
        ))),
    }
}

/// Parse a comma-separated list of finite numbers.
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("`{p}` is not a finite number")))
        })
        .collect()
}

pub fn positive_grid(s: &str) -> CliResult<Vec<f64>> {
    let g = parse_list(s)?;
    if g.is_empty() || g.iter().any(|v| *v <= 0.0) {
        return Err(CliError::Input(format!("grid `{s}` must be non-empty and positive")));
    }
    Ok(g)
}

/// `norm-eval`: the norm of one vector.
pub fn cmd_norm_eval(spec: &Path, vector: Vec2) -> CliResult<Outcome> {
    let norm = load_norm(spec)?;
    Ok(Outcome {
        code: EXIT_PASS,
        body: format!("{}\n", norm.eval(vector)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum NdMode {
    Oracle,
    Metric,
    Far,
}

/// `nd`: corner detection on a unit sphere. Far mode uses the given triple
/// `(x, y, z)` or, without one, chords through corners and ring points.
pub fn cmd_nd(
    spec: &Path,
    mode: NdMode,
    cfg: &MetricConfig,
    triple: Option<(Vec2, Vec2, Vec2)>,
    format: Format,
) -> CliResult<Outcome> {
    let norm = load_norm(spec)?;
    match mode {
        NdMode::Oracle => {
            let r = suites::nd_sweep(&norm, cfg, false)?;
            Outcome::of(&r, true, format)
        }
        NdMode::Metric => {
            let r = suites::nd_sweep(&norm, cfg, true)?;
            let passed = r.passed();
            Outcome::of(&r, passed, format)
        }
        NdMode::Far => {
            let r = match triple {
                Some((x, y, z)) => far_single(&norm, x, y, z)?,
                None => suites::far_sweep(&norm, 4, 6)?,
            };
            let passed = r.passed(1e-4);
            Outcome::of(&r, passed, format)
        }
    }
}

fn far_single(norm: &Norm, x: Vec2, y: Vec2, z: Vec2) -> CliResult<FarReport> {
    let sphere = ConvexCurve::from_norm(norm);
    let px = NaturalParam::new(&sphere, x, SWEEP_RESOLUTION)?;
    let oracle = nd_oracle(&px, 0.0, CORNER_GAP).status;
    let test = far_test_g(norm, x, y, z, &DERIVATIVE_STEPS)?;
    let agree = match (test.verdict, oracle) {
        (FarVerdict::Inconclusive, _) | (_, NdStatus::Unreliable) => None,
        (v, s) => Some((v == FarVerdict::NotDifferentiable) == (s == NdStatus::Corner)),
    };
    let predicted_left = if test.verdict == FarVerdict::NotDifferentiable && oracle == NdStatus::Corner {
        Some(predicted_left_slope(norm, x, z)?)
    } else {
        None
    };
    let slope_error = predicted_left.map(|p| (p - test.slopes.left).abs());
    let summary = FarSummary {
        triples: 1,
        agreements: usize::from(agree == Some(true)),
        disagreements: usize::from(agree == Some(false)),
        inconclusive: usize::from(agree.is_none()),
        skipped: 0,
        max_slope_error: slope_error.unwrap_or(0.0),
    };
    Ok(FarReport {
        curve: norm.spec().label(),
        strictly_convex: norm.is_strictly_convex(),
        entries: vec![FarEntry {
            x,
            y,
            z,
            oracle,
            verdict: test.verdict,
            slopes: test.slopes,
            predicted_left,
            slope_error,
            agree,
        }],
        summary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoCheck {
    Distortion,
    Antipodes,
    Linear,
    Affine,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoVerdict {
    pub source: String,
    pub target: String,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub distortion: Option<normlab::isometry::Distortion>,
    pub antipodes: Option<f64>,
    pub linear: Option<normlab::isometry::LinearFit>,
    pub affine: Option<normlab::isometry::AffineFit>,
    pub failed: Vec<IsoCheck>,
}

/// Checks and tolerances of the `iso` command.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoOptions {
    pub checks: Vec<IsoCheck>,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
}

/// `iso`: check a map file between two unit spheres.
pub fn cmd_iso(map: &Path, source: &Path, target: &Path, opts: &IsoOptions, format: Format) -> CliResult<Outcome> {
    let IsoOptions {
        ref checks,
        tol,
        seed,
        samples,
    } = *opts;
    let file = MapFile::from_json_str(&read(map)?)?;
    let (sn, tn) = (load_norm(source)?, load_norm(target)?);
    let (sc, tc) = (ConvexCurve::from_norm(&sn), ConvexCurve::from_norm(&tn));
    let sphere_map = file.build(&sc, &tc)?;
    let mut v = IsoVerdict {
        source: sn.spec().label(),
        target: tn.spec().label(),
        seed,
        samples,
        tol,
        distortion: None,
        antipodes: None,
        linear: None,
        affine: None,
        failed: Vec::new(),
    };
    // basis and anchors away from the axes, where polygonal spheres have corners
    let basis = (sc.radial_point(0.3), sc.radial_point(1.9));
    let anchors = [sc.radial_point(0.3), sc.radial_point(2.4), sc.radial_point(4.5)];
    for &c in checks.iter() {
        let value = match c {
            IsoCheck::Distortion => {
                let d = check_isometry(&sphere_map, samples, seed);
                let m = d.max;
                v.distortion = Some(d);
                m
            }
            IsoCheck::Antipodes => {
                let a = check_antipodes(&sphere_map, samples)?;
                v.antipodes = Some(a);
                a
            }
            IsoCheck::Linear => {
                let f = fit_linear(&sphere_map, basis.0, basis.1, samples)?;
                v.linear = Some(f);
                f.residual
            }
            IsoCheck::Affine => {
                let f = fit_affine(&sphere_map, anchors, samples)?;
                v.affine = Some(f);
                f.residual
            }
        };
        if value.is_nan() || value > tol {
            v.failed.push(c);
        }
    }
    let passed = v.failed.is_empty();
    Outcome::of(&v, passed, format)
}

/// Where the plotted curve comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum PlotSource {
    Spec(std::path::PathBuf),
    Curve(std::path::PathBuf),
    Drop,
}

/// Parse an overlay request: `nd_points`, `orth_cone:X,Y`, `zigzag:C1,C2,A1,A2`,
/// `staircase:A1,A2` or `triples`.
pub fn parse_overlay(s: &str) -> CliResult<(String, Vec<f64>)> {
    let (name, args) = s.split_once(':').unwrap_or((s, ""));
    let args = if args.is_empty() { Vec::new() } else { parse_list(args)? };
    let arity = match name {
        "nd_points" | "triples" => 0,
        "orth_cone" | "staircase" => 2,
        "zigzag" => 4,
        _ => return Err(CliError::Input(format!("unknown overlay `{name}`"))),
    };
    if args.len() != arity {
        return Err(CliError::Input(format!("overlay `{name}` takes {arity} numbers")));
    }
    Ok((name.to_string(), args))
}

/// Corners found by the derivative oracle among the symbolic corner
/// candidates and `probes` equally spaced points.
fn oracle_corners(curve: &ConvexCurve, probes: usize) -> CliResult<Vec<Vec2>> {
    let base = curve
        .corners()
        .first()
        .copied()
        .unwrap_or_else(|| curve.radial_point(0.0));
    let param = NaturalParam::new(curve, base, SWEEP_RESOLUTION)?;
    let l = param.period();
    let mut ts = param.corner_params();
    ts.extend((0..probes).map(|k| l * k as f64 / probes as f64));
    let mut out: Vec<Vec2> = Vec::new();
    for t in ts {
        if nd_oracle(&param, t, CORNER_GAP).status == NdStatus::Corner {
            let p = param.eval(t);
            if out.iter().all(|q| (*q - p).max_abs() > 1e-6) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// `p` itself when it lies on the curve, otherwise the curve point on the ray
/// from the interior point through `p`.
fn on_curve(curve: &ConvexCurve, p: Vec2) -> Vec2 {
    if curve.contains(p, 1e-9) {
        p
    } else {
        curve.radial_point((p - curve.interior_point()).angle())
    }
}

/// `plot`: SVG of a curve with overlays. Zigzag and staircase points are
/// snapped radially onto the curve.
pub fn cmd_plot(source: &PlotSource, overlays: &[String]) -> CliResult<Outcome> {
    let (curve, norm) = match source {
        PlotSource::Spec(p) => {
            let n = load_norm(p)?;
            (ConvexCurve::from_norm(&n), Some(n))
        }
        PlotSource::Curve(p) => (ConvexCurve::from_json_str(&read(p)?)?, None),
        PlotSource::Drop => (drop_curve(720)?, None),
    };
    let need_norm = |what: &str| {
        norm.clone()
            .ok_or_else(|| CliError::Input(format!("overlay `{what}` needs a unit sphere (--spec)")))
    };
    let mut drawn = Vec::new();
    for o in overlays {
        let (name, a) = parse_overlay(o)?;
        let overlay = match name.as_str() {
            "nd_points" => Overlay::Markers(oracle_corners(&curve, 720)?),
            "orth_cone" => {
                let n = need_norm("orth_cone")?;
                let cone = orth_cone(&n, Vec2::new(a[0], a[1]), 720)?;
                let [lo, hi] = cone.intervals[0];
                let angles = if cone.is_single_pair() { vec![lo] } else { vec![lo, hi] };
                Overlay::Segments(
                    angles
                        .into_iter()
                        .map(|th| {
                            let r = n.radial(th);
                            (-r, r)
                        })
                        .collect(),
                )
            }
            "zigzag" => {
                let run = zigzag(
                    &curve,
                    on_curve(&curve, Vec2::new(a[0], a[1])),
                    on_curve(&curve, Vec2::new(a[2], a[3])),
                    10_000,
                )?;
                Overlay::Path(run.iterates)
            }
            "staircase" => {
                let steps = staircase(&curve, on_curve(&curve, Vec2::new(a[0], a[1])), -4, 4)?;
                Overlay::Path(steps.into_iter().map(|s| s.point).collect())
            }
            _ => {
                let n = need_norm("triples")?;
                match equilateral_triples(&n, 2.0, 1e-6, 1e-4)?.outcome {
                    TripleOutcome::Found { triples } => Overlay::Triangles(triples),
                    _ => Overlay::Triangles(Vec::new()),
                }
            }
        };
        drawn.push(overlay);
    }
    Ok(Outcome {
        code: EXIT_PASS,
        body: render_svg(&curve, 720, &drawn),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Circumference,
    Metric,
    Far,
    Orth,
    Iso,
    All,
}

/// `corpus`: run a suite over the fixed corpus of eighteen norms.
pub fn cmd_corpus(suite: Suite, seed: u64, format: Format) -> CliResult<Outcome> {
    let r = report::run_corpus(suite, seed)?;
    let passed = r.passed();
    Outcome::of(&r, passed, format)
}
