//! Text renderings of the reports and the corpus runner.

use std::fmt::Write;

use normlab::corpus::corpus;
use normlab::Norm;
use serde::Serialize;

use crate::suites::{
    circumference, far_sweep, iso_sweep, nd_sweep, orth_sweep, FarReport, FarSummary, IsoReport, IsoTolerances,
    MetricConfig, NdReport, NdSummary, OrthReport,
};
use crate::{CliResult, IsoCheck, IsoVerdict, Suite};

/// Human-readable form of a report. Each check line names the property it tests.
pub trait Report {
    fn text(&self) -> String;
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn pt(p: normlab::Vec2) -> String {
    let c = |v: f64| {
        let s = format!("{v:.6}");
        if s == "-0.000000" {
            "0.000000".to_string()
        } else {
            s
        }
    };
    format!("({}, {})", c(p.x1), c(p.x2))
}

impl Report for NdReport {
    fn text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "curve {} ({} mode), period {:.12}",
            self.curve, self.mode, self.period
        );
        let _ = writeln!(
            out,
            "probes {}, reliable {}, oracle corners {}, metric corners {}",
            s.probes, s.reliable, s.oracle_corners, s.metric_corners
        );
        if self.mode == "metric" {
            let _ = writeln!(
                out,
                "[{}] metric-only corner test agrees with the derivative oracle: {} agree, {} disagree",
                mark(s.disagreements == 0),
                s.agreements,
                s.disagreements
            );
            let _ = writeln!(
                out,
                "[{}] certified delta from the corner basis passes at every corner: {} pass, {} fail",
                mark(s.certified_fail == 0),
                s.certified_pass,
                s.certified_fail
            );
        }
        for e in self
            .entries
            .iter()
            .filter(|e| e.status == normlab::diff::NdStatus::Corner)
        {
            let _ = writeln!(out, "  corner at {}, gap {:.3e}", pt(e.point), e.gap);
        }
        out
    }
}

impl Report for FarReport {
    fn text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "curve {}, strictly convex: {}", self.curve, self.strictly_convex);
        let _ = writeln!(
            out,
            "[{}] far chord test agrees with the derivative oracle: {} agree, {} disagree, {} inconclusive, {} skipped",
            mark(s.disagreements == 0 && s.inconclusive == 0),
            s.agreements,
            s.disagreements,
            s.inconclusive,
            s.skipped
        );
        let _ = writeln!(out, "left slope identity, max error {:.3e}", s.max_slope_error);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "  x={} oracle {:?} verdict {:?} slopes {:.6}/{:.6}",
                pt(e.x),
                e.oracle,
                e.verdict,
                e.slopes.left,
                e.slopes.right
            );
        }
        out
    }
}

impl Report for OrthReport {
    fn text(&self) -> String {
        format!(
            "curve {}\n[{}] side derivatives Birkhoff-orthogonal to the point: min norm {:.12}\n[{}] orthogonality cone is a single line exactly at smooth points: {} disagreements over {} points\n",
            self.curve,
            mark(self.min_norm_along_tangents >= 1.0 - 1e-6),
            self.min_norm_along_tangents,
            mark(self.disagreements == 0),
            self.disagreements,
            self.entries.len()
        )
    }
}

impl Report for IsoReport {
    fn text(&self) -> String {
        let tol = IsoTolerances::default();
        let max = |f: fn(&crate::suites::IsoTrial) -> f64| self.trials.iter().map(f).fold(0.0, f64::max);
        let min_rejection = self
            .trials
            .iter()
            .map(|t| t.perturbed_distortion)
            .fold(f64::INFINITY, f64::min);
        format!(
            "curve {}, seed {}, {} trials\n[{}] linear isometries preserve distance: max distortion {:.3e}\n[{}] antipodes map to antipodes: max {:.3e}\n[{}] maps are recovered as linear: max residual {:.3e}\n[{}] perturbed maps are rejected (noise {:.0e}): min distortion {:.3e}\n",
            self.curve,
            self.seed,
            self.trials.len(),
            mark(max(|t| t.distortion) <= tol.distortion),
            max(|t| t.distortion),
            mark(max(|t| t.antipodes) <= tol.antipodes),
            max(|t| t.antipodes),
            mark(max(|t| t.linear_residual) <= tol.residual),
            max(|t| t.linear_residual),
            mark(min_rejection >= tol.rejection),
            self.noise,
            min_rejection
        )
    }
}

impl Report for IsoVerdict {
    fn text(&self) -> String {
        let mut out = format!("map {} -> {}, seed {}\n", self.source, self.target, self.seed);
        let ok = |c| !self.failed.contains(&c);
        if let Some(d) = &self.distortion {
            let _ = writeln!(
                out,
                "[{}] distance preserved: max distortion {:.3e}",
                mark(ok(IsoCheck::Distortion)),
                d.max
            );
        }
        if let Some(a) = self.antipodes {
            let _ = writeln!(out, "[{}] antipodes preserved: {a:.3e}", mark(ok(IsoCheck::Antipodes)));
        }
        if let Some(f) = &self.linear {
            let _ = writeln!(
                out,
                "[{}] map is linear: residual {:.3e}",
                mark(ok(IsoCheck::Linear)),
                f.residual
            );
        }
        if let Some(f) = &self.affine {
            let _ = writeln!(
                out,
                "[{}] map is affine: residual {:.3e}",
                mark(ok(IsoCheck::Affine)),
                f.residual
            );
        }
        out
    }
}

const CIRCUMFERENCE_TOL: f64 = 1e-6;
const ORTH_POINTS: usize = 100;
const ORTH_RESOLUTION: usize = 720;
const ISO_TRIALS: usize = 10;
const ISO_NOISE: f64 = 1e-2;
const FAR_SLOPE_TOL: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircumferenceRow {
    pub name: String,
    pub period: f64,
    /// Known exact value, when there is one.
    pub expected: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricRow {
    pub name: String,
    pub summary: NdSummary,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarRow {
    pub name: String,
    pub summary: FarSummary,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthRow {
    pub name: String,
    pub points: usize,
    pub min_norm_along_tangents: f64,
    pub disagreements: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoRow {
    pub name: String,
    pub trials: usize,
    pub max_distortion: f64,
    pub max_antipodes: f64,
    pub max_linear_residual: f64,
    pub min_perturbed_distortion: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusReport {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circumference: Option<Vec<CircumferenceRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<MetricRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub far: Option<Vec<FarRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orth: Option<Vec<OrthRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iso: Option<Vec<IsoRow>>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        fn all<T>(rows: &Option<Vec<T>>, ok: fn(&T) -> bool) -> bool {
            rows.as_ref().is_none_or(|r| r.iter().all(ok))
        }
        all(&self.circumference, |r| r.passed)
            && all(&self.metric, |r| r.passed)
            && all(&self.far, |r| r.passed)
            && all(&self.orth, |r| r.passed)
            && all(&self.iso, |r| r.passed)
    }
}

/// Run `f` on every corpus norm, one thread each, keeping corpus order.
fn fan_out<T: Send>(f: impl Fn(&str, &Norm) -> normlab::Result<T> + Sync) -> CliResult<Vec<T>> {
    let entries = corpus();
    let norms = entries
        .iter()
        .map(|e| Norm::new(e.spec.clone()))
        .collect::<normlab::Result<Vec<_>>>()?;
    let results: Vec<normlab::Result<T>> = std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .iter()
            .zip(&norms)
            .map(|(e, n)| {
                let f = &f;
                s.spawn(move || f(&e.name, n))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    Ok(results.into_iter().collect::<normlab::Result<Vec<_>>>()?)
}

fn exact_circumference(name: &str) -> Option<f64> {
    match name {
        "l2" => Some(std::f64::consts::TAU),
        "l1" | "linf" => Some(8.0),
        _ => None,
    }
}

pub fn circumference_suite() -> CliResult<Vec<CircumferenceRow>> {
    fan_out(|name, norm| {
        let period = circumference(norm)?;
        let expected = exact_circumference(name);
        let in_range = (6.0 - CIRCUMFERENCE_TOL..=8.0 + CIRCUMFERENCE_TOL).contains(&period);
        Ok(CircumferenceRow {
            name: name.to_string(),
            period,
            expected,
            passed: in_range && expected.is_none_or(|e| (period - e).abs() <= CIRCUMFERENCE_TOL),
        })
    })
}

pub fn metric_suite(cfg: &MetricConfig) -> CliResult<Vec<MetricRow>> {
    fan_out(|name, norm| {
        let r = nd_sweep(norm, cfg, true)?;
        Ok(MetricRow {
            name: name.to_string(),
            passed: r.passed(),
            summary: r.summary,
        })
    })
}

/// Far chord test on the strictly convex norms; the test presumes strict
/// convexity and is expected to disagree elsewhere.
pub fn far_suite() -> CliResult<Vec<FarRow>> {
    let rows = fan_out(|name, norm| {
        if !norm.is_strictly_convex() {
            return Ok(None);
        }
        let r = far_sweep(norm, 4, 6)?;
        Ok(Some(FarRow {
            name: name.to_string(),
            passed: r.passed(FAR_SLOPE_TOL),
            summary: r.summary,
        }))
    })?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn orth_suite() -> CliResult<Vec<OrthRow>> {
    fan_out(|name, norm| {
        let r = orth_sweep(norm, ORTH_POINTS, ORTH_RESOLUTION)?;
        Ok(OrthRow {
            name: name.to_string(),
            points: r.entries.len(),
            min_norm_along_tangents: r.min_norm_along_tangents,
            disagreements: r.disagreements,
            passed: r.passed(1e-6),
        })
    })
}

pub fn iso_suite(seed: u64) -> CliResult<Vec<IsoRow>> {
    fan_out(|name, norm| {
        let r = iso_sweep(norm.spec(), ISO_TRIALS, ISO_NOISE, seed)?;
        let max = |f: fn(&crate::suites::IsoTrial) -> f64| r.trials.iter().map(f).fold(0.0, f64::max);
        Ok(IsoRow {
            name: name.to_string(),
            trials: r.trials.len(),
            max_distortion: max(|t| t.distortion),
            max_antipodes: max(|t| t.antipodes),
            max_linear_residual: max(|t| t.linear_residual),
            min_perturbed_distortion: r
                .trials
                .iter()
                .map(|t| t.perturbed_distortion)
                .fold(f64::INFINITY, f64::min),
            passed: r.passed(&IsoTolerances::default()),
        })
    })
}

pub fn run_corpus(suite: Suite, seed: u64) -> CliResult<CorpusReport> {
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mut r = CorpusReport {
        seed,
        ..CorpusReport::default()
    };
    if want(Suite::Circumference) {
        r.circumference = Some(circumference_suite()?);
    }
    if want(Suite::Metric) {
        r.metric = Some(metric_suite(&MetricConfig::default())?);
    }
    if want(Suite::Far) {
        r.far = Some(far_suite()?);
    }
    if want(Suite::Orth) {
        r.orth = Some(orth_suite()?);
    }
    if want(Suite::Iso) {
        r.iso = Some(iso_suite(seed)?);
    }
    Ok(r)
}

impl Report for CorpusReport {
    fn text(&self) -> String {
        let mut out = format!("corpus run, seed {}\n", self.seed);
        if let Some(rows) = &self.circumference {
            out.push_str("self-circumference lies in [6, 8] and matches known values\n");
            for r in rows {
                let _ = writeln!(out, "  [{}] {:<14} {:.12}", mark(r.passed), r.name, r.period);
            }
        }
        if let Some(rows) = &self.metric {
            out.push_str("metric-only corner test agrees with the derivative oracle\n");
            for r in rows {
                let s = &r.summary;
                let _ = writeln!(
                    out,
                    "  [{}] {:<14} reliable {:>4} corners {:>3} disagree {} certified fail {}",
                    mark(r.passed),
                    r.name,
                    s.reliable,
                    s.oracle_corners,
                    s.disagreements,
                    s.certified_fail
                );
            }
        }
        if let Some(rows) = &self.far {
            out.push_str("far chord test agrees with the oracle on strictly convex spheres\n");
            for r in rows {
                let s = &r.summary;
                let _ = writeln!(
                    out,
                    "  [{}] {:<14} triples {:>3} disagree {} slope error {:.3e}",
                    mark(r.passed),
                    r.name,
                    s.triples,
                    s.disagreements,
                    s.max_slope_error
                );
            }
        }
        if let Some(rows) = &self.orth {
            out.push_str("side derivatives are Birkhoff-orthogonal; cones degenerate exactly at smooth points\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "  [{}] {:<14} min norm {:.12} disagree {}",
                    mark(r.passed),
                    r.name,
                    r.min_norm_along_tangents,
                    r.disagreements
                );
            }
        }
        if let Some(rows) = &self.iso {
            out.push_str("linear isometries pass, perturbed maps are rejected\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "  [{}] {:<14} distortion {:.3e} antipodes {:.3e} residual {:.3e} rejected at {:.3e}",
                    mark(r.passed),
                    r.name,
                    r.max_distortion,
                    r.max_antipodes,
                    r.max_linear_residual,
                    r.min_perturbed_distortion
                );
            }
        }
        let _ = writeln!(out, "overall: {}", mark(self.passed()));
        out
    }
}
