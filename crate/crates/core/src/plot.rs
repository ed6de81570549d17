//! Deterministic SVG figures of a curve with overlays.

use std::fmt::Write;

use crate::curve::ConvexCurve;
use crate::vec2::Vec2;

pub const CANVAS: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// Something drawn on top of the curve.
#[derive(Clone, Debug, PartialEq)]
pub enum Overlay {
    /// Marked points (e.g. corners).
    Markers(Vec<Vec2>),
    /// Open polyline through the points (e.g. a zigzag run).
    Path(Vec<Vec2>),
    /// Independent segments (e.g. the lines of an orthogonality cone).
    Segments(Vec<(Vec2, Vec2)>),
    /// Closed triangles.
    Triangles(Vec<[Vec2; 3]>),
}

impl Overlay {
    fn points(&self) -> Vec<Vec2> {
        match self {
            Overlay::Markers(p) | Overlay::Path(p) => p.clone(),
            Overlay::Segments(s) => s.iter().flat_map(|(a, b)| [*a, *b]).collect(),
            Overlay::Triangles(t) => t.iter().flatten().copied().collect(),
        }
    }
}

/// Fixed-precision coordinate, never printed as `-0.0000`.
fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

struct Frame {
    center: Vec2,
    scale: f64,
}

impl Frame {
    fn fit(points: &[Vec2]) -> Frame {
        let (mut lo, mut hi) = (
            Vec2::new(f64::INFINITY, f64::INFINITY),
            Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in points.iter().filter(|p| p.is_finite()) {
            lo = Vec2::new(lo.x1.min(p.x1), lo.x2.min(p.x2));
            hi = Vec2::new(hi.x1.max(p.x1), hi.x2.max(p.x2));
        }
        if !lo.is_finite() {
            return Frame {
                center: Vec2::ZERO,
                scale: 1.0,
            };
        }
        let span = (hi.x1 - lo.x1).max(hi.x2 - lo.x2).max(1e-9);
        Frame {
            center: (lo + hi) * 0.5,
            scale: (CANVAS - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: Vec2) -> (String, String) {
        let q = (p - self.center) * self.scale;
        (num(0.5 * CANVAS + q.x1), num(0.5 * CANVAS - q.x2))
    }

    fn path(&self, pts: &[Vec2], closed: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            let _ = write!(d, "{}{x} {y} ", if i == 0 { "M" } else { "L" });
        }
        if closed {
            d.push('Z');
        }
        d.trim_end().to_string()
    }
}

/// Render `curve` (sampled at `samples` points when it is not a polygon) with
/// `overlays` on an 800 x 800 canvas. Equal inputs give byte-identical output.
pub fn render_svg(curve: &ConvexCurve, samples: usize, overlays: &[Overlay]) -> String {
    let outline = curve.materialize(samples);
    let mut all = outline.clone();
    for o in overlays {
        all.extend(o.points());
    }
    let frame = Frame::fit(&all);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(svg, r#"<rect width="{c}" height="{c}" fill="white"/>"#, c = CANVAS);
    let _ = writeln!(
        svg,
        r#"<path class="curve" d="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        frame.path(&outline, true)
    );
    for o in overlays {
        match o {
            Overlay::Markers(pts) => {
                for p in pts {
                    let (x, y) = frame.map(*p);
                    let _ = writeln!(
                        svg,
                        r#"<circle class="marker" cx="{x}" cy="{y}" r="5" fill="crimson"/>"#
                    );
                }
            }
            Overlay::Path(pts) => {
                let _ = writeln!(
                    svg,
                    r#"<path class="run" d="{}" fill="none" stroke="steelblue" stroke-width="1"/>"#,
                    frame.path(pts, false)
                );
            }
            Overlay::Segments(segs) => {
                for (a, b) in segs {
                    let _ = writeln!(
                        svg,
                        r#"<path class="segment" d="{}" fill="none" stroke="darkorange" stroke-width="1"/>"#,
                        frame.path(&[*a, *b], false)
                    );
                }
            }
            Overlay::Triangles(tris) => {
                for t in tris {
                    let _ = writeln!(
                        svg,
                        r#"<path class="triangle" d="{}" fill="none" stroke="seagreen" stroke-width="1"/>"#,
                        frame.path(t, true)
                    );
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;

    #[test]
    fn hexagon_with_markers_is_deterministic() {
        let hex = ConvexCurve::unit_sphere(NormSpec::Hexagonal).unwrap();
        let marks = Overlay::Markers(hex.corners());
        let a = render_svg(&hex, 360, std::slice::from_ref(&marks));
        let b = render_svg(&hex, 360, &[marks]);
        assert_eq!(a, b);
        assert_eq!(a.matches("<circle").count(), 6);
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(!a.contains("-0.0000"));
    }

    #[test]
    fn coordinates_have_four_decimals() {
        assert_eq!(num(1.0 / 3.0), "0.3333");
        assert_eq!(num(-1e-9), "0.0000");
        let circle = ConvexCurve::unit_sphere(NormSpec::p(2.0)).unwrap();
        let svg = render_svg(&circle, 8, &[Overlay::Segments(vec![(Vec2::E2, -Vec2::E2)])]);
        // the unit circle spans the canvas minus the margins
        assert!(svg.contains("M40.0000 400.0000"));
        assert_eq!(svg.matches("class=\"segment\"").count(), 1);
    }
}
