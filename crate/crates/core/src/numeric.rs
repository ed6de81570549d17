//! One-dimensional numerical kernels: golden-section search, bracketed root
//! finding, predicate bisection and Richardson extrapolation.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol`. Returns `(x_min, f_min)`,
/// where `f_min` is the smallest value seen (endpoints included).
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let fa = f(a);
    let fb = f(b);
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 300 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_min(|t| -f(t), a, b, tol);
    (x, -v)
}

/// Root of `f` in `[a, b]` by the Illinois variant of regula falsi.
///
/// Requires `f(a)` and `f(b)` of opposite sign (or one of them zero). Returns
/// `None` if the bracket is invalid.
pub fn illinois_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        // fall back to bisection if the secant step left the bracket
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() <= xtol {
            return Some(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= xtol {
            return Some(0.5 * (a + b));
        }
    }
    Some(0.5 * (a + b))
}

/// Plain bisection for a sign change of `f` in `[a, b]`.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Boundary of a predicate between `inside` (where it holds) and `outside`
/// (where it fails), located by bisection to `tol`. Returns the last point
/// known to satisfy the predicate.
pub fn bisect_predicate(pred: impl Fn(f64) -> bool, mut inside: f64, mut outside: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if (outside - inside).abs() <= tol {
            break;
        }
        let m = 0.5 * (inside + outside);
        if pred(m) {
            inside = m;
        } else {
            outside = m;
        }
    }
    inside
}

/// One-sided difference quotients on a decreasing step ladder, combined by
/// Richardson extrapolation of consecutive pairs (first-order error model).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// Spread between the two finest extrapolants.
    pub disagreement: f64,
}

/// Extrapolate a sequence of estimates `d[k]` taken at steps `h[k]`, assuming
/// `d(h) = d0 + c h + O(h^2)`.
pub fn richardson(steps: &[f64], estimates: &[f64]) -> Extrapolated {
    assert_eq!(steps.len(), estimates.len());
    assert!(!steps.is_empty());
    if steps.len() == 1 {
        return Extrapolated {
            value: estimates[0],
            disagreement: 0.0,
        };
    }
    let extrap: Vec<f64> = steps
        .windows(2)
        .zip(estimates.windows(2))
        .map(|(h, d)| {
            let r = h[0] / h[1];
            (r * d[1] - d[0]) / (r - 1.0)
        })
        .collect();
    let n = extrap.len();
    let disagreement = if n >= 2 {
        (extrap[n - 1] - extrap[n - 2]).abs()
    } else {
        (extrap[0] - estimates[1]).abs()
    };
    Extrapolated {
        value: extrap[n - 1],
        disagreement,
    }
}

/// Reduce `t` into `[0, period)`.
#[inline]
pub fn wrap(t: f64, period: f64) -> f64 {
    let r = t.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_section_min(|t| (t - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_on_kink() {
        let (x, v) = golden_section_min(|t| (t + 0.7).abs(), -3.0, 3.0, 1e-13);
        assert!((x + 0.7).abs() < 1e-12);
        assert!(v < 1e-12);
    }

    #[test]
    fn illinois_matches_sqrt2() {
        let r = illinois_root(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(illinois_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn bisection_agrees_with_illinois() {
        let f = |x: f64| x.cos() - x;
        let a = bisect_root(f, 0.0, 1.0, 1e-14).unwrap();
        let b = illinois_root(f, 0.0, 1.0, 1e-14).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn predicate_boundary() {
        let b = bisect_predicate(|x| x <= 0.25, 0.0, 1.0, 1e-12);
        assert!((b - 0.25).abs() < 1e-11 && b <= 0.25);
    }

    #[test]
    fn richardson_removes_linear_error() {
        let steps = [1e-2, 1e-3, 1e-4];
        // forward difference of exp at 0
        let est: Vec<f64> = steps.iter().map(|&h: &f64| (h.exp() - 1.0) / h).collect();
        let r = richardson(&steps, &est);
        assert!((r.value - 1.0).abs() < 1e-7);
        assert!(r.disagreement < 1e-5);
    }

    #[test]
    fn wrap_is_periodic() {
        assert_eq!(wrap(-1.0, 8.0), 7.0);
        assert_eq!(wrap(8.0, 8.0), 0.0);
        assert_eq!(wrap(17.5, 8.0), 1.5);
    }
}
