//! Plane vectors.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A vector (or point) of the coordinate plane.
///
/// Serialized as a two-element array `[x1, x2]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x1: f64,
    pub x2: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x1: 0.0, x2: 0.0 };
    pub const E1: Vec2 = Vec2 { x1: 1.0, x2: 0.0 };
    pub const E2: Vec2 = Vec2 { x1: 0.0, x2: 1.0 };

    #[inline]
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    /// Unit vector of the Euclidean circle at angle `theta`.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2
    }

    /// z-component of the 3D cross product; positive when `o` is anticlockwise of `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x1 * o.x2 - self.x2 * o.x1
    }

    /// Rotation by +90 degrees.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.x2, self.x1)
    }

    #[inline]
    pub fn euclid(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    #[inline]
    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs())
    }

    #[inline]
    pub fn l1(self) -> f64 {
        self.x1.abs() + self.x2.abs()
    }

    /// Polar angle in `(-pi, pi]`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.x2.atan2(self.x1)
    }

    #[inline]
    pub fn lerp(self, o: Vec2, s: f64) -> Vec2 {
        Vec2::new(self.x1 + s * (o.x1 - self.x1), self.x2 + s * (o.x2 - self.x2))
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x1, v.x2]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x1 += o.x1;
        self.x2 += o.x2;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x1 -= o.x1;
        self.x2 -= o.x2;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x1, -self.x2)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x1 * s, self.x2 * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x1 / s, self.x2 / s)
    }
}

/// A 2x2 real matrix stored row-major, `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Mat2 {
    pub rows: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        rows: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { rows: [[a, b], [c, d]] }
    }

    /// Matrix whose columns are `c1` and `c2`.
    pub fn from_columns(c1: Vec2, c2: Vec2) -> Self {
        Self::new(c1.x1, c2.x1, c1.x2, c2.x2)
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.rows;
        a * d - b * c
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.rows;
        Some(Mat2::new(d / det, -b / det, -c / det, a / det))
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        let [[a, b], [c, d]] = self.rows;
        Vec2::new(a * v.x1 + b * v.x2, c * v.x1 + d * v.x2)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.rows;
        let [[e, f], [g, h]] = o.rows;
        Mat2::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn column(&self, j: usize) -> Vec2 {
        Vec2::new(self.rows[0][j], self.rows[1][j])
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(o.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from(rows: [[f64; 2]; 2]) -> Self {
        Mat2 { rows }
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        m.rows
    }
}

/// Coordinates of `v` in the basis `{b1, b2}`; `None` when the basis is degenerate.
pub fn coords_in_basis(v: Vec2, b1: Vec2, b2: Vec2) -> Option<(f64, f64)> {
    let det = b1.cross(b2);
    if det.abs() <= 1e-14 * b1.euclid() * b2.euclid() {
        return None;
    }
    Some((v.cross(b2) / det, b1.cross(v) / det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_coordinates_reconstruct() {
        let b1 = Vec2::new(1.0, 1.0);
        let b2 = Vec2::new(-1.0, 0.0);
        let (a, b) = coords_in_basis(Vec2::new(0.0, 1.0), b1, b2).unwrap();
        assert_eq!((a, b), (1.0, 1.0));
        assert!(coords_in_basis(Vec2::E1, Vec2::E1, Vec2::E1 * 2.0).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat2::new(2.0, 1.0, 0.0, 1.0);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).max_abs_diff(&Mat2::IDENTITY) < 1e-15);
        assert!(Mat2::new(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }

    #[test]
    fn serde_as_arrays() {
        let v: Vec2 = serde_json::from_str("[1.5, -2]").unwrap();
        assert_eq!(v, Vec2::new(1.5, -2.0));
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.5,-2.0]");
    }
}
