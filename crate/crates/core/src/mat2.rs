use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2x2 complex matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self {
            m: [[a, b], [c, d]],
        }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn scalar(s: Complex64) -> Self {
        Self::diag(s, s)
    }

    pub fn from_columns(c0: [Complex64; 2], c1: [Complex64; 2]) -> Self {
        Self::new(c0[0], c1[0], c0[1], c1[1])
    }

    pub fn col(&self, j: usize) -> [Complex64; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `(|ad| + |bc|) / |det|`, at least 1: the factor by which rounding in
    /// [`det`](Self::det) is amplified relative to the determinant itself.
    pub fn det_cancellation(&self) -> f64 {
        let [[a, b], [c, d]] = self.m;
        let det = self.det().norm();
        if det == 0.0 {
            return f64::INFINITY;
        }
        ((a * d).norm() + (b * c).norm()).max(det) / det
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Inverse; fails when `|det|` is below `1e-300` or relative to the entries
    /// below machine precision.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let scale = self.max_abs().powi(2);
        if d.norm().is_nan() || d.norm() <= 1e-300 || d.norm() <= 1e-15 * scale || !d.is_finite() {
            return Err(Error::NonInvertible(d));
        }
        let [[a, b], [c, e]] = self.m;
        Ok(Self::new(e / d, -b / d, -c / d, a / d))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self::new(f(a), f(b), f(c), f(d))
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `self^{-1} * g * self`.
    pub fn conjugate(&self, g: &Mat2) -> Result<Self> {
        Ok(self.inverse()? * *g * *self)
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_finite())
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { *self };
        let mut acc = Self::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        Ok(acc)
    }

    /// Eigenvalues, ordered as `(tr + s)/2, (tr - s)/2` with `s` the principal
    /// square root of the discriminant.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let tr = self.trace();
        let disc = (tr * tr - 4.0 * self.det()).sqrt();
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }

    /// An eigenvector for `lambda`, picked from the better-conditioned row of
    /// `self - lambda I`.
    pub fn eigenvector(&self, lambda: Complex64) -> [Complex64; 2] {
        let [[a, b], [c, d]] = self.m;
        let r0 = [a - lambda, b];
        let r1 = [c, d - lambda];
        let n0 = r0[0].norm() + r0[1].norm();
        let n1 = r1[0].norm() + r1[1].norm();
        let row = if n0 >= n1 { r0 } else { r1 };
        if row[0].norm() + row[1].norm() == 0.0 {
            return [ONE, ZERO];
        }
        let v = [row[1], -row[0]];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    }

    pub fn is_diagonal(&self) -> bool {
        self.m[0][1] == ZERO && self.m[1][0] == ZERO
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] -= o.m[i][j];
            }
        }
        r
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// Entrywise relative distance `max |x_ij - y_ij| / (1 + max |y_ij|)`.
pub fn rel_dist(x: &Mat2, y: &Mat2) -> f64 {
    (*x - *y).max_abs() / (1.0 + y.max_abs())
}
