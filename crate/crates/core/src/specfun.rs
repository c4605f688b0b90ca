//! Complex special-function kernel: q-Pochhammer symbols, the Jacobi theta
//! function and its derivative, the q-logarithm `ell_q`, q-characters and the
//! matrix characters `e_J` built from a multiplicative Dunford decomposition.
//!
//! Theta is evaluated by reducing `z` to the annulus `1 <= |z| < 1/|q|` with
//! `theta(qz) = -theta(z)/z` and, there, summing the Laurent series
//! `sum_j q^{j(j-1)/2} (-z)^j` (for `|q| <= 0.6`) or multiplying out the
//! triple product (for larger `|q|`, where the Laurent sum cancels badly).

use num_complex::Complex64;

use crate::context::{powi, QContext};
use crate::error::{Error, Result};
use crate::mat2::Mat2;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_LAURENT_TERMS: usize = 4000;
/// Above this `|q|` theta is taken from the triple product.
const PRODUCT_THRESHOLD: f64 = 0.6;

/// Order of a q-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochOrder {
    Finite(usize),
    Infinite,
}

/// Factors `1 - a q^k` closer than this to zero are taken to be exactly zero.
const ZERO_FACTOR: f64 = 64.0 * f64::EPSILON;

fn factor(x: Complex64) -> Complex64 {
    let f = ONE - x;
    if f.norm() < ZERO_FACTOR {
        Complex64::new(0.0, 0.0)
    } else {
        f
    }
}

/// `(a;q)_n = prod_{k<n} (1 - a q^k)`.
pub fn qpoch(ctx: &QContext, a: Complex64, n: PochOrder) -> Complex64 {
    match n {
        PochOrder::Finite(n) => {
            let mut acc = ONE;
            let mut x = a;
            for _ in 0..n {
                acc *= factor(x);
                x *= ctx.q;
            }
            acc
        }
        PochOrder::Infinite => qpoch_inf_detail(ctx, a).value,
    }
}

/// Infinite product together with its truncation data.
#[derive(Debug, Clone, Copy)]
pub struct InfiniteProduct {
    pub value: Complex64,
    pub factors: usize,
    /// Estimate of `|prod_{k>=factors} (1 - a q^k) - 1|`.
    pub tail: f64,
}

pub fn qpoch_inf_detail(ctx: &QContext, a: Complex64) -> InfiniteProduct {
    let mut acc = ONE;
    let mut x = a;
    let qa = ctx.q.norm();
    let mut k = 0;
    while k < ctx.n_max_product {
        if x.norm() < ctx.eps_term * 1e-3 {
            break;
        }
        acc *= factor(x);
        x *= ctx.q;
        k += 1;
    }
    InfiniteProduct {
        value: acc,
        factors: k,
        tail: x.norm() / (1.0 - qa),
    }
}

/// `(x;q)_inf` and its derivative in `x`, computed with leave-one-out products
/// so that a vanishing factor does not spoil the derivative.
pub fn qpoch_inf_with_derivative(ctx: &QContext, x: Complex64) -> (Complex64, Complex64) {
    let mut factors = Vec::new();
    let mut weights = Vec::new();
    let mut xk = x;
    let mut qk = ONE;
    while factors.len() < ctx.n_max_product && xk.norm() >= ctx.eps_term * 1e-3 {
        factors.push(factor(xk));
        weights.push(-qk);
        xk *= ctx.q;
        qk *= ctx.q;
    }
    let n = factors.len();
    let mut prefix = vec![ONE; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * factors[i];
    }
    let mut suffix = ONE;
    let mut deriv = Complex64::new(0.0, 0.0);
    for j in (0..n).rev() {
        deriv += weights[j] * prefix[j] * suffix;
        suffix *= factors[j];
    }
    // the truncated tail only rescales by 1 + O(eps_term)
    (prefix[n], deriv)
}

/// Spiral coordinate `omega = ln|x| / ln|q|`.
pub fn spiral_exponent(ctx: &QContext, x: Complex64) -> f64 {
    x.norm().ln() / ctx.q.norm().ln()
}

/// Distance of `x` to the spiral `q^Z`, measured as `|x q^{-n} - 1|` with `n`
/// the nearest integer to the spiral exponent of `x`.
pub fn spiral_distance(ctx: &QContext, x: Complex64) -> f64 {
    let n = spiral_exponent(ctx, x).round() as i64;
    (x * powi(ctx.q, -n) - ONE).norm()
}

/// Reduction `z = q^k z0` with `1 <= |z0| < 1/|q|`.
fn reduce(ctx: &QContext, z: Complex64) -> (i64, Complex64) {
    let k = spiral_exponent(ctx, z).ceil() as i64;
    (k, z * powi(ctx.q, -k))
}

/// Laurent sums of theta and its derivative at a reduced argument.
fn laurent(ctx: &QContext, z0: Complex64) -> Result<(Complex64, Complex64)> {
    let q = ctx.q;
    let mz = -z0;
    let mut sum = ONE;
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut biggest = 1.0f64;

    // j >= 1
    let mut t = ONE;
    let mut qj = ONE;
    let mut j = 0usize;
    loop {
        t *= qj * mz;
        qj *= q;
        j += 1;
        sum += t;
        dsum += t * (j as f64);
        biggest = biggest.max(t.norm());
        if t.norm() * (j as f64 + 1.0) < ctx.eps_term * 1e-3 * biggest {
            break;
        }
        if j > MAX_LAURENT_TERMS {
            return Err(Error::NonConvergent { z: z0, terms: j });
        }
    }
    // j <= -1: t_{-m} = t_{-(m-1)} q^m / (-z0)
    let mut t = ONE;
    let inv = ONE / mz;
    let mut qm = ONE;
    let mut m = 0usize;
    loop {
        m += 1;
        qm *= q;
        t *= qm * inv;
        sum += t;
        dsum -= t * (m as f64);
        biggest = biggest.max(t.norm());
        if t.norm() * (m as f64 + 1.0) < ctx.eps_term * 1e-3 * biggest {
            break;
        }
        if m > MAX_LAURENT_TERMS {
            return Err(Error::NonConvergent { z: z0, terms: m });
        }
    }
    Ok((sum, dsum / z0))
}

/// `(x;q)_inf` and its `x`-derivative, with as many factors as the tail needs.
fn poch_pair(ctx: &QContext, x: Complex64) -> (Complex64, Complex64) {
    let mut value = ONE;
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut xk = x;
    let mut qk = ONE;
    while xk.norm() >= ctx.eps_term * 1e-3 {
        let f = factor(xk);
        deriv = deriv * f - qk * value;
        value *= f;
        xk *= ctx.q;
        qk *= ctx.q;
    }
    (value, deriv)
}

/// Triple product `(q;q)(z;q)(q/z;q)` and its derivative at a reduced argument.
fn triple_product(ctx: &QContext, z0: Complex64) -> (Complex64, Complex64) {
    let q = ctx.q;
    let (qq, _) = poch_pair(ctx, q);
    let (a, da) = poch_pair(ctx, z0);
    let w = q / z0;
    let (b, db) = poch_pair(ctx, w);
    (qq * a * b, qq * (da * b - a * db * w / z0))
}

fn reduced_pair(ctx: &QContext, z0: Complex64) -> Result<(Complex64, Complex64)> {
    if ctx.q.norm() > PRODUCT_THRESHOLD {
        Ok(triple_product(ctx, z0))
    } else {
        laurent(ctx, z0)
    }
}

/// `theta_q(z)` and `theta_q'(z)`.
pub fn theta_pair(ctx: &QContext, z: Complex64) -> Result<(Complex64, Complex64)> {
    if z.norm() == 0.0 || !z.is_finite() {
        return Err(Error::PoleAt(z));
    }
    let (k, z0) = reduce(ctx, z);
    let (t0, d0) = reduced_pair(ctx, z0)?;
    if k == 0 {
        return Ok((t0, d0));
    }
    // theta(q^k z0) = (-1)^k q^{-k(k-1)/2} z0^{-k} theta(z0)
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let c = powi(ctx.q, -(k * (k - 1) / 2)) * powi(z0, -k) * sign;
    let value = c * t0;
    let deriv = c * powi(ctx.q, -k) * (d0 - t0 * (k as f64) / z0);
    Ok((value, deriv))
}

/// `theta_q(z)` (`order = 0`) or `theta_q'(z)` (`order = 1`).
pub fn theta(ctx: &QContext, z: Complex64, order: u8) -> Result<Complex64> {
    let (t, d) = theta_pair(ctx, z)?;
    Ok(if order == 0 { t } else { d })
}

/// `theta_q` through its product formula `(q;q)_inf (z;q)_inf (q/z;q)_inf`.
pub fn theta_product(ctx: &QContext, z: Complex64) -> Complex64 {
    qpoch(ctx, ctx.q, PochOrder::Infinite)
        * qpoch(ctx, z, PochOrder::Infinite)
        * qpoch(ctx, ctx.q / z, PochOrder::Infinite)
}

/// The q-logarithm `ell_q(z) = -z theta_q'(z) / theta_q(z)`, which satisfies
/// `ell_q(qz) = ell_q(z) + 1`.
pub fn ell_q(ctx: &QContext, z: Complex64) -> Result<Complex64> {
    let distance = spiral_distance(ctx, z);
    if distance < ctx.eps_id {
        return Err(Error::PoleAtSpiral { z, distance });
    }
    let (k, z0) = reduce(ctx, z);
    let (t, d) = reduced_pair(ctx, z0)?;
    Ok(-z0 * d / t + k as f64)
}

/// The q-character `e_lambda`, solution of `e(qz) = lambda e(z)`.
///
/// `lambda` is written `lambda0 q^k` with `1 <= |lambda0| < 1/|q|`, and
/// `e_lambda(z) = z^k theta_q(z) / theta_q(lambda0 z)`.
pub fn e_char(ctx: &QContext, lambda: Complex64, z: Complex64) -> Result<Complex64> {
    if lambda.norm() == 0.0 {
        return Err(Error::PoleAt(lambda));
    }
    let (k, lambda0) = reduce(ctx, lambda);
    let zk = powi(z, k);
    if lambda0 == ONE {
        return Ok(zk);
    }
    let w = lambda0 * z;
    if spiral_distance(ctx, w) < ctx.eps_id {
        return Err(Error::PoleAt(z));
    }
    Ok(zk * theta(ctx, z, 0)? / theta(ctx, w, 0)?)
}

/// Multiplicative Dunford decomposition `J = D U = U D` of an invertible 2x2
/// matrix, with the eigen-data of the semisimple part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dunford {
    pub d: Mat2,
    pub u: Mat2,
    pub eigenvalues: (Complex64, Complex64),
    /// Columns are eigenvectors of `d` (identity when `d` is scalar or diagonal).
    pub basis: Mat2,
}

impl Dunford {
    pub fn is_unipotent_trivial(&self) -> bool {
        self.u == Mat2::identity()
    }

    /// `P diag(f(l1), f(l2)) P^{-1}` over the eigen-data of `d`.
    pub fn map_semisimple(&self, f: impl Fn(Complex64) -> Result<Complex64>) -> Result<Mat2> {
        let (l1, l2) = self.eigenvalues;
        if l1 == l2 {
            return Ok(Mat2::scalar(f(l1)?));
        }
        let inner = Mat2::diag(f(l1)?, f(l2)?);
        if self.basis == Mat2::identity() {
            return Ok(inner);
        }
        Ok(self.basis * inner * self.basis.inverse()?)
    }
}

pub fn dunford(ctx: &QContext, j: &Mat2) -> Result<Dunford> {
    let det = j.det();
    if det.norm() <= 1e-300 || det.norm() <= 1e-14 * j.max_abs().powi(2) {
        return Err(Error::NonInvertible(det));
    }
    let [[a, b], [c, d]] = j.m;
    // triangular inputs are read off exactly
    let (l1, l2) = if c == Complex64::new(0.0, 0.0) || b == Complex64::new(0.0, 0.0) {
        (a, d)
    } else {
        j.eigenvalues()
    };
    let gap = (l1 - l2).norm() / l1.norm().max(l2.norm());
    if l1 == l2 || gap <= 1e-13 {
        let l = if l1 == l2 { l1 } else { (l1 + l2) / 2.0 };
        let u = j.scale(ONE / l);
        let n = u - Mat2::identity();
        if (n * n).max_abs() > ctx.eps_id * (1.0 + n.max_abs().powi(2)) {
            return Err(Error::NumericallyDefective(l1, l2));
        }
        return Ok(Dunford {
            d: Mat2::scalar(l),
            u,
            eigenvalues: (l, l),
            basis: Mat2::identity(),
        });
    }
    if gap < ctx.eps_id {
        return Err(Error::NumericallyDefective(l1, l2));
    }
    let basis = if j.is_diagonal() {
        Mat2::identity()
    } else {
        Mat2::from_columns(j.eigenvector(l1), j.eigenvector(l2))
    };
    Ok(Dunford {
        d: *j,
        u: Mat2::identity(),
        eigenvalues: (l1, l2),
        basis,
    })
}

/// `e_J(z) = e_D(z) e_U(z)` with `e_U = I + ell_q(z) (U - I)`.
pub fn e_of_matrix(ctx: &QContext, j: &Mat2, z: Complex64) -> Result<Mat2> {
    let dec = dunford(ctx, j)?;
    e_from_dunford(ctx, &dec, z)
}

pub fn e_from_dunford(ctx: &QContext, dec: &Dunford, z: Complex64) -> Result<Mat2> {
    let ed = dec.map_semisimple(|l| e_char(ctx, l, z))?;
    if dec.is_unipotent_trivial() {
        return Ok(ed);
    }
    Ok(ed * e_unipotent(ctx, &dec.u, z)?)
}

/// `I + ell_q(z) (U - I)`.
pub fn e_unipotent(ctx: &QContext, u: &Mat2, z: Complex64) -> Result<Mat2> {
    if *u == Mat2::identity() {
        return Ok(Mat2::identity());
    }
    let l = ell_q(ctx, z)?;
    Ok(Mat2::identity() + (*u - Mat2::identity()).scale(l))
}
