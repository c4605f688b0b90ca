use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base `q` together with the numerical tolerances every evaluator shares.
///
/// `tau` is fixed by the principal logarithm of `q`, so that
/// `q^y = exp(-2 pi i tau y) = exp(y Log q)` for every complex `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    pub q: Complex64,
    pub tau: Complex64,
    /// Tail bound used to truncate series and infinite products.
    pub eps_term: f64,
    /// Tolerance for identity checks and pole proximity.
    pub eps_id: f64,
    /// Hard cap on the number of factors of an infinite product.
    pub n_max_product: usize,
    /// Tolerance of the spiral membership predicates.
    pub tol_mem: f64,
    /// Upper end of the refusal band of the membership predicates.
    pub tol_borderline: f64,
    /// Largest root-of-unity order recognised by the scalar closures.
    pub n_max_unity: u64,
}

impl QContext {
    pub fn new(q: Complex64) -> Result<Self> {
        let r = q.norm();
        if !(r > 0.0 && r < 1.0) || !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::InvalidContext(format!("|q| = {r} is not in (0, 1)")));
        }
        let tau = Complex64::i() * q.ln() / (2.0 * PI);
        Ok(Self {
            q,
            tau,
            eps_term: 1e-14,
            eps_id: 1e-9,
            // enough factors for |q|^n to fall below eps_term * 1e-3
            n_max_product: ((1e-17f64).ln() / r.ln()).ceil().max(512.0) as usize,
            tol_mem: 1e-7,
            tol_borderline: 1e-4,
            n_max_unity: 256,
        })
    }

    pub fn from_real(q: f64) -> Result<Self> {
        Self::new(Complex64::new(q, 0.0))
    }

    pub fn with_tol_mem(mut self, tol: f64) -> Self {
        self.tol_mem = tol;
        self
    }

    pub fn with_n_max_unity(mut self, n: u64) -> Self {
        self.n_max_unity = n;
        self
    }

    /// `Log q = -2 pi i tau`.
    pub fn log_q(&self) -> Complex64 {
        -2.0 * PI * Complex64::i() * self.tau
    }

    /// `q^y` for real `y`, on the branch fixed by `tau`.
    pub fn q_pow(&self, y: f64) -> Complex64 {
        (self.log_q() * y).exp()
    }

    /// Integer power of `q` by repeated squaring (exact up to rounding).
    pub fn q_powi(&self, n: i64) -> Complex64 {
        powi(self.q, n)
    }

    pub fn check(&self) -> Result<()> {
        let back = (-2.0 * PI * Complex64::i() * self.tau).exp();
        if (back - self.q).norm() > self.eps_id {
            return Err(Error::InvalidContext("tau does not reproduce q".into()));
        }
        if self.eps_term >= self.eps_id {
            return Err(Error::InvalidContext(
                "eps_term must be below eps_id".into(),
            ));
        }
        Ok(())
    }
}

/// Integer power of a complex number.
pub fn powi(x: Complex64, n: i64) -> Complex64 {
    if n < 0 {
        return Complex64::new(1.0, 0.0) / powi(x, -n);
    }
    let mut base = x;
    let mut e = n as u64;
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Argument of `z` in `[0, 2 pi)`: the cut sits on the positive real axis and
/// the value jumps just before it when turning counterclockwise.
pub fn arg_cut(z: Complex64) -> f64 {
    let t = z.im.atan2(z.re);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// Logarithm of `z` on the branch of [`arg_cut`].
pub fn log_cut(z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), arg_cut(z))
}

/// `z^s` for real `s`, evaluated as `exp(s log z)` on the branch of [`log_cut`].
/// Integer exponents are computed exactly.
pub fn zpow(z: Complex64, s: f64) -> Complex64 {
    if s.fract() == 0.0 && s.abs() < 1e9 {
        return powi(z, s as i64);
    }
    (log_cut(z) * s).exp()
}

/// Sampling annulus `r_inner < |z| < r_outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Annulus {
    pub fn new(r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner > 0.0 && r_inner < r_outer) {
            return Err(Error::InvalidContext(format!(
                "annulus ({r_inner}, {r_outer}) is empty"
            )));
        }
        Ok(Self { r_inner, r_outer })
    }

    /// The fundamental annulus `|q| < |z| < 1`.
    pub fn fundamental(ctx: &QContext) -> Self {
        Self {
            r_inner: ctx.q.norm(),
            r_outer: 1.0,
        }
    }

    pub fn geometric_mean(&self) -> f64 {
        (self.r_inner * self.r_outer).sqrt()
    }
}
