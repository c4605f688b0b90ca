//! The basic hypergeometric series
//! `phi(a,b;c;z) = sum_n (a,b;q)_n / ((c;q)_n (q;q)_n) z^n`
//! and its first-order parameter derivatives.
//!
//! Parameter derivatives are computed in forward mode: the term recurrence is
//! run on [`Dual`] numbers, so factors that vanish at the evaluation point are
//! differentiated correctly instead of producing `0 * inf`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::classify::spiral::{decompose_snum, membership, MemberSet, SNum, SpiralDecomp};
use crate::context::QContext;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_TERMS: usize = 200_000;

/// `(a, b, c)` with their spiral decompositions `a = u_a q^alpha` etc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HGParams {
    pub a: SNum,
    pub b: SNum,
    pub c: SNum,
    pub da: SpiralDecomp,
    pub db: SpiralDecomp,
    pub dc: SpiralDecomp,
}

impl HGParams {
    pub fn new(ctx: &QContext, a: SNum, b: SNum, c: SNum) -> Result<Self> {
        Ok(Self {
            a,
            b,
            c,
            da: decompose_snum(ctx, &a)?,
            db: decompose_snum(ctx, &b)?,
            dc: decompose_snum(ctx, &c)?,
        })
    }

    pub fn from_complex(ctx: &QContext, a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        Self::new(ctx, SNum::float(a), SNum::float(b), SNum::float(c))
    }

    pub fn alpha(&self) -> f64 {
        self.da.omega
    }

    pub fn beta(&self) -> f64 {
        self.db.omega
    }

    pub fn gamma(&self) -> f64 {
        self.dc.omega
    }

    /// `(b, a, c)`; the equation is symmetric in `a, b`.
    pub fn swapped(&self, ctx: &QContext) -> Result<Self> {
        Self::new(ctx, self.b, self.a, self.c)
    }

    /// `(aq/c, bq/c, q^2/c)`, the parameters of the second solution at 0.
    pub fn pivoted(&self, ctx: &QContext) -> Result<Self> {
        let q = SNum::q(ctx);
        let qc = q / self.c;
        Self::new(ctx, self.a * qc, self.b * qc, q * qc)
    }
}

/// Forward-mode dual number `value + eps * deriv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: Complex64,
    pub deriv: Complex64,
}

impl Dual {
    pub fn constant(value: Complex64) -> Self {
        Self { value, deriv: ZERO }
    }

    pub fn variable(value: Complex64) -> Self {
        Self { value, deriv: ONE }
    }

    pub fn new(value: Complex64, deriv: Complex64) -> Self {
        Self { value, deriv }
    }

    pub fn recip(self) -> Self {
        let r = ONE / self.value;
        Self::new(r, -self.deriv * r * r)
    }

    pub fn scale(self, s: Complex64) -> Self {
        Self::new(self.value * s, self.deriv * s)
    }

    fn mag(&self) -> f64 {
        self.value.norm() + self.deriv.norm()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.value + o.value, self.deriv + o.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.value - o.value, self.deriv - o.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(
            self.value * o.value,
            self.deriv * o.value + self.value * o.deriv,
        )
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        self * o.recip()
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}

/// Index of the last nonzero term when `x in q^{-N}`.
fn terminating_index(ctx: &QContext, x: &SNum) -> Result<Option<usize>> {
    let m = membership(ctx, x, MemberSet::QNegN)?;
    Ok(m.witness.map(|n| (-n) as usize))
}

/// `phi(a,b;c;z)`.
///
/// Termination (`a` or `b` in `q^{-N}`) is decided by spiral membership, so a
/// terminating series is summed exactly for every `z`.
pub fn phi21(ctx: &QContext, a: &SNum, b: &SNum, c: &SNum, z: Complex64) -> Result<Complex64> {
    let stop = match (terminating_index(ctx, a)?, terminating_index(ctx, b)?) {
        (Some(m), Some(n)) => Some(m.min(n)),
        (m, n) => m.or(n),
    };
    let c_pole = terminating_index(ctx, c)?;
    if let Some(k) = c_pole {
        // (1 - c q^k) = 0 enters the denominator at term k + 1
        if stop.is_none_or(|m| m > k) {
            return Err(Error::PoleInC(c.value));
        }
    }
    if stop.is_none() && z.norm() >= 1.0 {
        return Err(Error::DivergentInput(z));
    }
    let (av, bv, cv) = (a.value, b.value, c.value);
    let q = ctx.q;
    let mut term = ONE;
    let mut sum = ONE;
    let mut qn = ONE;
    let mut small = 0;
    let slack = if stop.is_some() { 1.0 } else { 1.0 - z.norm() };
    for n in 0..MAX_TERMS {
        if stop == Some(n) {
            return Ok(sum);
        }
        term *= (ONE - av * qn) * (ONE - bv * qn) / ((ONE - qn * q) * (ONE - cv * qn)) * z;
        sum += term;
        qn *= q;
        if stop.is_none() {
            if term.norm() < ctx.eps_term * sum.norm().max(f64::MIN_POSITIVE) * slack {
                small += 1;
                if small == 2 {
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
        }
    }
    Err(Error::NonConvergent {
        z,
        terms: MAX_TERMS,
    })
}

/// `phi(a,b;c;z)` for plain complex parameters.
pub fn phi21_complex(
    ctx: &QContext,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    phi21(ctx, &SNum::float(a), &SNum::float(b), &SNum::float(c), z)
}

/// `phi(a,b;c;z)` with every argument a dual number; returns the value and the
/// directional derivative. Requires `|z| < 1`; no termination shortcut is taken
/// since a derivative of a terminating series need not terminate.
pub fn phi21_dual(ctx: &QContext, a: Dual, b: Dual, c: Dual, z: Dual) -> Result<Dual> {
    if z.value.norm() >= 1.0 {
        return Err(Error::DivergentInput(z.value));
    }
    let one = Dual::constant(ONE);
    let q = ctx.q;
    let mut term = one;
    let mut sum = one;
    let mut qn = ONE;
    let mut small = 0;
    let slack = 1.0 - z.value.norm();
    for _ in 0..MAX_TERMS {
        let den = (ONE - qn * q) * (one - c.scale(qn)).value;
        if den.norm() < 64.0 * f64::EPSILON {
            return Err(Error::PoleInC(c.value));
        }
        term = term * (one - a.scale(qn)) * (one - b.scale(qn))
            / ((one - c.scale(qn)).scale(ONE - qn * q))
            * z;
        sum = sum + term;
        qn *= q;
        if term.mag() < ctx.eps_term * sum.mag().max(f64::MIN_POSITIVE) * slack {
            small += 1;
            if small == 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergent {
        z: z.value,
        terms: MAX_TERMS,
    })
}

/// The pair `(d/dc phi(a,b;c;z), d/dc phi(aq/c,bq/c;q^2/c;z))` at `c = q`.
pub fn dphi21_dc_at_q(
    ctx: &QContext,
    a: Complex64,
    b: Complex64,
    z: Complex64,
) -> Result<(Complex64, Complex64)> {
    let q = ctx.q;
    let zd = Dual::constant(z);
    let c = Dual::variable(q);
    let first = phi21_dual(ctx, Dual::constant(a), Dual::constant(b), c, zd)?;
    // aq/c, bq/c, q^2/c as functions of c
    let inv_c = c.recip();
    let second = phi21_dual(
        ctx,
        inv_c.scale(a * q),
        inv_c.scale(b * q),
        inv_c.scale(q * q),
        zd,
    )?;
    Ok((first.deriv, second.deriv))
}
