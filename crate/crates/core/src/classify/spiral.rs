//! Spiral arithmetic on `C* = U x q^R`.
//!
//! Every nonzero `x` is written `x = u q^omega` with `|u| = 1` and `omega` real.
//! Parameters may additionally carry an exact representation (rational turn of
//! `u` and rational `omega`), in which case membership in the discrete spirals
//! `q^Z`, `-q^Z`, `+-q^{Z+1/2}` is decided exactly instead of by tolerance.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::context::{powi, QContext};
use crate::error::{Error, Result};

pub type Rat = Ratio<i64>;

/// Exact spiral form `exp(2 pi i turns) q^omega`, `turns` reduced to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactSpiral {
    pub turns: Rat,
    pub omega: Rat,
}

fn frac_part(r: Rat) -> Rat {
    r - r.floor()
}

impl ExactSpiral {
    pub fn new(turns: Rat, omega: Rat) -> Self {
        Self {
            turns: frac_part(turns),
            omega,
        }
    }

    pub fn q_power(omega: Rat) -> Self {
        Self::new(Rat::zero(), omega)
    }

    pub fn root_of_unity(n: i64, k: i64) -> Self {
        Self::new(Rat::new(k, n), Rat::zero())
    }

    pub fn value(&self, ctx: &QContext) -> Complex64 {
        let angle = 2.0 * PI * (*self.turns.numer() as f64) / (*self.turns.denom() as f64);
        let u = Complex64::from_polar(1.0, angle);
        let qp = if self.omega.is_integer() {
            powi(ctx.q, *self.omega.numer())
        } else {
            ctx.q_pow(*self.omega.numer() as f64 / *self.omega.denom() as f64)
        };
        u * qp
    }

    pub fn inv(&self) -> Self {
        Self::new(-self.turns, -self.omega)
    }
}

impl Mul for ExactSpiral {
    type Output = ExactSpiral;
    fn mul(self, o: ExactSpiral) -> ExactSpiral {
        ExactSpiral::new(self.turns + o.turns, self.omega + o.omega)
    }
}

/// A nonzero complex number, optionally with its exact spiral form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SNum {
    pub value: Complex64,
    pub exact: Option<ExactSpiral>,
}

impl SNum {
    pub fn float(value: Complex64) -> Self {
        Self { value, exact: None }
    }

    pub fn exact(ctx: &QContext, e: ExactSpiral) -> Self {
        Self {
            value: e.value(ctx),
            exact: Some(e),
        }
    }

    /// `q^omega` in exact form.
    pub fn q_pow(ctx: &QContext, omega: Rat) -> Self {
        Self::exact(ctx, ExactSpiral::q_power(omega))
    }

    /// `q` itself, exact.
    pub fn q(ctx: &QContext) -> Self {
        Self::q_pow(ctx, Rat::one())
    }

    pub fn one() -> Self {
        Self {
            value: Complex64::new(1.0, 0.0),
            exact: Some(ExactSpiral::new(Rat::zero(), Rat::zero())),
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            value: Complex64::new(1.0, 0.0) / self.value,
            exact: self.exact.map(|e| e.inv()),
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        Self {
            value: powi(self.value, n),
            exact: self
                .exact
                .map(|e| ExactSpiral::new(e.turns * n, e.omega * n)),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

impl Mul for SNum {
    type Output = SNum;
    fn mul(self, o: SNum) -> SNum {
        SNum {
            value: self.value * o.value,
            exact: match (self.exact, o.exact) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for SNum {
    type Output = SNum;
    fn div(self, o: SNum) -> SNum {
        self * o.inv()
    }
}

impl Neg for SNum {
    type Output = SNum;
    fn neg(self) -> SNum {
        SNum {
            value: -self.value,
            exact: self
                .exact
                .map(|e| ExactSpiral::new(e.turns + Rat::new(1, 2), e.omega)),
        }
    }
}

impl fmt::Display for SNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(e) if e.turns.is_zero() => write!(f, "q^{}", e.omega),
            Some(e) => write!(
                f,
                "zeta_{}^{}*q^{}",
                e.turns.denom(),
                e.turns.numer(),
                e.omega
            ),
            None => write!(f, "{}", self.value),
        }
    }
}

/// `x = u q^omega` together with the two generator maps
/// `gamma1(x) = u` and `gamma2(x) = exp(2 pi i omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralDecomp {
    pub u: Complex64,
    pub omega: f64,
    pub gamma1: Complex64,
    pub gamma2: Complex64,
}

pub fn decompose(ctx: &QContext, x: Complex64) -> Result<SpiralDecomp> {
    if x.norm() == 0.0 || !x.is_finite() {
        return Err(Error::ZeroInput);
    }
    let omega = x.norm().ln() / ctx.q.norm().ln();
    let u = x / ctx.q_pow(omega);
    // renormalise away the rounding in |q^omega|
    let u = u / u.norm();
    Ok(SpiralDecomp {
        u,
        omega,
        gamma1: u,
        gamma2: Complex64::from_polar(1.0, 2.0 * PI * omega),
    })
}

/// Decomposition that honours an exact form when present.
pub fn decompose_snum(ctx: &QContext, x: &SNum) -> Result<SpiralDecomp> {
    match x.exact {
        Some(e) => {
            let omega = *e.omega.numer() as f64 / *e.omega.denom() as f64;
            let u = ExactSpiral::new(e.turns, Rat::zero()).value(ctx);
            let g2 = frac_part(e.omega);
            Ok(SpiralDecomp {
                u,
                omega,
                gamma1: u,
                gamma2: Complex64::from_polar(
                    1.0,
                    2.0 * PI * (*g2.numer() as f64) / (*g2.denom() as f64),
                ),
            })
        }
        None => decompose(ctx, x.value),
    }
}

/// Discrete spirals used by the case conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MemberSet {
    /// `q^Z`
    QZ,
    /// `q^{Z \ {0}}`
    QZStar,
    /// `q^{Z+1/2}`
    QHalfZPlus,
    /// `-q^{Z+1/2}`
    QHalfZMinus,
    /// `q^{N*}`, exponents `>= 1`
    QNStar,
    /// `q^{-N}`, exponents `<= 0`
    QNegN,
    /// `-q^Z`
    NegQZ,
}

impl fmt::Display for MemberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MemberSet::QZ => "q^Z",
            MemberSet::QZStar => "q^Z*",
            MemberSet::QHalfZPlus => "q^(Z+1/2)",
            MemberSet::QHalfZMinus => "-q^(Z+1/2)",
            MemberSet::QNStar => "q^N*",
            MemberSet::QNegN => "q^-N",
            MemberSet::NegQZ => "-q^Z",
        };
        f.write_str(s)
    }
}

/// Outcome of a membership query; `witness` is the integer exponent `n` with
/// `x = q^n` (resp. `-q^n`, `+-q^{n+1/2}`) when `member` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub witness: Option<i64>,
}

impl Membership {
    fn no() -> Self {
        Self {
            member: false,
            witness: None,
        }
    }
}

fn range_ok(set: MemberSet, n: i64) -> bool {
    match set {
        MemberSet::QZStar => n != 0,
        MemberSet::QNStar => n >= 1,
        MemberSet::QNegN => n <= 0,
        _ => true,
    }
}

/// Decide `x in set`. Float inputs are accepted within `tol_mem`, refused with
/// [`Error::BorderlineMembership`] inside the guard band `(tol_mem, tol_borderline)`.
pub fn membership(ctx: &QContext, x: &SNum, set: MemberSet) -> Result<Membership> {
    if x.value.norm() == 0.0 {
        return Err(Error::ZeroInput);
    }
    let negate = matches!(set, MemberSet::NegQZ | MemberSet::QHalfZMinus);
    let half = matches!(set, MemberSet::QHalfZPlus | MemberSet::QHalfZMinus);

    if let Some(e) = x.exact {
        let mut y = e;
        if negate {
            y = y * ExactSpiral::new(Rat::new(1, 2), Rat::zero());
        }
        if half {
            y = y * ExactSpiral::q_power(Rat::new(-1, 2));
        }
        if !y.turns.is_zero() || !y.omega.is_integer() {
            return Ok(Membership::no());
        }
        let n = y.omega.to_integer();
        return Ok(if range_ok(set, n) {
            Membership {
                member: true,
                witness: Some(n),
            }
        } else {
            Membership::no()
        });
    }

    let mut y = x.value;
    if negate {
        y = -y;
    }
    if half {
        y /= ctx.q_pow(0.5);
    }
    let omega = y.norm().ln() / ctx.q.norm().ln();
    let n = omega.round() as i64;
    if !range_ok(set, n) {
        return Ok(Membership::no());
    }
    let distance = (y * powi(ctx.q, -n) - Complex64::new(1.0, 0.0)).norm();
    if distance < ctx.tol_mem {
        return Ok(Membership {
            member: true,
            witness: Some(n),
        });
    }
    if distance < ctx.tol_borderline {
        return Err(Error::BorderlineMembership {
            value: x.value,
            set: set.to_string(),
            distance,
        });
    }
    Ok(Membership::no())
}

pub fn is_in(ctx: &QContext, x: &SNum, set: MemberSet) -> Result<bool> {
    Ok(membership(ctx, x, set)?.member)
}

/// Class of `x` in `+-q^{Z/2} / q^Z` (a Klein four-group), if `x` lies there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KleinClass {
    One,
    Minus,
    HalfPlus,
    HalfMinus,
}

pub fn klein_class(ctx: &QContext, x: &SNum) -> Result<Option<KleinClass>> {
    let table = [
        (MemberSet::QZ, KleinClass::One),
        (MemberSet::NegQZ, KleinClass::Minus),
        (MemberSet::QHalfZPlus, KleinClass::HalfPlus),
        (MemberSet::QHalfZMinus, KleinClass::HalfMinus),
    ];
    for (set, class) in table {
        if is_in(ctx, x, set)? {
            return Ok(Some(class));
        }
    }
    Ok(None)
}

/// A unimodular number, exact (as a rational turn) when possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unit {
    Turns(Rat),
    Value(Complex64),
}

impl Unit {
    pub fn value(&self) -> Complex64 {
        match self {
            Unit::Turns(t) => {
                Complex64::from_polar(1.0, 2.0 * PI * (*t.numer() as f64) / (*t.denom() as f64))
            }
            Unit::Value(v) => *v,
        }
    }

    /// A square root: half the turn in `[0, 1/2)`, or the principal root.
    pub fn sqrt(&self) -> Unit {
        match self {
            Unit::Turns(t) => Unit::Turns(frac_part(*t) / 2),
            Unit::Value(v) => Unit::Value(v.sqrt()),
        }
    }
}

/// `gamma1(x)` as a [`Unit`].
pub fn gamma1(ctx: &QContext, x: &SNum) -> Result<Unit> {
    Ok(match x.exact {
        Some(e) => Unit::Turns(e.turns),
        None => Unit::Value(decompose(ctx, x.value)?.gamma1),
    })
}

/// `gamma2(x) = exp(2 pi i omega)` as a [`Unit`].
pub fn gamma2(ctx: &QContext, x: &SNum) -> Result<Unit> {
    Ok(match x.exact {
        Some(e) => Unit::Turns(frac_part(e.omega)),
        None => Unit::Value(decompose(ctx, x.value)?.gamma2),
    })
}

/// `exp(i pi omega)`, a square root of `gamma2(x)`.
pub fn half_gamma2(ctx: &QContext, x: &SNum) -> Result<Unit> {
    Ok(match x.exact {
        Some(e) => Unit::Turns(frac_part(e.omega / 2)),
        None => Unit::Value(Complex64::from_polar(
            1.0,
            PI * decompose(ctx, x.value)?.omega,
        )),
    })
}

/// Least common multiple helper for orders.
pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}
