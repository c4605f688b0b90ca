//! The first-order system `Y(qz) = A(z) Y(z)` attached to the basic
//! hypergeometric equation, and its local fundamental solutions
//! `Y = F e_J` at `0` and at infinity.
//!
//! At infinity the characters are read through `z <- 1/z`: the matrix factor is
//! `e_{J^{-1}}(1/z)`, which satisfies `e(qz) = e(z) J`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::spiral::{membership, MemberSet, SNum};
use crate::context::QContext;
use crate::error::{Error, Result};
use crate::hyperseries::{phi21, phi21_dual, Dual, HGParams};
use crate::mat2::Mat2;
use crate::specfun::{dunford, e_from_dunford, Dunford};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Radius of the series' native domain (in the series variable).
pub const NATIVE_RADIUS: f64 = 0.75;
/// Maximal number of `q`-steps taken by the continuation.
pub const MAX_STEPS: usize = 200;

/// `[[0, 1], [-mu, lambda]]` with
/// `lambda = ((a+b)z - (1+c/q)) / (abz - c/q)`, `mu = (z-1) / (abz - c/q)`.
pub fn a_matrix(ctx: &QContext, p: &HGParams, z: Complex64) -> Result<Mat2> {
    let (a, b, c) = (p.a.value, p.b.value, p.c.value);
    let cq = c / ctx.q;
    let den = a * b * z - cq;
    if den.norm() < ctx.eps_id * cq.norm() {
        return Err(Error::PoleAt(z));
    }
    let lambda = ((a + b) * z - (ONE + cq)) / den;
    let mu = (z - ONE) / den;
    Ok(Mat2::new(ZERO, ONE, -mu, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    At0,
    AtInf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    Generic,
    /// `c = q`: unipotent exponent at 0.
    LogAtZero,
    /// `a = b`: unipotent exponent at infinity.
    LogAtInf,
}

/// Local data at one singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionBasis {
    pub side: Side,
    pub kind: BasisKind,
    /// Parameters, with the degenerate coincidence (`c = q` or `a = b`) imposed exactly.
    pub params: HGParams,
    pub j: Mat2,
    /// Dunford parts of `J` (at 0) or of `J^{-1}` (at infinity), the matrix the
    /// characters are built from.
    pub char_dunford: Dunford,
}

/// The kind dictated by the parameters, or `UnsupportedResonant`.
pub fn basis_kind(ctx: &QContext, p: &HGParams, side: Side) -> Result<BasisKind> {
    match side {
        Side::At0 => match membership(ctx, &p.c, MemberSet::QZ)?.witness {
            None => Ok(BasisKind::Generic),
            Some(1) => Ok(BasisKind::LogAtZero),
            Some(n) => Err(Error::UnsupportedResonant(format!(
                "c = q^{n} is resonant at 0"
            ))),
        },
        Side::AtInf => match membership(ctx, &(p.a / p.b), MemberSet::QZ)?.witness {
            None => Ok(BasisKind::Generic),
            Some(0) => Ok(BasisKind::LogAtInf),
            Some(n) => Err(Error::UnsupportedResonant(format!(
                "a/b = q^{n} is resonant at infinity"
            ))),
        },
    }
}

pub fn local_basis(ctx: &QContext, p: &HGParams, side: Side) -> Result<SolutionBasis> {
    let kind = basis_kind(ctx, p, side)?;
    local_basis_with_kind(ctx, p, side, kind)
}

/// Builds the basis of the requested kind without consulting membership; used
/// along degeneration ladders where the parameters are close to, but not at,
/// the logarithmic locus.
pub fn local_basis_with_kind(
    ctx: &QContext,
    p: &HGParams,
    side: Side,
    kind: BasisKind,
) -> Result<SolutionBasis> {
    let params = match kind {
        BasisKind::LogAtZero => HGParams::new(ctx, p.a, p.b, SNum::q(ctx))?,
        BasisKind::LogAtInf => HGParams::new(ctx, p.b, p.b, p.c)?,
        BasisKind::Generic => *p,
    };
    let (a, b, c) = (params.a.value, params.b.value, params.c.value);
    let j = match (side, kind) {
        (Side::At0, BasisKind::LogAtZero) => Mat2::new(ONE, ONE, ZERO, ONE),
        (Side::At0, _) => Mat2::diag(ONE, ctx.q / c),
        (Side::AtInf, BasisKind::LogAtInf) => Mat2::new(ONE / a, ONE, ZERO, ONE / a),
        (Side::AtInf, _) => Mat2::diag(ONE / a, ONE / b),
    };
    let char_matrix = match side {
        Side::At0 => j,
        Side::AtInf => j.inverse()?,
    };
    Ok(SolutionBasis {
        side,
        kind,
        params,
        j,
        char_dunford: dunford(ctx, &char_matrix)?,
    })
}

impl SolutionBasis {
    /// Modulus of the series variable at `z`.
    fn series_radius(&self, z: Complex64) -> f64 {
        match self.side {
            Side::At0 => z.norm(),
            Side::AtInf => {
                let p = &self.params;
                (p.c.value / (p.a.value * p.b.value * z)).norm()
            }
        }
    }

    pub fn in_domain(&self, z: Complex64) -> bool {
        z.norm() > 0.0 && self.series_radius(z) <= NATIVE_RADIUS
    }

    /// Analytic factor `F(z)` on the native domain.
    pub fn f(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        if !self.in_domain(z) {
            return Err(Error::OutOfDomain(z));
        }
        match (self.side, self.kind) {
            (Side::At0, BasisKind::LogAtZero) => f0_log(ctx, &self.params, z),
            (Side::At0, _) => f0_generic(ctx, &self.params, z),
            (Side::AtInf, BasisKind::LogAtInf) => finf_log(ctx, &self.params, z),
            (Side::AtInf, _) => finf_generic(ctx, &self.params, z),
        }
    }

    /// Character factor: `e_J(z)` at 0, `e_{J^{-1}}(1/z)` at infinity.
    pub fn e(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        let w = match self.side {
            Side::At0 => z,
            Side::AtInf => ONE / z,
        };
        e_from_dunford(ctx, &self.char_dunford, w)
    }
}

fn f0_generic(ctx: &QContext, p: &HGParams, z: Complex64) -> Result<Mat2> {
    let q = ctx.q;
    let piv = p.pivoted(ctx)?;
    let s1 = |w| phi21(ctx, &p.a, &p.b, &p.c, w);
    let s2 = |w| phi21(ctx, &piv.a, &piv.b, &piv.c, w);
    Ok(Mat2::new(
        s1(z)?,
        s2(z)?,
        s1(q * z)?,
        q / p.c.value * s2(q * z)?,
    ))
}

/// `c = q`: `[[phi, -q(phi~_c - phi_c)], [phi(qz), phi(qz) - q(phi~_c(qz) - phi_c(qz))]]`,
/// the `c -> q` limit of the generic factor transported by
/// `[[1,1],[1,q/c]]^{-1} [[1,0],[1,1]]`.
fn f0_log(ctx: &QContext, p: &HGParams, z: Complex64) -> Result<Mat2> {
    let q = ctx.q;
    let (a, b) = (p.a.value, p.b.value);
    let c = Dual::variable(q);
    let inv_c = c.recip();
    let pair = |w: Complex64| -> Result<(Complex64, Complex64)> {
        let zd = Dual::constant(w);
        let first = phi21_dual(ctx, Dual::constant(a), Dual::constant(b), c, zd)?;
        let second = phi21_dual(
            ctx,
            inv_c.scale(a * q),
            inv_c.scale(b * q),
            inv_c.scale(q * q),
            zd,
        )?;
        Ok((first.value, q * (second.deriv - first.deriv)))
    };
    let (v0, d0) = pair(z)?;
    let (v1, d1) = pair(q * z)?;
    Ok(Mat2::new(v0, -d0, v1, v1 - d1))
}

fn finf_generic(ctx: &QContext, p: &HGParams, z: Complex64) -> Result<Mat2> {
    let q = SNum::q(ctx);
    let (a, b, c) = (p.a, p.b, p.c);
    let w1 = c.value * ctx.q / (a.value * b.value * z);
    let w0 = c.value / (a.value * b.value * z);
    let col = |x: SNum, y: SNum| -> Result<[Complex64; 2]> {
        let (p1, p2, p3) = (x, x * q / c, x * q / y);
        Ok([
            phi21(ctx, &p1, &p2, &p3, w1)?,
            phi21(ctx, &p1, &p2, &p3, w0)? / x.value,
        ])
    };
    Ok(Mat2::from_columns(col(a, b)?, col(b, a)?))
}

/// `a = b`: the `a -> b` limit of `F_inf(a,b) [[1,1],[1/a,1/b]]^{-1} [[1,0],[1/a,1]]`,
/// i.e. first column `f_a` and second column `b^2 d/da (f_b - f_a)` at `a = b`,
/// computed by forward differentiation in `a`.
fn finf_log(ctx: &QContext, p: &HGParams, z: Complex64) -> Result<Mat2> {
    let q = ctx.q;
    let (b, c) = (p.b.value, p.c.value);
    let a = Dual::variable(b);
    let bd = Dual::constant(b);
    let inv_z = Dual::constant(c / z) / (a * bd);
    let w1 = inv_z.scale(q);
    let w0 = inv_z;
    let col = |x: Dual, y: Dual| -> Result<[Dual; 2]> {
        let p2 = x.scale(q / c);
        let p3 = x.scale(q) / y;
        Ok([
            phi21_dual(ctx, x, p2, p3, w1)?,
            phi21_dual(ctx, x, p2, p3, w0)? / x,
        ])
    };
    let fa = col(a, bd)?;
    let fb = col(bd, a)?;
    let b2 = b * b;
    Ok(Mat2::from_columns(
        [fa[0].value, fa[1].value],
        [
            b2 * (fb[0].deriv - fa[0].deriv),
            b2 * (fb[1].deriv - fa[1].deriv),
        ],
    ))
}

/// `Y(z) = F(z) e(z)` on the native domain.
pub fn eval_basis(ctx: &QContext, basis: &SolutionBasis, z: Complex64) -> Result<Mat2> {
    Ok(basis.f(ctx, z)? * basis.e(ctx, z)?)
}

/// Steps `z -> qz` (at 0) or `z -> z/q` (at infinity) until the native domain is
/// reached; returns the accumulated transport matrix, the landing point and the
/// number of steps.
fn transport(
    ctx: &QContext,
    basis: &SolutionBasis,
    z: Complex64,
) -> Result<(Mat2, Complex64, i64)> {
    if z.norm() == 0.0 {
        return Err(Error::OutOfDomain(z));
    }
    let p = &basis.params;
    let mut prod = Mat2::identity();
    let mut w = z;
    let mut k = 0;
    while !basis.in_domain(w) {
        if k as usize >= MAX_STEPS {
            return Err(Error::NoReentry(z));
        }
        let step = match basis.side {
            Side::At0 => a_matrix(ctx, p, w).and_then(|m| m.inverse()),
            Side::AtInf => a_matrix(ctx, p, w / ctx.q),
        }
        .map_err(|_| Error::PathThroughPole(z))?;
        prod = prod * step;
        w = match basis.side {
            Side::At0 => w * ctx.q,
            Side::AtInf => w / ctx.q,
        };
        k += 1;
    }
    Ok((prod, w, k))
}

/// `Y(z)` anywhere off the poles, by iterating the system into the native domain.
pub fn extend_eval(ctx: &QContext, basis: &SolutionBasis, z: Complex64) -> Result<Mat2> {
    let (prod, w, _) = transport(ctx, basis, z)?;
    Ok(prod * eval_basis(ctx, basis, w)?)
}

/// `F(z)` anywhere off the poles: `F(z) = A(z)^{-1} F(qz) J` at 0 and
/// `F(z) = A(z/q) F(z/q) J^{-1}` at infinity.
pub fn extend_f(ctx: &QContext, basis: &SolutionBasis, z: Complex64) -> Result<Mat2> {
    let (prod, w, k) = transport(ctx, basis, z)?;
    let jk = match basis.side {
        Side::At0 => basis.j.powi(k)?,
        Side::AtInf => basis.j.powi(-k)?,
    };
    Ok(prod * basis.f(ctx, w)? * jk)
}

/// Relative residual of `Y(qz) = A(z) Y(z)`.
pub fn system_residual(ctx: &QContext, basis: &SolutionBasis, z: Complex64) -> Result<f64> {
    let y = extend_eval(ctx, basis, z)?;
    let yq = extend_eval(ctx, basis, ctx.q * z)?;
    let a = a_matrix(ctx, &basis.params, z)?;
    Ok((yq - a * y).max_abs() / (yq.max_abs() + (a * y).max_abs()).max(f64::MIN_POSITIVE))
}

/// Relative residual of the gauge identity `F(qz) J = A(z) F(z)`.
pub fn gauge_residual(ctx: &QContext, basis: &SolutionBasis, z: Complex64) -> Result<f64> {
    let f = extend_f(ctx, basis, z)?;
    let fq = extend_f(ctx, basis, ctx.q * z)?;
    let a = a_matrix(ctx, &basis.params, z)?;
    let lhs = fq * basis.j;
    let rhs = a * f;
    Ok((lhs - rhs).max_abs() / (lhs.max_abs() + rhs.max_abs()).max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::spiral::Rat;

    fn ctx() -> QContext {
        QContext::from_real(0.3).unwrap()
    }

    fn qp(ctx: &QContext, num: i64, den: i64) -> SNum {
        SNum::q_pow(ctx, Rat::new(num, den))
    }

    fn z0() -> Complex64 {
        Complex64::new(-0.31, 0.22)
    }

    #[test]
    fn a_at_zero_has_local_exponents() {
        let ctx = ctx();
        let p = HGParams::new(&ctx, qp(&ctx, 3, 10), qp(&ctx, 7, 10), qp(&ctx, 4, 10)).unwrap();
        let a0 = a_matrix(&ctx, &p, ZERO).unwrap();
        let qc = ctx.q / p.c.value;
        assert!((a0.m[1][0] + qc).norm() < 1e-15 && (a0.m[1][1] - ONE - qc).norm() < 1e-15);
        let a1 = a_matrix(&ctx, &p, ONE).unwrap();
        assert!(a1.det().norm() < 1e-15);
    }

    #[test]
    fn f0_at_origin() {
        let ctx = ctx();
        let p = HGParams::new(&ctx, qp(&ctx, 3, 10), qp(&ctx, 7, 10), qp(&ctx, 4, 10)).unwrap();
        let b = local_basis(&ctx, &p, Side::At0).unwrap();
        let f = b.f(&ctx, Complex64::new(1e-300, 0.0)).unwrap();
        let expect = Mat2::new(ONE, ONE, ONE, ctx.q / p.c.value);
        assert!((f - expect).max_abs() < 1e-14);
    }

    #[test]
    fn residuals_for_each_kind() {
        let ctx = ctx();
        let cases = [
            (qp(&ctx, 3, 10), qp(&ctx, 7, 10), qp(&ctx, 4, 10)),
            (qp(&ctx, 3, 10), qp(&ctx, 8, 10), qp(&ctx, 1, 1)),
            (qp(&ctx, 1, 2), qp(&ctx, 1, 2), qp(&ctx, 1, 1)),
            (qp(&ctx, 1, 2), qp(&ctx, 1, 2), qp(&ctx, 3, 10)),
            (qp(&ctx, 2, 1), qp(&ctx, 2, 1), qp(&ctx, 1, 1)),
        ];
        for (a, b, c) in cases {
            let p = HGParams::new(&ctx, a, b, c).unwrap();
            for side in [Side::At0, Side::AtInf] {
                let basis = local_basis(&ctx, &p, side).unwrap();
                for z in [z0(), z0() * 7.0, z0() / 3.0] {
                    let r = system_residual(&ctx, &basis, z).unwrap();
                    assert!(r < 1e-11, "{side:?} {:?} residual {r}", basis.kind);
                    let g = gauge_residual(&ctx, &basis, z).unwrap();
                    assert!(g < 1e-11, "{side:?} {:?} gauge {g}", basis.kind);
                }
            }
        }
    }

    #[test]
    fn log_exponents() {
        let ctx = ctx();
        let p = HGParams::new(&ctx, qp(&ctx, 1, 2), qp(&ctx, 1, 2), qp(&ctx, 1, 1)).unwrap();
        let b0 = local_basis(&ctx, &p, Side::At0).unwrap();
        assert_eq!(b0.j, Mat2::new(ONE, ONE, ZERO, ONE));
        let bi = local_basis(&ctx, &p, Side::AtInf).unwrap();
        assert_eq!(bi.kind, BasisKind::LogAtInf);
        let f = bi.f(&ctx, Complex64::new(1e12, 1.0)).unwrap();
        let expect = Mat2::new(ONE, ZERO, ONE / p.b.value, ONE);
        assert!((f - expect).max_abs() < 1e-10);
    }

    #[test]
    fn resonant_is_refused() {
        let ctx = ctx();
        let p = HGParams::new(&ctx, qp(&ctx, 3, 10), qp(&ctx, 7, 10), qp(&ctx, 2, 1)).unwrap();
        assert!(matches!(
            local_basis(&ctx, &p, Side::At0),
            Err(Error::UnsupportedResonant(_))
        ));
    }

    #[test]
    fn continuation_matches_direct_evaluation() {
        let ctx = ctx();
        let p = HGParams::new(&ctx, qp(&ctx, 3, 10), qp(&ctx, 7, 10), qp(&ctx, 4, 10)).unwrap();
        let basis = local_basis(&ctx, &p, Side::At0).unwrap();
        let z = Complex64::new(0.2, 0.5);
        let direct = eval_basis(&ctx, &basis, z).unwrap();
        let ext = extend_eval(&ctx, &basis, z).unwrap();
        assert_eq!(direct, ext);
        let zq = z / ctx.q;
        let via = a_matrix(&ctx, &p, zq).unwrap().inverse().unwrap() * direct;
        let ext = extend_eval(&ctx, &basis, zq).unwrap();
        assert!((via - ext).max_abs() < 1e-12 * ext.max_abs());
    }
}
