//! Birkhoff connection matrix `P = (Y_inf)^{-1} Y_0`, its twisted form and the
//! connection-component generators `P~(y0)^{-1} P~(z)`.
//!
//! Everything is built from the "core" `F_inf(z)^{-1} F_0(z)`, which carries the
//! theta-quotient entries of the Barnes-Mellin-Watson formula:
//!
//! * `P(z)  = e_inf(z)^{-1} core(z) e_0(z)`,
//! * `P~(z) = g_{1/z}(D')^{-1} e_{U'}(1/z)^{-1} core(z) e_{U0}(z) g_z(D0)`,
//!
//! where `D0 U0` is the Dunford decomposition of `J0`, `D' U'` that of
//! `J_inf^{-1}`, and `g_z(lambda) = z^{omega(lambda)}` with `omega` the spiral
//! exponent of `lambda`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::{arg_cut, zpow, Annulus, QContext};
use crate::error::{Error, Result};
use crate::hyperseries::HGParams;
use crate::mat2::Mat2;
use crate::specfun::{
    e_unipotent, qpoch_inf_with_derivative, spiral_distance, spiral_exponent, theta, theta_pair,
};
use crate::system::{extend_eval, extend_f, local_basis, BasisKind, SolutionBasis};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The four connection coefficients
/// `u = (b, c/a)/(c, b/a)`, `v = (bq/c, q/a)/(q^2/c, b/a)`,
/// `w = (a, c/b)/(c, a/b)`, `y = (aq/c, q/b)/(q^2/c, a/b)` (infinite products),
/// and their derivatives in `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BMWCoefficients {
    pub u_coef: Complex64,
    pub v_coef: Complex64,
    pub w_coef: Complex64,
    pub y_coef: Complex64,
    pub u_c: Complex64,
    pub v_c: Complex64,
    pub w_c: Complex64,
    pub y_c: Complex64,
}

/// A ratio of infinite products `prod (x_i;q) / prod (y_j;q)` where each `x_i`,
/// `y_j` is `k c^e` (`e` in {-1, 0, 1}); returns the value and the `c`-derivative.
fn product_ratio(
    ctx: &QContext,
    c: Complex64,
    num: &[(Complex64, i32)],
    den: &[(Complex64, i32, &str)],
) -> Result<(Complex64, Complex64)> {
    let eval = |k: Complex64, e: i32| {
        let x = k * c.powi(e);
        let (f, df) = qpoch_inf_with_derivative(ctx, x);
        // d/dc (k c^e) = e k c^{e-1}
        (f, df * k * (e as f64) * c.powi(e - 1))
    };
    let mut value = ONE;
    let mut log_terms: Vec<(Complex64, Complex64)> = Vec::new();
    for &(k, e) in num {
        let (f, df) = eval(k, e);
        value *= f;
        log_terms.push((f, df));
    }
    let mut den_value = ONE;
    let mut den_log = Complex64::new(0.0, 0.0);
    for &(k, e, name) in den {
        let (f, df) = eval(k, e);
        if f.norm() == 0.0 || !f.is_finite() {
            return Err(Error::DegenerateDenominator(name.to_string()));
        }
        den_value *= f;
        den_log += df / f;
    }
    // derivative of the numerator by leave-one-out products
    let mut dnum = Complex64::new(0.0, 0.0);
    for i in 0..log_terms.len() {
        let mut t = log_terms[i].1;
        for (j, (f, _)) in log_terms.iter().enumerate() {
            if j != i {
                t *= f;
            }
        }
        dnum += t;
    }
    let v = value / den_value;
    Ok((v, dnum / den_value - v * den_log))
}

pub fn bmw_coefficients(ctx: &QContext, p: &HGParams) -> Result<BMWCoefficients> {
    let (a, b, c) = (p.a.value, p.b.value, p.c.value);
    let q = ctx.q;
    let (u, u_c) = product_ratio(
        ctx,
        c,
        &[(b, 0), (ONE / a, 1)],
        &[(ONE, 1, "c"), (b / a, 0, "b/a")],
    )?;
    let (v, v_c) = product_ratio(
        ctx,
        c,
        &[(b * q, -1), (q / a, 0)],
        &[(q * q, -1, "q^2/c"), (b / a, 0, "b/a")],
    )?;
    let (w, w_c) = product_ratio(
        ctx,
        c,
        &[(a, 0), (ONE / b, 1)],
        &[(ONE, 1, "c"), (a / b, 0, "a/b")],
    )?;
    let (y, y_c) = product_ratio(
        ctx,
        c,
        &[(a * q, -1), (q / b, 0)],
        &[(q * q, -1, "q^2/c"), (a / b, 0, "a/b")],
    )?;
    Ok(BMWCoefficients {
        u_coef: u,
        v_coef: v,
        w_coef: w,
        y_coef: y,
        u_c,
        v_c,
        w_c,
        y_c,
    })
}

/// How the core `F_inf^{-1} F_0` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoreForm {
    /// Theta quotients with the coefficients above.
    Explicit(BMWCoefficients),
    /// `c = q`: the `c -> q` limit of the explicit form, with `theta'` terms.
    LogAtZero(BMWCoefficients),
    /// `a = b`: no closed form; solved from the local bases.
    Numeric,
}

/// Twisted connection data for one parameter triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedMatrix {
    pub params: HGParams,
    pub at0: SolutionBasis,
    pub at_inf: SolutionBasis,
    pub core_form: CoreForm,
    /// `lambda` such that poles or zeros of the entries lie on `lambda q^Z`.
    pub pole_spirals: Vec<Complex64>,
}

pub fn twisted_p(ctx: &QContext, p: &HGParams) -> Result<TwistedMatrix> {
    let at0 = local_basis(ctx, p, crate::system::Side::At0)?;
    let at_inf = local_basis(ctx, p, crate::system::Side::AtInf)?;
    from_bases(ctx, at0, at_inf)
}

/// Connection data for given local bases (possibly of forced kinds).
pub fn from_bases(
    ctx: &QContext,
    at0: SolutionBasis,
    at_inf: SolutionBasis,
) -> Result<TwistedMatrix> {
    let mut params = at0.params;
    params.a = at_inf.params.a;
    params.b = at_inf.params.b;
    params.da = at_inf.params.da;
    params.db = at_inf.params.db;
    let core_form = match (at0.kind, at_inf.kind) {
        (_, BasisKind::LogAtInf) => CoreForm::Numeric,
        (BasisKind::LogAtZero, _) => CoreForm::LogAtZero(bmw_coefficients(ctx, &params)?),
        _ => CoreForm::Explicit(bmw_coefficients(ctx, &params)?),
    };
    let (a, b, c) = (params.a.value, params.b.value, params.c.value);
    let q = ctx.q;
    let pole_spirals = vec![
        ONE,
        ONE / a,
        ONE / b,
        c / (a * q),
        c / (b * q),
        c / (a * b * q),
    ];
    Ok(TwistedMatrix {
        params,
        at0,
        at_inf,
        core_form,
        pole_spirals,
    })
}

impl TwistedMatrix {
    /// Smallest spiral distance from `z` to the pole spirals.
    pub fn pole_distance(&self, ctx: &QContext, z: Complex64) -> f64 {
        self.pole_spirals
            .iter()
            .map(|l| spiral_distance(ctx, z / l))
            .fold(f64::INFINITY, f64::min)
    }

    /// `F_inf(z)^{-1} F_0(z)` from the closed form when available.
    pub fn core(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        let p = &self.params;
        let (a, b, c) = (p.a.value, p.b.value, p.c.value);
        let q = ctx.q;
        match self.core_form {
            CoreForm::Numeric => self.core_numeric(ctx, z),
            CoreForm::Explicit(k) => {
                let tz = theta(ctx, z, 0)?;
                if spiral_distance(ctx, z) < ctx.eps_id {
                    return Err(Error::PoleAt(z));
                }
                let t = |x: Complex64| -> Result<Complex64> { Ok(theta(ctx, x * z, 0)? / tz) };
                Ok(Mat2::new(
                    k.u_coef * t(a)?,
                    k.v_coef * t(a * q / c)?,
                    k.w_coef * t(b)?,
                    k.y_coef * t(b * q / c)?,
                ))
            }
            CoreForm::LogAtZero(k) => {
                let tz = theta(ctx, z, 0)?;
                if spiral_distance(ctx, z) < ctx.eps_id {
                    return Err(Error::PoleAt(z));
                }
                let (ta, dta) = theta_pair(ctx, a * z)?;
                let (tb, dtb) = theta_pair(ctx, b * z)?;
                Ok(Mat2::new(
                    k.u_coef * ta / tz,
                    (q * (k.u_c - k.v_c) * ta + a * z * k.v_coef * dta) / tz,
                    k.w_coef * tb / tz,
                    (q * (k.w_c - k.y_c) * tb + b * z * k.y_coef * dtb) / tz,
                ))
            }
        }
    }

    /// `F_inf(z)^{-1} F_0(z)` from the local bases (continued as needed).
    pub fn core_numeric(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        let f0 = extend_f(ctx, &self.at0, z)?;
        let finf = extend_f(ctx, &self.at_inf, z)?;
        Ok(finf.inverse()? * f0)
    }

    /// Birkhoff matrix `P(z) = e_inf(z)^{-1} core(z) e_0(z)`.
    pub fn birkhoff(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        let e0 = self.at0.e(ctx, z)?;
        let einf = self.at_inf.e(ctx, z)?;
        Ok(einf.inverse()? * self.core(ctx, z)? * e0)
    }

    /// `(Y_inf)^{-1} Y_0` computed from the series, independent of the closed form.
    pub fn birkhoff_from_solutions(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        let y0 = extend_eval(ctx, &self.at0, z)?;
        let yinf = extend_eval(ctx, &self.at_inf, z)?;
        Ok(yinf.inverse()? * y0)
    }

    fn twist0(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        let d = &self.at0.char_dunford;
        let g = d.map_semisimple(|l| Ok(zpow(z, spiral_exponent(ctx, l))))?;
        Ok(e_unipotent(ctx, &d.u, z)? * g)
    }

    fn twist_inf(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        let w = ONE / z;
        let d = &self.at_inf.char_dunford;
        let g = d.map_semisimple(|l| Ok(zpow(w, spiral_exponent(ctx, l))))?;
        Ok(g * e_unipotent(ctx, &d.u, w)?)
    }

    /// The twisted matrix `P~(z)`.
    pub fn twisted(&self, ctx: &QContext, z: Complex64) -> Result<Mat2> {
        Ok(self.twist_inf(ctx, z)?.inverse()? * self.core(ctx, z)? * self.twist0(ctx, z)?)
    }

    /// Right-hand side of the determinant identity
    /// `det P~(z) = K (1/z)^{-(alpha+beta)} z^{1-gamma} theta(abqz/c) / theta(z)`,
    /// `K = (1 - q/c) / (1/a - 1/b)`, with the factors `1 - q/c` (at `c = q`) and
    /// `1/(1/a - 1/b)` (at `a = b`) replaced by `-1`.
    pub fn det_rhs(&self, ctx: &QContext, z: Complex64) -> Result<Complex64> {
        let p = &self.params;
        let (a, b, c) = (p.a.value, p.b.value, p.c.value);
        let q = ctx.q;
        let k_num = match self.at0.kind {
            BasisKind::LogAtZero => -ONE,
            _ => ONE - q / c,
        };
        let k_den = match self.at_inf.kind {
            BasisKind::LogAtInf => -ONE,
            _ => ONE / (ONE / a - ONE / b),
        };
        let s_inf = spiral_exponent(ctx, a) + spiral_exponent(ctx, b);
        let s0 = match self.at0.kind {
            BasisKind::LogAtZero => 0.0,
            _ => spiral_exponent(ctx, q / c),
        };
        let tz = theta(ctx, z, 0)?;
        Ok(
            k_num * k_den * zpow(ONE / z, -s_inf) * zpow(z, s0) * theta(ctx, a * b * q * z / c, 0)?
                / tz,
        )
    }

    /// Relative residual of the determinant identity, measured against the
    /// rounding scale of `det core(z)`.
    pub fn det_identity_residual(&self, ctx: &QContext, z: Complex64) -> Result<f64> {
        let (lhs, amplification) = self.twisted_det(ctx, z)?;
        let rhs = self.det_rhs(ctx, z)?;
        Ok((lhs - rhs).norm() / (rhs.norm().max(1.0) * amplification))
    }

    /// `det P~(z)` from the factors, with the rounding amplification of the
    /// core determinant (the core can be nearly rank one).
    pub fn twisted_det(&self, ctx: &QContext, z: Complex64) -> Result<(Complex64, f64)> {
        let core = self.core(ctx, z)?;
        let det = core.det() * self.twist0(ctx, z)?.det() / self.twist_inf(ctx, z)?.det();
        Ok((det, core.det_cancellation()))
    }

    /// `P~(y0)^{-1} P~(z)`.
    pub fn component_generator(&self, ctx: &QContext, y0: Complex64, z: Complex64) -> Result<Mat2> {
        let base = self
            .twisted(ctx, y0)?
            .inverse()
            .map_err(|_| Error::BasePointSingular(y0))?;
        Ok(base * self.twisted(ctx, z)?)
    }

    /// Base point on `|z| = r_geo`: of 64 equally spaced candidates away from
    /// the cut, the one farthest (in spiral distance) from every pole spiral.
    pub fn choose_base_point(&self, ctx: &QContext, annulus: &Annulus) -> Result<Complex64> {
        let r = annulus.geometric_mean();
        let mut best: Option<(f64, Complex64)> = None;
        for k in 0..64 {
            let t = 2.0 * PI * (k as f64 + 0.5) / 64.0;
            let z = Complex64::from_polar(r, t);
            let arg = arg_cut(z);
            if !(0.05..=2.0 * PI - 0.05).contains(&arg) {
                continue;
            }
            let d = self.pole_distance(ctx, z);
            if d < 1e-4 {
                continue;
            }
            let ok = self.twisted(ctx, z).and_then(|m| m.inverse()).is_ok();
            if ok && best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, z));
            }
        }
        best.map(|(_, z)| z).ok_or(Error::NoBasePoint)
    }
}

/// Explicit-form `P(z)` (or the numerically solved one when no closed form exists).
pub fn birkhoff_p(ctx: &QContext, p: &HGParams, z: Complex64) -> Result<Mat2> {
    twisted_p(ctx, p)?.birkhoff(ctx, z)
}

/// Ratio `sigma_min / sigma_max` of the 4x8 matrix of
/// `theta(az), theta(-az), theta(q^{1/2} az), theta(-q^{1/2} az)` sampled at
/// `points`, each row normalised; a value well above zero shows that the four
/// functions are linearly independent.
pub fn theta_family_rank_ratio(ctx: &QContext, a: Complex64, points: &[Complex64]) -> Result<f64> {
    let h = ctx.q_pow(0.5);
    let shifts = [a, -a, h * a, -h * a];
    let mut m = DMatrix::<Complex64>::zeros(shifts.len(), points.len());
    for (i, s) in shifts.iter().enumerate() {
        for (j, z) in points.iter().enumerate() {
            m[(i, j)] = theta(ctx, s * z, 0)?;
        }
        let norm = m.row(i).norm();
        if norm > 0.0 {
            m.row_mut(i).unscale_mut(norm);
        }
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    Ok(if max > 0.0 { min / max } else { 0.0 })
}
