//! Density-theorem generators evaluated at concrete points: the local
//! generators at 0, the local generators at infinity transported by
//! `P~(y0)`, and connection elements `P~(y0)^{-1} P~(z)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spiral::decompose;
use crate::connection::TwistedMatrix;
use crate::context::{Annulus, QContext};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::specfun::Dunford;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub matrix: Mat2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet {
    pub y0: Complex64,
    pub items: Vec<Witness>,
}

impl WitnessSet {
    pub fn matrices(&self) -> Vec<Mat2> {
        self.items.iter().map(|w| w.matrix).collect()
    }

    pub fn connection(&self) -> Vec<Mat2> {
        self.items
            .iter()
            .filter(|w| w.label.starts_with("connection"))
            .map(|w| w.matrix)
            .collect()
    }
}

/// `gamma1` and `gamma2` applied to the semisimple part, plus the unipotent part
/// when it is nontrivial.
fn local_generators(ctx: &QContext, d: &Dunford) -> Result<Vec<(&'static str, Mat2)>> {
    let g1 = d.map_semisimple(|l| Ok(decompose(ctx, l)?.gamma1))?;
    let g2 = d.map_semisimple(|l| Ok(decompose(ctx, l)?.gamma2))?;
    let mut out = vec![("gamma1", g1), ("gamma2", g2)];
    if !d.is_unipotent_trivial() {
        out.push(("unipotent", d.u));
    }
    Ok(out)
}

/// Connection sample points: spread over the annulus, off the cut and at
/// spiral distance at least `1e-3` from every pole spiral.
pub fn connection_points(
    ctx: &QContext,
    tm: &TwistedMatrix,
    annulus: &Annulus,
    n: usize,
) -> Vec<Complex64> {
    let (r0, r1) = (annulus.r_inner, annulus.r_outer);
    let mut out = Vec::with_capacity(n);
    let mut k = 0usize;
    while out.len() < n && k < 40 * n {
        let t = (k as f64 + 0.5) / (n as f64);
        let r = r0 * (r1 / r0).powf(0.15 + 0.7 * (t * 0.618_033_988_75).fract());
        let theta = 0.1 + (2.0 * PI - 0.2) * ((k as f64) * 0.381_966_011_25 + 0.13).fract();
        let z = Complex64::from_polar(r, theta);
        if tm.pole_distance(ctx, z) > 1e-3 {
            out.push(z);
        }
        k += 1;
    }
    out
}

/// The generators for `tm`, with base point chosen by
/// [`TwistedMatrix::choose_base_point`].
pub fn density_generators(
    ctx: &QContext,
    tm: &TwistedMatrix,
    annulus: &Annulus,
    n_connection: usize,
) -> Result<WitnessSet> {
    let y0 = tm.choose_base_point(ctx, annulus)?;
    density_generators_at(ctx, tm, annulus, y0, n_connection)
}

pub fn density_generators_at(
    ctx: &QContext,
    tm: &TwistedMatrix,
    annulus: &Annulus,
    y0: Complex64,
    n_connection: usize,
) -> Result<WitnessSet> {
    let mut items = Vec::new();
    for (name, m) in local_generators(ctx, &tm.at0.char_dunford)? {
        items.push(Witness {
            label: format!("local0:{name}"),
            matrix: m,
        });
    }
    let p0 = tm.twisted(ctx, y0)?;
    let p0_inv = p0.inverse().map_err(|_| Error::BasePointSingular(y0))?;
    for (name, m) in local_generators(ctx, &tm.at_inf.char_dunford)? {
        items.push(Witness {
            label: format!("localinf:{name}"),
            matrix: p0_inv * m * p0,
        });
    }
    for (i, z) in connection_points(ctx, tm, annulus, n_connection)
        .into_iter()
        .enumerate()
    {
        items.push(Witness {
            label: format!("connection:{i}"),
            matrix: p0_inv * tm.twisted(ctx, z)?,
        });
    }
    Ok(WitnessSet { y0, items })
}

/// Common eigenbasis of the connection elements, normalised to
/// `[[1, 1], [C1, C2]]`; taken from the element with the widest eigenvalue gap.
pub fn diagonalising_conjugator(connection: &[Mat2]) -> Result<Mat2> {
    let best = connection
        .iter()
        .map(|g| {
            let (l1, l2) = g.eigenvalues();
            ((l1 - l2).norm() / (1.0 + g.max_abs()), g)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or(Error::NoBasePoint)?;
    let g = best.1;
    let (l1, l2) = g.eigenvalues();
    let v1 = g.eigenvector(l1);
    let v2 = g.eigenvector(l2);
    if v1[0].norm() < 1e-12 || v2[0].norm() < 1e-12 {
        return Err(Error::NonInvertible(Complex64::new(0.0, 0.0)));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(Mat2::new(one, one, v1[1] / v1[0], v2[1] / v2[0]))
}
