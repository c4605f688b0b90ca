//! Orders of unimodular numbers and Zariski closures of scalar groups.

use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::spiral::Unit;
use crate::context::{arg_cut, powi, QContext};
use crate::error::{Error, Result};

/// Order of `u` as a root of unity, if it is one of order at most `ctx.n_max_unity`.
///
/// Candidate orders come from the continued fraction of `arg(u) / 2 pi`; each is
/// confirmed by `|u^n - 1| < tol_mem`.
pub fn unit_order(ctx: &QContext, u: &Unit) -> Result<Option<u64>> {
    match u {
        Unit::Turns(t) => {
            let n = *t.denom() as u64;
            Ok((n <= ctx.n_max_unity).then_some(n))
        }
        Unit::Value(v) => {
            if (v.norm() - 1.0).abs() > ctx.tol_mem {
                return Err(Error::NotUnimodular(*v));
            }
            let x = arg_cut(*v) / (2.0 * PI);
            Ok(continued_fraction_denominators(x, ctx.n_max_unity)
                .into_iter()
                .find(|&n| (powi(*v, n as i64) - 1.0).norm() < ctx.tol_mem))
        }
    }
}

/// Denominators of the convergents of `x`, up to `n_max`; always starts at 1.
fn continued_fraction_denominators(x: f64, n_max: u64) -> Vec<u64> {
    let mut out = vec![1];
    let (mut h_prev, mut h) = (0u64, 1u64);
    let mut r = x - x.floor();
    for _ in 0..64 {
        if r.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / r;
        let a = inv.floor();
        if a > n_max as f64 {
            break;
        }
        let next = a as u64 * h + h_prev;
        if next > n_max {
            break;
        }
        // semiconvergents between h and next are also candidates
        for k in 1..a as u64 {
            let s = k * h + h_prev;
            if s > h && s <= n_max {
                out.push(s);
            }
        }
        out.push(next);
        h_prev = h;
        h = next;
        r = inv - a;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Zariski closure of a subgroup of `C*` generated by unimodular numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n")]
pub enum ScalarGroup {
    /// The cyclic group of `n`-th roots of unity.
    FiniteCyclic(u64),
    /// All of `C*`.
    FullTorus,
}

impl ScalarGroup {
    pub fn contains(&self, ctx: &QContext, s: num_complex::Complex64) -> bool {
        match self {
            ScalarGroup::FullTorus => s.norm() > 0.0,
            ScalarGroup::FiniteCyclic(n) => (powi(s, *n as i64) - 1.0).norm() < ctx.eps_id.sqrt(),
        }
    }
}

impl fmt::Display for ScalarGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarGroup::FiniteCyclic(n) => write!(f, "mu_{n}"),
            ScalarGroup::FullTorus => f.write_str("C*"),
        }
    }
}

/// Closure together with any warning produced while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarClosure {
    pub group: ScalarGroup,
    pub warning: Option<String>,
}

pub fn scalar_zariski_closure(ctx: &QContext, generators: &[Unit]) -> Result<ScalarClosure> {
    let mut n = 1u64;
    for g in generators {
        if let Unit::Value(v) = g {
            if (v.norm() - 1.0).abs() > ctx.tol_mem {
                return Ok(ScalarClosure {
                    group: ScalarGroup::FullTorus,
                    warning: None,
                });
            }
        }
        match unit_order(ctx, g)? {
            Some(k) => n = n.lcm(&k),
            None => {
                return Ok(ScalarClosure {
                    group: ScalarGroup::FullTorus,
                    warning: None,
                })
            }
        }
    }
    if n > ctx.n_max_unity {
        return Ok(ScalarClosure {
            group: ScalarGroup::FullTorus,
            warning: Some(format!(
                "order {n} exceeds n_max_unity = {}; reporting C*",
                ctx.n_max_unity
            )),
        });
    }
    Ok(ScalarClosure {
        group: ScalarGroup::FiniteCyclic(n),
        warning: None,
    })
}
