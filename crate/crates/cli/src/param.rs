//! Textual parameter forms.
//!
//! * cartesian: `0.3`, `-1.5e-2`, `0.3+0.4i`, `2i`
//! * polar: `R@THETA` (`THETA` in radians)
//! * spiral: `q^OMEGA`, `-q^OMEGA`, `zeta_N^K*q^OMEGA`, `zeta_N^K`, `U*q^OMEGA`
//!   with `U` cartesian or polar
//!
//! `OMEGA` is an integer, a fraction `P/Q` or a decimal. A spiral whose unit is
//! `1`, `-1` or `zeta_N^K` is exact: membership questions about it are decided
//! by rational arithmetic, without tolerances.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use qgalois::classify::spiral::{ExactSpiral, Rat, SNum};
use qgalois::QContext;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("cannot parse '{0}' as a number, polar R@THETA or spiral U*q^OMEGA")]
    Syntax(String),
    #[error("exponent '{0}' is not a rational number")]
    Exponent(String),
    #[error("'{0}': root of unity zeta_N^K needs N >= 1")]
    RootOrder(String),
    #[error("parameter must be nonzero")]
    Zero,
    #[error("q must be given as a number, not as a power of q")]
    SpiralQ,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unit {
    /// `exp(2 pi i turns)`
    Root(Rat),
    Value(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSpec {
    Value(Complex64),
    Spiral { unit: Unit, omega: Rat },
}

impl ParamSpec {
    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            ParamSpec::Spiral {
                unit: Unit::Root(_),
                ..
            }
        )
    }

    /// Value of a `q` argument.
    pub fn as_q(&self) -> Result<Complex64, SpecError> {
        match self {
            ParamSpec::Value(v) => Ok(*v),
            ParamSpec::Spiral { .. } => Err(SpecError::SpiralQ),
        }
    }

    pub fn resolve(&self, ctx: &QContext) -> Result<SNum, SpecError> {
        let s = match *self {
            ParamSpec::Value(v) => SNum::float(v),
            ParamSpec::Spiral {
                unit: Unit::Root(t),
                omega,
            } => SNum::exact(ctx, ExactSpiral::new(t, omega)),
            ParamSpec::Spiral {
                unit: Unit::Value(u),
                omega,
            } => {
                let e = ExactSpiral::new(Rat::from_integer(0), omega).value(ctx);
                SNum::float(u * e)
            }
        };
        if s.value.norm() == 0.0 || !s.value.is_finite() {
            return Err(SpecError::Zero);
        }
        Ok(s)
    }
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSpec::Value(v) => write!(f, "{v}"),
            ParamSpec::Spiral { unit, omega } => {
                match unit {
                    Unit::Root(t) if *t.numer() == 0 => {}
                    Unit::Root(t) => write!(f, "zeta_{}^{}*", t.denom(), t.numer())?,
                    Unit::Value(u) => write!(f, "({u})*")?,
                }
                write!(f, "q^{omega}")
            }
        }
    }
}

/// Exact rational from an integer, `P/Q` or a finite decimal.
pub fn parse_rational(s: &str) -> Result<Rat, SpecError> {
    let err = || SpecError::Exponent(s.to_string());
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| err())?;
        let q: i64 = q.trim().parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        return Ok(Rat::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return Err(err());
    }
    let digits: i64 = format!("{int}{frac}").parse().map_err(|_| err())?;
    let den = 10i64.pow(frac.len() as u32);
    let r = Rat::new(digits, den);
    Ok(if neg { -r } else { r })
}

fn parse_cartesian(s: &str) -> Option<Complex64> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if t.is_empty() {
        return None;
    }
    if let Ok(x) = t.parse::<f64>() {
        return Some(Complex64::new(x, 0.0));
    }
    let body = t.strip_suffix('i')?;
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().ok()?,
    };
    Some(Complex64::new(re.parse().ok()?, im))
}

fn parse_value(s: &str) -> Option<Complex64> {
    if let Some((r, t)) = s.split_once('@') {
        let r: f64 = r.trim().parse().ok()?;
        let t: f64 = t.trim().parse().ok()?;
        return Some(Complex64::from_polar(r, t));
    }
    parse_cartesian(s)
}

fn parse_unit(s: &str) -> Result<Unit, SpecError> {
    let t = s.trim();
    match t {
        "" | "+" | "1" => return Ok(Unit::Root(Rat::from_integer(0))),
        "-" | "-1" => return Ok(Unit::Root(Rat::new(1, 2))),
        _ => {}
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    if let Some(rest) = body.strip_prefix("zeta_") {
        let (n, k) = rest.split_once('^').unwrap_or((rest, "1"));
        let n: i64 = n.parse().map_err(|_| SpecError::Syntax(s.to_string()))?;
        let k: i64 = k.parse().map_err(|_| SpecError::Syntax(s.to_string()))?;
        if n < 1 {
            return Err(SpecError::RootOrder(s.to_string()));
        }
        let half = if neg {
            Rat::new(1, 2)
        } else {
            Rat::from_integer(0)
        };
        return Ok(Unit::Root(Rat::new(k, n) + half));
    }
    parse_value(t)
        .map(Unit::Value)
        .ok_or_else(|| SpecError::Syntax(s.to_string()))
}

impl FromStr for ParamSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let t = s.trim();
        if let Some(pos) = t
            .find("q^")
            .or_else(|| t.ends_with('q').then(|| t.len() - 1))
        {
            let head = t[..pos].trim_end();
            let head = head.strip_suffix('*').unwrap_or(head);
            let omega = if t[pos..].starts_with("q^") {
                parse_rational(&t[pos + 2..])?
            } else {
                Rat::from_integer(1)
            };
            return Ok(ParamSpec::Spiral {
                unit: parse_unit(head)?,
                omega,
            });
        }
        if t.starts_with("zeta_") || t.starts_with("-zeta_") {
            return Ok(ParamSpec::Spiral {
                unit: parse_unit(t)?,
                omega: Rat::from_integer(0),
            });
        }
        parse_value(t)
            .map(ParamSpec::Value)
            .ok_or_else(|| SpecError::Syntax(s.to_string()))
    }
}
