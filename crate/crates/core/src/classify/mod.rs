//! Case dispatch over the parameter conditions and the resulting Galois group.
//!
//! Conditions are evaluated with the spiral membership predicates of
//! [`spiral`]; cases that follow from a treated one by a parameter symmetry
//! (exchange of `a` and `b`, the pivot `(a,b,c) -> (aq/c, bq/c, q^2/c)`, or the
//! exchange of `0` and infinity when `a = b`) are dispatched through that
//! symmetry and marked as symmetry-derived.

pub mod family;
pub mod spiral;
pub mod unity;
pub mod witness;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::connection::twisted_p;
use crate::context::{Annulus, QContext};
use crate::error::{Error, Result};
use crate::hyperseries::HGParams;

pub use family::{common_line_defect, Family, Transport};
use spiral::{
    gamma1, gamma2, half_gamma2, is_in, klein_class, membership, KleinClass, MemberSet, SNum, Unit,
};
pub use unity::{scalar_zariski_closure, unit_order, ScalarClosure, ScalarGroup};
pub use witness::{density_generators, Witness, WitnessSet};

/// Branch of the trichotomy for `a` in `q^{N*}` (resp. `q^{-N}`), decided by `b/c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trichotomy {
    /// `b/c` not in `q^Z`
    Generic,
    /// `c/b` in `q^{N*}`
    COverB,
    /// `bq/c` in `q^{N*}`
    BqOverC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    /// `b` in `q^Z`: exchange `a` and `b`.
    SwapAB,
    /// `a/c` in `q^Z`: pivot to `(aq/c, bq/c, q^2/c)`.
    PivotAC,
    /// `b/c` in `q^Z`: same pivot.
    PivotBC,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    C1,
    C2,
    /// `b/a` and `c` in the same nontrivial class of `+-q^{Z/2}` mod `q^Z`.
    C3(KleinClass),
    C4(Trichotomy),
    C5(Trichotomy),
    Sym(Symmetry, Box<CaseTag>),
    L1,
    L2,
    L3,
    /// `c = q`, `a` in `q^Z`: exchange `a` and `b`.
    LSym(Box<CaseTag>),
    /// `a = b`, `c` not in `q^Z`: the case `(a, aq/c, q)` read at infinity.
    LCNotQ(Box<CaseTag>),
    M1,
    M2,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tri = |t: &Trichotomy| match t {
            Trichotomy::Generic => "b/c!~q^Z",
            Trichotomy::COverB => "c/b~q^N*",
            Trichotomy::BqOverC => "bq/c~q^N*",
        };
        match self {
            CaseTag::C1 => f.write_str("C1"),
            CaseTag::C2 => f.write_str("C2"),
            CaseTag::C3(k) => {
                let s = match k {
                    KleinClass::Minus => "-1",
                    KleinClass::HalfPlus => "q^1/2",
                    KleinClass::HalfMinus => "-q^1/2",
                    KleinClass::One => "1",
                };
                write!(f, "C3({s})")
            }
            CaseTag::C4(t) => write!(f, "C4({})", tri(t)),
            CaseTag::C5(t) => write!(f, "C5({})", tri(t)),
            CaseTag::Sym(s, base) => {
                let s = match s {
                    Symmetry::SwapAB => "b~q^Z",
                    Symmetry::PivotAC => "a/c~q^Z",
                    Symmetry::PivotBC => "b/c~q^Z",
                };
                write!(f, "SYM[{s}]->{base}")
            }
            CaseTag::L1 => f.write_str("L1"),
            CaseTag::L2 => f.write_str("L2"),
            CaseTag::L3 => f.write_str("L3"),
            CaseTag::LSym(base) => write!(f, "L_sym->{base}"),
            CaseTag::LCNotQ(base) => write!(f, "L_cnotq->{base}"),
            CaseTag::M1 => f.write_str("M1"),
            CaseTag::M2 => f.write_str("M2"),
        }
    }
}

impl CaseTag {
    pub fn is_symmetry_derived(&self) -> bool {
        matches!(
            self,
            CaseTag::Sym(..)
                | CaseTag::LSym(_)
                | CaseTag::LCNotQ(_)
                | CaseTag::C3(KleinClass::HalfPlus | KleinClass::HalfMinus)
        )
    }
}

/// Galois group with the generator witnesses it was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDescriptor {
    pub family: Family,
    pub witnesses: WitnessSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub tag: CaseTag,
    pub descriptor: GroupDescriptor,
    pub warnings: Vec<String>,
}

impl Classification {
    pub fn symmetry_derived(&self) -> bool {
        self.tag.is_symmetry_derived()
    }
}

/// Number of connection elements `P~(y0)^{-1} P~(z)` attached as witnesses.
pub const CONNECTION_WITNESSES: usize = 8;

struct Dispatch {
    tag: CaseTag,
    family: Family,
    warnings: Vec<String>,
}

fn closure(ctx: &QContext, gens: &[Unit], warnings: &mut Vec<String>) -> Result<ScalarGroup> {
    let c = scalar_zariski_closure(ctx, gens)?;
    warnings.extend(c.warning);
    Ok(c.group)
}

fn resonant(what: &str) -> Error {
    Error::UnsupportedResonant(what.to_string())
}

/// Tag and family, without witnesses.
fn dispatch(ctx: &QContext, p: &HGParams) -> Result<Dispatch> {
    let (a, b, c) = (p.a, p.b, p.c);
    let q = SNum::q(ctx);
    let mut warnings = Vec::new();

    if let Some(n) = membership(ctx, &c, MemberSet::QZ)?.witness {
        if n != 1 {
            return Err(resonant(&format!("c = q^{n} with exponent other than 1")));
        }
        return dispatch_c_equals_q(ctx, p);
    }

    if let Some(n) = membership(ctx, &(a / b), MemberSet::QZ)?.witness {
        if n != 0 {
            return Err(resonant(&format!("a/b = q^{n}")));
        }
        // a = b, c not in q^Z: the exponents at infinity become those at 0 of (a, aq/c, q)
        let base = HGParams::new(ctx, a, a * q / c, q)?;
        let inner = dispatch(ctx, &base)?;
        let scalar = closure(ctx, &[gamma1(ctx, &a)?, gamma2(ctx, &a)?], &mut warnings)?;
        warnings.extend(inner.warnings);
        return Ok(Dispatch {
            tag: CaseTag::LCNotQ(Box::new(inner.tag)),
            family: Family::Twisted {
                base: Box::new(inner.family),
                transport: Transport::Unspecified,
                scalar,
            },
            warnings,
        });
    }

    let c_scalars = |warnings: &mut Vec<String>| -> Result<ScalarGroup> {
        closure(ctx, &[gamma1(ctx, &c)?, gamma2(ctx, &c)?], warnings)
    };

    for (set, lower) in [(MemberSet::QNStar, true), (MemberSet::QNegN, false)] {
        if !is_in(ctx, &a, set)? {
            continue;
        }
        let branch = if is_in(ctx, &(c / b), MemberSet::QNStar)? {
            Trichotomy::COverB
        } else if is_in(ctx, &(b * q / c), MemberSet::QNStar)? {
            Trichotomy::BqOverC
        } else {
            Trichotomy::Generic
        };
        let family = match (lower, branch) {
            (true, Trichotomy::Generic) => Family::LowerTriangularFull,
            (true, Trichotomy::COverB) => Family::LowerTriangularScalars(c_scalars(&mut warnings)?),
            (true, Trichotomy::BqOverC) => Family::Diagonal1Scalars(c_scalars(&mut warnings)?),
            (false, Trichotomy::Generic) => Family::UpperTriangularFull,
            (false, Trichotomy::BqOverC) => {
                Family::UpperTriangularScalars(c_scalars(&mut warnings)?)
            }
            (false, Trichotomy::COverB) => Family::Diagonal1Scalars(c_scalars(&mut warnings)?),
        };
        let tag = if lower {
            CaseTag::C4(branch)
        } else {
            CaseTag::C5(branch)
        };
        return Ok(Dispatch {
            tag,
            family,
            warnings,
        });
    }

    if is_in(ctx, &b, MemberSet::QZ)? {
        let inner = dispatch(ctx, &p.swapped(ctx)?)?;
        return Ok(Dispatch {
            tag: CaseTag::Sym(Symmetry::SwapAB, Box::new(inner.tag)),
            family: inner.family,
            warnings: inner.warnings,
        });
    }

    for (ratio, sym) in [(a / c, Symmetry::PivotAC), (b / c, Symmetry::PivotBC)] {
        if is_in(ctx, &ratio, MemberSet::QZ)? {
            let inner = dispatch(ctx, &p.pivoted(ctx)?)?;
            let scalar = c_scalars(&mut warnings)?;
            warnings.extend(inner.warnings);
            return Ok(Dispatch {
                tag: CaseTag::Sym(sym, Box::new(inner.tag)),
                family: Family::Twisted {
                    base: Box::new(inner.family),
                    transport: Transport::Swap,
                    scalar,
                },
                warnings,
            });
        }
    }

    let tag = match (klein_class(ctx, &(b / a))?, klein_class(ctx, &c)?) {
        (Some(x), Some(y)) if x == y => CaseTag::C3(x),
        (Some(_), Some(_)) => CaseTag::C2,
        _ => CaseTag::C1,
    };
    let family = match tag {
        CaseTag::C3(_) => conjugator_family(ctx, p)?,
        _ => {
            if is_in(ctx, &(a * b * q / c), MemberSet::QZ)? {
                let minus_one = Unit::Turns(spiral::Rat::new(1, 2));
                let gens = [gamma1(ctx, &c)?.sqrt(), half_gamma2(ctx, &c)?, minus_one];
                Family::SL2TimesScalars(closure(ctx, &gens, &mut warnings)?)
            } else {
                Family::GL2
            }
        }
    };
    Ok(Dispatch {
        tag,
        family,
        warnings,
    })
}

fn dispatch_c_equals_q(ctx: &QContext, p: &HGParams) -> Result<Dispatch> {
    let (a, b) = (p.a, p.b);
    let plain = |tag, family| Dispatch {
        tag,
        family,
        warnings: Vec::new(),
    };
    if let Some(n) = membership(ctx, &(a / b), MemberSet::QZ)?.witness {
        if n != 0 {
            return Err(resonant(&format!("c = q and a/b = q^{n}")));
        }
        if is_in(ctx, &a, MemberSet::QZ)? {
            return Ok(plain(CaseTag::M2, Family::UnipotentUpper));
        }
        let family = if is_in(ctx, &(a * a), MemberSet::QZ)? {
            Family::SL2
        } else {
            Family::GL2
        };
        return Ok(plain(CaseTag::M1, family));
    }
    if is_in(ctx, &b, MemberSet::QNStar)? {
        return Ok(plain(CaseTag::L2, Family::AffineUpper));
    }
    if is_in(ctx, &b, MemberSet::QNegN)? {
        return Ok(plain(CaseTag::L3, Family::UpperTriangularFull));
    }
    if is_in(ctx, &a, MemberSet::QZ)? {
        let inner = dispatch_c_equals_q(ctx, &p.swapped(ctx)?)?;
        return Ok(Dispatch {
            tag: CaseTag::LSym(Box::new(inner.tag)),
            family: inner.family,
            warnings: inner.warnings,
        });
    }
    let family = if is_in(ctx, &(a * b), MemberSet::QZ)? {
        Family::SL2
    } else {
        Family::GL2
    };
    Ok(plain(CaseTag::L1, family))
}

/// `TorusWithSwap` with `R` read off the connection elements.
fn conjugator_family(ctx: &QContext, p: &HGParams) -> Result<Family> {
    let tm = twisted_p(ctx, p)?;
    let annulus = Annulus::fundamental(ctx);
    let set = density_generators(ctx, &tm, &annulus, CONNECTION_WITNESSES)?;
    let r = witness::diagonalising_conjugator(&set.connection())?;
    Ok(Family::TorusWithSwap { r })
}

/// Case tag and Galois group, with witnesses sampled in the fundamental annulus.
pub fn classify(ctx: &QContext, p: &HGParams) -> Result<Classification> {
    classify_in(ctx, p, &Annulus::fundamental(ctx))
}

pub fn classify_in(ctx: &QContext, p: &HGParams, annulus: &Annulus) -> Result<Classification> {
    let d = dispatch(ctx, p)?;
    let tm = twisted_p(ctx, p)?;
    let witnesses = density_generators(ctx, &tm, annulus, CONNECTION_WITNESSES)?;
    Ok(Classification {
        tag: d.tag,
        descriptor: GroupDescriptor {
            family: d.family,
            witnesses,
        },
        warnings: d.warnings,
    })
}

/// Tag and family only; no connection data is evaluated except for the
/// conjugator of the torus-with-swap case.
pub fn classify_family(ctx: &QContext, p: &HGParams) -> Result<(CaseTag, Family)> {
    let d = dispatch(ctx, p)?;
    Ok((d.tag, d.family))
}

/// Largest membership residual of the witnesses in the family, together with
/// the common-line defect used for families known only up to conjugation.
pub fn witness_residual(desc: &GroupDescriptor) -> f64 {
    let set = desc.witnesses.matrices();
    let mut worst = set
        .iter()
        .map(|g| desc.family.membership_residual(g))
        .fold(0.0, f64::max);
    if let Family::Twisted {
        base,
        transport: Transport::Unspecified,
        ..
    } = &desc.family
    {
        if base.is_reducible() {
            worst = worst.max(common_line_defect(&set));
        }
    }
    worst
}
