//! Test-only reference arithmetic: complex numbers in binary fixed point over
//! `BigInt`, brute-force sums built on them, and Richardson extrapolation.
//! Nothing here calls into the library's numerics.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Float, Signed, ToPrimitive, Zero};

/// Fractional bits (about 48 decimal digits).
pub const BITS: u32 = 160;

#[derive(Clone, Debug)]
pub struct Fx {
    re: BigInt,
    im: BigInt,
}

fn real_from_f64(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let (mantissa, exp, sign) = x.integer_decode();
    let m = BigInt::from(mantissa) * sign;
    let shift = exp as i32 + BITS as i32;
    if shift >= 0 {
        m << shift as u32
    } else {
        m >> (-shift) as u32
    }
}

fn real_to_f64(x: &BigInt) -> f64 {
    // keep 64 significant bits before converting
    let bits = x.bits() as i64;
    let drop = (bits - 64).max(0);
    let head = (x >> drop as u32).to_f64().unwrap();
    head * 2f64.powi((drop - BITS as i64) as i32)
}

impl Fx {
    pub fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            re: BigInt::from(1) << BITS,
            im: BigInt::zero(),
        }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self {
            re: real_from_f64(z.re),
            im: real_from_f64(z.im),
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(real_to_f64(&self.re), real_to_f64(&self.im))
    }

    pub fn add(&self, o: &Fx) -> Fx {
        Fx {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Fx) -> Fx {
        Fx {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn neg(&self) -> Fx {
        Fx {
            re: -&self.re,
            im: -&self.im,
        }
    }

    pub fn mul(&self, o: &Fx) -> Fx {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Fx {
            re: re >> BITS,
            im: im >> BITS,
        }
    }

    pub fn div(&self, o: &Fx) -> Fx {
        let den = &o.re * &o.re + &o.im * &o.im;
        assert!(!den.is_zero(), "division by zero in oracle");
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        Fx {
            re: (re << BITS) / &den,
            im: (im << BITS) / den,
        }
    }

    pub fn one_minus(&self) -> Fx {
        Fx::one().sub(self)
    }

    /// Sup norm, as an `f64`.
    pub fn mag(&self) -> f64 {
        real_to_f64(&self.re.abs()).max(real_to_f64(&self.im.abs()))
    }
}

/// `phi(a,b;c;z)` summed in fixed point until the terms drop below `2^-(BITS-24)` of the sum.
pub fn phi21(q: &Fx, a: &Fx, b: &Fx, c: &Fx, z: &Fx) -> Complex64 {
    let mut sum = Fx::one();
    let mut term = Fx::one();
    let mut qn = Fx::one();
    let tiny = 2f64.powi(-(BITS as i32 - 24));
    for _ in 0..200_000 {
        let num = a.mul(&qn).one_minus().mul(&b.mul(&qn).one_minus());
        let den = qn.mul(q).one_minus().mul(&c.mul(&qn).one_minus());
        term = term.mul(&num).div(&den).mul(z);
        sum = sum.add(&term);
        qn = qn.mul(q);
        if term.mag() < tiny * sum.mag().max(1e-30) {
            return sum.to_c64();
        }
    }
    panic!("oracle series did not converge");
}

pub fn phi21_c64(
    q: Complex64,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
) -> Complex64 {
    phi21(
        &Fx::from_c64(q),
        &Fx::from_c64(a),
        &Fx::from_c64(b),
        &Fx::from_c64(c),
        &Fx::from_c64(z),
    )
}

/// Jacobi theta `sum_j (-1)^j q^{j(j-1)/2} z^j`, summed in fixed point.
pub fn theta(q: Complex64, z: Complex64) -> Complex64 {
    let (q, z) = (Fx::from_c64(q), Fx::from_c64(z));
    let tiny = 2f64.powi(-(BITS as i32 - 24));
    let mut sum = Fx::one();
    let mz = z.neg();
    let minv = Fx::one().div(&mz);
    for (step, mut qk) in [(mz, Fx::one()), (minv, q.clone())] {
        let mut t = Fx::one();
        let mut big = 1.0f64;
        for _ in 0..100_000 {
            t = t.mul(&qk).mul(&step);
            qk = qk.mul(&q);
            sum = sum.add(&t);
            big = big.max(t.mag());
            if t.mag() < tiny * big {
                break;
            }
        }
    }
    sum.to_c64()
}

/// Richardson-extrapolated central difference of `f` at `x` along the real
/// direction, from step `h` halved `levels` times.
pub fn richardson(f: impl Fn(f64) -> Complex64, h: f64, levels: usize) -> Complex64 {
    let mut table: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..levels {
        let hk = h / 2f64.powi(k as i32);
        let mut row = vec![(f(hk) - f(-hk)) / (2.0 * hk)];
        for j in 1..=k {
            let p = 4f64.powi(j as i32);
            let prev = &table[k - 1][j - 1];
            row.push((row[j - 1] * p - prev) / (p - 1.0));
        }
        table.push(row);
    }
    *table.last().unwrap().last().unwrap()
}

/// `(d/dc phi(a,b;c;z), d/dc phi(aq/c,bq/c;q^2/c;z))` at `c = q`, by Richardson
/// extrapolation over the fixed-point series.
pub fn dphi21_dc_at_q(
    q: Complex64,
    a: Complex64,
    b: Complex64,
    z: Complex64,
) -> (Complex64, Complex64) {
    let (qf, af, bf, zf) = (
        Fx::from_c64(q),
        Fx::from_c64(a),
        Fx::from_c64(b),
        Fx::from_c64(z),
    );
    let at = |h: f64| qf.add(&Fx::from_f64(h));
    let first = richardson(|h| phi21(&qf, &af, &bf, &at(h), &zf), 1e-3, 4);
    let second = richardson(
        |h| {
            let c = at(h);
            let a2 = af.mul(&qf).div(&c);
            let b2 = bf.mul(&qf).div(&c);
            let c2 = qf.mul(&qf).div(&c);
            phi21(&qf, &a2, &b2, &c2, &zf)
        },
        1e-3,
        4,
    );
    (first, second)
}

pub fn rel_err(x: Complex64, reference: Complex64) -> f64 {
    (x - reference).norm() / reference.norm().max(1e-300)
}
