//! Binary fixed-point real and complex arithmetic on top of `BigInt`.
//!
//! A value `x` is stored as the integer `round(x * 2^prec)`. Only what the
//! j-function evaluation needs is here: products, quotients, `pi`, square
//! roots and the complex exponential.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    pub re: BigInt,
    pub im: BigInt,
}

#[inline]
pub fn one(prec: u64) -> BigInt {
    BigInt::one() << prec
}

#[inline]
pub fn from_int(n: i64, prec: u64) -> BigInt {
    BigInt::from(n) << prec
}

#[inline]
pub fn mul(a: &BigInt, b: &BigInt, prec: u64) -> BigInt {
    (a * b) >> prec
}

#[inline]
pub fn div(a: &BigInt, b: &BigInt, prec: u64) -> BigInt {
    (a << prec) / b
}

pub fn sqrt(a: &BigInt, prec: u64) -> BigInt {
    (a << prec).sqrt()
}

/// `atan(1/k)` by its alternating series.
fn atan_inv(k: u64, prec: u64) -> BigInt {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut power = one(prec) / &k;
    let mut sum = power.clone();
    let mut n = 1u64;
    loop {
        power /= &k2;
        if power.is_zero() {
            return sum;
        }
        let term = &power / BigInt::from(2 * n + 1);
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
}

/// `pi` via Machin's formula.
pub fn pi(prec: u64) -> BigInt {
    let guard = 16;
    let p = prec + guard;
    let v = (atan_inv(5, p) << 4u32) - (atan_inv(239, p) << 2u32);
    v >> guard
}

impl Fixed {
    pub fn new(re: BigInt, im: BigInt) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigInt) -> Self {
        Self {
            re,
            im: BigInt::zero(),
        }
    }

    pub fn one(prec: u64) -> Self {
        Self::real(one(prec))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn mul(&self, other: &Self, prec: u64) -> Self {
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        Self::new(re >> prec, im >> prec)
    }

    pub fn square(&self, prec: u64) -> Self {
        let re = &self.re * &self.re - &self.im * &self.im;
        let im = (&self.re * &self.im) << 1u32;
        Self::new(re >> prec, im >> prec)
    }

    /// `|z|^2`
    pub fn norm(&self, prec: u64) -> BigInt {
        (&self.re * &self.re + &self.im * &self.im) >> prec
    }

    pub fn recip(&self, prec: u64) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        let scale = one(2 * prec);
        Self::new(&self.re * &scale / &n, -(&self.im * &scale) / &n)
    }

    pub fn div(&self, other: &Self, prec: u64) -> Self {
        self.mul(&other.recip(prec), prec)
    }

    pub fn pow(&self, mut e: u32, prec: u64) -> Self {
        let mut acc = Self::one(prec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.square(prec);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `exp(z)` by argument halving, Taylor series and repeated squaring.
    pub fn exp(&self, prec: u64) -> Self {
        let magnitude = self.re.abs().max(self.im.abs());
        let int_bits = magnitude.bits().saturating_sub(prec);
        let halvings = int_bits + 12;
        let work = prec + halvings + 32;
        let shift_up = work - prec;
        let z = Self::new(
            (&self.re << shift_up) >> halvings,
            (&self.im << shift_up) >> halvings,
        );
        let mut sum = Self::one(work);
        let mut term = Self::one(work);
        let mut n = 1i64;
        loop {
            term = term.mul(&z, work);
            term = Self::new(&term.re / n, &term.im / n);
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
            n += 1;
        }
        for _ in 0..halvings {
            sum = sum.square(work);
        }
        Self::new(sum.re >> shift_up, sum.im >> shift_up)
    }

    pub fn to_f64(&self, prec: u64) -> (f64, f64) {
        (to_f64(&self.re, prec), to_f64(&self.im, prec))
    }
}

pub fn to_f64(x: &BigInt, prec: u64) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let shift = prec.min(1000);
        let v: f64 = (x >> (prec - shift)).to_string().parse().unwrap_or(f64::NAN);
        v / 2f64.powi(shift as i32)
    } else {
        let drop = bits - 64;
        let top: f64 = (x >> drop).to_string().parse().unwrap_or(f64::NAN);
        top * 2f64.powi(drop as i32 - prec as i32)
    }
}
