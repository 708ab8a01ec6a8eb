//! Dense polynomials over `F_p` with complete factorization, plus roots in a
//! fixed model of `F_{p^2}`.

mod fp2;
mod signature;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use fp2::{Fp2, Fp2Element};
pub use signature::FactorSignature;

use crate::hcp::IntPoly;
use crate::ntcore::{factor as factor_int, inv_mod, mul_mod};

/// Default seed for equal-degree splitting.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    /// Coefficients in ascending degree; reduced mod `p` and trimmed.
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        trim(&mut coeffs);
        Self { p, coeffs }
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| crate::ntcore::rem_euclid_u(c, p)).collect())
    }

    pub fn zero(p: u64) -> Self {
        Self { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::new(p, vec![c])
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.p);
        self.scale(inv)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, k, self.p)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let p = self.p;
        Self::new(p, (0..n).map(|i| (self.coeff(i) + other.coeff(i)) % p).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let p = self.p;
        Self::new(p, (0..n).map(|i| (self.coeff(i) + p - other.coeff(i)) % p).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(self.p, acc.into_iter().map(|c| c as u64).collect())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let n = divisor.degree();
        if self.coeffs.len() <= n {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(divisor.leading(), p);
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; r.len() - n];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + n], inv, p);
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                r[k + i] = (r[k + i] + p - mul_mod(c, d, p)) % p;
            }
        }
        r.truncate(n);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Exact quotient; debug-asserts the remainder vanishes.
    pub fn div_exact(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero());
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    fn pow_p_mod(&self, m: &Self) -> Self {
        self.pow_mod(&BigUint::from(self.p), m)
    }

    /// `g` with `g^p = self`; requires every exponent to be a multiple of `p`.
    fn pth_root(&self) -> Self {
        let p = self.p;
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p as usize)
            .copied()
            .collect();
        debug_assert!(self.coeffs.iter().enumerate().all(|(i, &c)| i as u64 % p == 0 || c == 0));
        // a^p = a in F_p, so the coefficients carry over unchanged
        Self::new(p, coeffs)
    }

    fn random_below(p: u64, degree: usize, rng: &mut ChaCha8Rng) -> Self {
        Self::new(p, (0..degree).map(|_| rng.gen_range(0..p)).collect())
    }
}

fn trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Coefficient-wise reduction of an integer polynomial.
pub fn reduce_mod(h: &IntPoly, p: u64) -> FpPoly {
    let m = BigInt::from(p);
    let coeffs = h
        .coeffs()
        .iter()
        .map(|c| {
            let r = ((c % &m) + &m) % &m;
            r.to_u64().expect("residue fits in u64")
        })
        .collect();
    FpPoly::new(p, coeffs)
}

/// Squarefree decomposition: pairs `(g, m)` with `f = lc * prod g^m`, each `g`
/// monic squarefree and pairwise coprime.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let f = f.monic();
    let p = f.p;
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c);
    let mut i = 1u32;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if fac.degree() > 0 {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if c.degree() > 0 {
        let root = c.pth_root();
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p as u32));
        }
    }
    out.sort_by(|a, b| (a.1, &a.0.coeffs).cmp(&(b.1, &b.0.coeffs)));
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial: pairs
/// `(g, d)` with `g` the product of all irreducible factors of degree `d`.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.monic();
    let x = FpPoly::x(p);
    let mut h = x.rem(&rest);
    let mut d = 1;
    while rest.degree() >= 2 * d {
        h = h.pow_p_mod(&rest);
        let g = rest.gcd(&h.sub(&x));
        if g.degree() > 0 {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.degree() > 0 {
        let deg = rest.degree();
        out.push((rest, deg));
    }
    out
}

/// Splits a monic squarefree `f` whose irreducible factors all have degree `d`.
pub fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.degree();
    if n == d {
        return vec![f.monic()];
    }
    let p = f.p;
    let exponent = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = FpPoly::random_below(p, n, rng);
        if a.degree() == 0 {
            continue;
        }
        let b = if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1)) lands in F_2
            let mut t = a.rem(f);
            let mut s = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                s = s.add(&t);
            }
            s
        } else {
            a.pow_mod(&exponent, f).sub(&FpPoly::one(p))
        };
        let g = f.gcd(&b);
        if g.degree() > 0 && g.degree() < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.div_exact(&g), d, rng));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities, sorted
/// by (degree, multiplicity, coefficients).
pub fn factor(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    factor_seeded(f, DEFAULT_SEED)
}

pub fn factor_seeded(f: &FpPoly, seed: u64) -> Vec<(FpPoly, u32)> {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, m) in squarefree_decomposition(f) {
        for (part, d) in distinct_degree(&g) {
            for irr in equal_degree(&part, d, &mut rng) {
                out.push((irr, m));
            }
        }
    }
    out.sort_by(|a, b| (a.0.degree(), a.1, &a.0.coeffs).cmp(&(b.0.degree(), b.1, &b.0.coeffs)));
    out
}

/// Multiplies a factorization back together (monic part only).
pub fn expand(factors: &[(FpPoly, u32)], p: u64) -> FpPoly {
    factors
        .iter()
        .fold(FpPoly::one(p), |acc, (g, m)| acc.mul(&g.pow(*m as u64)))
}

/// Rabin's test: `x^(p^n) = x mod f` and `gcd(x^(p^(n/q)) - x, f) = 1` for
/// every prime `q | n`.
pub fn is_irreducible(f: &FpPoly) -> bool {
    let n = f.degree();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let p = f.p;
    let f = f.monic();
    let x = FpPoly::x(p);
    let frob = |k: usize| {
        let mut h = x.rem(&f);
        for _ in 0..k {
            h = h.pow_p_mod(&f);
        }
        h
    };
    if !frob(n).sub(&x).rem(&f).is_zero() {
        return false;
    }
    factor_int(n as u64)
        .primes()
        .all(|q| f.gcd(&frob(n / q as usize).sub(&x)).is_one())
}

/// Roots of `f` in the fixed `F_{p^2}` model, with multiplicities. Roots of an
/// irreducible quadratic factor come as a conjugate pair.
pub fn roots_in_fp2(f: &FpPoly) -> Vec<(Fp2Element, u32)> {
    let field = Fp2::new(f.p);
    let mut out = Vec::new();
    for (g, m) in factor(f) {
        match g.degree() {
            1 => {
                let r = (f.p - g.coeff(0)) % f.p;
                out.push((Fp2Element::from_base(r), m));
            }
            2 => {
                let (a, b) = field.quadratic_roots(g.coeff(1), g.coeff(0));
                out.push((a, m));
                out.push((b, m));
            }
            _ => {}
        }
    }
    out.sort();
    out
}

/// Dedekind's criterion: whether `p` divides the index of `Z[x]/(f)` in the
/// maximal order of the field it generates. `f` must be monic and irreducible
/// over `Q`.
pub fn index_divisible_by(f: &IntPoly, p: u64) -> bool {
    let fbar = reduce_mod(f, p);
    let factors = factor(&fbar);
    if factors.iter().all(|&(_, m)| m == 1) {
        return false;
    }
    let radical = factors.iter().fold(FpPoly::one(p), |acc, (g, _)| acc.mul(g));
    let cofactor = fbar.div_exact(&radical);
    let lift = |g: &FpPoly| -> Vec<BigInt> { g.coeffs().iter().map(|&c| BigInt::from(c)).collect() };
    let (a, b) = (lift(&radical), lift(&cofactor));
    let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    let m = BigInt::from(p);
    let t: Vec<u64> = prod
        .iter()
        .zip(f.coeffs())
        .map(|(x, y)| {
            let diff = x - y;
            debug_assert!((&diff % &m).is_zero());
            let q = diff / &m;
            ((q % &m + &m) % &m).to_u64().expect("residue fits in u64")
        })
        .collect();
    let tbar = FpPoly::new(p, t);
    factors
        .iter()
        .any(|(g, mult)| *mult >= 2 && tbar.rem(g).is_zero())
}

/// Signature of a factorization.
pub fn signature(factors: &[(FpPoly, u32)]) -> FactorSignature {
    FactorSignature::from_pairs(factors.iter().map(|(g, m)| (g.degree() as u32, *m)))
}
