//! Elementary number theory: Kronecker symbols, valuations, small-integer
//! factorization, modular square roots and discriminant bookkeeping.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Prime factorization of a positive integer, sorted by prime.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.0
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// Multiplies the factorization back out. Saturates on overflow.
    pub fn value(&self) -> u64 {
        self.0
            .iter()
            .fold(1u64, |acc, &(p, e)| acc.saturating_mul(p.saturating_pow(e)))
    }

    fn push(&mut self, p: u64) {
        match self.0.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => self.0.push((p, 1)),
        }
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo a prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn rem_euclid_u(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to and including `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

/// The Legendre-Kronecker symbol `(a/p)`.
///
/// For odd `p` this is the Legendre symbol. For `p = 2` it is `0` if `a` is
/// even, `1` if `a = 1 mod 8` and `-1` if `a = 5 mod 8`; the residues `3, 7 mod 8`
/// have no value under this convention and yield `None`.
pub fn kronecker(a: i64, p: u64) -> Option<i32> {
    if p == 2 {
        return match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => Some(0),
            1 => Some(1),
            5 => Some(-1),
            _ => None,
        };
    }
    let r = rem_euclid_u(a, p);
    if r == 0 {
        return Some(0);
    }
    Some(if pow_mod(r, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// `p`-adic valuation of a nonzero machine integer.
pub fn valuation(n: i64, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroValuation);
    }
    let mut m = n.unsigned_abs();
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    Ok(k)
}

/// `p`-adic valuation of a nonzero big integer, by repeated exact division.
pub fn valuation_big(n: &BigInt, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Ok(k);
        }
        m = q;
        k += 1;
    }
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Complete prime factorization of `n >= 1`.
///
/// Trial division up to `10^4`, then Miller-Rabin and Pollard rho for what
/// remains.
pub fn factor(n: u64) -> Factorization {
    let mut out = Factorization::default();
    let mut m = n;
    let mut d = 2u64;
    while d <= 10_000 && d * d <= m {
        while m % d == 0 {
            out.push(d);
            m /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x == 1 {
            continue;
        }
        if is_prime(x) {
            out.push(x);
        } else {
            let f = pollard_rho(x);
            stack.push(f);
            stack.push(x / f);
        }
    }
    out.0.sort_unstable();
    out
}

/// Largest `s` with `s^2 | n`, returned together with the squarefree part `n / s^2`.
pub fn square_part(n: i64) -> (u64, i64) {
    let sign = n.signum();
    let mut sq = 1u64;
    let mut core = 1i64;
    for &(p, e) in factor(n.unsigned_abs()).pairs() {
        sq *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p as i64;
        }
    }
    (sq, sign * core)
}

/// A square root of `a` modulo an odd prime `p`, or `None` when `a` is a
/// non-residue. Tonelli-Shanks.
pub fn sqrt_mod(a: i64, p: u64) -> Option<u64> {
    let a = rem_euclid_u(a, p);
    sqrt_mod_u(a, p)
}

pub(crate) fn sqrt_mod_u(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn least_non_residue(p: u64) -> u64 {
    (2..p)
        .find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue")
}

/// A negative discriminant `D = f^2 D_K`, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Discriminant {
    value: i64,
    fundamental: i64,
    conductor: u64,
}

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        let (fundamental, conductor) = fundamental_decomposition(value)?;
        Ok(Self {
            value,
            fundamental,
            conductor,
        })
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn abs(&self) -> u64 {
        self.value.unsigned_abs()
    }

    /// The fundamental discriminant `D_K`.
    pub fn fundamental(&self) -> i64 {
        self.fundamental
    }

    /// The conductor `f`.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_fundamental(&self) -> bool {
        self.conductor == 1
    }

    /// Discriminant of the order of conductor `f / p^{v_p(f)}`.
    pub fn prime_to(&self, p: u64) -> Self {
        let mut f = self.conductor;
        while f % p == 0 {
            f /= p;
        }
        Self {
            value: self.fundamental * (f * f) as i64,
            fundamental: self.fundamental,
            conductor: f,
        }
    }

    /// Scales the conductor by `m`.
    pub fn with_conductor_multiplied(&self, m: u64) -> Result<Self> {
        let value = (m as i64)
            .checked_mul(m as i64)
            .and_then(|s| s.checked_mul(self.value))
            .ok_or(Error::InvalidDiscriminant(self.value))?;
        Ok(Self {
            value,
            fundamental: self.fundamental,
            conductor: self.conductor * m,
        })
    }
}

impl std::fmt::Display for Discriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Splits `D` into its fundamental discriminant and conductor.
pub fn fundamental_decomposition(d: i64) -> Result<(i64, u64)> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let (s, core) = square_part(d);
    // core is negative squarefree
    if core.rem_euclid(4) == 1 {
        Ok((core, s))
    } else {
        // D = s^2 core with core = 2,3 mod 4 forces s even
        debug_assert!(s % 2 == 0);
        Ok((4 * core, s / 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_at_two_follows_mod_eight_convention() {
        assert_eq!(kronecker(17, 2), Some(1));
        assert_eq!(kronecker(4, 2), Some(0));
        assert_eq!(kronecker(-3, 2), Some(-1));
        assert_eq!(kronecker(3, 2), None);
        assert_eq!(kronecker(7, 2), None);
    }

    #[test]
    fn kronecker_minus_four_mod_seven() {
        // squares mod 7 are {0,1,2,4}; -4 = 3 is not among them
        let squares: Vec<u64> = (0..7).map(|x| x * x % 7).collect();
        assert!(!squares.contains(&3));
        assert_eq!(kronecker(-4, 7), Some(-1));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(8, 2).unwrap(), 3);
        assert_eq!(valuation(45, 3).unwrap(), 2);
        assert_eq!(valuation(7, 5).unwrap(), 0);
        assert!(valuation(0, 3).is_err());
        let big = BigInt::from(5) * BigInt::from(85995u64).pow(2);
        assert_eq!(valuation_big(&big, 7).unwrap(), 4);
        assert!(valuation_big(&BigInt::zero(), 7).is_err());
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(60).pairs(), &[(2, 2), (3, 1), (5, 1)]);
        assert!(factor(1).pairs().is_empty());
        assert_eq!(factor(85995).pairs(), &[(3, 3), (5, 1), (7, 2), (13, 1)]);
        let big = 1_000_000_007u64 * 998_244_353;
        assert_eq!(factor(big).pairs(), &[(998_244_353, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn sqrt_mod_examples() {
        let r = sqrt_mod(2, 7).unwrap();
        assert!(r == 3 || r == 4);
        assert_eq!(sqrt_mod(0, 7), Some(0));
        assert_eq!(sqrt_mod(3, 7), None);
        // p = 1 mod 8 exercises the full descent
        let r = sqrt_mod(10, 41).unwrap();
        assert_eq!(r * r % 41, 10);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(fundamental_decomposition(-15).unwrap(), (-15, 1));
        assert_eq!(fundamental_decomposition(-48).unwrap(), (-3, 4));
        assert_eq!(fundamental_decomposition(-64).unwrap(), (-4, 4));
        assert_eq!(fundamental_decomposition(-8).unwrap(), (-8, 1));
        assert_eq!(fundamental_decomposition(-72).unwrap(), (-8, 3));
        assert!(fundamental_decomposition(-2).is_err());
        assert!(fundamental_decomposition(5).is_err());
        assert!(fundamental_decomposition(0).is_err());
    }

    #[test]
    fn decomposition_is_exhaustively_sound() {
        for d in -1_000_000i64..=-3 {
            let Ok((dk, f)) = fundamental_decomposition(d) else {
                assert!(matches!(d.rem_euclid(4), 2 | 3));
                continue;
            };
            assert_eq!(dk * (f * f) as i64, d);
            let (s, core) = square_part(dk);
            match dk.rem_euclid(4) {
                1 => assert_eq!(s, 1),
                0 => {
                    assert_eq!(s, 2);
                    assert!(matches!(core.rem_euclid(4), 2 | 3));
                }
                _ => panic!("{d}"),
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn kronecker_is_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000, idx in 1usize..25) {
                let p = primes_up_to(100)[idx];
                prop_assert_eq!(
                    kronecker(a * b, p).unwrap(),
                    kronecker(a, p).unwrap() * kronecker(b, p).unwrap()
                );
            }

            #[test]
            fn residue_iff_root(a in -10_000i64..10_000, idx in 1usize..168) {
                let p = primes_up_to(1000)[idx];
                prop_assume!(a.rem_euclid(p as i64) != 0);
                let root = sqrt_mod(a, p);
                prop_assert_eq!(kronecker(a, p) == Some(1), root.is_some());
                if let Some(r) = root {
                    prop_assert_eq!(mul_mod(r, r, p), rem_euclid_u(a, p));
                }
            }

            #[test]
            fn factor_round_trips(n in 1u64..=1_000_000_000) {
                let f = factor(n);
                prop_assert_eq!(f.value(), n);
                prop_assert!(f.pairs().windows(2).all(|w| w[0].0 < w[1].0));
                prop_assert!(f.pairs().iter().all(|&(p, e)| e >= 1 && is_prime(p)));
            }
        }
    }
}
