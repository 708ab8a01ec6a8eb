use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ntcore::{inv_mod, kronecker, least_non_residue, mul_mod, sqrt_mod_u};

/// `u + v t` in `F_p[t]/(t^2 - r)` for odd `p`, or `F_2[t]/(t^2 + t + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fp2Element {
    pub u: u64,
    pub v: u64,
}

impl Fp2Element {
    pub fn new(u: u64, v: u64) -> Self {
        Self { u, v }
    }

    pub fn from_base(u: u64) -> Self {
        Self { u, v: 0 }
    }

    pub fn is_base(&self) -> bool {
        self.v == 0
    }
}

impl fmt::Display for Fp2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.u, self.v) {
            (u, 0) => write!(f, "{u}"),
            (0, 1) => write!(f, "t"),
            (0, v) => write!(f, "{v}t"),
            (u, 1) => write!(f, "{u}+t"),
            (u, v) => write!(f, "{u}+{v}t"),
        }
    }
}

/// The field `F_{p^2}` with `t^2 = r`, `r` the least non-residue mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp2 {
    pub p: u64,
    /// Unused for `p = 2`.
    pub r: u64,
}

impl Fp2 {
    pub fn new(p: u64) -> Self {
        let r = if p == 2 { 1 } else { least_non_residue(p) };
        Self { p, r }
    }

    pub fn zero(&self) -> Fp2Element {
        Fp2Element::from_base(0)
    }

    pub fn one(&self) -> Fp2Element {
        Fp2Element::from_base(1 % self.p)
    }

    pub fn element(&self, u: i64, v: i64) -> Fp2Element {
        let m = self.p as i64;
        Fp2Element::new(u.rem_euclid(m) as u64, v.rem_euclid(m) as u64)
    }

    pub fn add(&self, a: Fp2Element, b: Fp2Element) -> Fp2Element {
        Fp2Element::new((a.u + b.u) % self.p, (a.v + b.v) % self.p)
    }

    pub fn sub(&self, a: Fp2Element, b: Fp2Element) -> Fp2Element {
        Fp2Element::new((a.u + self.p - b.u) % self.p, (a.v + self.p - b.v) % self.p)
    }

    pub fn neg(&self, a: Fp2Element) -> Fp2Element {
        self.sub(self.zero(), a)
    }

    pub fn mul(&self, a: Fp2Element, b: Fp2Element) -> Fp2Element {
        let p = self.p;
        let uu = mul_mod(a.u, b.u, p);
        let vv = mul_mod(a.v, b.v, p);
        let cross = (mul_mod(a.u, b.v, p) + mul_mod(a.v, b.u, p)) % p;
        if p == 2 {
            Fp2Element::new((uu + vv) % 2, (cross + vv) % 2)
        } else {
            Fp2Element::new((uu + mul_mod(self.r, vv, p)) % p, cross)
        }
    }

    pub fn scale(&self, k: u64, a: Fp2Element) -> Fp2Element {
        self.mul(Fp2Element::from_base(k % self.p), a)
    }

    /// Image under the Frobenius `z -> z^p`.
    pub fn conjugate(&self, a: Fp2Element) -> Fp2Element {
        if self.p == 2 {
            Fp2Element::new((a.u + a.v) % 2, a.v)
        } else {
            Fp2Element::new(a.u, (self.p - a.v) % self.p)
        }
    }

    /// `z * conj(z)`, an element of `F_p`.
    pub fn norm(&self, a: Fp2Element) -> u64 {
        self.mul(a, self.conjugate(a)).u
    }

    pub fn inv(&self, a: Fp2Element) -> Option<Fp2Element> {
        let n = self.norm(a);
        if n == 0 {
            return None;
        }
        Some(self.scale(inv_mod(n, self.p), self.conjugate(a)))
    }

    pub fn pow(&self, a: Fp2Element, mut e: u64) -> Fp2Element {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Quadratic character on `F_{p^2}^*` (odd `p`): the Legendre symbol of
    /// the norm. Returns 0 at zero.
    pub fn quadratic_character(&self, a: Fp2Element) -> i32 {
        debug_assert!(self.p != 2);
        if a.u == 0 && a.v == 0 {
            return 0;
        }
        kronecker(self.norm(a) as i64, self.p).unwrap_or(0)
    }

    /// Both roots of the irreducible `x^2 + b x + c` over `F_p`, ascending.
    pub fn quadratic_roots(&self, b: u64, c: u64) -> (Fp2Element, Fp2Element) {
        let p = self.p;
        if p == 2 {
            // x^2 + x + 1 is the only irreducible quadratic over F_2
            debug_assert!(b == 1 && c == 1);
            return (Fp2Element::new(0, 1), Fp2Element::new(1, 1));
        }
        let disc = (mul_mod(b, b, p) + p - mul_mod(4, c, p)) % p;
        let w = mul_mod(disc, inv_mod(self.r, p), p);
        let s = sqrt_mod_u(w, p).expect("disc / r is a square for an irreducible quadratic");
        let half = inv_mod(2, p);
        let re = mul_mod((p - b) % p, half, p);
        let im = mul_mod(s, half, p);
        let a = Fp2Element::new(re, im);
        let b = Fp2Element::new(re, (p - im) % p);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// All `p^2` elements, `u` major.
    pub fn elements(&self) -> impl Iterator<Item = Fp2Element> + '_ {
        (0..self.p).flat_map(move |u| (0..self.p).map(move |v| Fp2Element::new(u, v)))
    }

    pub fn is_in_base_field(&self, a: Fp2Element) -> bool {
        a.v == 0
    }

    /// `a^(p^2 - 1) = 1` for nonzero `a`; used by tests as a sanity check.
    pub fn order_divides_group(&self, a: Fp2Element) -> bool {
        let q = self.p * self.p;
        self.pow(a, q - 1) == self.one() || a == self.zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small_primes() {
        for p in [2u64, 3, 5, 7, 11] {
            let k = Fp2::new(p);
            let elems: Vec<_> = k.elements().collect();
            assert_eq!(elems.len() as u64, p * p);
            for &a in &elems {
                assert!(k.order_divides_group(a));
                if a != k.zero() {
                    let inv = k.inv(a).unwrap();
                    assert_eq!(k.mul(a, inv), k.one());
                }
                // Frobenius is z -> z^p
                assert_eq!(k.conjugate(a), k.pow(a, p));
                assert!(k.norm(a) < p);
            }
        }
    }

    #[test]
    fn nonresidue_model() {
        assert_eq!(Fp2::new(3).r, 2);
        assert_eq!(Fp2::new(7).r, 3);
        let k = Fp2::new(7);
        let t = Fp2Element::new(0, 1);
        assert_eq!(k.mul(t, t), Fp2Element::from_base(3));
        let k = Fp2::new(2);
        let t = Fp2Element::new(0, 1);
        assert_eq!(k.add(k.mul(t, t), k.add(t, k.one())), k.zero());
    }

    #[test]
    fn character_counts_squares() {
        for p in [3u64, 5, 7, 13] {
            let k = Fp2::new(p);
            let squares: std::collections::HashSet<_> = k.elements().map(|a| k.mul(a, a)).collect();
            for a in k.elements().filter(|&a| a != k.zero()) {
                assert_eq!(k.quadratic_character(a) == 1, squares.contains(&a), "p={p} a={a}");
            }
        }
    }
}
