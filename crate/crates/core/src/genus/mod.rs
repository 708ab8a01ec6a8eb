//! Genus field data: the radicands of the real genus field `F+` and the
//! splitting of rational primes in `F+` and `F = F+(sqrt D_K)`.
//!
//! Splitting is computed directly from the quadratic subfields. A multiquadratic
//! field with character group `X` (the squarefree radicands it contains, 1
//! included) has `e = |X| / |X_unram|`, `f = |X_unram| / |X_split|` and
//! `g = |X_split|` at `p`.

pub mod lemma;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ntcore::{self, Discriminant};

/// One entry of the raw generator list: `prime = 0` for the 2-adic value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RingValue {
    pub prime: u64,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusData {
    pub d: i64,
    /// Independent squarefree radicands of `F+`, a subset of the raw values.
    pub generators: Vec<u64>,
    pub mu: u32,
    pub raw: Vec<RingValue>,
}

impl GenusData {
    pub fn fplus_degree(&self) -> u64 {
        1 << self.generators.len()
    }
}

/// Squarefree part of a positive integer.
fn squarefree(n: u64) -> u64 {
    ntcore::square_part(n as i64).1 as u64
}

/// Radicand of a single odd prime factor `q` of `D`.
fn ring_value(d: i64, q: u64) -> u64 {
    if q % 4 == 1 {
        return q;
    }
    let m4 = |x: i64| x.rem_euclid(4);
    let by4 = (d % 4 == 0).then(|| d / 4);
    let by8 = (d % 8 == 0).then(|| d / 8);
    if m4(d) == 1 || by4.is_some_and(|x| m4(x) == 1) || by8.is_some_and(|x| m4(x) == 1) {
        (-d) as u64 / q
    } else if by8.is_some_and(|x| m4(x) == 3) {
        2 * q
    } else {
        q
    }
}

/// The raw radicand list for `D`: the 2-adic value first, then one value per
/// odd prime factor in increasing order.
pub fn raw_ring_values(d: i64) -> Vec<RingValue> {
    let p0 = if d % 8 == 0 && matches!((d / 8).rem_euclid(4), 0 | 1) { 2 } else { 1 };
    let mut out = vec![RingValue { prime: 0, value: p0 }];
    for q in ntcore::factor(d.unsigned_abs()).primes().filter(|&q| q != 2) {
        out.push(RingValue { prime: q, value: ring_value(d, q) });
    }
    out
}

/// Exponent vector of a squarefree number over a fixed prime list, as a bitmask.
fn mask(n: u64, primes: &[u64]) -> u64 {
    primes
        .iter()
        .enumerate()
        .filter(|(_, &q)| n % q == 0)
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Greedy F_2 basis of the squarefree classes of `values`, keeping the first
/// independent representative of each new direction.
fn f2_basis(values: &[u64]) -> Vec<u64> {
    let mut primes: Vec<u64> = values
        .iter()
        .flat_map(|&v| ntcore::factor(v).primes().collect::<Vec<_>>())
        .collect();
    primes.sort_unstable();
    primes.dedup();
    let mut echelon: Vec<u64> = Vec::new();
    let mut basis = Vec::new();
    for &v in values {
        let mut m = mask(v, &primes);
        for &e in &echelon {
            m = m.min(m ^ e);
        }
        if m != 0 {
            echelon.push(m);
            echelon.sort_unstable_by(|a, b| b.cmp(a));
            basis.push(v);
        }
    }
    basis
}

/// Genus data from the radicand display. The generator list is reduced to an
/// independent set, so its length is `mu - 1`.
pub fn genus_generators(d: Discriminant) -> GenusData {
    let raw = raw_ring_values(d.value());
    let sq: Vec<u64> = raw.iter().map(|r| squarefree(r.value)).filter(|&v| v != 1).collect();
    let generators = f2_basis(&sq);
    GenusData {
        d: d.value(),
        mu: generators.len() as u32 + 1,
        generators,
        raw,
    }
}

/// Decomposition data of `p` in a Galois extension of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Splitting {
    pub e: u32,
    pub f: u32,
    pub g: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum QuadraticBehaviour {
    Split,
    Inert,
    Ramified,
}

/// Behaviour of `p` in `Q(sqrt r)`, `r` squarefree and not 1.
fn quadratic_behaviour(r: i64, p: u64) -> QuadraticBehaviour {
    use QuadraticBehaviour::*;
    if p == 2 {
        return match r.rem_euclid(8) {
            1 => Split,
            5 => Inert,
            _ => Ramified,
        };
    }
    match ntcore::kronecker(r, p) {
        Some(0) => Ramified,
        Some(1) => Split,
        _ => Inert,
    }
}

/// Splitting of `p` in `Q(sqrt r : r in radicands)`.
pub fn multiquadratic_splitting(radicands: &[i64], p: u64) -> Splitting {
    let basis: Vec<i64> = radicands.iter().map(|&r| ntcore::square_part(r).1).filter(|&r| r != 1).collect();
    // squarefree product of every subset
    let mut group: Vec<i64> = vec![1];
    for &r in &basis {
        let next: Vec<i64> = group.iter().map(|&g| ntcore::square_part(g * r).1).collect();
        if next.iter().any(|x| group.contains(x)) {
            continue;
        }
        group.extend(next);
    }
    let total = group.len() as u32;
    let (mut unram, mut split) = (1u32, 1u32);
    for &r in group.iter().skip(1) {
        match quadratic_behaviour(r, p) {
            QuadraticBehaviour::Split => {
                unram += 1;
                split += 1;
            }
            QuadraticBehaviour::Inert => unram += 1,
            QuadraticBehaviour::Ramified => {}
        }
    }
    Splitting {
        e: total / unram,
        f: unram / split,
        g: split,
    }
}

fn signed(gens: &[u64]) -> Vec<i64> {
    gens.iter().map(|&g| g as i64).collect()
}

/// Splitting of `p` in `F+`.
pub fn fplus_splitting(d: Discriminant, p: u64) -> Splitting {
    multiquadratic_splitting(&signed(&genus_generators(d).generators), p)
}

/// Splitting of `p` in `F = F+(sqrt D_K)`.
pub fn genus_field_splitting(d: Discriminant, p: u64) -> Splitting {
    let mut r = signed(&genus_generators(d).generators);
    r.push(d.fundamental());
    multiquadratic_splitting(&r, p)
}

/// `p` inert or ramified in `K`.
pub fn is_nonsplit(d: Discriminant, p: u64) -> bool {
    ntcore::kronecker(d.fundamental(), p) != Some(1)
}

/// `D` in `{-p, -2p, -4p}`.
pub fn is_special(d: Discriminant, p: u64) -> bool {
    let v = d.value();
    let p = p as i64;
    v == -p || v == -2 * p || v == -4 * p
}

fn check_prime(d: Discriminant, p: u64) -> Result<()> {
    if !ntcore::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if d.conductor() % p == 0 {
        return Err(Error::PrimeDividesConductor { d: d.value(), p });
    }
    if !is_nonsplit(d, p) {
        return Err(Error::PrimeSplits { d: d.value(), p });
    }
    Ok(())
}

/// Whether a non-split `p` prime to the conductor splits completely in `F+`.
pub fn splits_completely_in_fplus(d: Discriminant, p: u64) -> Result<bool> {
    check_prime(d, p)?;
    let s = fplus_splitting(d, p);
    Ok(s.e == 1 && s.f == 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationData {
    pub e_fplus: u32,
    pub f_fplus: u32,
    pub f_f_over_fplus: u32,
}

/// Ramification of a prime `p | D_K` in `F+` and `F / F+`, for `p` prime to
/// the conductor and `D` not in `{-p, -2p, -4p}`.
pub fn ramification_data(d: Discriminant, p: u64) -> Result<RamificationData> {
    check_prime(d, p)?;
    if d.fundamental() % p as i64 != 0 {
        return Err(Error::Hypothesis {
            d: d.value(),
            p,
            reason: "p must divide the fundamental discriminant",
        });
    }
    if is_special(d, p) {
        return Err(Error::Hypothesis {
            d: d.value(),
            p,
            reason: "D is one of -p, -2p, -4p",
        });
    }
    let plus = fplus_splitting(d, p);
    let full = genus_field_splitting(d, p);
    Ok(RamificationData {
        e_fplus: plus.e,
        f_fplus: plus.f,
        f_f_over_fplus: full.f / plus.f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn raw(d: i64) -> Vec<(u64, u64)> {
        raw_ring_values(d).into_iter().map(|r| (r.prime, r.value)).collect()
    }

    #[test]
    fn generator_examples() {
        assert_eq!(raw(-15), vec![(0, 1), (3, 5), (5, 5)]);
        let g = genus_generators(disc(-15));
        assert_eq!((g.generators.clone(), g.mu), (vec![5], 2));
        assert_eq!(raw(-64), vec![(0, 2)]);
        assert_eq!(genus_generators(disc(-64)).generators, vec![2]);
        let g = genus_generators(disc(-23));
        assert!(g.generators.is_empty());
        assert_eq!(g.mu, 1);
        assert_eq!(raw(-84), vec![(0, 1), (3, 3), (7, 7)]);
        assert_eq!(raw(-60), vec![(0, 1), (3, 20), (5, 5)]);
    }

    #[test]
    fn dependent_raw_values_are_reduced() {
        // 77, 33, 21 multiply to a square
        assert_eq!(raw(-231), vec![(0, 1), (3, 77), (7, 33), (11, 21)]);
        let g = genus_generators(disc(-231));
        assert_eq!(g.generators, vec![77, 33]);
        assert_eq!(g.mu, quadforms::group_structure(disc(-231)).mu);
    }

    #[test]
    fn mu_agrees_with_two_rank() {
        for d in (-3000i64..=-3).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            let d = disc(d);
            let g = genus_generators(d);
            let s = quadforms::group_structure(d);
            assert_eq!(g.mu, s.mu, "D={d}");
            assert_eq!(1u64 << (g.mu - 1), quadforms::ambiguous_classes(d), "D={d}");
        }
    }

    #[test]
    fn mu_one_exactly_on_the_listed_family() {
        let listed = |d: i64| {
            if matches!(d, -4 | -8 | -16) {
                return true;
            }
            let m = if d % 4 == 0 { -d / 4 } else { -d };
            let f = ntcore::factor(m as u64);
            f.pairs().len() == 1 && f.pairs()[0].0 % 4 == 3 && f.pairs()[0].1 % 2 == 1
        };
        for d in (-3000i64..=-3).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            assert_eq!(genus_generators(disc(d)).mu == 1, listed(d), "D={d}");
        }
    }

    #[test]
    fn splitting_examples() {
        assert!(splits_completely_in_fplus(disc(-15), 11).unwrap());
        assert!(!splits_completely_in_fplus(disc(-15), 7).unwrap());
        assert!(splits_completely_in_fplus(disc(-23), 5).unwrap());
        assert!(splits_completely_in_fplus(disc(-64), 71).unwrap());
        assert!(matches!(splits_completely_in_fplus(disc(-23), 2), Err(Error::PrimeSplits { .. })));
        assert!(matches!(splits_completely_in_fplus(disc(-36), 3), Err(Error::PrimeDividesConductor { .. })));
    }

    #[test]
    fn ramification_examples() {
        // -20 = -4 * 5 is excluded, though 5 does ramify in F+ = Q(sqrt 5)
        assert!(matches!(ramification_data(disc(-20), 5), Err(Error::Hypothesis { .. })));
        assert_eq!(fplus_splitting(disc(-20), 5).e, 2);
        let r = ramification_data(disc(-60), 5).unwrap();
        assert_eq!(r.e_fplus, 2);
        let r = ramification_data(disc(-84), 7).unwrap();
        assert_eq!(r.e_fplus, 2);
        let r = ramification_data(disc(-84), 3).unwrap();
        assert_eq!(r.e_fplus, 2);
        // D = -40: F+ = Q(sqrt 5), 2 is unramified and inert there
        let r = ramification_data(disc(-40), 2).unwrap();
        assert_eq!((r.e_fplus, r.f_fplus), (1, 2));
    }

    #[test]
    fn splitting_against_the_symbols_for_odd_inert_primes() {
        for d in (-1500i64..=-3).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            let d = disc(d);
            let g = genus_generators(d);
            for p in ntcore::primes_up_to(80).into_iter().filter(|&p| p > 2) {
                if d.abs() % p == 0 || ntcore::kronecker(d.fundamental(), p) != Some(-1) {
                    continue;
                }
                let by_symbols = g.raw.iter().all(|r| ntcore::kronecker(r.value as i64, p) == Some(1));
                assert_eq!(splits_completely_in_fplus(d, p).unwrap(), by_symbols, "D={d} p={p}");
            }
        }
    }

    #[test]
    fn splitting_is_consistent() {
        for d in (-800i64..=-3).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            let d = disc(d);
            let g = genus_generators(d);
            for p in ntcore::primes_up_to(40) {
                let s = fplus_splitting(d, p);
                assert_eq!((s.e * s.f * s.g) as u64, g.fplus_degree());
                let t = genus_field_splitting(d, p);
                assert_eq!((t.e * t.f * t.g) as u64, 2 * g.fplus_degree());
                if d.conductor() % p != 0 {
                    assert!(t.e <= 2, "D={d} p={p}");
                }
                assert!(s.f <= t.f && t.f <= 2);
            }
        }
    }
}
