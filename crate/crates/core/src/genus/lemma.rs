//! Closed-form case lists for splitting in the genus field, as residue and
//! symbol conditions on the prime factors of `D`. These are checked against
//! the direct subfield computation in the parent module; at `p = 2` a case the
//! lists do not address returns `NotCovered`.

use super::{is_nonsplit, is_special, raw_ring_values, RamificationData};
use crate::error::{Error, Result};
use crate::ntcore::{self, Discriminant};

fn odd_primes(d: i64) -> Vec<u64> {
    ntcore::factor(d.unsigned_abs()).primes().filter(|&q| q != 2).collect()
}

fn not_covered(d: Discriminant, p: u64, what: &str) -> Error {
    Error::NotCovered(format!("D={} p={p}: {what}", d.value()))
}

fn legendre_is_one(a: i64, p: u64) -> bool {
    ntcore::kronecker(a, p) == Some(1)
}

/// Inert `p`: splits completely in `F+` iff every radicand is a square mod
/// `p` (odd `p`), or the odd prime factors of `D` all lie in `{1, 3}` or all
/// in `{1, 7}` mod 8 (`p = 2`).
pub fn inert_splits_completely(d: Discriminant, p: u64) -> Result<bool> {
    if !is_nonsplit(d, p) || d.abs() % p == 0 {
        return Err(Error::Hypothesis { d: d.value(), p, reason: "p must be inert in K" });
    }
    if p > 2 {
        return Ok(raw_ring_values(d.value()).iter().all(|r| legendre_is_one(r.value as i64, p)));
    }
    let residues: Vec<u64> = odd_primes(d.value()).iter().map(|q| q % 8).collect();
    Ok(residues.iter().all(|r| matches!(r, 1 | 3)) || residues.iter().all(|r| matches!(r, 1 | 7)))
}

/// `p | D_K`, `D` not special: is `p` unramified in `F+`?
fn unramified_in_fplus(d: Discriminant, p: u64) -> bool {
    let v = d.value();
    v % 16 != 0
        && odd_primes(v).iter().filter(|&&q| q != p).all(|q| q % 4 == 1)
        && p % 4 != 1
}

/// Ramification data for `p | D_K`, `p` prime to the conductor, `D` not in
/// `{-p, -2p, -4p}`, from the residue conditions alone.
pub fn ramified_data(d: Discriminant, p: u64) -> Result<RamificationData> {
    let v = d.value();
    if d.conductor() % p == 0 || d.fundamental() % p as i64 != 0 || is_special(d, p) {
        return Err(Error::Hypothesis {
            d: v,
            p,
            reason: "p must divide D_K, not the conductor, with D not in {-p, -2p, -4p}",
        });
    }
    let others: Vec<u64> = odd_primes(v).into_iter().filter(|&q| q != p).collect();
    if unramified_in_fplus(d, p) {
        let split = if p == 2 {
            if raw_ring_values(v)[0].value == 2 {
                return Err(not_covered(d, p, "radicand 2 present while 2 is unramified"));
            }
            others.iter().all(|q| q % 8 == 1)
        } else {
            let symbols = others.iter().all(|&q| legendre_is_one(q as i64, p));
            let applies = p % 8 == 7 || (p % 8 == 3 && (v.rem_euclid(4) == 1 || (v % 4 == 0 && (v / 4).rem_euclid(4) == 1)));
            applies && symbols
        };
        return Ok(RamificationData {
            e_fplus: 1,
            f_fplus: if split { 1 } else { 2 },
            f_f_over_fplus: 1,
        });
    }
    let inert_over = if p == 2 {
        others.iter().all(|q| matches!(q % 8, 1 | 3))
    } else {
        let tilde_ok = raw_ring_values(v).iter().all(|r| {
            let mut t = r.value;
            while t % p == 0 {
                t /= p;
            }
            legendre_is_one(t as i64, p)
        });
        let cofactor = d.fundamental() / p as i64;
        tilde_ok && ntcore::kronecker(cofactor, p) == Some(-1)
    };
    Ok(RamificationData {
        e_fplus: 2,
        f_fplus: 1,
        f_f_over_fplus: if inert_over { 2 } else { 1 },
    })
}
