//! Primitive positive definite binary quadratic forms and the form class group.
//!
//! Reduced forms stand in for the ideal classes of the order of discriminant `D`.
//! Group structure is computed by brute force over all classes, which is
//! adequate for class numbers in the low hundreds.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ntcore::{self, Discriminant};

/// A binary quadratic form `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The principal form of discriminant `d`.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        Self::new(1, b, (b * b - d) / 4)
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    pub fn is_principal(&self) -> bool {
        self.a == 1
    }

    /// Reduced forms of order dividing two.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.b == self.a || self.a == self.c
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c).reduce()
    }

    /// The reduced form properly equivalent to `self`.
    pub fn reduce(self) -> Self {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            // normalize b into (-a, a]
            if !(-a < b && b <= a) {
                let two_a = 2 * a;
                let r = (a - b).div_euclid(two_a);
                c += r * (a * r + b);
                b += two_a * r;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Self::new(a as i64, b as i64, c as i64)
    }

    /// Gauss composition followed by reduction.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let d = self.discriminant();
        if d != other.discriminant() {
            return Err(Error::DiscriminantMismatch(d, other.discriminant()));
        }
        Ok(compose_unchecked(self, other))
    }

    pub fn square(&self) -> Self {
        compose_unchecked(self, self)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::principal(self.discriminant());
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = compose_unchecked(&acc, &base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// Least `k >= 1` with `self^k` principal.
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut cur = self.reduce();
        while !cur.is_principal() {
            cur = compose_unchecked(&cur, self);
            k += 1;
        }
        k
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_s, -old_t, -old_r)
    } else {
        (old_s, old_t, old_r)
    }
}

// Shanks' composition of primitive forms.
fn compose_unchecked(f1: &QuadForm, f2: &QuadForm) -> QuadForm {
    let (mut f1, mut f2) = (f1, f2);
    if f1.a > f2.a {
        std::mem::swap(&mut f1, &mut f2);
    }
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let disc = f1.discriminant() as i128;
    let s = (b1 + b2) / 2;
    let n = b2 - s;

    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let (u, _v, d) = ext_gcd(a2, a1);
        (u, d)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let (u, v, d1) = ext_gcd(s, d);
        (u, -v, d1)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - disc) / (4 * a3);
    QuadForm::new(a3 as i64, b3 as i64, c3 as i64).reduce()
}

/// All primitive reduced forms of discriminant `D`, sorted.
pub fn reduced_forms(d: Discriminant) -> Vec<QuadForm> {
    let dv = d.value();
    let a_max = ((d.abs() / 3) as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in -a + 1..=a {
            if (b - dv).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - dv;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

pub fn class_number(d: Discriminant) -> u64 {
    reduced_forms(d).len() as u64
}

/// Class number from `h_K`, the conductor and the unit index.
pub fn class_number_formula(d: Discriminant) -> u64 {
    let dk = d.fundamental();
    let hk = class_number(Discriminant::new(dk).expect("fundamental discriminant is valid"));
    let f = d.conductor();
    if f == 1 {
        return hk;
    }
    let mut numer = hk;
    for &(p, e) in ntcore::factor(f).pairs() {
        let chi = ntcore::kronecker(dk, p).expect("D_K is 0 or 1 mod 4, so defined at 2");
        numer *= p.pow(e - 1) * (p as i64 - chi as i64) as u64;
    }
    let units = match dk {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    numer / units
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassGroupStructure {
    pub order: u64,
    /// Invariant factors `d_1 | d_2 | ... | d_k`, all greater than one.
    pub divisors: Vec<u64>,
    pub generators: Vec<QuadForm>,
    pub two_rank: u32,
    pub mu: u32,
}

/// The class group of discriminant `D` as a product of cyclic groups.
pub fn group_structure(d: Discriminant) -> ClassGroupStructure {
    let forms = reduced_forms(d);
    let h = forms.len() as u64;
    let ambiguous = forms.iter().filter(|f| f.square().is_principal()).count() as u64;
    let two_rank = ambiguous.trailing_zeros();
    debug_assert_eq!(1 << two_rank, ambiguous);

    let orders: HashMap<QuadForm, u64> = forms.iter().map(|f| (*f, order_dividing(f, h))).collect();

    // q-primary pieces: exponents of the cyclic factors, and a basis for each
    let mut primary: Vec<(u64, Vec<(u32, QuadForm)>)> = Vec::new();
    for &(q, _) in ntcore::factor(h).pairs() {
        let basis = primary_basis(&forms, &orders, q);
        primary.push((q, basis));
    }

    // combine the i-th largest cyclic factor of every primary part
    let rank = primary.iter().map(|(_, b)| b.len()).max().unwrap_or(0);
    let principal = QuadForm::principal(d.value());
    let mut divisors = Vec::with_capacity(rank);
    let mut generators = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut dv = 1u64;
        let mut g = principal;
        for (q, basis) in &primary {
            if let Some(&(e, gen)) = basis.get(i) {
                dv *= q.pow(e);
                g = compose_unchecked(&g, &gen);
            }
        }
        divisors.push(dv);
        generators.push(g);
    }
    divisors.reverse();
    generators.reverse();

    ClassGroupStructure {
        order: h,
        divisors,
        generators,
        two_rank,
        mu: two_rank + 1,
    }
}

fn order_dividing(f: &QuadForm, h: u64) -> u64 {
    let mut ord = h;
    for &(q, _) in ntcore::factor(h).pairs() {
        while ord % q == 0 && f.pow(ord / q).is_principal() {
            ord /= q;
        }
    }
    ord
}

fn subgroup(gens: &[QuadForm], principal: QuadForm) -> HashSet<QuadForm> {
    let mut seen: HashSet<QuadForm> = HashSet::from([principal]);
    let mut frontier = vec![principal];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose_unchecked(&x, g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Basis of the `q`-Sylow subgroup as `(exponent, generator)`, exponents
/// descending.
fn primary_basis(forms: &[QuadForm], orders: &HashMap<QuadForm, u64>, q: u64) -> Vec<(u32, QuadForm)> {
    let sylow: Vec<QuadForm> = forms
        .iter()
        .filter(|f| is_power_of(orders[f], q))
        .copied()
        .collect();
    // |G[q^k]| determines the invariants
    let mut exps: BTreeMap<u32, usize> = BTreeMap::new();
    for f in &sylow {
        *exps.entry(ilog(orders[f], q)).or_default() += 1;
    }
    let max_e = exps.keys().copied().max().unwrap_or(0);
    let mut torsion = vec![0usize; max_e as usize + 1];
    for k in 0..=max_e {
        torsion[k as usize] = exps.range(..=k).map(|(_, c)| c).sum();
    }
    let mut invariants = Vec::new();
    for k in 1..=max_e as usize {
        let ratio = torsion[k] / torsion[k - 1];
        let count_ge_k = ilog(ratio as u64, q);
        invariants.push(count_ge_k);
    }
    // invariants[k-1] = #{i : e_i >= k}
    let mut exponents = Vec::new();
    for k in (1..=max_e).rev() {
        let ge_k = invariants[k as usize - 1];
        let ge_k1 = if k == max_e { 0 } else { invariants[k as usize] };
        for _ in 0..(ge_k - ge_k1) {
            exponents.push(k);
        }
    }

    let principal = QuadForm::principal(forms[0].discriminant());
    let mut chosen = Vec::new();
    assert!(
        extend_basis(&sylow, orders, q, &exponents, &mut chosen, principal),
        "q-Sylow subgroup has a basis"
    );
    exponents.into_iter().zip(chosen).collect()
}

fn extend_basis(
    sylow: &[QuadForm],
    orders: &HashMap<QuadForm, u64>,
    q: u64,
    exponents: &[u32],
    chosen: &mut Vec<QuadForm>,
    principal: QuadForm,
) -> bool {
    let i = chosen.len();
    if i == exponents.len() {
        return true;
    }
    let target = q.pow(exponents[i]);
    let h = subgroup(chosen, principal);
    for g in sylow.iter().filter(|g| orders[*g] == target) {
        // <g> meets H trivially iff g^(target/q) is outside H
        if h.contains(&g.pow(target / q)) {
            continue;
        }
        chosen.push(*g);
        if extend_basis(sylow, orders, q, exponents, chosen, principal) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn is_power_of(mut n: u64, q: u64) -> bool {
    while n % q == 0 {
        n /= q;
    }
    n == 1
}

fn ilog(mut n: u64, q: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= q;
        k += 1;
    }
    k
}

/// Number of reduced forms whose square is principal.
pub fn ambiguous_classes(d: Discriminant) -> u64 {
    reduced_forms(d)
        .iter()
        .filter(|f| f.square().is_principal())
        .count() as u64
}

/// The reduced form of a prime ideal above `p`, or `None` when `p` is inert.
pub fn prime_form(d: Discriminant, p: u64) -> Result<Option<QuadForm>> {
    if !ntcore::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if d.conductor() % p == 0 {
        return Err(Error::PrimeDividesConductor { d: d.value(), p });
    }
    let dv = d.value();
    let b = if p == 2 {
        match (0..4).find(|b| (b * b - dv).rem_euclid(8) == 0) {
            Some(b) => b,
            None => return Ok(None),
        }
    } else {
        let Some(r) = ntcore::sqrt_mod(dv, p) else {
            return Ok(None);
        };
        let r = r as i64;
        if (r - dv).rem_euclid(2) == 0 {
            r
        } else {
            p as i64 - r
        }
    };
    let p = p as i64;
    Ok(Some(QuadForm::new(p, b, (b * b - dv) / (4 * p)).reduce()))
}

/// Order of a form in the class group.
pub fn order_of(f: &QuadForm) -> u64 {
    f.order()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    /// Enumerates every (a, b) in the reduction box without the reduction
    /// shortcuts used above.
    fn brute_reduced(d: i64) -> Vec<QuadForm> {
        let mut out = Vec::new();
        for a in 1..=d.abs() {
            for b in -a..=a {
                if (b * b - d) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - d) / (4 * a);
                let f = QuadForm::new(a, b, c);
                if c >= a && f.is_primitive() && f.is_reduced() {
                    out.push(f);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn reduced_form_sets() {
        assert_eq!(reduced_forms(disc(-4)), vec![QuadForm::new(1, 0, 1)]);
        assert_eq!(reduced_forms(disc(-3)), vec![QuadForm::new(1, 1, 1)]);
        assert_eq!(
            reduced_forms(disc(-23)),
            vec![QuadForm::new(1, 1, 6), QuadForm::new(2, -1, 3), QuadForm::new(2, 1, 3)]
        );
        for d in (-400..=-3).filter(|d: &i64| matches!(d.rem_euclid(4), 0 | 1)) {
            assert_eq!(reduced_forms(disc(d)), brute_reduced(d), "D = {d}");
        }
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(disc(-4)), 1);
        assert_eq!(class_number(disc(-23)), 3);
        assert_eq!(class_number(disc(-48)), 2);
        assert_eq!(class_number_formula(disc(-48)), 2);
        assert_eq!(class_number_formula(disc(-15)), 2);
        assert_eq!(class_number_formula(disc(-16)), 1);
        assert_eq!(class_number(disc(-163)), 1);
        assert_eq!(class_number(disc(-4 * 5 * 5 * 5)), 10);
    }

    #[test]
    fn composition_fixtures() {
        let e = QuadForm::new(1, 1, 6);
        let f = QuadForm::new(2, 1, 3);
        let g = QuadForm::new(2, -1, 3);
        assert_eq!(e.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&g).unwrap(), e);
        assert_eq!(f.compose(&f).unwrap(), g);
        assert!(f.compose(&QuadForm::new(1, 0, 1)).is_err());
    }

    /// Dirichlet composition of united forms: find an equivalent copy of `g`
    /// whose leading coefficient is coprime to `f.a`, then solve for the
    /// common middle coefficient by search.
    fn dirichlet(f: &QuadForm, g: &QuadForm) -> QuadForm {
        let d = f.discriminant();
        let mut g2 = *g;
        'search: for x in -6i64..=6 {
            for y in -6i64..=6 {
                if x.gcd(&y) != 1 {
                    continue;
                }
                let a = g.a * x * x + g.b * x * y + g.c * y * y;
                if a > 0 && a.gcd(&f.a) == 1 {
                    // complete (x, y) to an SL2 matrix [[x, u], [y, v]]
                    let (s, t, _) = ext_gcd(x as i128, y as i128);
                    let (u, v) = (-t as i64, s as i64);
                    assert_eq!(x * v - y * u, 1);
                    let b = 2 * g.a * x * u + g.b * (x * v + y * u) + 2 * g.c * y * v;
                    g2 = QuadForm::new(a, b, (b * b - d) / (4 * a));
                    break 'search;
                }
            }
        }
        let m = f.a * g2.a;
        let bb = (0..2 * m)
            .find(|&b| {
                (b - f.b).rem_euclid(2 * f.a) == 0
                    && (b - g2.b).rem_euclid(2 * g2.a) == 0
                    && (b * b - d).rem_euclid(4 * m) == 0
            })
            .expect("united forms compose");
        QuadForm::new(m, bb, (bb * bb - d) / (4 * m)).reduce()
    }

    #[test]
    fn composition_matches_dirichlet() {
        for d in (-600..=-3).filter(|d: &i64| matches!(d.rem_euclid(4), 0 | 1)) {
            let forms = reduced_forms(disc(d));
            for f in &forms {
                for g in &forms {
                    assert_eq!(f.compose(g).unwrap(), dirichlet(f, g), "D={d} {f:?} {g:?}");
                }
            }
        }
    }

    #[test]
    fn composition_is_an_abelian_group_law() {
        for d in (-500..=-3).filter(|d: &i64| matches!(d.rem_euclid(4), 0 | 1)) {
            let forms = reduced_forms(disc(d));
            let e = QuadForm::principal(d);
            for f in &forms {
                assert_eq!(f.compose(&e).unwrap(), *f);
                assert!(f.compose(&f.inverse()).unwrap().is_principal());
                for g in &forms {
                    let fg = f.compose(g).unwrap();
                    assert_eq!(fg, g.compose(f).unwrap());
                    assert!(forms.contains(&fg));
                    for k in &forms {
                        assert_eq!(fg.compose(k).unwrap(), f.compose(&g.compose(k).unwrap()).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn structure_examples() {
        let s = group_structure(disc(-23));
        assert_eq!((s.order, s.divisors.clone(), s.two_rank, s.mu), (3, vec![3], 0, 1));
        let s = group_structure(disc(-15));
        assert_eq!((s.order, s.divisors.clone(), s.two_rank, s.mu), (2, vec![2], 1, 2));
        let s = group_structure(disc(-64));
        assert_eq!((s.order, s.divisors.clone(), s.two_rank, s.mu), (2, vec![2], 1, 2));
        // Cl(-84) = (Z/2)^2, Cl(-260) = Z/2 x Z/4
        assert_eq!(group_structure(disc(-84)).divisors, vec![2, 2]);
        assert_eq!(group_structure(disc(-260)).divisors, vec![2, 4]);
        assert!(group_structure(disc(-4)).divisors.is_empty());
    }

    #[test]
    fn structure_generators_span_with_the_stated_orders() {
        for d in (-3000..=-3).step_by(7).filter(|d: &i64| matches!(d.rem_euclid(4), 0 | 1)) {
            let s = group_structure(disc(d));
            assert_eq!(s.divisors.iter().product::<u64>(), s.order);
            assert!(s.divisors.windows(2).all(|w| w[1] % w[0] == 0), "D={d} {:?}", s.divisors);
            assert_eq!(s.two_rank as usize, s.divisors.iter().filter(|x| *x % 2 == 0).count());
            for (g, &n) in s.generators.iter().zip(&s.divisors) {
                assert_eq!(g.order(), n);
            }
            assert_eq!(subgroup(&s.generators, QuadForm::principal(d)).len() as u64, s.order);
        }
    }

    #[test]
    fn prime_forms() {
        assert_eq!(prime_form(disc(-23), 2).unwrap(), Some(QuadForm::new(2, 1, 3)));
        assert_eq!(prime_form(disc(-23), 5).unwrap(), None);
        let f = prime_form(disc(-4), 2).unwrap().unwrap();
        assert_eq!(f, QuadForm::new(1, 0, 1));
        assert!(f.square().is_principal());
        assert!(prime_form(disc(-48), 2).is_err());
        assert!(prime_form(disc(-23), 9).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(order_of(&QuadForm::principal(-71)), 1);
        assert_eq!(order_of(&QuadForm::new(2, 1, 3)), 3);
        for d in (-2000..=-3).filter(|d: &i64| matches!(d.rem_euclid(4), 0 | 1)) {
            let forms = reduced_forms(disc(d));
            let h = forms.len() as u64;
            for f in &forms {
                assert_eq!(h % f.order(), 0);
            }
        }
    }
}
