//! Hilbert class polynomials from CM values of the modular `j`-function.
//!
//! `j` is evaluated at the CM point of every reduced form through the eta
//! quotient `f(tau) = Delta(2 tau) / Delta(tau) = q prod (1 + q^n)^24`, using
//! `j = (256 f + 1)^3 / f`. The products `prod (1 - q^n)` come from Euler's
//! pentagonal number series. Expansion of `prod (x - j)` happens in fixed point
//! with conjugate forms paired so every factor is real, and the result is
//! rounded only once two consecutive precisions agree.

pub mod cache;
pub mod fixed;
mod intpoly;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

pub use cache::{format_record, parse_record, CachedPoly, ClassPolyStore};
pub use fixed::Fixed;
pub use intpoly::{discriminant, resultant, IntPoly};

use crate::error::{Error, Result};
use crate::ntcore::{self, Discriminant};
use crate::quadforms::{self, QuadForm};

/// Working precision for one evaluation attempt, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionBudget {
    pub bits: u64,
    pub attempt: u32,
}

impl PrecisionBudget {
    pub const MIN_BITS: u64 = 64;

    pub fn new(bits: u64) -> Self {
        Self {
            bits: bits.max(Self::MIN_BITS),
            attempt: 0,
        }
    }

    pub fn doubled(self) -> Self {
        Self {
            bits: self.bits * 2,
            attempt: self.attempt + 1,
        }
    }
}

pub const MAX_RETRIES: u32 = 6;

/// Bits needed for the coefficients of `H_D` plus guard bits.
pub fn precision_bound(d: Discriminant) -> u64 {
    let forms = quadforms::reduced_forms(d);
    let inv_a: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    let lead = std::f64::consts::PI * (d.abs() as f64).sqrt() / std::f64::consts::LN_2 * inv_a;
    lead.ceil() as u64 + 32 + forms.len() as u64
}

/// log2 of `|1/q|` at the CM point of `form`, rounded up.
fn cusp_bits(form: &QuadForm, d: Discriminant) -> u64 {
    (std::f64::consts::PI * (d.abs() as f64).sqrt() / (form.a as f64) / std::f64::consts::LN_2)
        .ceil() as u64
        + 2
}

/// Internal fixed-point precision for `j` at a given budget.
fn working_bits(form: &QuadForm, d: Discriminant, budget: PrecisionBudget) -> u64 {
    budget.bits + 2 * cusp_bits(form, d) + 64
}

/// `prod_{n >= 1} (1 - q^n)` via the pentagonal number theorem.
fn euler_product(q: &Fixed, prec: u64) -> Result<Fixed> {
    let mut sum = Fixed::one(prec);
    let mut qk = q.clone(); // q^k
    let mut pent = q.clone(); // q^(k(3k-1)/2)
    let mut last = BigInt::zero();
    for k in 1u64.. {
        let pent_plus = pent.mul(&qk, prec); // q^(k(3k+1)/2)
        let term = pent.add(&pent_plus);
        if k % 2 == 1 {
            sum = sum.sub(&term);
        } else {
            sum = sum.add(&term);
        }
        let size = term.re.abs() + term.im.abs();
        if size.is_zero() {
            return Ok(sum);
        }
        if k > 2 && size > last && size.bits() > 16 {
            return Err(Error::NonConvergence(prec));
        }
        if k > 100_000 {
            return Err(Error::NonConvergence(prec));
        }
        last = size;
        let qk_next = qk.mul(q, prec);
        pent = pent_plus.mul(&qk, prec).mul(&qk_next, prec);
        qk = qk_next;
    }
    unreachable!()
}

/// `j` at the CM point of a reduced form, as a fixed-point complex number with
/// `budget.bits` fractional bits.
pub fn j_at(form: &QuadForm, d: Discriminant, budget: PrecisionBudget) -> Result<Fixed> {
    if budget.bits < PrecisionBudget::MIN_BITS {
        return Err(Error::NonConvergence(budget.bits));
    }
    let prec = working_bits(form, d, budget);
    let pi = fixed::pi(prec);
    // 2 pi i tau = -pi sqrt|D| / a - i pi b / a
    let sqrt_d = fixed::sqrt(&fixed::from_int(d.abs() as i64, prec), prec);
    let re = fixed::mul(&pi, &sqrt_d, prec) / form.a;
    let im = &pi * form.b / form.a;
    let log_q_inv = Fixed::new(re, im);
    let q_inv = log_q_inv.exp(prec);
    let q = q_inv.recip(prec);
    let q2 = q.square(prec);

    let eta1 = euler_product(&q, prec)?;
    let eta2 = euler_product(&q2, prec)?;
    // 1/f = q^-1 (prod(1-q^n) / prod(1-q^2n))^24
    let ratio = eta1.div(&eta2, prec);
    let ratio24 = ratio.pow(24, prec);
    let inv_f = q_inv.mul(&ratio24, prec);
    let f = q.mul(&ratio24.recip(prec), prec);
    let f2 = f.square(prec);
    // j = 1/f + 768 + 196608 f + 16777216 f^2
    let j = inv_f
        .add(&Fixed::real(fixed::from_int(768, prec)))
        .add(&f.scale(196_608))
        .add(&f2.scale(16_777_216));
    let drop = prec - budget.bits;
    Ok(Fixed::new(j.re >> drop, j.im >> drop))
}

fn poly_mul_real(acc: &[BigInt], factor: &[BigInt], prec: u64) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); acc.len() + factor.len() - 1];
    for (i, a) in acc.iter().enumerate() {
        for (j, b) in factor.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out.into_iter().map(|c| c >> prec).collect()
}

/// Expands `prod (x - j(form))` at the given budget and rounds. `None` when
/// some coefficient is not within 1/4 of an integer.
fn expand_and_round(d: Discriminant, forms: &[QuadForm], budget: PrecisionBudget) -> Result<Option<Vec<BigInt>>> {
    // every j is computed to `bits` fractional bits; the expansion gets the
    // coefficient-size headroom on top
    let prec = budget.bits;
    let one = fixed::one(prec);
    let mut acc = vec![one.clone()];
    for form in forms.iter().filter(|f| f.b >= 0) {
        let j = j_at(form, d, budget)?;
        let factor = if form.is_ambiguous() {
            vec![-j.re, one.clone()]
        } else {
            // (x - j)(x - conj j) = x^2 - 2 Re(j) x + |j|^2
            vec![j.norm(prec), -(&j.re << 1u32), one.clone()]
        };
        acc = poly_mul_real(&acc, &factor, prec);
    }
    debug_assert_eq!(acc.len(), forms.len() + 1);
    let half = fixed::one(prec) >> 1u32;
    let quarter = fixed::one(prec) >> 2u32;
    let mut out = Vec::with_capacity(acc.len());
    for c in acc {
        let n: BigInt = (&c + &half) >> prec;
        let err = &c - (&n << prec);
        if err.abs() >= quarter {
            return Ok(None);
        }
        out.push(n);
    }
    Ok(Some(out))
}

/// `H_D(x)`, monic of degree `h(D)`, with integer coefficients.
pub fn hilbert_class_polynomial(d: Discriminant) -> Result<IntPoly> {
    hilbert_class_polynomial_with(d, PrecisionBudget::new(precision_bound(d)))
}

/// As [`hilbert_class_polynomial`], starting from an explicit budget.
pub fn hilbert_class_polynomial_with(d: Discriminant, start: PrecisionBudget) -> Result<IntPoly> {
    let forms = quadforms::reduced_forms(d);
    // the coefficient size has to fit under the fractional precision
    let mut budget = PrecisionBudget::new(start.bits);
    let mut previous: Option<Vec<BigInt>> = None;
    loop {
        let current = expand_and_round(d, &forms, budget)?;
        if let (Some(a), Some(b)) = (&previous, &current) {
            if a == b {
                return Ok(IntPoly::new(b.clone()));
            }
        }
        if budget.attempt >= MAX_RETRIES {
            return Err(Error::RoundingUnstable(d.value(), budget.attempt));
        }
        previous = current;
        budget = budget.doubled();
    }
}

/// Exact discriminant of an integer polynomial.
pub fn poly_discriminant(h: &IntPoly) -> BigInt {
    discriminant(h)
}

/// `v_p(disc H_D) / 2` for `p` not dividing `D`.
pub fn ip_from_discriminant(d: Discriminant, p: u64, disc: &BigInt) -> Result<u32> {
    if !ntcore::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if d.abs() % p == 0 {
        return Err(Error::Hypothesis {
            d: d.value(),
            p,
            reason: "i_p is only available for p not dividing D",
        });
    }
    if disc.is_zero() {
        return Err(Error::OddValuation { d: d.value(), p, v: u32::MAX });
    }
    let v = ntcore::valuation_big(disc, p)?;
    if v % 2 == 1 {
        return Err(Error::OddValuation { d: d.value(), p, v });
    }
    Ok(v / 2)
}

/// `i_p = v_p(n_D)` for `p` not dividing `D`.
pub fn ip(d: Discriminant, p: u64) -> Result<u32> {
    let h = hilbert_class_polynomial(d)?;
    ip_from_discriminant(d, p, &poly_discriminant(&h))
}

/// `|H(j)|` for each form's CM value, as `log2` of the fixed-point residual
/// (`None` for an exact zero). Used to check evaluation consistency.
pub fn evaluation_residuals(h: &IntPoly, d: Discriminant, budget: PrecisionBudget) -> Result<Vec<Option<i64>>> {
    let prec = budget.bits;
    let forms = quadforms::reduced_forms(d);
    let mut out = Vec::new();
    for form in &forms {
        let j = j_at(form, d, budget)?;
        let mut acc = Fixed::real(BigInt::zero());
        for c in h.coeffs().iter().rev() {
            acc = acc.mul(&j, prec).add(&Fixed::real(c << prec));
        }
        let n = acc.re.abs() + acc.im.abs();
        out.push(if n.is_zero() { None } else { Some(n.bits() as i64 - prec as i64) });
    }
    Ok(out)
}
