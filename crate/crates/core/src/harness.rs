//! Prediction against computation: single pairs, sweeps over ranges of `D`
//! and `p`, supersingularity of the roots, and the OSIDH key-space count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fppoly::{factor, reduce_mod, roots_in_fp2, signature, FactorSignature, Fp2, Fp2Element};
use crate::genus;
use crate::hcp::ClassPolyStore;
use crate::ntcore::{self, Discriminant};
use crate::predictor::{self, structure_matches, CaseLabel, RootStructure, RootTag};
use crate::quadforms;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Match,
    AdmissibleMatch,
    Mismatch,
    NoPrediction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Predicted {
    Signature(FactorSignature),
    Admissible(Vec<RootStructure>),
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootReport {
    pub root: Fp2Element,
    pub multiplicity: u32,
    pub tag: RootTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    #[serde(rename = "D")]
    pub d: i64,
    pub p: u64,
    pub h: u64,
    pub label: CaseLabel,
    pub predicted: Predicted,
    pub observed: FactorSignature,
    pub roots: Vec<RootReport>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_p: Option<u32>,
    pub p_divides_nd: bool,
}

impl VerifyReport {
    /// Multiple roots as `(multiplicity, tag, in F_p)`.
    pub fn multiple_roots(&self) -> Vec<(u32, RootTag, bool)> {
        self.roots
            .iter()
            .filter(|r| r.multiplicity >= 2)
            .map(|r| (r.multiplicity, r.tag, r.root.is_base()))
            .collect()
    }
}

/// Computes `H_D` through `store`, factors it mod `p` and compares with the
/// prediction for the pair's label.
pub fn verify_pair(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<VerifyReport> {
    let prediction = predictor::predict(store, d, p)?;
    let entry = store.get(d)?;
    let reduced = reduce_mod(&entry.poly, p);
    let observed = signature(&factor(&reduced));
    let roots: Vec<RootReport> = roots_in_fp2(&reduced)
        .into_iter()
        .map(|(root, multiplicity)| RootReport { root, multiplicity, tag: RootTag::of(root, p) })
        .collect();
    let mut report = VerifyReport {
        d: d.value(),
        p,
        h: entry.poly.degree() as u64,
        label: prediction.label,
        predicted: Predicted::None,
        observed,
        roots,
        verdict: Verdict::NoPrediction,
        i_p: prediction.parameters.i_p,
        p_divides_nd: prediction.p_divides_nd,
    };
    if let Some(sig) = prediction.signature {
        report.verdict = if sig == report.observed { Verdict::Match } else { Verdict::Mismatch };
        report.predicted = Predicted::Signature(sig);
    } else if !prediction.admissible_structures.is_empty() {
        let multiple = report.multiple_roots();
        let ok = prediction.admissible_structures.iter().any(|s| structure_matches(s, &multiple));
        report.verdict = if ok { Verdict::AdmissibleMatch } else { Verdict::Mismatch };
        report.predicted = Predicted::Admissible(prediction.admissible_structures);
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub total: u64,
    pub matched: u64,
    pub admissible: u64,
    pub mismatched: u64,
    pub no_prediction: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub d_min: i64,
    pub d_max: i64,
    pub p_max: u64,
    /// Sorted by `(D, p)`, `D` descending from -3.
    pub reports: Vec<VerifyReport>,
    pub counts: BTreeMap<CaseLabel, LabelCounts>,
    pub mismatches: u64,
    pub skipped: u64,
}

impl SweepReport {
    pub fn mismatched(&self) -> impl Iterator<Item = &VerifyReport> {
        self.reports.iter().filter(|r| r.verdict == Verdict::Mismatch)
    }
}

/// Valid discriminants in `[d_min, d_max]`, from `d_max` downwards.
pub fn discriminants(d_min: i64, d_max: i64) -> Vec<Discriminant> {
    (d_min..=d_max.min(-3))
        .rev()
        .filter_map(|d| Discriminant::new(d).ok())
        .collect()
}

/// `verify_pair` over every valid `D` in `[d_min, d_max]` and prime
/// `p <= p_max`, on `jobs` worker threads (0 for the rayon default). The
/// output does not depend on `jobs`.
pub fn sweep(store: &ClassPolyStore, d_min: i64, d_max: i64, p_max: u64, jobs: usize) -> Result<SweepReport> {
    let ds = discriminants(d_min, d_max);
    let primes = ntcore::primes_up_to(p_max);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameters(e.to_string()))?;
    let per_d: Vec<Result<Vec<VerifyReport>>> = pool.install(|| {
        ds.par_iter()
            .map(|&d| primes.iter().map(|&p| verify_pair(store, d, p)).collect())
            .collect()
    });
    let mut out = SweepReport { d_min, d_max, p_max, ..SweepReport::default() };
    for reports in per_d {
        for r in reports? {
            let c = out.counts.entry(r.label).or_default();
            c.total += 1;
            match r.verdict {
                Verdict::Match => c.matched += 1,
                Verdict::AdmissibleMatch => c.admissible += 1,
                Verdict::Mismatch => c.mismatched += 1,
                Verdict::NoPrediction => c.no_prediction += 1,
            }
            if r.verdict == Verdict::Mismatch {
                out.mismatches += 1;
            }
            if r.label == CaseLabel::SkippedUnsupported {
                out.skipped += 1;
            }
            out.reports.push(r);
        }
    }
    Ok(out)
}

/// Supersingularity by counting points over `F_{p^2}`: the curve is
/// supersingular iff `#E(F_{p^2}) = 1 mod p`. For `p` in `{2, 3}` the only
/// supersingular invariant is 0.
pub fn is_supersingular_j(j: Fp2Element, p: u64) -> bool {
    if p < 5 {
        return j.u % p == 0 && j.v % p == 0;
    }
    let k = Fp2::new(p);
    let c1728 = k.element(1728, 0);
    // y^2 = x^3 + a x + b
    let (a, b) = if j == k.zero() {
        (k.zero(), k.one())
    } else if j == c1728 {
        (k.one(), k.zero())
    } else {
        let kk = k.mul(j, k.inv(k.sub(c1728, j)).expect("j != 1728"));
        (k.scale(3, kk), k.scale(2, kk))
    };
    let q = (p * p) as i128;
    let mut count = q + 1;
    for x in k.elements() {
        let rhs = k.add(k.add(k.mul(k.mul(x, x), x), k.mul(a, x)), b);
        count += k.quadratic_character(rhs) as i128;
    }
    count.rem_euclid(p as i128) == 1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OsidhReport {
    #[serde(rename = "D0")]
    pub d0: i64,
    pub ell: u64,
    pub n: u32,
    pub p: u64,
    #[serde(rename = "D_n")]
    pub d_n: i64,
    /// Size of the key space.
    pub h_dn: u64,
    pub mu_n: u32,
    /// `sqrt|D_n| * ln|D_n|`.
    pub bound_ln: f64,
    /// `sqrt|D_n| * log2|D_n|`.
    pub bound_log2: f64,
    /// `h <= bound_ln`; `None` when `|D_n| < 5`.
    pub within_bound: Option<bool>,
    /// `2^(mu_n - 1)` or 0 for inert `p`; `None` otherwise.
    pub fp_roots_expected: Option<u64>,
    pub p_exceeds_disc: bool,
    pub p_nonsplit: bool,
    pub valid: bool,
}

/// Key space of OSIDH on the order of conductor `ell^n` in the order of
/// discriminant `D0`, with base prime `p`. Flags rather than errors when `p` is
/// too small or splits; errors only on malformed parameters.
pub fn osidh_keyspace(d0: i64, ell: u64, n: u32, p: u64) -> Result<OsidhReport> {
    let base = Discriminant::new(d0)?;
    for q in [ell, p] {
        if !ntcore::is_prime(q) {
            return Err(Error::NotPrime(q));
        }
    }
    if ell == p {
        return Err(Error::InvalidParameters("ell must differ from p".into()));
    }
    if base.conductor() % p == 0 {
        return Err(Error::InvalidParameters(format!("p = {p} divides the conductor of D0 = {d0}")));
    }
    let scale = ell
        .checked_pow(n)
        .and_then(|m| m.checked_mul(m))
        .and_then(|m| i64::try_from(m).ok())
        .and_then(|m| m.checked_mul(d0))
        .ok_or_else(|| Error::InvalidParameters("D_n overflows".into()))?;
    let dn = Discriminant::new(scale)?;
    let h = quadforms::class_number(dn);
    let mu = quadforms::group_structure(dn).mu;
    let abs = dn.abs() as f64;
    let bound_ln = abs.sqrt() * abs.ln();
    let bound_log2 = abs.sqrt() * abs.log2();
    let p_nonsplit = genus::is_nonsplit(dn, p);
    let inert = p_nonsplit && dn.fundamental() % p as i64 != 0;
    let fp_roots_expected = if inert {
        Some(if genus::splits_completely_in_fplus(dn, p)? { 1 << (mu - 1) } else { 0 })
    } else {
        None
    };
    let p_exceeds_disc = p > dn.abs();
    Ok(OsidhReport {
        d0,
        ell,
        n,
        p,
        d_n: dn.value(),
        h_dn: h,
        mu_n: mu,
        bound_ln,
        bound_log2,
        within_bound: (dn.abs() >= 5).then_some(h as f64 <= bound_ln),
        fp_roots_expected,
        p_exceeds_disc,
        p_nonsplit,
        valid: p_exceeds_disc && p_nonsplit,
    })
}

/// Roots of `H_{D_n} mod p`, counted three ways.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OsidhObservation {
    pub fp_roots: u64,
    /// Distinct roots in `F_{p^2}`.
    pub fp2_roots: u64,
    /// Roots in `F_{p^2}` up to Frobenius.
    pub fp2_roots_up_to_conjugacy: u64,
    pub signature: FactorSignature,
}

pub fn osidh_observe(store: &ClassPolyStore, report: &OsidhReport) -> Result<OsidhObservation> {
    let d = Discriminant::new(report.d_n)?;
    let reduced = reduce_mod(&store.get(d)?.poly, report.p);
    let roots = roots_in_fp2(&reduced);
    let fp_roots = roots.iter().filter(|(r, _)| r.is_base()).count() as u64;
    let fp2_roots = roots.len() as u64;
    Ok(OsidhObservation {
        fp_roots,
        fp2_roots,
        fp2_roots_up_to_conjugacy: fp_roots + (fp2_roots - fp_roots) / 2,
        signature: signature(&factor(&reduced)),
    })
}
