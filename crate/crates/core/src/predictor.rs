//! Predicted factorization patterns of `H_D mod p` from class group and genus
//! data. Only the case split and `i_p` look at `H_D` itself.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fppoly::{index_divisible_by, FactorSignature};
use crate::genus::{self, is_special};
use crate::hcp::{ip_from_discriminant, ClassPolyStore};
use crate::ntcore::{self, Discriminant};
use crate::quadforms::{self, prime_form};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseLabel {
    Split,
    InertUnramified,
    SpecialD,
    RamifiedUnramFplus,
    RamifiedRamFplus,
    PDividesF,
    PDividesNd,
    OutOfTheoremRange,
    /// `p | f` and `p | n_D` together.
    SkippedUnsupported,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 9] = [
        CaseLabel::Split,
        CaseLabel::InertUnramified,
        CaseLabel::SpecialD,
        CaseLabel::RamifiedUnramFplus,
        CaseLabel::RamifiedRamFplus,
        CaseLabel::PDividesF,
        CaseLabel::PDividesNd,
        CaseLabel::OutOfTheoremRange,
        CaseLabel::SkippedUnsupported,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Split => "SPLIT",
            CaseLabel::InertUnramified => "INERT_UNRAMIFIED",
            CaseLabel::SpecialD => "SPECIAL_D",
            CaseLabel::RamifiedUnramFplus => "RAMIFIED_UNRAM_FPLUS",
            CaseLabel::RamifiedRamFplus => "RAMIFIED_RAM_FPLUS",
            CaseLabel::PDividesF => "P_DIVIDES_F",
            CaseLabel::PDividesNd => "P_DIVIDES_ND",
            CaseLabel::OutOfTheoremRange => "OUT_OF_THEOREM_RANGE",
            CaseLabel::SkippedUnsupported => "SKIPPED_UNSUPPORTED",
        }
    }

    /// Labels that carry an exact signature.
    pub fn has_signature(self) -> bool {
        !matches!(
            self,
            CaseLabel::PDividesNd | CaseLabel::OutOfTheoremRange | CaseLabel::SkippedUnsupported
        )
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `count` primes of `M` above `p` with ramification index `e` and residue
/// degree `deg`. Serialized as `[e, deg, count]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimeShape {
    pub e: u32,
    pub deg: u32,
    pub count: u64,
}

impl Serialize for PrimeShape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.e as u64, self.deg as u64, self.count].serialize(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Parameters {
    pub h: u64,
    pub mu: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u64>,
    /// `h_D / h_{D^(p)}` when `p | f`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_p_part: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_p: Option<u32>,
}

/// Splitting of `p` in `M = Q(j_D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PomPrediction {
    pub shape: Vec<PrimeShape>,
    pub parameters: Parameters,
}

impl PomPrediction {
    /// `sum e * deg * count`, which must equal `h`.
    pub fn total(&self) -> u64 {
        self.shape.iter().map(|s| s.e as u64 * s.deg as u64 * s.count).sum()
    }

    /// Irreducible factor of degree `deg` and multiplicity `e` per prime.
    pub fn signature(&self) -> FactorSignature {
        let mut sig = FactorSignature::new();
        for s in &self.shape {
            sig.add(s.deg, s.e, s.count);
        }
        sig
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootTag {
    Zero,
    S1728,
    Other,
}

impl RootTag {
    pub fn of(j: crate::fppoly::Fp2Element, p: u64) -> Self {
        if j.v != 0 {
            RootTag::Other
        } else if j.u == 0 {
            RootTag::Zero
        } else if j.u == 1728 % p {
            RootTag::S1728
        } else {
            RootTag::Other
        }
    }
}

/// Where a multiple root may lie: in `F_p` or anywhere in `F_{p^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootField {
    Fp,
    Fp2,
}

/// One multiple root. `Other` excludes both 0 and 1728.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultipleRoot {
    pub multiplicity: u32,
    pub location: RootTag,
    pub field: RootField,
}

impl MultipleRoot {
    fn new(multiplicity: u32, location: RootTag, field: RootField) -> Self {
        Self { multiplicity, location, field }
    }

    pub fn admits(&self, multiplicity: u32, tag: RootTag, in_fp: bool) -> bool {
        self.multiplicity == multiplicity
            && self.location == tag
            && (self.field == RootField::Fp2 || in_fp)
    }
}

/// The complete list of multiple roots in one admissible configuration.
pub type RootStructure = Vec<MultipleRoot>;

/// Whether the observed multiple roots `(mult, tag, in F_p)` realize `structure`.
pub fn structure_matches(structure: &[MultipleRoot], observed: &[(u32, RootTag, bool)]) -> bool {
    if structure.len() != observed.len() {
        return false;
    }
    // tiny sets, so plain backtracking
    fn assign(s: &[MultipleRoot], obs: &[(u32, RootTag, bool)], used: &mut [bool]) -> bool {
        let Some((first, rest)) = s.split_first() else {
            return true;
        };
        for i in 0..obs.len() {
            let (m, tag, fp) = obs[i];
            if !used[i] && first.admits(m, tag, fp) {
                used[i] = true;
                if assign(rest, obs, used) {
                    return true;
                }
                used[i] = false;
            }
        }
        false
    }
    assign(structure, observed, &mut vec![false; observed.len()])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    #[serde(rename = "D")]
    pub d: i64,
    pub p: u64,
    pub label: CaseLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<FactorSignature>,
    /// Alternatives when the signature is only known up to a finite choice.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub admissible_signatures: Vec<FactorSignature>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub admissible_structures: Vec<RootStructure>,
    #[serde(rename = "pOM_shape")]
    pub pom_shape: Vec<PrimeShape>,
    pub parameters: Parameters,
    /// Whether `p | n_D`. `SPECIAL_D` is assigned either way.
    pub p_divides_nd: bool,
}

fn check_prime(p: u64) -> Result<()> {
    if ntcore::is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn pow2(k: u32) -> u64 {
    1u64 << k
}

fn shape(parts: &[(u32, u32, u64)]) -> Vec<PrimeShape> {
    parts
        .iter()
        .filter(|&&(_, _, c)| c > 0)
        .map(|&(e, deg, count)| PrimeShape { e, deg, count })
        .collect()
}

/// Splitting of `p` in `M` for `p` prime to the conductor.
fn pom_prime_to_conductor(d: Discriminant, p: u64) -> PomPrediction {
    let h = quadforms::class_number(d);
    let mu = quadforms::group_structure(d).mu;
    let mut params = Parameters { h, mu, ..Parameters::default() };
    if let Some(form) = prime_form(d, p).expect("p is prime to the conductor") {
        if ntcore::kronecker(d.fundamental(), p) == Some(1) {
            let lambda = form.order();
            params.lambda = Some(lambda);
            params.g = Some(h / lambda);
            return PomPrediction { shape: shape(&[(1, lambda as u32, h / lambda)]), parameters: params };
        }
    }
    if d.fundamental() % p as i64 != 0 {
        let t = if genus::splits_completely_in_fplus(d, p).expect("inert, prime to f") {
            pow2(mu - 1)
        } else {
            0
        };
        params.t = Some(t);
        params.g = Some((h + t) / 2);
        return PomPrediction { shape: shape(&[(1, 1, t), (1, 2, (h - t) / 2)]), parameters: params };
    }
    if is_special(d, p) {
        let parts = if p % 4 == 1 {
            params.g = Some(h / 2);
            [(2, 1, h / 2), (1, 1, 0)]
        } else {
            params.g = Some((h + 1) / 2);
            [(1, 1, 1), (2, 1, (h - 1) / 2)]
        };
        return PomPrediction { shape: shape(&parts), parameters: params };
    }
    let ram = genus::ramification_data(d, p).expect("ramified, not special");
    if ram.e_fplus == 1 {
        let s = pow2(mu - 2);
        let t = if ram.f_fplus == 1 { pow2(mu - 2) } else { 0 };
        let g = (h + 2 * s + 2 * t) / 4;
        params.s = Some(s);
        params.t = Some(t);
        params.g = Some(g);
        PomPrediction { shape: shape(&[(1, 2, s), (2, 1, t), (2, 2, g - s - t)]), parameters: params }
    } else {
        let t = if ram.f_f_over_fplus == 2 { pow2(mu - 2) } else { 0 };
        let g = (h + 2 * t) / 4;
        params.t = Some(t);
        params.g = Some(g);
        PomPrediction { shape: shape(&[(2, 1, t), (2, 2, g - t)]), parameters: params }
    }
}

/// Splitting of `p` in `M = Q(j_D)` from arithmetic data only.
pub fn predict_pom(d: Discriminant, p: u64) -> Result<PomPrediction> {
    check_prime(p)?;
    if d.conductor() % p != 0 {
        return Ok(pom_prime_to_conductor(d, p));
    }
    let base_d = d.prime_to(p);
    let base = pom_prime_to_conductor(base_d, p);
    let h = quadforms::class_number(d);
    let k = h / base.parameters.h;
    let mut parameters = base.parameters;
    parameters.h = h;
    parameters.h_p_part = Some(k);
    let shape = base
        .shape
        .iter()
        .map(|s| PrimeShape { e: s.e * k as u32, ..*s })
        .collect();
    Ok(PomPrediction { shape, parameters })
}

/// Whether `p | n_D`, the index of `Z[j_D]` in the maximal order of `M`:
/// from `i_p` when `p ∤ D`, by Dedekind's criterion otherwise.
pub fn p_divides_nd(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<bool> {
    let entry = store.get(d)?;
    if d.abs() % p != 0 {
        return Ok(ip_from_discriminant(d, p, entry.discriminant())? > 0);
    }
    Ok(index_divisible_by(&entry.poly, p))
}

/// `i_p` for `p` prime to `D`.
fn i_p(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<u32> {
    let entry = store.get(d)?;
    ip_from_discriminant(d, p, entry.discriminant())
}

/// Exactly one label per `(D, p)`.
pub fn classify(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<CaseLabel> {
    check_prime(p)?;
    if d.conductor() % p == 0 {
        return Ok(if p_divides_nd(store, d, p)? {
            CaseLabel::SkippedUnsupported
        } else {
            CaseLabel::PDividesF
        });
    }
    let dk = d.fundamental();
    if d.abs() % p != 0 {
        let ip = i_p(store, d, p)?;
        if ip >= 1 {
            let inert = ntcore::kronecker(dk, p) == Some(-1);
            let p3 = (p as i128).pow(3);
            let in_range = p >= 5 && inert && (d.value() as i128) > -p3 && ip <= 3;
            return Ok(if in_range { CaseLabel::PDividesNd } else { CaseLabel::OutOfTheoremRange });
        }
        return Ok(if ntcore::kronecker(dk, p) == Some(1) {
            CaseLabel::Split
        } else {
            CaseLabel::InertUnramified
        });
    }
    if is_special(d, p) {
        return Ok(CaseLabel::SpecialD);
    }
    if p_divides_nd(store, d, p)? {
        return Ok(CaseLabel::OutOfTheoremRange);
    }
    let ram = genus::ramification_data(d, p)?;
    Ok(if ram.e_fplus == 1 {
        CaseLabel::RamifiedUnramFplus
    } else {
        CaseLabel::RamifiedRamFplus
    })
}

/// Full prediction for any `(D, p)`: an exact signature when the label
/// carries one, the admissible root structures for `P_DIVIDES_ND`, and the
/// splitting in `M` in every case.
pub fn predict(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<Prediction> {
    let label = classify(store, d, p)?;
    let pom = predict_pom(d, p)?;
    let mut parameters = pom.parameters.clone();
    let mut admissible_structures = Vec::new();
    if d.abs() % p != 0 {
        parameters.i_p = Some(i_p(store, d, p)?);
    }
    if label == CaseLabel::PDividesNd {
        admissible_structures = multiplicity_structures(parameters.i_p.expect("set above"));
    }
    let signature = label.has_signature().then(|| pom.signature());
    let divides = p_divides_nd(store, d, p)?;
    Ok(Prediction {
        p_divides_nd: divides,
        d: d.value(),
        p,
        label,
        signature,
        admissible_signatures: Vec::new(),
        admissible_structures,
        pom_shape: pom.shape,
        parameters,
    })
}

/// Exact signature; `NotApplicable` when `p | n_D` or that cannot be ruled out.
pub fn predict_signature(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<Prediction> {
    let pred = predict(store, d, p)?;
    if pred.signature.is_none() {
        return Err(Error::NotApplicable {
            d: d.value(),
            p,
            reason: format!("label {} carries no exact signature", pred.label),
        });
    }
    Ok(pred)
}

fn multiplicity_structures(ip: u32) -> Vec<RootStructure> {
    use RootField::{Fp, Fp2};
    use RootTag::{Other, S1728, Zero};
    let r = MultipleRoot::new;
    match ip {
        1 => vec![vec![r(2, Other, Fp)]],
        2 => vec![vec![r(2, Other, Fp2), r(2, Other, Fp2)], vec![r(2, S1728, Fp)]],
        3 => vec![
            vec![r(2, Other, Fp2), r(2, Other, Fp2), r(2, Other, Fp2)],
            vec![r(2, S1728, Fp), r(2, Other, Fp)],
            vec![r(2, Zero, Fp)],
            vec![r(3, Other, Fp)],
        ],
        _ => Vec::new(),
    }
}

/// Admissible multiple-root configurations for inert `p >= 5`, `p ∤ D`,
/// `D > -p^3` and `1 <= i_p <= 3`.
pub fn predict_multiplicity_structure(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<Vec<RootStructure>> {
    check_prime(p)?;
    let out = |why: &str| Err(Error::OutOfRange(format!("D={} p={p}: {why}", d.value())));
    if p < 5 {
        return out("p < 5");
    }
    if d.abs() % p == 0 {
        return out("p divides D");
    }
    if (d.value() as i128) <= -(p as i128).pow(3) {
        return out("D <= -p^3");
    }
    if ntcore::kronecker(d.fundamental(), p) != Some(-1) {
        return out("p is not inert");
    }
    let ip = i_p(store, d, p)?;
    if !(1..=3).contains(&ip) {
        return out(&format!("i_p = {ip} outside 1..=3"));
    }
    Ok(multiplicity_structures(ip))
}

/// Signatures for `D in {-q, -4q}` with `q = 3 mod 4` prime, `(-q/p) = -1`,
/// `-p^3 < D < -p` and `i_p in {1, 2}`.
pub fn ibukiyama_check(store: &ClassPolyStore, d: Discriminant, p: u64) -> Result<Prediction> {
    check_prime(p)?;
    let na = |reason: String| Err(Error::NotApplicable { d: d.value(), p, reason });
    let v = d.value();
    let q = if v % 4 == 0 { -v / 4 } else { -v };
    if !(q > 2 && ntcore::is_prime(q as u64) && q % 4 == 3) {
        return na("D must be -q or -4q with q = 3 mod 4 prime".into());
    }
    if ntcore::kronecker(-q, p) != Some(-1) {
        return na("(-q/p) must be -1".into());
    }
    let pi = p as i128;
    if !((v as i128) > -pi.pow(3) && (v as i128) < -pi) {
        return na("need -p^3 < D < -p".into());
    }
    let ip = i_p(store, d, p)?;
    let h = quadforms::class_number(d);
    let alternatives = match ip {
        1 => vec![FactorSignature::new().with(1, 1, 1).with(1, 2, 1).with(2, 1, (h - 3) / 2)],
        2 => {
            let mut alts = vec![FactorSignature::new().with(1, 1, 1).with(1, 2, 1).with(2, 1, (h - 3) / 2)];
            if h >= 5 {
                alts.push(FactorSignature::new().with(1, 1, 1).with(2, 2, 1).with(2, 1, (h - 5) / 2));
            }
            alts
        }
        _ => return na(format!("i_p = {ip} is not 1 or 2")),
    };
    let pom = predict_pom(d, p)?;
    let mut parameters = pom.parameters;
    parameters.i_p = Some(ip);
    Ok(Prediction {
        d: v,
        p,
        label: CaseLabel::PDividesNd,
        signature: (alternatives.len() == 1).then(|| alternatives[0].clone()),
        admissible_signatures: alternatives,
        admissible_structures: multiplicity_structures(ip),
        pom_shape: pom.shape,
        parameters,
        p_divides_nd: true,
    })
}
