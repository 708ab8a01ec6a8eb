use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Multiset of `(degree, multiplicity)` pairs of irreducible factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorSignature(BTreeMap<(u32, u32), u64>);

impl FactorSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut s = Self::new();
        for (d, m) in pairs {
            s.add(d, m, 1);
        }
        s
    }

    /// Adds `count` factors of degree `d` and multiplicity `m`; zero counts
    /// are ignored.
    pub fn add(&mut self, d: u32, m: u32, count: u64) {
        assert!(d >= 1 && m >= 1, "degree and multiplicity are positive");
        if count > 0 {
            *self.0.entry((d, m)).or_insert(0) += count;
        }
    }

    pub fn with(mut self, d: u32, m: u32, count: u64) -> Self {
        self.add(d, m, count);
        self
    }

    pub fn count(&self, d: u32, m: u32) -> u64 {
        self.0.get(&(d, m)).copied().unwrap_or(0)
    }

    /// `(degree, multiplicity, count)` triples in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.0.iter().map(|(&(d, m), &c)| (d, m, c))
    }

    pub fn total_degree(&self) -> u64 {
        self.entries().map(|(d, m, c)| d as u64 * m as u64 * c).sum()
    }

    pub fn factor_count(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every multiplicity multiplied by `k`.
    pub fn scale_multiplicities(&self, k: u32) -> Self {
        Self(self.0.iter().map(|(&(d, m), &c)| ((d, m * k), c)).collect())
    }
}

impl fmt::Display for FactorSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, m, c)) in self.entries().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({d},{m}):{c}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for FactorSignature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[u64; 3]> = self.entries().map(|(d, m, c)| [d as u64, m as u64, c]).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FactorSignature {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = Vec::<[u64; 3]>::deserialize(de)?;
        let mut s = Self::new();
        for [d, m, c] in rows {
            if d == 0 || m == 0 || c == 0 || d > u32::MAX as u64 || m > u32::MAX as u64 {
                return Err(serde::de::Error::custom("signature entries must be positive"));
            }
            s.add(d as u32, m as u32, c);
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_json() {
        let s = FactorSignature::new().with(2, 1, 3).with(1, 2, 1).with(1, 1, 1);
        assert_eq!(s.to_string(), "{(1,1):1, (1,2):1, (2,1):3}");
        assert_eq!(s.total_degree(), 9);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[1,1,1],[1,2,1],[2,1,3]]");
        let back: FactorSignature = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<FactorSignature>("[[0,1,1]]").is_err());
    }

    #[test]
    fn scaling() {
        let s = FactorSignature::new().with(3, 1, 2);
        assert_eq!(s.scale_multiplicities(2), FactorSignature::new().with(3, 2, 2));
    }
}
