//! On-disk and in-memory store for computed class polynomials.
//!
//! One record per line: `D<TAB>h<TAB>c_0,c_1,...,c_{h-1}`, decimal signed
//! coefficients, leading 1 implied.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::One;

use super::{hilbert_class_polynomial, poly_discriminant, IntPoly};
use crate::error::{Error, Result};
use crate::ntcore::Discriminant;

pub const CACHE_ENV: &str = "HF_CACHE";

pub fn format_record(d: i64, h: &IntPoly) -> String {
    let coeffs = &h.coeffs()[..h.degree()];
    let body: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
    format!("{d}\t{}\t{}", h.degree(), body.join(","))
}

pub fn parse_record(line: &str) -> Result<(i64, IntPoly)> {
    let bad = |what: &str| Error::Cache(format!("{what}: {line:?}"));
    let mut parts = line.split('\t');
    let (Some(d), Some(h), Some(body), None) = (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(bad("expected three tab-separated fields"));
    };
    let d: i64 = d.parse().map_err(|_| bad("bad discriminant"))?;
    let h: usize = h.parse().map_err(|_| bad("bad degree"))?;
    let mut coeffs = Vec::with_capacity(h + 1);
    if !body.is_empty() {
        for c in body.split(',') {
            coeffs.push(c.parse::<BigInt>().map_err(|_| bad("bad coefficient"))?);
        }
    }
    if coeffs.len() != h || h == 0 {
        return Err(bad("coefficient count does not match degree"));
    }
    coeffs.push(BigInt::one());
    let poly = IntPoly::new(coeffs);
    if format_record(d, &poly) != line {
        return Err(bad("record does not round-trip"));
    }
    Ok((d, poly))
}

/// A class polynomial with its lazily computed exact discriminant.
#[derive(Debug)]
pub struct CachedPoly {
    pub d: i64,
    pub poly: IntPoly,
    disc: OnceLock<BigInt>,
}

impl CachedPoly {
    pub fn discriminant(&self) -> &BigInt {
        self.disc.get_or_init(|| poly_discriminant(&self.poly))
    }
}

/// Shared store. Reads take a read lock; inserts and file appends are
/// serialized behind the write lock and the file mutex.
#[derive(Debug, Default)]
pub struct ClassPolyStore {
    map: RwLock<HashMap<i64, Arc<CachedPoly>>>,
    file: Option<Mutex<PathBuf>>,
}

impl ClassPolyStore {
    /// Memory-only store.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Store backed by `path`; existing records are loaded and validated.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut map = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for line in reader.lines() {
                let line = line?;
                if line.is_empty() {
                    continue;
                }
                let (d, poly) = parse_record(&line)?;
                let disc = Discriminant::new(d)
                    .map_err(|_| Error::Cache(format!("invalid discriminant {d}")))?;
                if poly.degree() as u64 != crate::quadforms::class_number(disc) {
                    return Err(Error::Cache(format!("degree of record {d} is not the class number")));
                }
                map.insert(d, Arc::new(CachedPoly { d, poly, disc: OnceLock::new() }));
            }
        }
        Ok(Self {
            map: RwLock::new(map),
            file: Some(Mutex::new(path)),
        })
    }

    /// Uses `$HF_CACHE` when set, memory only otherwise.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CACHE_ENV) {
            Some(p) if !p.is_empty() => Self::open(p),
            _ => Ok(Self::in_memory()),
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, d: Discriminant) -> Result<Arc<CachedPoly>> {
        if let Some(hit) = self.map.read().unwrap().get(&d.value()) {
            return Ok(hit.clone());
        }
        let poly = hilbert_class_polynomial(d)?;
        let mut map = self.map.write().unwrap();
        if let Some(hit) = map.get(&d.value()) {
            return Ok(hit.clone());
        }
        if let Some(file) = &self.file {
            let path = file.lock().unwrap();
            let mut out = OpenOptions::new().create(true).append(true).open(&*path)?;
            writeln!(out, "{}", format_record(d.value(), &poly))?;
        }
        let entry = Arc::new(CachedPoly {
            d: d.value(),
            poly,
            disc: OnceLock::new(),
        });
        map.insert(d.value(), entry.clone());
        Ok(entry)
    }
}
