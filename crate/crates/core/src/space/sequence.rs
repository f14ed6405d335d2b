//! Finitely supported complex sequences.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finitely supported sequence `a` in `C^N`, indexed from 1.
///
/// Only nonzero entries are stored, so two sequences are equal exactly when
/// their stored entries are.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseSequence {
    entries: BTreeMap<usize, Complex64>,
}

impl SparseSequence {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector `e_k`.
    ///
    /// # Panics
    /// If `k == 0`.
    pub fn basis(k: usize) -> Self {
        assert!(k >= 1, "basis vectors are indexed from 1");
        let mut entries = BTreeMap::new();
        entries.insert(k, Complex64::new(1.0, 0.0));
        Self { entries }
    }

    /// Builds a sequence from `(index, value)` pairs. Zero values are dropped;
    /// repeated indices accumulate.
    pub fn from_entries<I>(iter: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Complex64)>,
    {
        let mut out = Self::zero();
        for (n, v) in iter {
            if n == 0 {
                return Err(Error::InvalidIndex(n));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteEntry(n));
            }
            out.add_at(n, v);
        }
        Ok(out)
    }

    pub fn from_real<I>(iter: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        Self::from_entries(iter.into_iter().map(|(n, v)| (n, Complex64::new(v, 0.0))))
    }

    /// Adds `v` to entry `n`, keeping the canonical (no explicit zeros) form.
    pub(crate) fn add_at(&mut self, n: usize, v: Complex64) {
        debug_assert!(n >= 1);
        let slot = self.entries.entry(n).or_insert(Complex64::new(0.0, 0.0));
        *slot += v;
        if *slot == Complex64::new(0.0, 0.0) {
            self.entries.remove(&n);
        }
    }

    pub(crate) fn insert_nonzero(&mut self, n: usize, v: Complex64) {
        debug_assert!(n >= 1);
        if v != Complex64::new(0.0, 0.0) {
            self.entries.insert(n, v);
        } else {
            self.entries.remove(&n);
        }
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.entries
            .get(&n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.entries.iter().map(|(&n, &v)| (n, v))
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero();
        for (n, v) in self.iter() {
            out.insert_nonzero(n, v * c);
        }
        out
    }

    /// Pointwise product `(ab)_n = a_n b_n`.
    pub fn pointwise(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (n, v) in self.iter() {
            if let Some(w) = other.entries.get(&n) {
                out.insert_nonzero(n, v * w);
            }
        }
        out
    }

    pub fn supports_disjoint(&self, other: &Self) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.entries.keys().all(|n| !large.entries.contains_key(n))
    }
}

impl Add for &SparseSequence {
    type Output = SparseSequence;

    fn add(self, rhs: &SparseSequence) -> SparseSequence {
        let mut out = self.clone();
        for (n, v) in rhs.iter() {
            out.add_at(n, v);
        }
        out
    }
}

impl Sub for &SparseSequence {
    type Output = SparseSequence;

    fn sub(self, rhs: &SparseSequence) -> SparseSequence {
        let mut out = self.clone();
        for (n, v) in rhs.iter() {
            out.add_at(n, -v);
        }
        out
    }
}

impl Neg for &SparseSequence {
    type Output = SparseSequence;

    fn neg(self) -> SparseSequence {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<&SparseSequence> for Complex64 {
    type Output = SparseSequence;

    fn mul(self, rhs: &SparseSequence) -> SparseSequence {
        rhs.scale(self)
    }
}

pub fn basis_vector(k: usize) -> SparseSequence {
    SparseSequence::basis(k)
}

/// Wire form `[index, re, im]`.
pub(crate) type EntryTriple = (usize, f64, f64);

pub(crate) fn to_triples(a: &SparseSequence) -> Vec<EntryTriple> {
    a.iter().map(|(n, v)| (n, v.re, v.im)).collect()
}

/// Parses `[index, re, im]` triples, requiring ascending indices and no zeros.
pub(crate) fn from_triples(triples: Vec<EntryTriple>) -> Result<SparseSequence> {
    let mut out = SparseSequence::zero();
    let mut last = 0usize;
    for (n, re, im) in triples {
        if n == 0 {
            return Err(Error::InvalidIndex(n));
        }
        if n <= last {
            return Err(Error::Malformed(format!(
                "sequence indices must be strictly ascending ({n} after {last})"
            )));
        }
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::NonFiniteEntry(n));
        }
        if re == 0.0 && im == 0.0 {
            return Err(Error::Malformed(format!(
                "explicit zero entry at index {n}"
            )));
        }
        out.entries.insert(n, Complex64::new(re, im));
        last = n;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct WireSequence {
    entries: Vec<EntryTriple>,
}

impl Serialize for SparseSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireSequence {
            entries: to_triples(self),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WireSequence::deserialize(deserializer)?;
        from_triples(wire.entries).map_err(serde::de::Error::custom)
    }
}
