use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::MatrixOperator;
use crate::error::{Error, Result};
use crate::set_iso::RegularSetIso;
use crate::space::{from_triples, to_triples, EntryTriple, SparseSequence};

/// Rounding slack allowed above 1 for multiplier moduli.
pub const MODULUS_SLACK: f64 = 1e-12;

/// An operator in multiplier/set-isomorphism form, `(Sx)_n = h_n (Tx)_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LampertiOperator {
    multiplier: SparseSequence,
    set_iso: RegularSetIso,
}

impl LampertiOperator {
    /// Requires `|h_n| <= 1` and `h` vanishing off `T(domain)`.
    pub fn new(multiplier: SparseSequence, set_iso: RegularSetIso) -> Result<Self> {
        let range = set_iso.range();
        for (n, v) in multiplier.iter() {
            let modulus = v.norm();
            if modulus > 1.0 + MODULUS_SLACK {
                return Err(Error::MultiplierTooLarge { index: n, modulus });
            }
            if !range.contains(&n) {
                return Err(Error::MultiplierOffRange(n));
            }
        }
        Ok(Self {
            multiplier,
            set_iso,
        })
    }

    pub fn multiplier(&self) -> &SparseSequence {
        &self.multiplier
    }

    pub fn set_iso(&self) -> &RegularSetIso {
        &self.set_iso
    }

    pub fn apply(&self, x: &SparseSequence) -> Result<SparseSequence> {
        apply_parts(&self.multiplier, &self.set_iso, x)
    }

    /// Columns `S e_k` for `k <= n`, rows `1..=rows`.
    pub fn to_matrix_rect(&self, n: usize, rows: usize) -> Result<MatrixOperator> {
        parts_to_matrix(&self.multiplier, &self.set_iso, n, rows)
    }

    /// Smallest row bound that holds every column for `k <= n`.
    pub fn required_rows(&self, n: usize) -> usize {
        self.set_iso
            .images()
            .take(n)
            .filter_map(|(_, s)| s.last().copied())
            .max()
            .unwrap_or(0)
            .max(n)
    }
}

pub(crate) fn apply_parts(
    multiplier: &SparseSequence,
    set_iso: &RegularSetIso,
    x: &SparseSequence,
) -> Result<SparseSequence> {
    Ok(multiplier.pointwise(&set_iso.extend_to_sequence(x)?))
}

pub(crate) fn parts_to_matrix(
    multiplier: &SparseSequence,
    set_iso: &RegularSetIso,
    n: usize,
    rows: usize,
) -> Result<MatrixOperator> {
    let mut columns = Vec::with_capacity(n);
    for k in 1..=n {
        let col = apply_parts(multiplier, set_iso, &SparseSequence::basis(k))?;
        if let Some(top) = col.max_index() {
            if top > rows {
                return Err(Error::TruncationBreach {
                    column: k,
                    index: top,
                    bound: rows,
                });
            }
        }
        columns.push(col);
    }
    MatrixOperator::new(rows, columns)
}

pub fn apply_lamperti(l: &LampertiOperator, x: &SparseSequence) -> Result<SparseSequence> {
    l.apply(x)
}

/// Square `n x n` truncation.
pub fn lamperti_to_matrix(l: &LampertiOperator, n: usize) -> Result<MatrixOperator> {
    l.to_matrix_rect(n, n)
}

#[derive(Serialize, Deserialize)]
struct WireLamperti {
    h: Vec<EntryTriple>,
    iso: RegularSetIso,
}

impl Serialize for LampertiOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireLamperti {
            h: to_triples(&self.multiplier),
            iso: self.set_iso.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LampertiOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = WireLamperti::deserialize(deserializer)?;
        let h = from_triples(wire.h).map_err(D::Error::custom)?;
        LampertiOperator::new(h, wire.iso).map_err(D::Error::custom)
    }
}
