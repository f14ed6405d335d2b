use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::matrix::MatrixOperator;
use crate::error::{Error, Result};
use crate::space::{ExponentSequence, SparseSequence};

/// An injection `theta` of the positive integers.
///
/// `Permutation` is a bijection of `1..=m` extended by the identity above
/// `m`; `Table` is defined only on `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawInjection")]
pub enum InjectionMap {
    Shift { offset: usize },
    Permutation { table: Vec<usize> },
    Table { table: Vec<usize> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawInjection {
    Shift { offset: usize },
    Permutation { table: Vec<usize> },
    Table { table: Vec<usize> },
}

impl TryFrom<RawInjection> for InjectionMap {
    type Error = Error;

    fn try_from(raw: RawInjection) -> Result<Self> {
        match raw {
            RawInjection::Shift { offset } => InjectionMap::shift(offset),
            RawInjection::Permutation { table } => InjectionMap::permutation(table),
            RawInjection::Table { table } => InjectionMap::table(table),
        }
    }
}

fn check_injective(table: &[usize]) -> Result<()> {
    let mut seen: HashMap<usize, usize> = HashMap::with_capacity(table.len());
    for (i, &image) in table.iter().enumerate() {
        if image == 0 {
            return Err(Error::InvalidIndex(0));
        }
        if let Some(first) = seen.insert(image, i + 1) {
            return Err(Error::NotInjective {
                first,
                second: i + 1,
                image,
            });
        }
    }
    Ok(())
}

impl InjectionMap {
    /// `theta(n) = n + offset`, `offset >= 1`. The unilateral shift is `shift(1)`.
    pub fn shift(offset: usize) -> Result<Self> {
        if offset == 0 {
            return Err(Error::Malformed("shift offset must be positive".into()));
        }
        Ok(Self::Shift { offset })
    }

    pub fn permutation(table: Vec<usize>) -> Result<Self> {
        check_injective(&table)?;
        let m = table.len();
        if table.iter().any(|&v| v > m) {
            return Err(Error::NotBijective(m));
        }
        Ok(Self::Permutation { table })
    }

    pub fn table(table: Vec<usize>) -> Result<Self> {
        check_injective(&table)?;
        Ok(Self::Table { table })
    }

    /// `n -> n - (-1)^n` on `1..=2 * pairs`: swaps `2i - 1` and `2i`.
    pub fn adjacent_transpositions(pairs: usize) -> Self {
        let table = (1..=2 * pairs)
            .map(|n| if n % 2 == 0 { n - 1 } else { n + 1 })
            .collect();
        Self::Permutation { table }
    }

    /// `theta(n)`, or `None` outside the domain of a `Table`.
    pub fn image(&self, n: usize) -> Option<usize> {
        if n == 0 {
            return None;
        }
        match self {
            Self::Shift { offset } => Some(n + offset),
            Self::Permutation { table } => Some(table.get(n - 1).copied().unwrap_or(n)),
            Self::Table { table } => table.get(n - 1).copied(),
        }
    }

    /// Finite domain bound, for `Table` maps.
    pub fn domain_bound(&self) -> Option<usize> {
        match self {
            Self::Table { table } => Some(table.len()),
            _ => None,
        }
    }

    fn image_or_err(&self, n: usize) -> Result<usize> {
        self.image(n).ok_or(Error::OutOfDomain {
            index: n,
            bound: self.domain_bound().unwrap_or(0),
        })
    }

    /// Largest `theta(k)` for `k <= n`, at least `n`.
    pub fn required_rows(&self, n: usize) -> usize {
        (1..=n).filter_map(|k| self.image(k)).max().unwrap_or(0).max(n)
    }

    /// `S_theta` on `span{e_1..e_n}` with rows `1..=rows`.
    pub fn to_matrix_rect(&self, n: usize, rows: usize) -> Result<MatrixOperator> {
        let mut columns = Vec::with_capacity(n);
        for k in 1..=n {
            let image = self.image_or_err(k)?;
            if image > rows {
                return Err(Error::TruncationBreach {
                    column: k,
                    index: image,
                    bound: rows,
                });
            }
            columns.push(SparseSequence::basis(image));
        }
        MatrixOperator::new(rows, columns)
    }
}

/// `(S_theta x)_{theta(n)} = x_n`, zero off `theta(N)`.
pub fn apply_injection(theta: &InjectionMap, x: &SparseSequence) -> Result<SparseSequence> {
    let mut out = SparseSequence::zero();
    for (n, v) in x.iter() {
        out.insert_nonzero(theta.image_or_err(n)?, v);
    }
    Ok(out)
}

/// Square `n x n` truncation of `S_theta`.
pub fn injection_to_matrix(theta: &InjectionMap, n: usize) -> Result<MatrixOperator> {
    theta.to_matrix_rect(n, n)
}

/// Truncation with just enough rows to hold `theta(1..=n)`.
pub fn injection_to_matrix_covering(theta: &InjectionMap, n: usize) -> Result<MatrixOperator> {
    theta.to_matrix_rect(n, theta.required_rows(n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ThetaDecision {
    Isometric,
    /// `j` is the least index with `p_j != p_theta(j)`; `witness` is
    /// `2^{-1/p_j} e_j + 2^{-1/p_theta(j)} e_theta(j)`, which has unit norm.
    NotIsometric {
        j: usize,
        theta_j: usize,
        witness: SparseSequence,
    },
}

/// The two-term unit vector `2^{-1/p_j} e_j + 2^{-1/p_k} e_k`, `j != k`.
pub fn balanced_pair(p: &ExponentSequence, j: usize, k: usize) -> SparseSequence {
    debug_assert_ne!(j, k);
    SparseSequence::from_real([
        (j, 2f64.powf(-1.0 / p.at(j))),
        (k, 2f64.powf(-1.0 / p.at(k))),
    ])
    .expect("positive indices and finite values")
}

/// Decides whether `S_theta` preserves norms on `span{e_1..e_n}` by exact
/// comparison `p_k == p_theta(k)` for every `k <= n` in the domain of `theta`.
pub fn theta_isometry_decision(
    theta: &InjectionMap,
    p: &ExponentSequence,
    n: usize,
) -> ThetaDecision {
    let last = theta.domain_bound().map_or(n, |d| d.min(n));
    for j in 1..=last {
        let Some(theta_j) = theta.image(j) else {
            continue;
        };
        if p.at(j) != p.at(theta_j) {
            return ThetaDecision::NotIsometric {
                j,
                theta_j,
                witness: balanced_pair(p, j, theta_j),
            };
        }
    }
    ThetaDecision::Isometric
}
