use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::{from_triples, to_triples, EntryTriple, SparseSequence};

/// A linear operator truncated to `span{e_1, ..., e_n}`, stored by columns
/// `S e_k`. Column supports lie in `1..=rows`; `rows` may exceed `n` so that
/// operators such as the shift can be represented without losing mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator {
    dimension: usize,
    rows: usize,
    columns: Vec<SparseSequence>,
}

impl MatrixOperator {
    pub fn new(rows: usize, columns: Vec<SparseSequence>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Malformed("matrix operator needs at least one column".into()));
        }
        for (i, col) in columns.iter().enumerate() {
            if let Some(top) = col.max_index() {
                if top > rows {
                    return Err(Error::TruncationBreach {
                        column: i + 1,
                        index: top,
                        bound: rows,
                    });
                }
            }
        }
        Ok(Self {
            dimension: columns.len(),
            rows,
            columns,
        })
    }

    /// Square truncation: rows equal the number of columns.
    pub fn square(columns: Vec<SparseSequence>) -> Result<Self> {
        let n = columns.len();
        Self::new(n, columns)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            dimension: n,
            rows: n,
            columns: (1..=n).map(SparseSequence::basis).collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `S e_k` for `1 <= k <= dimension`.
    pub fn column(&self, k: usize) -> Option<&SparseSequence> {
        k.checked_sub(1).and_then(|i| self.columns.get(i))
    }

    pub fn columns(&self) -> impl Iterator<Item = (usize, &SparseSequence)> {
        self.columns.iter().enumerate().map(|(i, c)| (i + 1, c))
    }

    pub(crate) fn columns_mut(&mut self) -> &mut [SparseSequence] {
        &mut self.columns
    }

    /// `Sx = sum_k x_k S e_k`.
    pub fn apply(&self, x: &SparseSequence) -> Result<SparseSequence> {
        let mut out = SparseSequence::zero();
        for (k, v) in x.iter() {
            let col = self.column(k).ok_or(Error::OutOfDomain {
                index: k,
                bound: self.dimension,
            })?;
            for (n, s) in col.iter() {
                out.add_at(n, v * s);
            }
        }
        Ok(out)
    }

    /// `self o inner`; every column of `inner` must lie in the domain of `self`.
    pub fn compose(&self, inner: &MatrixOperator) -> Result<MatrixOperator> {
        let columns = inner
            .columns
            .iter()
            .map(|c| self.apply(c))
            .collect::<Result<Vec<_>>>()?;
        MatrixOperator::new(self.rows, columns)
    }
}

#[derive(Serialize, Deserialize)]
struct WireMatrix {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    columns: Vec<(usize, Vec<EntryTriple>)>,
}

impl Serialize for MatrixOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireMatrix {
            n: self.dimension,
            rows: (self.rows != self.dimension).then_some(self.rows),
            columns: self
                .columns()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, to_triples(c)))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = WireMatrix::deserialize(deserializer)?;
        let mut columns = vec![SparseSequence::zero(); wire.n];
        let mut last = 0;
        for (k, triples) in wire.columns {
            if k <= last || k > wire.n {
                return Err(D::Error::custom(format!(
                    "column index {k} out of order or outside 1..={}",
                    wire.n
                )));
            }
            columns[k - 1] = from_triples(triples).map_err(D::Error::custom)?;
            last = k;
        }
        MatrixOperator::new(wire.rows.unwrap_or(wire.n), columns).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_sums_columns() {
        let m = MatrixOperator::square(vec![
            SparseSequence::from_real([(2, 1.0)]).unwrap(),
            SparseSequence::from_real([(1, 1.0), (2, 1.0)]).unwrap(),
        ])
        .unwrap();
        let x = SparseSequence::from_real([(1, 3.0), (2, -1.0)]).unwrap();
        assert_eq!(
            m.apply(&x).unwrap(),
            SparseSequence::from_real([(1, -1.0), (2, 2.0)]).unwrap()
        );
        assert!(matches!(
            m.apply(&SparseSequence::basis(3)),
            Err(Error::OutOfDomain { index: 3, bound: 2 })
        ));
    }

    #[test]
    fn rows_bound_columns() {
        let r = MatrixOperator::square(vec![SparseSequence::basis(2)]);
        assert!(matches!(r, Err(Error::TruncationBreach { column: 1, index: 2, bound: 1 })));
        assert!(MatrixOperator::new(2, vec![SparseSequence::basis(2)]).is_ok());
    }

    #[test]
    fn json_round_trip_keeps_zero_columns() {
        let m = MatrixOperator::new(
            4,
            vec![
                SparseSequence::basis(3),
                SparseSequence::zero(),
                SparseSequence::from_real([(1, 0.5), (4, -2.0)]).unwrap(),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"n":3,"rows":4,"columns":[[1,[[3,1.0,0.0]]],[3,[[1,0.5,0.0],[4,-2.0,0.0]]]]}"#
        );
        assert_eq!(serde_json::from_str::<MatrixOperator>(&s).unwrap(), m);
    }
}
