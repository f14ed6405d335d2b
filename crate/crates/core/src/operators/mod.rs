//! Lamperti-form, injection-induced and truncated matrix operators.

mod checks;
mod generate;
mod injection;
mod lamperti;
mod matrix;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_isometry_randomized, check_isomodular_structural, column_reports, max_modular_discrepancy,
    recover_structure, ColumnReport, IsometryVerdict, IsomodularCertificate, IsomodularVerdict,
    RecoveredStructure, CERTIFICATION_THRESHOLD, DEFAULT_PROBES, MAX_PAIR_PROBES, STRUCTURAL_TOL,
};
pub use generate::generate_isomodular;
pub use injection::{
    apply_injection, balanced_pair, injection_to_matrix, injection_to_matrix_covering,
    theta_isometry_decision, InjectionMap, ThetaDecision,
};
pub use lamperti::{apply_lamperti, lamperti_to_matrix, LampertiOperator, MODULUS_SLACK};
pub use matrix::MatrixOperator;

use crate::error::Result;
use crate::space::SparseSequence;

/// Any of the operator encodings accepted on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Operator {
    Lamperti(LampertiOperator),
    Injection { rule: InjectionMap },
    Matrix(MatrixOperator),
}

impl Operator {
    pub fn apply(&self, x: &SparseSequence) -> Result<SparseSequence> {
        match self {
            Operator::Lamperti(l) => l.apply(x),
            Operator::Injection { rule } => apply_injection(rule, x),
            Operator::Matrix(m) => m.apply(x),
        }
    }

    /// Truncation to `span{e_1..e_n}` with enough rows to hold every column.
    /// `n` defaults to the natural size of the operator.
    pub fn to_matrix(&self, n: Option<usize>) -> Result<MatrixOperator> {
        match self {
            Operator::Lamperti(l) => {
                let n = n.unwrap_or(l.set_iso().domain_bound());
                l.to_matrix_rect(n, l.required_rows(n))
            }
            Operator::Injection { rule } => {
                let n = n.or(rule.domain_bound()).unwrap_or(match rule {
                    InjectionMap::Permutation { table } => table.len().max(1),
                    _ => 8,
                });
                injection_to_matrix_covering(rule, n)
            }
            Operator::Matrix(m) => match n {
                Some(n) if n != m.dimension() => Err(crate::Error::Malformed(format!(
                    "matrix operator has dimension {}, requested {n}",
                    m.dimension()
                ))),
                _ => Ok(m.clone()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagged_json() {
        let op: Operator = serde_json::from_str(
            r#"{"kind":"injection","rule":{"kind":"shift","offset":1}}"#,
        )
        .unwrap();
        assert_eq!(
            op.apply(&SparseSequence::basis(3)).unwrap(),
            SparseSequence::basis(4)
        );
        let op: Operator = serde_json::from_str(
            r#"{"kind":"matrix","n":2,"columns":[[1,[[2,1.0,0.0]]],[2,[[1,1.0,0.0]]]]}"#,
        )
        .unwrap();
        assert_eq!(op.apply(&SparseSequence::basis(1)).unwrap(), SparseSequence::basis(2));
        let op: Operator = serde_json::from_str(
            r#"{"kind":"lamperti","h":[[2,0.5,0.0]],"iso":{"images":[[1,[2]]]}}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&op).unwrap();
        assert_eq!(serde_json::from_str::<Operator>(&text).unwrap(), op);
        assert!(text.starts_with(r#"{"kind":"lamperti""#));
    }
}
