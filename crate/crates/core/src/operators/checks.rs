//! Isomodularity and isometry checkers, and recovery of the `(h, T)` form.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::injection::balanced_pair;
use super::lamperti::{parts_to_matrix, LampertiOperator};
use super::matrix::MatrixOperator;
use crate::error::{Error, Result};
use crate::sample::{self, rng_from_seed};
use crate::set_iso::RegularSetIso;
use crate::space::{luxemburg_norm, modular, ExponentSequence, KahanSum, Regime, SparseSequence, DEFAULT_TOL};
use crate::Complex64;

/// Allowed deviation of a column modular from 1 in the structural test.
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// A modular mismatch counts as a witness when
/// `|rho(Sx) - rho(x)| > CERTIFICATION_THRESHOLD * max(1, rho(x))`.
pub const CERTIFICATION_THRESHOLD: f64 = 1e-9;

/// Random probes used by [`check_isomodular_structural`] when the caller
/// has no preference.
pub const DEFAULT_PROBES: usize = 200;

/// Cap on the number of balanced two-term probes per isometry check.
pub const MAX_PAIR_PROBES: usize = 512;

const PROBE_RADIUS: f64 = 10.0;
const PROBE_SUPPORT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub column: usize,
    pub support: Vec<usize>,
    /// `p_n == p_k` for every `n` in the support of column `k`.
    pub exponent_match: bool,
    /// `sum_n |s_nk|^{p_k}`.
    pub column_modular: f64,
    pub unit_modular: bool,
    /// The support meets no other column's support.
    pub disjoint: bool,
}

impl ColumnReport {
    pub fn structural(&self) -> bool {
        self.exponent_match && self.unit_modular && self.disjoint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsomodularVerdict {
    Isomodular,
    NotIsomodular {
        witness: SparseSequence,
        modular_x: f64,
        modular_image: f64,
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsomodularCertificate {
    #[serde(flatten)]
    pub verdict: IsomodularVerdict,
    pub regime: Regime,
    pub columns: Vec<ColumnReport>,
}

impl IsomodularCertificate {
    pub fn is_isomodular(&self) -> bool {
        matches!(self.verdict, IsomodularVerdict::Isomodular)
    }
}

/// Per-column structural data: support, exponent constancy, column modular
/// and disjointness from the other columns.
pub fn column_reports(m: &MatrixOperator, p: &ExponentSequence) -> Vec<ColumnReport> {
    let mut owners: HashMap<usize, usize> = HashMap::new();
    let mut shared: BTreeSet<usize> = BTreeSet::new();
    for (k, col) in m.columns() {
        for (n, _) in col.iter() {
            if let Some(prev) = owners.insert(n, k) {
                shared.insert(prev);
                shared.insert(k);
            }
        }
    }
    m.columns()
        .map(|(k, col)| {
            let exponent = p.at(k);
            let column_modular = col
                .iter()
                .map(|(_, v)| v.norm().powf(exponent))
                .collect::<KahanSum>()
                .value();
            ColumnReport {
                column: k,
                support: col.iter().map(|(n, _)| n).collect(),
                exponent_match: col.iter().all(|(n, _)| p.at(n) == exponent),
                column_modular,
                unit_modular: (column_modular - 1.0).abs() <= STRUCTURAL_TOL,
                disjoint: !shared.contains(&k),
            }
        })
        .collect()
}

fn modular_mismatch(
    m: &MatrixOperator,
    p: &ExponentSequence,
    x: &SparseSequence,
) -> Option<(f64, f64)> {
    let rho_x = modular(x, p).ok()?;
    let rho_image = modular(&m.apply(x).ok()?, p).ok()?;
    ((rho_image - rho_x).abs() > CERTIFICATION_THRESHOLD * rho_x.max(1.0)).then_some((rho_x, rho_image))
}

/// Vectors that expose modular mismatches: scaled basis vectors (basis
/// vectors alone never do, since `rho(c e_k) = |c|^{p_k}` only separates
/// exponents once `|c| != 1`), sums and differences of basis vectors whose
/// columns overlap, then random two-term and sparse vectors.
fn modular_probes<R: Rng + ?Sized>(
    m: &MatrixOperator,
    reports: &[ColumnReport],
    probes: usize,
    rng: &mut R,
) -> Vec<SparseSequence> {
    let n = m.dimension();
    let mut out = Vec::new();
    for k in 1..=n {
        out.push(SparseSequence::basis(k).scale(Complex64::new(2.0, 0.0)));
        out.push(SparseSequence::basis(k).scale(Complex64::new(0.5, 0.0)));
    }
    let overlapping: Vec<usize> = reports.iter().filter(|r| !r.disjoint).map(|r| r.column).collect();
    'pairs: for (i, &j) in overlapping.iter().enumerate() {
        for &k in &overlapping[i + 1..] {
            if out.len() > 4 * n + 192 {
                break 'pairs;
            }
            let (ej, ek) = (SparseSequence::basis(j), SparseSequence::basis(k));
            out.push(&ej + &ek);
            out.push(&ej - &ek);
            out.push(&ej + &ek.scale(Complex64::new(0.0, 1.0)));
        }
    }
    for t in 0..probes {
        if t % 2 == 0 && n >= 2 {
            let pair = sample::distinct_indices(rng, n, 2);
            out.push(sample::sequence_on(rng, &pair, PROBE_RADIUS));
        } else {
            out.push(sample::random_sequence(rng, n, PROBE_SUPPORT, PROBE_RADIUS));
        }
    }
    out
}

/// Certifies isomodularity from the column structure: pairwise-disjoint
/// column supports, `p_n = p_k` on the support of column `k`, and
/// `sum_n |s_nk|^{p_k} = 1`. Together these give
/// `rho(Sx) = sum_k |x_k|^{p_k} sum_n |s_nk|^{p_k} = rho(x)`.
///
/// When the structure fails, seeded probes look for `x` with
/// `rho(Sx) != rho(x)`. Without a witness the verdict is `Inconclusive`.
pub fn check_isomodular_structural(
    m: &MatrixOperator,
    p: &ExponentSequence,
    probes: usize,
    seed: u64,
) -> IsomodularCertificate {
    let columns = column_reports(m, p);
    let regime = p.regime();
    if columns.iter().all(ColumnReport::structural) {
        return IsomodularCertificate {
            verdict: IsomodularVerdict::Isomodular,
            regime,
            columns,
        };
    }
    let mut rng = rng_from_seed(seed);
    let verdict = modular_probes(m, &columns, probes, &mut rng)
        .into_iter()
        .find_map(|x| {
            modular_mismatch(m, p, &x).map(|(modular_x, modular_image)| IsomodularVerdict::NotIsomodular {
                witness: x,
                modular_x,
                modular_image,
            })
        })
        .unwrap_or(IsomodularVerdict::Inconclusive);
    IsomodularCertificate {
        verdict,
        regime,
        columns,
    }
}

/// Randomized modular comparison: the largest relative mismatch
/// `|rho(Sx) - rho(x)| / max(1, rho(x))` over `trials` random vectors.
pub fn max_modular_discrepancy(
    m: &MatrixOperator,
    p: &ExponentSequence,
    trials: usize,
    seed: u64,
) -> Result<(f64, Option<SparseSequence>)> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    let mut worst_x = None;
    for _ in 0..trials {
        let x = sample::random_sequence(&mut rng, m.dimension(), PROBE_SUPPORT, PROBE_RADIUS);
        let rho_x = modular(&x, p)?;
        let rho_image = modular(&m.apply(&x)?, p)?;
        let d = (rho_image - rho_x).abs() / rho_x.max(1.0);
        if d > worst {
            worst = d;
            worst_x = Some(x);
        }
    }
    Ok((worst, worst_x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsometryVerdict {
    /// Evidence only: every probe kept its norm.
    Pass { probes: usize },
    Fail {
        witness: SparseSequence,
        norm_x: f64,
        norm_image: f64,
    },
}

impl IsometryVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, IsometryVerdict::Pass { .. })
    }
}

/// Compares `||Sx||` with `||x||` on basis vectors, balanced two-term vectors
/// `2^{-1/p_j} e_j + 2^{-1/p_k} e_k`, and `trials` seeded random vectors.
/// A probe fails when `| ||Sx|| - ||x|| | > tol * max(1, ||x||)`.
pub fn check_isometry_randomized(
    m: &MatrixOperator,
    p: &ExponentSequence,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<IsometryVerdict> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let n = m.dimension();
    let mut rng = rng_from_seed(seed);
    let mut count = 0;

    let mut probe = |x: SparseSequence| -> Result<Option<IsometryVerdict>> {
        count += 1;
        let norm_x = luxemburg_norm(&x, p, DEFAULT_TOL)?.value;
        let norm_image = luxemburg_norm(&m.apply(&x)?, p, DEFAULT_TOL)?.value;
        if (norm_image - norm_x).abs() > tol * norm_x.max(1.0) {
            return Ok(Some(IsometryVerdict::Fail {
                witness: x,
                norm_x,
                norm_image,
            }));
        }
        Ok(None)
    };

    for k in 1..=n {
        if let Some(fail) = probe(SparseSequence::basis(k))? {
            return Ok(fail);
        }
    }
    let all_pairs = n * n.saturating_sub(1) / 2;
    if all_pairs <= MAX_PAIR_PROBES {
        for j in 1..=n {
            for k in j + 1..=n {
                if let Some(fail) = probe(balanced_pair(p, j, k))? {
                    return Ok(fail);
                }
            }
        }
    } else {
        for _ in 0..MAX_PAIR_PROBES {
            let pair: Vec<usize> = sample::distinct_indices(&mut rng, n, 2).into_iter().collect();
            if let Some(fail) = probe(balanced_pair(p, pair[0], pair[1]))? {
                return Ok(fail);
            }
        }
    }
    for t in 0..trials {
        let x = if t % 2 == 0 && n >= 2 {
            let pair = sample::distinct_indices(&mut rng, n, 2);
            sample::sequence_on(&mut rng, &pair, PROBE_RADIUS)
        } else {
            sample::random_sequence(&mut rng, n, PROBE_SUPPORT, PROBE_RADIUS)
        };
        if let Some(fail) = probe(x)? {
            return Ok(fail);
        }
    }
    Ok(IsometryVerdict::Pass { probes: count })
}

/// `T{k} = support(S e_k)` and `h = sum_k S e_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredStructure {
    pub iso: RegularSetIso,
    pub h: SparseSequence,
}

impl RecoveredStructure {
    /// Rebuilds the columns `h * T e_k` for `k <= n` with rows `1..=rows`.
    pub fn reconstruct(&self, n: usize, rows: usize) -> Result<MatrixOperator> {
        parts_to_matrix(&self.h, &self.iso, n, rows)
    }

    pub fn apply(&self, x: &SparseSequence) -> Result<SparseSequence> {
        super::lamperti::apply_parts(&self.h, &self.iso, x)
    }

    pub fn max_multiplier_modulus(&self) -> f64 {
        self.h.sup_norm()
    }

    /// Validates `|h_n| <= 1` and packages the pair as an operator.
    pub fn into_operator(self) -> Result<LampertiOperator> {
        LampertiOperator::new(self.h, self.iso)
    }
}

/// Reads off the multiplier/set-isomorphism pair from the columns of `m`.
///
/// Requires a restricted regime. Column supports must be nonempty and
/// pairwise disjoint, as they are for every isomodular operator there.
pub fn recover_structure(m: &MatrixOperator, p: &ExponentSequence) -> Result<RecoveredStructure> {
    if !p.regime().is_restricted() {
        return Err(Error::RegimeViolation);
    }
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut family = Vec::with_capacity(m.dimension());
    let mut h = SparseSequence::zero();
    for (k, col) in m.columns() {
        if col.is_zero() {
            return Err(Error::EmptyColumn(k));
        }
        for (n, v) in col.iter() {
            if let Some(first) = owner.insert(n, k) {
                return Err(Error::SupportOverlap {
                    first,
                    second: k,
                    index: n,
                });
            }
            h.insert_nonzero(n, v);
        }
        family.push(col.support());
    }
    let iso = RegularSetIso::from_family(family)?;
    Ok(RecoveredStructure { iso, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{injection_to_matrix, injection_to_matrix_covering, InjectionMap};
    use crate::space::Tail;

    fn split_column_matrix() -> MatrixOperator {
        let c = 2f64.powf(-1.0 / 3.0);
        MatrixOperator::new(3, vec![SparseSequence::from_real([(2, c), (3, c)]).unwrap()]).unwrap()
    }

    fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn permutation_is_isomodular_for_constant_exponent() {
        let p = ExponentSequence::constant(3.0).unwrap();
        let m = injection_to_matrix(&InjectionMap::permutation(vec![3, 1, 4, 2]).unwrap(), 4).unwrap();
        assert!(check_isomodular_structural(&m, &p, DEFAULT_PROBES, 0).is_isomodular());
    }

    #[test]
    fn split_column_is_isomodular_and_probes_agree() {
        let p = ExponentSequence::constant(3.0).unwrap();
        let m = split_column_matrix();
        let cert = check_isomodular_structural(&m, &p, DEFAULT_PROBES, 0);
        assert!(cert.is_isomodular(), "{cert:?}");
        let (worst, _) = max_modular_discrepancy(&m, &p, 200, 3).unwrap();
        assert!(worst <= 1e-12, "worst {worst}");
    }

    #[test]
    fn shift_with_jump_has_scaled_witness() {
        let p = ExponentSequence::new(vec![1.0], Tail::Constant { value: 3.0 }).unwrap();
        let m = injection_to_matrix_covering(&InjectionMap::shift(1).unwrap(), 3).unwrap();
        let cert = check_isomodular_structural(&m, &p, DEFAULT_PROBES, 0);
        match cert.verdict {
            IsomodularVerdict::NotIsomodular {
                witness,
                modular_x,
                modular_image,
            } => {
                assert_eq!(witness, SparseSequence::from_real([(1, 2.0)]).unwrap());
                assert_eq!(modular_x, 2.0);
                assert_eq!(modular_image, 8.0);
            }
            other => panic!("expected witness, got {other:?}"),
        }
        assert!(!cert.columns[0].exponent_match);
        assert!(cert.columns[1].exponent_match);
    }

    #[test]
    fn mixed_regime_overlap_without_witness_is_inconclusive_or_witnessed() {
        // Rotation by 45 degrees on a 2-dimensional block with p = 2 is an
        // isometry and isomodular, yet its columns overlap.
        let p = ExponentSequence::constant(2.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = MatrixOperator::square(vec![
            SparseSequence::from_real([(1, s), (2, s)]).unwrap(),
            SparseSequence::from_real([(1, -s), (2, s)]).unwrap(),
        ])
        .unwrap();
        let cert = check_isomodular_structural(&m, &p, DEFAULT_PROBES, 0);
        assert_eq!(cert.verdict, IsomodularVerdict::Inconclusive);
        assert!(matches!(recover_structure(&m, &p), Err(Error::RegimeViolation)));
    }

    #[test]
    fn identity_passes_isometry() {
        let p = ExponentSequence::periodic(vec![1.0, 3.5, 1.2]).unwrap();
        let v = check_isometry_randomized(&MatrixOperator::identity(6), &p, 50, 1e-9, 1).unwrap();
        assert!(v.passed());
    }

    #[test]
    fn matching_injection_passes_isometry() {
        let p = ExponentSequence::periodic(vec![1.5, 1.8]).unwrap();
        let m = injection_to_matrix_covering(&InjectionMap::shift(2).unwrap(), 6).unwrap();
        assert!(check_isometry_randomized(&m, &p, 50, 1e-9, 2).unwrap().passed());
    }

    #[test]
    fn transposition_fails_with_balanced_witness() {
        let p = ExponentSequence::new(vec![1.0], Tail::Constant { value: 3.0 }).unwrap();
        let m = injection_to_matrix(&InjectionMap::permutation(vec![2, 1]).unwrap(), 2).unwrap();
        let oracle = bisect_decreasing(
            |l| 2f64.powf(-1.0 / 3.0) / l + 0.125 / (l * l * l) - 1.0,
            0.5,
            1.5,
        );
        assert!((oracle - 0.9362904469961173).abs() < 1e-10);
        match check_isometry_randomized(&m, &p, 10, 1e-9, 0).unwrap() {
            IsometryVerdict::Fail {
                witness,
                norm_x,
                norm_image,
            } => {
                assert_eq!(witness, balanced_pair(&p, 1, 2));
                assert!((norm_x - 1.0).abs() < 1e-12);
                assert!((norm_image - oracle).abs() < 1e-10);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn recovery_examples() {
        let p = ExponentSequence::constant(3.0).unwrap();
        let m = injection_to_matrix(&InjectionMap::permutation(vec![2, 3, 1]).unwrap(), 3).unwrap();
        let r = recover_structure(&m, &p).unwrap();
        assert_eq!(r.iso.image(1).unwrap(), &BTreeSet::from([2]));
        assert_eq!(r.iso.image(3).unwrap(), &BTreeSet::from([1]));
        assert_eq!(r.h, SparseSequence::from_real((1..=3).map(|n| (n, 1.0))).unwrap());

        let m = split_column_matrix();
        let r = recover_structure(&m, &p).unwrap();
        assert_eq!(r.iso.image(1).unwrap(), &BTreeSet::from([2, 3]));
        assert_eq!(r.reconstruct(1, 3).unwrap(), m);
        assert!(r.max_multiplier_modulus() <= 1.0);

        let overlap = MatrixOperator::square(vec![
            SparseSequence::from_real([(1, 1.0)]).unwrap(),
            SparseSequence::from_real([(1, 0.5), (2, 0.5)]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            recover_structure(&overlap, &p),
            Err(Error::SupportOverlap {
                first: 1,
                second: 2,
                index: 1
            })
        );
        let empty = MatrixOperator::square(vec![SparseSequence::basis(1), SparseSequence::zero()]).unwrap();
        assert_eq!(recover_structure(&empty, &p), Err(Error::EmptyColumn(2)));
    }
}
