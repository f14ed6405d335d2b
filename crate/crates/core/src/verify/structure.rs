//! Orthogonality preservation and the `(h, T)` structure of isomodular operators.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Failure, SuiteReport};
use crate::error::{Error, Result};
use crate::operators::{
    check_isomodular_structural, generate_isomodular, max_modular_discrepancy, recover_structure,
    MatrixOperator, DEFAULT_PROBES,
};
use crate::sample::{self, trial_rng};
use crate::space::{ExponentSequence, SparseSequence};
use crate::Complex64;

/// Slack above 1 tolerated for recovered multiplier moduli.
pub const H_BOUND_TOL: f64 = 1e-12;
/// Tolerance on `(Sx)_n` versus `h_n (Tx)_n`, relative to `max(1, |(Sx)_n|)`.
pub const ACTION_TOL: f64 = 1e-12;
/// Tolerance on `|rho(Sx) - rho(x)| / max(1, rho(x))` in random probes.
pub const MODULAR_PROBE_TOL: f64 = 1e-10;

pub const MAX_DIMENSION: usize = 64;
pub const MAX_IMAGE: usize = 4;

const ACTION_PROBES: usize = 20;
const MODULAR_PROBES: usize = 20;
const DISJOINT_PAIRS: usize = 20;

/// Random isomodular matrix with `2 <= N <= max_dimension` and image sizes
/// at most `max_image`.
pub fn sample_isomodular_matrix<R: Rng + ?Sized>(
    p: &ExponentSequence,
    max_dimension: usize,
    max_image: usize,
    rng: &mut R,
) -> Result<MatrixOperator> {
    let n = rng.random_range(2..=max_dimension.max(2));
    let l = generate_isomodular(p, n, max_image, rng)?;
    l.to_matrix_rect(n, l.required_rows(n))
}

fn generated(p: &ExponentSequence, op_samples: u64, seed: u64) -> Result<Vec<MatrixOperator>> {
    (0..op_samples)
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            sample_isomodular_matrix(p, MAX_DIMENSION, MAX_IMAGE, &mut rng)
        })
        .collect()
}

/// Pairs with disjoint supports: every pair of basis vectors (up to 32
/// columns) plus random splits of random supports.
fn disjoint_pairs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(SparseSequence, SparseSequence)> {
    let mut out = Vec::new();
    let basis_cap = n.min(32);
    for j in 1..=basis_cap {
        for k in j + 1..=basis_cap {
            out.push((SparseSequence::basis(j), SparseSequence::basis(k)));
        }
    }
    if n >= 2 {
        for _ in 0..DISJOINT_PAIRS {
            let size = rng.random_range(2..=n.min(16));
            let support: Vec<usize> = sample::distinct_indices(rng, n, size).into_iter().collect();
            let cut = rng.random_range(1..size);
            let a = sample::sequence_on(rng, &support[..cut].iter().copied().collect(), 10.0);
            let b = sample::sequence_on(rng, &support[cut..].iter().copied().collect(), 10.0);
            out.push((a, b));
        }
    }
    out
}

fn orthogonality_failures(trial: u64, m: &MatrixOperator, p: &ExponentSequence, seed: u64) -> Vec<Failure> {
    let mut failures = Vec::new();
    let cert = check_isomodular_structural(m, p, DEFAULT_PROBES, seed);
    if !cert.is_isomodular() {
        failures.push(Failure::new(
            trial,
            json!({"operator": m}),
            "operator certified isomodular",
            json!(cert.verdict),
        ));
    }
    let mut rng = trial_rng(seed, trial);
    for (a, b) in disjoint_pairs(m.dimension(), &mut rng) {
        let (sa, sb) = match (m.apply(&a), m.apply(&b)) {
            (Ok(sa), Ok(sb)) => (sa, sb),
            _ => continue,
        };
        if !sa.supports_disjoint(&sb) {
            failures.push(Failure::new(
                trial,
                json!({"a": a, "b": b}),
                "(Sa)(Sb) = 0 when ab = 0",
                json!({"shared": sa.pointwise(&sb).support()}),
            ));
            break;
        }
    }
    failures
}

/// Isomodular operators map disjointly supported pairs to disjointly
/// supported pairs; checked on the supplied operators.
pub fn suite_orthogonality_on(p: &ExponentSequence, ops: &[MatrixOperator], seed: u64) -> Result<SuiteReport> {
    if !p.regime().is_restricted() {
        return Err(Error::RegimeViolation);
    }
    let started = Instant::now();
    let failures: Vec<Failure> = ops
        .par_iter()
        .enumerate()
        .flat_map_iter(|(t, m)| orthogonality_failures(t as u64, m, p, seed))
        .collect();
    Ok(SuiteReport::finish("orthogonality", seed, ops.len() as u64, failures, None, started))
}

pub fn suite_orthogonality(p: &ExponentSequence, op_samples: u64, seed: u64) -> Result<SuiteReport> {
    if !p.regime().is_restricted() {
        return Err(Error::RegimeViolation);
    }
    suite_orthogonality_on(p, &generated(p, op_samples, seed)?, seed)
}

fn structure_failures(trial: u64, m: &MatrixOperator, p: &ExponentSequence, seed: u64) -> Vec<Failure> {
    let op = || json!({"operator": m});
    let mut failures = Vec::new();

    let cert = check_isomodular_structural(m, p, DEFAULT_PROBES, seed);
    if !cert.is_isomodular() {
        failures.push(Failure::new(trial, op(), "operator certified isomodular", json!(cert.verdict)));
    }

    match max_modular_discrepancy(m, p, MODULAR_PROBES, seed ^ trial) {
        Ok((worst, _)) if worst <= MODULAR_PROBE_TOL => {}
        Ok((worst, x)) => failures.push(Failure::new(
            trial,
            json!({"operator": m, "x": x}),
            "random modular probes agree to 1e-10",
            json!(worst),
        )),
        Err(e) => failures.push(Failure::new(trial, op(), "finite modular probes", json!(e.to_string()))),
    }

    let recovered = match recover_structure(m, p) {
        Ok(r) => r,
        Err(e) => {
            failures.push(Failure::new(trial, op(), "structure recovery succeeds", json!(e.to_string())));
            return failures;
        }
    };

    match recovered.reconstruct(m.dimension(), m.rows()) {
        Ok(rebuilt) if &rebuilt == m => {}
        Ok(rebuilt) => failures.push(Failure::new(
            trial,
            op(),
            "h T e_k reproduces every column exactly",
            json!({"rebuilt": rebuilt}),
        )),
        Err(e) => failures.push(Failure::new(trial, op(), "reconstruction succeeds", json!(e.to_string()))),
    }

    let h_max = recovered.max_multiplier_modulus();
    if h_max > 1.0 + H_BOUND_TOL {
        failures.push(Failure::new(trial, op(), "|h_n| <= 1", json!(h_max)));
    }

    let mut rng = trial_rng(seed ^ 0x5eed, trial);
    for _ in 0..ACTION_PROBES {
        let x = sample::random_sequence(&mut rng, m.dimension(), 16, 10.0);
        let (Ok(direct), Ok(factored)) = (m.apply(&x), recovered.apply(&x)) else {
            failures.push(Failure::new(trial, json!({"x": x}), "operator applies to x", json!(null)));
            break;
        };
        let support: std::collections::BTreeSet<usize> =
            direct.support().union(&factored.support()).copied().collect();
        let worst = support
            .iter()
            .map(|&n| {
                let (u, v): (Complex64, Complex64) = (direct.get(n), factored.get(n));
                (u - v).norm() / u.norm().max(1.0)
            })
            .fold(0.0, f64::max);
        if worst > ACTION_TOL {
            failures.push(Failure::new(
                trial,
                json!({"operator": m, "x": x}),
                "(Sx)_n = h_n (Tx)_n",
                json!(worst),
            ));
            break;
        }
    }
    failures
}

/// Certification, recovery, exact reconstruction, `|h| <= 1`, the action
/// identity and random modular probes, on the supplied operators.
pub fn suite_structure_theorem_on(p: &ExponentSequence, ops: &[MatrixOperator], seed: u64) -> Result<SuiteReport> {
    if !p.regime().is_restricted() {
        return Err(Error::RegimeViolation);
    }
    let started = Instant::now();
    let failures: Vec<Failure> = ops
        .par_iter()
        .enumerate()
        .flat_map_iter(|(t, m)| structure_failures(t as u64, m, p, seed))
        .collect();
    Ok(SuiteReport::finish("structure", seed, ops.len() as u64, failures, None, started))
}

pub fn suite_structure_theorem(p: &ExponentSequence, op_samples: u64, seed: u64) -> Result<SuiteReport> {
    if !p.regime().is_restricted() {
        return Err(Error::RegimeViolation);
    }
    suite_structure_theorem_on(p, &generated(p, op_samples, seed)?, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// One multiplier entry rescaled to modulus 1.2.
    MultiplierModulus,
    /// One column gains an index already used by another column.
    SupportOverlap,
}

/// Corrupts `m` in place of one randomly chosen entry. `SupportOverlap`
/// needs at least two columns.
pub fn inject_fault<R: Rng + ?Sized>(m: &MatrixOperator, fault: Fault, rng: &mut R) -> MatrixOperator {
    let mut out = m.clone();
    let n = out.dimension();
    let cols = out.columns_mut();
    match fault {
        Fault::MultiplierModulus => {
            let candidates: Vec<usize> = (0..n).filter(|&i| !cols[i].is_zero()).collect();
            let k = candidates[rng.random_range(0..candidates.len())];
            let entries: Vec<(usize, Complex64)> = cols[k].iter().collect();
            let (row, v) = entries[rng.random_range(0..entries.len())];
            cols[k].insert_nonzero(row, v / v.norm() * 1.2);
        }
        Fault::SupportOverlap => {
            assert!(n >= 2, "support overlap needs two columns");
            let picked: Vec<usize> = sample::distinct_indices(rng, n, 2).into_iter().map(|i| i - 1).collect();
            let (from, to) = if rng.random::<bool>() {
                (picked[0], picked[1])
            } else {
                (picked[1], picked[0])
            };
            let rows: Vec<usize> = cols[from].iter().map(|(r, _)| r).collect();
            let row = rows[rng.random_range(0..rows.len())];
            let value = sample::complex_in_annulus(rng, 0.1, 1.0);
            cols[to].insert_nonzero(row, value);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{injection_to_matrix, InjectionMap};

    #[test]
    fn identity_and_permutation_preserve_orthogonality() {
        let p = ExponentSequence::constant(3.0).unwrap();
        let id = MatrixOperator::identity(3);
        let perm = injection_to_matrix(&InjectionMap::permutation(vec![3, 1, 2]).unwrap(), 3).unwrap();
        let r = suite_orthogonality_on(&p, &[id.clone(), perm.clone()], 0).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        let a = &SparseSequence::basis(1) + &SparseSequence::basis(3);
        let b = SparseSequence::basis(2);
        assert!(perm.apply(&a).unwrap().supports_disjoint(&perm.apply(&b).unwrap()));
    }

    #[test]
    fn generated_suites_pass() {
        let p = ExponentSequence::constant(3.0).unwrap();
        assert!(suite_orthogonality(&p, 20, 4).unwrap().pass);
        let r = suite_structure_theorem(&p, 20, 4).unwrap();
        assert!(r.pass, "{:?}", r.failures.first());
        let q = ExponentSequence::periodic(vec![1.1, 1.6, 1.6, 1.9]).unwrap();
        let r = suite_structure_theorem(&q, 20, 9).unwrap();
        assert!(r.pass, "{:?}", r.failures.first());
    }

    #[test]
    fn mixed_regime_rejected() {
        let p = ExponentSequence::periodic(vec![1.5, 3.0]).unwrap();
        assert_eq!(suite_structure_theorem(&p, 1, 0), Err(Error::RegimeViolation));
        assert_eq!(suite_orthogonality(&p, 1, 0), Err(Error::RegimeViolation));
    }

    #[test]
    fn faults_are_reported() {
        let p = ExponentSequence::constant(3.0).unwrap();
        let mut rng = crate::sample::rng_from_seed(2);
        let m = sample_isomodular_matrix(&p, 8, 4, &mut rng).unwrap();
        let bad_h = inject_fault(&m, Fault::MultiplierModulus, &mut rng);
        let r = suite_structure_theorem_on(&p, &[bad_h], 0).unwrap();
        assert!(r.failures.iter().any(|f| f.expected == "|h_n| <= 1"));
        let overlap = inject_fault(&m, Fault::SupportOverlap, &mut rng);
        let r = suite_structure_theorem_on(&p, std::slice::from_ref(&overlap), 0).unwrap();
        assert!(r.failures.iter().any(|f| f.expected == "structure recovery succeeds"));
        let r = suite_orthogonality_on(&p, &[overlap], 0).unwrap();
        assert!(r.failures.iter().any(|f| f.expected == "(Sa)(Sb) = 0 when ab = 0"));
    }
}
