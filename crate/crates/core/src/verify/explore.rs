//! Random search for operators that keep norms but not modulars.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operators::{check_isometry_randomized, max_modular_discrepancy, IsometryVerdict, MatrixOperator};
use crate::sample::{self, trial_rng};
use crate::space::{luxemburg_norm, ExponentSequence, SparseSequence, DEFAULT_TOL};
use crate::Complex64;

/// Tolerance of the first isometry screen.
pub const SCREEN_TOL: f64 = 1e-8;
/// Tolerance of the confirmation pass, ten times tighter.
pub const CONFIRM_TOL: f64 = 1e-9;
/// Relative modular mismatch a candidate must show.
pub const MODULAR_GAP: f64 = 1e-9;

const SCREEN_TRIALS: usize = 40;
const CONFIRM_TRIALS: usize = 400;
const MODULAR_TRIALS: usize = 200;

pub const EMPTY_NOTE: &str = "No candidates found. A finite random search is not evidence that \
                              isometric operators are isomodular.";
pub const FOUND_NOTE: &str = "Candidates passed randomized isometry checks only. They are \
                              unverified and need independent inspection.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `e_k -> c_k e_theta(k)` with unimodular `c_k`.
    SignedInjection,
    /// Each column spread over fresh rows, normalized to unit norm.
    DisjointSplit,
    /// Dense columns on shared rows, normalized to unit norm.
    DenseColumns,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub trial: u64,
    pub family: Family,
    pub operator: MatrixOperator,
    pub isometry_probes: usize,
    pub modular_witness: SparseSequence,
    pub modular_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreReport {
    pub seed: u64,
    pub budget: u64,
    pub screened_isometric: u64,
    pub candidates: Vec<Candidate>,
    pub note: String,
}

fn unit_column(column: SparseSequence, p: &ExponentSequence) -> Result<SparseSequence> {
    let norm = luxemburg_norm(&column, p, DEFAULT_TOL)?.value;
    Ok(column.scale(Complex64::new(1.0 / norm, 0.0)))
}

fn sample_operator<R: Rng + ?Sized>(
    rng: &mut R,
    family: Family,
    p: &ExponentSequence,
) -> Result<MatrixOperator> {
    let dim = rng.random_range(2..=3);
    let columns: Vec<SparseSequence> = match family {
        Family::SignedInjection => {
            let rows: Vec<usize> = sample::distinct_indices(rng, 2 * dim, dim).into_iter().collect();
            let mut rows = rows;
            rand::seq::SliceRandom::shuffle(rows.as_mut_slice(), rng);
            rows.into_iter()
                .map(|r| sample::unit_phase(rng) * &SparseSequence::basis(r))
                .collect()
        }
        Family::DisjointSplit => {
            let mut pool: Vec<usize> = (1..=3 * dim).collect();
            rand::seq::SliceRandom::shuffle(pool.as_mut_slice(), rng);
            let mut columns = Vec::with_capacity(dim);
            for _ in 0..dim {
                let size = rng.random_range(1..=2);
                let support = pool.split_off(pool.len() - size).into_iter().collect();
                columns.push(unit_column(sample::sequence_on(rng, &support, 1.0), p)?);
            }
            columns
        }
        Family::DenseColumns => (0..dim)
            .map(|_| {
                let support = (1..=dim).collect();
                unit_column(sample::sequence_on(rng, &support, 1.0), p)
            })
            .collect::<Result<_>>()?,
    };
    let rows = columns.iter().filter_map(SparseSequence::max_index).max().unwrap_or(dim).max(dim);
    MatrixOperator::new(rows, columns)
}

fn examine(p: &ExponentSequence, seed: u64, trial: u64) -> Result<(bool, Option<Candidate>)> {
    let mut rng = trial_rng(seed, trial);
    let family = match trial % 3 {
        0 => Family::SignedInjection,
        1 => Family::DisjointSplit,
        _ => Family::DenseColumns,
    };
    let m = sample_operator(&mut rng, family, p)?;
    if !check_isometry_randomized(&m, p, SCREEN_TRIALS, SCREEN_TOL, seed ^ trial)?.passed() {
        return Ok((false, None));
    }
    let (mismatch, witness) = max_modular_discrepancy(&m, p, MODULAR_TRIALS, seed ^ trial)?;
    if mismatch <= MODULAR_GAP {
        return Ok((true, None));
    }
    let confirm_seed = seed.rotate_left(17) ^ trial;
    let IsometryVerdict::Pass { probes } = check_isometry_randomized(&m, p, CONFIRM_TRIALS, CONFIRM_TOL, confirm_seed)?
    else {
        return Ok((true, None));
    };
    Ok((
        true,
        witness.map(|modular_witness| Candidate {
            trial,
            family,
            operator: m,
            isometry_probes: probes,
            modular_witness,
            modular_mismatch: mismatch,
        }),
    ))
}

/// Samples `budget` small operators, keeps those that pass the isometry
/// screen, and reports the ones that also show a modular mismatch and
/// survive a second isometry pass at ten times tighter tolerance.
pub fn explore_isometric_not_isomodular(p: &ExponentSequence, budget: u64, seed: u64) -> Result<ExploreReport> {
    let outcomes: Vec<Result<(bool, Option<Candidate>)>> =
        (0..budget).into_par_iter().map(|t| examine(p, seed, t)).collect();
    let mut screened = 0;
    let mut candidates = Vec::new();
    for outcome in outcomes {
        let (isometric, candidate) = outcome?;
        screened += isometric as u64;
        candidates.extend(candidate);
    }
    let note = if candidates.is_empty() { EMPTY_NOTE } else { FOUND_NOTE };
    Ok(ExploreReport {
        seed,
        budget,
        screened_isometric: screened,
        candidates,
        note: note.to_string(),
    })
}
