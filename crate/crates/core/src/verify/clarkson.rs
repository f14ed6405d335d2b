//! The four-modular gap `rho(a+b) + rho(a-b) - 2 rho(a) - 2 rho(b)`.
//!
//! Per index the summand is `|a_n+b_n|^p + |a_n-b_n|^p - 2|a_n|^p - 2|b_n|^p`,
//! which has one sign for `p > 2`, the other for `p < 2`, and vanishes exactly
//! when `a_n b_n = 0`.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Failure, SuiteReport};
use crate::error::{Error, Result};
use crate::sample::{self, trial_rng};
use crate::space::{modular, ExponentSequence, KahanSum, Regime, SparseSequence};

/// Sign tolerance, relative to `max(1, 2 rho(a) + 2 rho(b))`.
pub const SIGN_TOL: f64 = 1e-9;
/// Bound on `|gap|` for disjoint supports.
pub const DISJOINT_TOL: f64 = 1e-9;
/// Lower bound on `|gap|` in the strictness branch.
pub const STRICT_GAP: f64 = 1e-6;
/// Magnitude floor at the shared index in the strictness branch.
pub const MAGNITUDE_FLOOR: f64 = 0.1;

const INDEX_RANGE: usize = 48;
const MAX_SUPPORT: usize = 16;
const RADIUS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarksonGapSample {
    pub a: SparseSequence,
    pub b: SparseSequence,
    pub gap: f64,
    pub disjoint: bool,
}

/// The gap, with the four modular sums grouped index by index. Indices
/// where only one of `a`, `b` is nonzero contribute exactly zero.
pub fn clarkson_gap(
    a: &SparseSequence,
    b: &SparseSequence,
    p: &ExponentSequence,
) -> Result<ClarksonGapSample> {
    // Range checks on the exponents and overflow detection.
    modular(a, p)?;
    modular(b, p)?;
    let indices: BTreeSet<usize> = a.support().union(&b.support()).copied().collect();
    let mut acc = KahanSum::default();
    for n in indices {
        let exponent = p.at(n);
        let (x, y) = (a.get(n), b.get(n));
        let pow = |z: crate::Complex64| z.norm().powf(exponent);
        let term = (pow(x + y) + pow(x - y)) - 2.0 * (pow(x) + pow(y));
        if !term.is_finite() {
            return Err(Error::Overflow { index: n, exponent });
        }
        acc.add(term);
    }
    Ok(ClarksonGapSample {
        a: a.clone(),
        b: b.clone(),
        gap: acc.value(),
        disjoint: a.supports_disjoint(b),
    })
}

/// Magnitude floor used at the shared index of a strictness trial. The
/// per-index gap scales like `|z|^p`, so for large exponents a fixed floor
/// of 0.1 gives gaps far below [`STRICT_GAP`]; raising the floor to
/// `10^{-3/p}` keeps `|z|^p >= 1e-3`.
pub fn strictness_floor(exponent: f64) -> f64 {
    MAGNITUDE_FLOOR.max(10f64.powf(-3.0 / exponent))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Disjoint,
    Strict,
    Generic,
}

fn sample_pair<R: Rng + ?Sized>(
    rng: &mut R,
    p: &ExponentSequence,
    branch: Branch,
) -> (SparseSequence, SparseSequence) {
    match branch {
        Branch::Disjoint => {
            let sa = rng.random_range(1..=MAX_SUPPORT);
            let sb = rng.random_range(1..=MAX_SUPPORT);
            let all: Vec<usize> = sample::distinct_indices(rng, INDEX_RANGE, sa + sb).into_iter().collect();
            let mut shuffled = all.clone();
            rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), rng);
            let (left, right) = shuffled.split_at(sa);
            let a = sample::sequence_on(rng, &left.iter().copied().collect(), RADIUS);
            let b = sample::sequence_on(rng, &right.iter().copied().collect(), RADIUS);
            (a, b)
        }
        Branch::Strict => {
            let mut a = sample::random_sequence(rng, INDEX_RANGE, MAX_SUPPORT, RADIUS);
            let mut b = sample::random_sequence(rng, INDEX_RANGE, MAX_SUPPORT, RADIUS);
            let n = rng.random_range(1..=INDEX_RANGE);
            let floor = strictness_floor(p.at(n));
            a.insert_nonzero(n, sample::complex_in_annulus(rng, floor, RADIUS));
            b.insert_nonzero(n, sample::complex_in_annulus(rng, floor, RADIUS));
            (a, b)
        }
        Branch::Generic => (
            sample::random_sequence(rng, INDEX_RANGE, MAX_SUPPORT, RADIUS),
            sample::random_sequence(rng, INDEX_RANGE, MAX_SUPPORT, RADIUS),
        ),
    }
}

fn has_floored_overlap(a: &SparseSequence, b: &SparseSequence) -> bool {
    a.iter()
        .any(|(n, x)| x.norm() >= MAGNITUDE_FLOOR && b.get(n).norm() >= MAGNITUDE_FLOOR)
}

fn has_strict_overlap(a: &SparseSequence, b: &SparseSequence, p: &ExponentSequence) -> bool {
    a.iter().any(|(n, x)| {
        let floor = strictness_floor(p.at(n));
        x.norm() >= floor && b.get(n).norm() >= floor
    })
}

/// Checks one pair against the regime's sign, the disjoint equality case and
/// strictness. Returns the violated contracts.
pub fn check_clarkson_pair(
    trial: u64,
    a: &SparseSequence,
    b: &SparseSequence,
    p: &ExponentSequence,
    regime: Regime,
) -> Vec<Failure> {
    let input = || json!({"a": a, "b": b});
    let sample = match clarkson_gap(a, b, p) {
        Ok(s) => s,
        Err(e) => {
            return vec![Failure::new(trial, input(), "finite modulars", json!(e.to_string()))];
        }
    };
    let gap = sample.gap;
    let scale = (2.0 * (modular(a, p).unwrap_or(0.0) + modular(b, p).unwrap_or(0.0))).max(1.0);
    let mut failures = Vec::new();
    match regime {
        Regime::AllAboveTwo if gap < -SIGN_TOL * scale => {
            failures.push(Failure::new(trial, input(), "gap >= 0 for exponents above 2", json!(gap)));
        }
        Regime::AllBelowTwo if gap > SIGN_TOL * scale => {
            failures.push(Failure::new(trial, input(), "gap <= 0 for exponents below 2", json!(gap)));
        }
        _ => {}
    }
    if sample.disjoint && gap.abs() > DISJOINT_TOL {
        failures.push(Failure::new(trial, input(), "|gap| <= 1e-9 for disjoint supports", json!(gap)));
    }
    if has_floored_overlap(a, b) && gap == 0.0 {
        failures.push(Failure::new(trial, input(), "gap != 0 when a_n b_n != 0", json!(gap)));
    }
    if has_strict_overlap(a, b, p) && gap.abs() <= STRICT_GAP {
        failures.push(Failure::new(trial, input(), "|gap| > 1e-6 at a floored shared index", json!(gap)));
    }
    failures
}

/// Randomized check of the modular Clarkson inequality and its equality case.
pub fn suite_clarkson(p: &ExponentSequence, trials: u64, seed: u64) -> Result<SuiteReport> {
    let regime = p.regime();
    if !regime.is_restricted() {
        return Err(Error::RegimeViolation);
    }
    let started = Instant::now();
    let failures: Vec<Failure> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|t| {
            let mut rng = trial_rng(seed, t);
            let branch = match t % 3 {
                0 => Branch::Disjoint,
                1 => Branch::Strict,
                _ => Branch::Generic,
            };
            let (a, b) = sample_pair(&mut rng, p, branch);
            check_clarkson_pair(t, &a, &b, p, regime)
        })
        .collect();
    Ok(SuiteReport::finish("clarkson", seed, trials, failures, None, started))
}
