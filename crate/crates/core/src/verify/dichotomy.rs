//! When `S_theta` is an isometry: the exact exponent criterion against
//! randomized norm comparison, with the two-term witness on every failure.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Failure, SuiteReport};
use crate::error::Result;
use crate::operators::{
    apply_injection, check_isometry_randomized, injection_to_matrix_covering, theta_isometry_decision,
    InjectionMap, IsometryVerdict, ThetaDecision,
};
use crate::sample::trial_rng;
use crate::space::{luxemburg_norm, ExponentSequence, Tail, DEFAULT_TOL};

/// Tolerance of the randomized norm comparison.
pub const ISOMETRY_TOL: f64 = 1e-9;
/// `||b||` must be within this of 1.
pub const WITNESS_UNIT_TOL: f64 = 1e-9;
/// `| ||S_theta b|| - 1 |` must exceed this.
pub const WITNESS_GAP: f64 = 1e-6;
/// Random probes per case, on top of basis and balanced-pair probes.
pub const CASE_TRIALS: usize = 16;

/// Exponent values the sampler draws from.
pub const EXPONENT_VALUES: [f64; 5] = [1.0, 1.5, 1.8, 3.0, 5.0];
const TRUNCATION: usize = 8;

/// Everything computed for one `(theta, p)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyCase {
    pub theta: InjectionMap,
    pub p: ExponentSequence,
    pub n: usize,
    pub decision: ThetaDecision,
    pub randomized: IsometryVerdict,
    /// `(||b||, ||S_theta b||)` for the witness, when `S_theta b` is defined.
    pub witness_norms: Option<(f64, f64)>,
}

impl DichotomyCase {
    pub fn witness_gap(&self) -> Option<f64> {
        self.witness_norms.map(|(_, image)| (image - 1.0).abs())
    }
}

/// Runs the decision, the randomized check on the `n`-column truncation,
/// and the witness norms.
pub fn shift_dichotomy_case(
    theta: &InjectionMap,
    p: &ExponentSequence,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<DichotomyCase> {
    let decision = theta_isometry_decision(theta, p, n);
    let m = injection_to_matrix_covering(theta, n)?;
    let randomized = check_isometry_randomized(&m, p, trials, ISOMETRY_TOL, seed)?;
    let witness_norms = match &decision {
        ThetaDecision::NotIsometric { witness, .. } => match apply_injection(theta, witness) {
            Ok(image) => Some((
                luxemburg_norm(witness, p, DEFAULT_TOL)?.value,
                luxemburg_norm(&image, p, DEFAULT_TOL)?.value,
            )),
            Err(_) => None,
        },
        ThetaDecision::Isometric => None,
    };
    Ok(DichotomyCase {
        theta: theta.clone(),
        p: p.clone(),
        n,
        decision,
        randomized,
        witness_norms,
    })
}

/// Whether `p_k == p_{k+offset}` for every `k`, decided on one prefix
/// plus one period of the tail.
pub fn shift_preserves_exponents(p: &ExponentSequence, offset: usize) -> bool {
    let period = match p.tail() {
        Tail::Constant { .. } => 1,
        Tail::Periodic { pattern } => pattern.len(),
    };
    (1..=p.prefix().len() + period).all(|k| p.at(k) == p.at(k + offset))
}

/// Contract violations of one case.
pub fn dichotomy_failures(trial: u64, case: &DichotomyCase) -> Vec<Failure> {
    let input = || json!({"theta": case.theta, "p": case.p, "n": case.n});
    let mut failures = Vec::new();
    let isometric = matches!(case.decision, ThetaDecision::Isometric);
    if isometric != case.randomized.passed() {
        failures.push(Failure::new(
            trial,
            input(),
            "decision agrees with randomized norm check",
            json!({"decision": case.decision, "randomized": case.randomized}),
        ));
    }
    if let Some((norm_b, norm_image)) = case.witness_norms {
        if (norm_b - 1.0).abs() > WITNESS_UNIT_TOL {
            failures.push(Failure::new(trial, input(), "||b|| = 1 +- 1e-9", json!(norm_b)));
        }
        if (norm_image - 1.0).abs() <= WITNESS_GAP {
            failures.push(Failure::new(trial, input(), "| ||S b|| - 1 | > 1e-6", json!(norm_image)));
        }
    }
    if let InjectionMap::Shift { offset } = case.theta {
        if case.p.prefix().is_empty() {
            let period_divides = case.p.minimal_period().is_some_and(|d| offset % d == 0);
            if period_divides != isometric {
                failures.push(Failure::new(
                    trial,
                    input(),
                    "shift isometric iff the period divides the offset",
                    json!({"minimal_period": case.p.minimal_period(), "decision": case.decision}),
                ));
            }
        }
    }
    failures
}

fn pick<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    EXPONENT_VALUES[rng.random_range(0..EXPONENT_VALUES.len())]
}

fn sample_exponents<R: Rng + ?Sized>(rng: &mut R) -> ExponentSequence {
    match rng.random_range(0..3) {
        0 => ExponentSequence::constant(pick(rng)),
        1 => {
            let len = rng.random_range(1..=4);
            ExponentSequence::periodic((0..len).map(|_| pick(rng)).collect())
        }
        _ => {
            let len = rng.random_range(1..=4);
            let pattern: Vec<f64> = (0..len).map(|_| pick(rng)).collect();
            let prefix: Vec<f64> = (0..rng.random_range(1..=3)).map(|_| pick(rng)).collect();
            ExponentSequence::new(prefix, Tail::Periodic { pattern })
        }
    }
    .expect("sampled exponents are valid")
}

fn sample_theta<R: Rng + ?Sized>(rng: &mut R) -> (InjectionMap, usize) {
    match rng.random_range(0..3) {
        0 => (InjectionMap::shift(rng.random_range(1..=4)).expect("positive offset"), TRUNCATION),
        1 => {
            let m = rng.random_range(2..=6);
            let mut table: Vec<usize> = (1..=m).collect();
            table.shuffle(rng);
            (InjectionMap::permutation(table).expect("shuffled range"), TRUNCATION)
        }
        _ => {
            let m = rng.random_range(2..=6);
            let table: Vec<usize> = crate::sample::distinct_indices(rng, 2 * m, m).into_iter().collect();
            let mut table = table;
            table.shuffle(rng);
            (InjectionMap::table(table).expect("distinct values"), m)
        }
    }
}

/// Failures, witness gap and whether the decision was `Isometric`.
type TrialOutcome = (Vec<Failure>, Option<f64>, bool);

/// Samples shifts, permutations and injective tables against constant,
/// periodic and perturbed exponent sequences.
pub fn suite_shift_dichotomy(trials: u64, seed: u64) -> Result<SuiteReport> {
    let started = Instant::now();
    let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let p = sample_exponents(&mut rng);
            let (theta, n) = sample_theta(&mut rng);
            let case = shift_dichotomy_case(&theta, &p, n, CASE_TRIALS, seed ^ t)?;
            let isometric = matches!(case.decision, ThetaDecision::Isometric);
            Ok((dichotomy_failures(t, &case), case.witness_gap(), isometric))
        })
        .collect();
    let mut failures = Vec::new();
    let (mut isometric, mut min_gap, mut unchecked) = (0u64, f64::INFINITY, 0u64);
    for outcome in outcomes {
        let (f, gap, iso) = outcome?;
        failures.extend(f);
        isometric += iso as u64;
        match gap {
            Some(g) => min_gap = min_gap.min(g),
            None if !iso => unchecked += 1,
            None => {}
        }
    }
    let metrics = json!({
        "isometric": isometric,
        "not_isometric": trials - isometric,
        "min_witness_gap": min_gap.is_finite().then_some(min_gap),
        "witness_image_undefined": unchecked,
    });
    Ok(SuiteReport::finish("shift-dichotomy", seed, trials, failures, Some(metrics), started))
}
