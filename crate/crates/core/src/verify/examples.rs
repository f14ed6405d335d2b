//! The sequence `a = sum_k (1/k) e_{2k}` against `p = (1, 2, 1, 2, ...)`:
//! `rho(a)` stays below `pi^2/6`, while moving each entry onto an odd index
//! (by the shift, or by the adjacent transpositions) turns it into the
//! harmonic series.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Failure, SuiteReport};
use crate::operators::{apply_injection, InjectionMap};
use crate::space::{modular, ExponentSequence, SparseSequence};

/// Tolerance against the harmonic-number oracle.
pub const HARMONIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example41 {
    pub n: usize,
    pub modular_a: f64,
    #[serde(rename = "modular_Sa")]
    pub modular_sa: f64,
}

pub fn alternating_exponents() -> ExponentSequence {
    ExponentSequence::periodic(vec![1.0, 2.0]).expect("valid pattern")
}

/// `sum_{k <= n} (1/k) e_{2k}`.
pub fn harmonic_even_sequence(n: usize) -> SparseSequence {
    SparseSequence::from_real((1..=n).map(|k| (2 * k, 1.0 / k as f64))).expect("finite entries")
}

/// `(rho(a), rho(Sa))` for the truncation `a = sum_{k <= n} (1/k) e_{2k}`
/// and the unilateral shift `S`.
pub fn reproduce_example_41(n: usize) -> Example41 {
    let p = alternating_exponents();
    let a = harmonic_even_sequence(n);
    let sa = apply_injection(&InjectionMap::shift(1).expect("offset 1"), &a).expect("shift is total");
    Example41 {
        n,
        modular_a: modular(&a, &p).expect("bounded exponents"),
        modular_sa: modular(&sa, &p).expect("bounded exponents"),
    }
}

/// `rho(S_Gamma a)` with `Gamma(n) = n - (-1)^n`.
pub fn transposed_modular(n: usize) -> f64 {
    let p = alternating_exponents();
    let a = harmonic_even_sequence(n);
    let gamma = InjectionMap::adjacent_transpositions(n);
    modular(&apply_injection(&gamma, &a).expect("permutation is total"), &p).expect("bounded exponents")
}

/// `H_m` summed from the smallest term up.
fn harmonic_reverse(m: usize) -> f64 {
    (1..=m).rev().map(|k| 1.0 / k as f64).sum()
}

/// Checkpoints `1..=min(n, 64)`, then roughly 8 per decade, then `n`.
pub fn checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=n.min(64)).collect();
    let mut x = 64.0f64;
    while (x as usize) < n {
        x *= 10f64.powf(0.125);
        let m = (x.round() as usize).min(n);
        if m > *out.last().unwrap_or(&0) {
            out.push(m);
        }
    }
    out
}

/// Compares `rho(S_Gamma a)` with `H_m` at every checkpoint `m <= n` and
/// checks that it grows strictly.
pub fn reproduce_example_42(n: usize) -> SuiteReport {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut previous = 0.0;
    let points = checkpoints(n);
    for (t, &m) in points.iter().enumerate() {
        let t = t as u64;
        let value = transposed_modular(m);
        let oracle = harmonic_reverse(m);
        if (value - oracle).abs() > HARMONIC_TOL {
            failures.push(Failure::new(
                t,
                json!({"n": m}),
                "rho(S_Gamma a) = H_n to 1e-12",
                json!({"modular": value, "harmonic": oracle}),
            ));
        }
        if value <= previous {
            failures.push(Failure::new(
                t,
                json!({"n": m}),
                "rho(S_Gamma a) strictly increasing in n",
                json!({"modular": value, "previous": previous}),
            ));
        }
        previous = value;
    }
    let metrics = json!({"n": n, "modular_Sa": previous, "checkpoints": points.len()});
    SuiteReport::finish("example-42", 0, points.len() as u64, failures, Some(metrics), started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_terms() {
        let e = reproduce_example_41(1);
        assert_eq!((e.modular_a, e.modular_sa), (1.0, 1.0));
        assert_eq!(transposed_modular(1), 1.0);
    }

    #[test]
    fn twenty_terms() {
        let e = reproduce_example_41(20);
        assert!((e.modular_a - 1.5961632439130233).abs() < 1e-14);
        assert!((e.modular_sa - 3.597_739_657_143_682).abs() < 1e-14);
        assert!((transposed_modular(20) - 3.597_739_657_143_682).abs() < 1e-14);
    }

    #[test]
    fn harmonic_crosses_five_at_83() {
        assert!(reproduce_example_41(82).modular_sa < 5.0);
        let e = reproduce_example_41(83);
        assert!((e.modular_sa - 5.002_068_272_680_166).abs() < 1e-13);
    }

    #[test]
    fn checkpoints_are_increasing_and_end_at_n() {
        for n in [1, 5, 64, 65, 1000, 123457] {
            let c = checkpoints(n);
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*c.last().unwrap(), n);
        }
    }

    #[test]
    fn transposition_report_passes() {
        let r = reproduce_example_42(500);
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.metrics.unwrap()["n"], 500);
    }

    #[test]
    fn serialized_field_names() {
        let text = serde_json::to_string(&reproduce_example_41(1)).unwrap();
        assert_eq!(text, r#"{"n":1,"modular_a":1.0,"modular_Sa":1.0}"#);
    }
}
