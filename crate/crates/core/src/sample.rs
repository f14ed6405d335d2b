//! Seeded samplers shared by the checkers and the verification suites.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::SparseSequence;
use crate::Complex64;

pub type SuiteRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> SuiteRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform on the closed disk of the given radius.
pub fn complex_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phase)
}

/// Uniform on the annulus `floor <= |z| <= radius`.
pub fn complex_in_annulus<R: Rng + ?Sized>(rng: &mut R, floor: f64, radius: f64) -> Complex64 {
    let lo = floor * floor;
    let hi = radius * radius;
    let r = (lo + (hi - lo) * rng.random::<f64>()).sqrt();
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phase)
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// `count` distinct indices from `1..=max_index`, ascending.
pub fn distinct_indices<R: Rng + ?Sized>(rng: &mut R, max_index: usize, count: usize) -> BTreeSet<usize> {
    let count = count.min(max_index);
    index::sample(rng, max_index, count)
        .into_iter()
        .map(|i| i + 1)
        .collect()
}

/// Sequence supported on `support` with entries uniform on the disk.
pub fn sequence_on<R: Rng + ?Sized>(rng: &mut R, support: &BTreeSet<usize>, radius: f64) -> SparseSequence {
    SparseSequence::from_entries(support.iter().map(|&n| (n, complex_in_disk(rng, radius))))
        .expect("positive indices and finite entries")
}

/// Random sequence with support size uniform in `1..=max_support` inside
/// `1..=max_index` and entries uniform on the disk of `radius`.
pub fn random_sequence<R: Rng + ?Sized>(
    rng: &mut R,
    max_index: usize,
    max_support: usize,
    radius: f64,
) -> SparseSequence {
    let size = rng.random_range(1..=max_support.min(max_index).max(1));
    let support = distinct_indices(rng, max_index, size);
    sequence_on(rng, &support, radius)
}
