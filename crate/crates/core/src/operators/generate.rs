use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use super::lamperti::LampertiOperator;
use crate::error::{Error, Result};
use crate::sample;
use crate::set_iso::RegularSetIso;
use crate::space::{ExponentSequence, SparseSequence, Tail};

/// Random isomodular operator on `span{e_1..e_dimension}`.
///
/// Column `k` is spread over up to `max_image` fresh indices `n` with
/// `p_n == p_k`, carrying random phases and moduli with
/// `sum_n |h_n|^{p_k} = 1`.
pub fn generate_isomodular<R: Rng + ?Sized>(
    p: &ExponentSequence,
    dimension: usize,
    max_image: usize,
    rng: &mut R,
) -> Result<LampertiOperator> {
    let period = match p.tail() {
        Tail::Constant { .. } => 1,
        Tail::Periodic { pattern } => pattern.len(),
    };
    let max_image = max_image.max(1);
    let rows = p.prefix().len() + period * dimension * max_image + dimension;

    let mut pools: HashMap<u64, Vec<usize>> = HashMap::new();
    for n in 1..=rows {
        pools.entry(p.at(n).to_bits()).or_default().push(n);
    }
    for pool in pools.values_mut() {
        pool.shuffle(rng);
    }

    let mut family = Vec::with_capacity(dimension);
    let mut h = SparseSequence::zero();
    for k in 1..=dimension {
        let exponent = p.at(k);
        let pool = pools.get_mut(&exponent.to_bits()).expect("k itself is in its pool");
        let want = rng.random_range(1..=max_image).min(pool.len());
        if want == 0 {
            return Err(Error::GeneratorExhausted(k));
        }
        let image: Vec<usize> = pool.split_off(pool.len() - want);
        let weights: Vec<f64> = image.iter().map(|_| rng.random_range(0.05..=1.0)).collect();
        let total: f64 = weights.iter().sum();
        for (&n, w) in image.iter().zip(&weights) {
            let modulus = if want == 1 { 1.0 } else { (w / total).powf(1.0 / exponent) };
            h.insert_nonzero(n, sample::unit_phase(rng) * modulus);
        }
        family.push(image.into_iter().collect::<BTreeSet<usize>>());
    }
    LampertiOperator::new(h, RegularSetIso::from_family(family)?)
}
