//! Exponent sequences, sparse sequences, the modular and the Luxemburg norm.

mod exponent;
mod norm;
mod sequence;

pub use exponent::{classify_regime, exponent_at, ExponentSequence, Regime, Tail};
pub use norm::{
    luxemburg_norm, modular, modular_with_cap, norm, norm_constant_p_oracle, KahanSum,
    NormResult, DEFAULT_P_MAX, DEFAULT_TOL, MAX_ITERATIONS,
};
pub use sequence::{basis_vector, SparseSequence};

pub(crate) use sequence::{from_triples, to_triples, EntryTriple};
