//! Seeded verification suites. Trials run in parallel; each draws from its
//! own random stream, so a report depends only on its seed and trial count.

mod clarkson;
mod dichotomy;
mod examples;
mod explore;
mod report;
mod structure;

pub use clarkson::{
    check_clarkson_pair, clarkson_gap, strictness_floor, suite_clarkson, ClarksonGapSample, DISJOINT_TOL,
    MAGNITUDE_FLOOR, SIGN_TOL, STRICT_GAP,
};
pub use dichotomy::{
    dichotomy_failures, shift_dichotomy_case, shift_preserves_exponents, suite_shift_dichotomy, DichotomyCase,
    CASE_TRIALS, EXPONENT_VALUES, ISOMETRY_TOL, WITNESS_GAP, WITNESS_UNIT_TOL,
};
pub use examples::{
    alternating_exponents, checkpoints, harmonic_even_sequence, reproduce_example_41, reproduce_example_42,
    transposed_modular, Example41, HARMONIC_TOL,
};
pub use explore::{
    explore_isometric_not_isomodular, Candidate, ExploreReport, Family, CONFIRM_TOL, EMPTY_NOTE, FOUND_NOTE,
    MODULAR_GAP, SCREEN_TOL,
};
pub use report::{Failure, SuiteReport};
pub use structure::{
    inject_fault, sample_isomodular_matrix, suite_orthogonality, suite_orthogonality_on, suite_structure_theorem,
    suite_structure_theorem_on, Fault, ACTION_TOL, H_BOUND_TOL, MAX_DIMENSION, MAX_IMAGE, MODULAR_PROBE_TOL,
};
