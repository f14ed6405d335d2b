use std::collections::BTreeSet;

use proptest::prelude::*;
use varexp::set_iso::{sup_norm_contraction_check, RegularSetIso};
use varexp::space::SparseSequence;
use varexp::Complex64;

/// A disjoint family of `1..=12` nonempty images drawn from `1..=80`.
fn iso() -> impl Strategy<Value = RegularSetIso> {
    prop::collection::vec(1usize..=4, 1..=12).prop_flat_map(|sizes| {
        let total: usize = sizes.iter().sum();
        let pool = prop::sample::subsequence((1..=80).collect::<Vec<_>>(), total).prop_shuffle();
        (Just(sizes), pool).prop_map(|(sizes, pool)| {
            let mut rest = pool.as_slice();
            let family = sizes
                .iter()
                .map(|&s| {
                    let (head, tail) = rest.split_at(s);
                    rest = tail;
                    head.iter().copied().collect::<BTreeSet<usize>>()
                })
                .collect();
            RegularSetIso::from_family(family).unwrap()
        })
    })
}

fn subset(bound: usize) -> impl Strategy<Value = BTreeSet<usize>> {
    prop::collection::btree_set(1..=bound, 0..=bound)
}

fn sequence_on_domain(bound: usize) -> impl Strategy<Value = SparseSequence> {
    prop::collection::btree_map(1..=bound, (-5.0..=5.0f64, -5.0..=5.0f64), 0..=bound).prop_map(|m| {
        SparseSequence::from_entries(m.into_iter().map(|(n, (re, im))| (n, Complex64::new(re, im)))).unwrap()
    })
}

fn with_sets() -> impl Strategy<Value = (RegularSetIso, BTreeSet<usize>, BTreeSet<usize>)> {
    iso().prop_flat_map(|t| {
        let d = t.domain_bound();
        (Just(t), subset(d), subset(d))
    })
}

fn with_sequences() -> impl Strategy<Value = (RegularSetIso, SparseSequence, SparseSequence)> {
    iso().prop_flat_map(|t| {
        let d = t.domain_bound();
        (Just(t), sequence_on_domain(d), sequence_on_domain(d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn union_is_preserved((t, a, b) in with_sets()) {
        let union: BTreeSet<usize> = a.union(&b).copied().collect();
        let ta = t.apply_to_set(&a).unwrap();
        let tb = t.apply_to_set(&b).unwrap();
        prop_assert_eq!(t.apply_to_set(&union).unwrap(), ta.union(&tb).copied().collect::<BTreeSet<_>>());
        if a.is_disjoint(&b) {
            prop_assert!(ta.is_disjoint(&tb));
        }
    }

    #[test]
    fn complement_is_preserved((t, a, _b) in with_sets()) {
        let domain: BTreeSet<usize> = (1..=t.domain_bound()).collect();
        let rest: BTreeSet<usize> = domain.difference(&a).copied().collect();
        let expected: BTreeSet<usize> = t.range().difference(&t.apply_to_set(&a).unwrap()).copied().collect();
        prop_assert_eq!(t.apply_to_set(&rest).unwrap(), expected);
    }

    #[test]
    fn injective_on_sets((t, a, b) in with_sets()) {
        prop_assert_eq!(t.apply_to_set(&a).unwrap() == t.apply_to_set(&b).unwrap(), a == b);
        prop_assert_eq!(t.apply_to_set(&a).unwrap().is_empty(), a.is_empty());
    }

    #[test]
    fn extension_is_linear((t, a, b) in with_sequences(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let alpha = Complex64::new(re, im);
        let beta = Complex64::new(im, -re);
        let combined = &a.scale(alpha) + &b.scale(beta);
        let lhs = t.extend_to_sequence(&combined).unwrap();
        let rhs = &t.extend_to_sequence(&a).unwrap().scale(alpha) + &t.extend_to_sequence(&b).unwrap().scale(beta);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn extension_support_is_set_image((t, a, _b) in with_sequences()) {
        prop_assert_eq!(t.extend_to_sequence(&a).unwrap().support(), t.apply_to_set(&a.support()).unwrap());
    }

    #[test]
    fn sup_norm_contracts((t, a, b) in with_sequences()) {
        prop_assert!(sup_norm_contraction_check(&t, &a, &b).unwrap());
    }

    #[test]
    fn json_round_trip((t, _a, _b) in with_sets()) {
        let text = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<RegularSetIso>(&text).unwrap(), t);
    }
}
