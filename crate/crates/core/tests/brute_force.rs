mod support;

use proptest::prelude::*;
use support::{check_against_enumeration, finite_groups, hom_from_seeds};
use twistk_core::fgab::FgAbGroup;

#[test]
fn group_list_is_complete() {
    let groups = finite_groups(48);
    // Number of abelian groups of each order n <= 48, summed.
    let counts = [
        1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5, 1, 2, 1, 2, 1, 1, 1, 3, 2, 1, 3, 2, 1, 1, 1, 7, 1, 1, 1, 4, 1,
        1, 1, 3, 1, 1, 1, 2, 2, 1, 1, 5,
    ];
    assert_eq!(groups.len(), counts.iter().sum::<usize>());
    assert!(groups.contains(&FgAbGroup::cyclic(2).power(3)));
}

#[test]
fn every_endomorphism_seed_of_small_groups() {
    for g in finite_groups(16) {
        for seed in -3..=3 {
            let f = hom_from_seeds(&g, &g, &[seed, 1, seed + 1]);
            check_against_enumeration(&f).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_homs_match_enumeration(
        gi in 0usize..1000,
        hi in 0usize..1000,
        seeds in prop::collection::vec(-50i64..50, 1..9),
    ) {
        let groups = finite_groups(48);
        let g = &groups[gi % groups.len()];
        let h = &groups[hi % groups.len()];
        let f = hom_from_seeds(g, h, &seeds);
        prop_assert_eq!(check_against_enumeration(&f), Ok(()));
    }
}
