mod common;

use common::models_with_formulas;
use meetimp::algebra::SearchBudget;
use meetimp::classify_fragment;
use meetimp::definability::{
    condition_two, definable_closure, definable_family, is_meet_impl_definable, witness_formula,
};
use meetimp::sample::random_upset;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn closure_is_the_least_definable_superset((m, _) in models_with_formulas(7, 2, 1, true), seed in any::<u64>()) {
        let family = definable_family(&m).unwrap();
        let u = random_upset(&mut ChaCha8Rng::seed_from_u64(seed), m.poset());
        let closure = definable_closure(&m, &u);
        prop_assert!(u.is_subset(&closure));
        prop_assert!(family.contains(&closure));
        for v in family.iter().filter(|v| u.is_subset(v)) {
            prop_assert!(closure.is_subset(v));
        }
    }

    #[test]
    fn family_is_closed_and_contains_fragment_values((m, formulas) in models_with_formulas(7, 2, 5, true)) {
        let family = definable_family(&m).unwrap();
        for a in &family {
            for b in &family {
                prop_assert!(family.contains(&a.intersection(b)));
                prop_assert!(family.contains(&m.poset().implication(a, b)));
            }
        }
        for phi in &formulas {
            prop_assert!(family.contains(&m.evaluate(phi).unwrap()), "v({}) missing", phi);
        }
    }

    #[test]
    fn single_condition_agrees_with_the_pair((m, _) in models_with_formulas(7, 3, 1, true)) {
        for u in m.poset().all_upsets() {
            prop_assert_eq!(condition_two(&m, &u), is_meet_impl_definable(&m, &u).is_definable());
        }
    }

    #[test]
    fn witnesses_define_their_upsets((m, _) in models_with_formulas(6, 2, 1, true), seed in any::<u64>()) {
        let u = random_upset(&mut ChaCha8Rng::seed_from_u64(seed), m.poset());
        let definable = is_meet_impl_definable(&m, &u).is_definable();
        match witness_formula(&m, &u, SearchBudget::default()) {
            Ok(f) => {
                prop_assert!(definable);
                prop_assert!(classify_fragment(&f).meet_implication());
                prop_assert_eq!(m.evaluate(&f).unwrap(), u);
            }
            Err(_) => prop_assert!(!definable),
        }
    }
}
