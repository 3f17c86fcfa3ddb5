mod common;

use atomreach::atoms::ConcreteAtom;
use atomreach::automata::{nfa_accepts, Acceptor};
use atomreach::examples::{mono_pds, nfa_a};
use atomreach::logic::Theory;
use atomreach::reachability::{accepts_configuration, Engine};
use atomreach::saturation::saturate;
use common::Order;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn order() -> impl Strategy<Value = Order> {
    prop_oneof![Just(Order::Equality), Just(Order::Total)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normal_form_agrees_with_evaluation(seed in any::<u64>(), order in order(), free in 0usize..=3) {
        let theory = Theory::new(order.backend());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = common::random_formula(&mut rng, order, free, 3);
        let d = theory.fo_to_ldnf(&f).unwrap();
        prop_assert_eq!(common::ldnf_disagreement(order, &f, &d), None, "{}", f);
    }

    #[test]
    fn boolean_laws(seed in any::<u64>(), order in order(), width in 0usize..=3) {
        let theory = Theory::new(order.backend());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_guard(&mut rng, &theory, order, width);
        let b = common::random_guard(&mut rng, &theory, order, width);
        let full = theory.full(width).unwrap();
        let not_a = theory.complement(&a).unwrap();
        prop_assert_eq!(theory.complement(&not_a).unwrap(), a.clone());
        prop_assert_eq!(a.union(&not_a).unwrap(), full);
        prop_assert!(a.intersection(&not_a).unwrap().is_empty());
        let lhs = theory.complement(&a.union(&b).unwrap()).unwrap();
        let rhs = not_a.intersection(&theory.complement(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.intersection(&b).unwrap().entails(&a).unwrap());
    }

    #[test]
    fn elimination_is_projection(seed in any::<u64>(), order in order(), width in 1usize..=4) {
        let theory = Theory::new(order.backend());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_guard(&mut rng, &theory, order, width);
        let keep: Vec<usize> = (0..width - 1).collect();
        let eliminated = theory.eliminate_exists(width - 1, &d).unwrap();
        prop_assert_eq!(eliminated, d.restrict(theory.vocabulary(), &keep));
    }

    #[test]
    fn running_example_matches_closed_form(word in prop::collection::vec(-40i64..40, 0..7)) {
        let theory = Theory::new(Order::Total.backend());
        let (pds, nfa) = (mono_pds(&theory).unwrap(), nfa_a(&theory).unwrap());
        let engine = Engine::new(theory);
        let config = common::mono_config(&word);
        prop_assert_eq!(accepts_configuration(engine.theory(), &nfa, &config).unwrap(), common::in_n(&word));
        prop_assert_eq!(engine.prestar_member(&pds, &nfa, &config).unwrap(), common::in_prestar_n(&word));
    }

    #[test]
    fn acceptance_is_orbit_invariant(word in prop::collection::vec(0i64..6, 0..6), shift in -9i64..9, scale in 1i64..5) {
        let theory = Theory::new(Order::Total.backend());
        let saturated = saturate(&theory, &mono_pds(&theory).unwrap(), &nfa_a(&theory).unwrap()).unwrap().automaton;
        // an order automorphism of the rationals, applied letterwise
        let moved: Vec<(String, Vec<ConcreteAtom>)> = word
            .iter()
            .map(|&a| ("k".to_string(), vec![ConcreteAtom::rational(a * scale + shift, 3)]))
            .collect();
        let original = common::mono_config(&word);
        prop_assert_eq!(
            nfa_accepts(&theory, &saturated, ("lI", &[]), &moved).unwrap(),
            accepts_configuration(&theory, &saturated, &original).unwrap()
        );
    }
}

proptest! {
    // saturation of an instance at the full width budget takes seconds
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn saturation_only_adds(seed in any::<u64>(), order in order()) {
        let theory = Theory::new(order.backend());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pds, nfa) = common::valid_instance(&mut rng, &theory, order, &[0, 1, 2]);
        let result = saturate(&theory, &pds, &nfa).unwrap();
        for (key, d) in nfa.delta.iter().chain(&pds.pop) {
            prop_assert!(d.entails(&result.automaton.delta[key]).unwrap());
        }
        prop_assert!(result.iterations >= 1);
        prop_assert_eq!(result.automaton.finals, nfa.finals);
    }
}

#[test]
fn word_acceptance_relative_to_a_context() {
    let theory = Theory::new(Order::Total.backend());
    let nfa = nfa_a(&theory).unwrap();
    let context: Vec<ConcreteAtom> = (0..4).map(ConcreteAtom::integer).collect();
    let mut acceptor = Acceptor::new(&theory, &nfa, context).unwrap();
    for w in common::words(4, 4) {
        let word: Vec<(String, Vec<usize>)> = w.iter().map(|&a| ("k".to_string(), vec![a as usize])).collect();
        let sets = acceptor.word(&word).unwrap();
        assert_eq!(acceptor.accepts(&sets, "lI", &[]).unwrap(), common::in_n(&w), "{w:?}");
    }
}
