mod common;

use std::collections::{BTreeSet, VecDeque};

use atomreach::atoms::AtomBackend;
use atomreach::automata::{FoNfa, FoPds};
use atomreach::examples::{mono_pds, nfa_a};
use atomreach::logic::Theory;
use atomreach::oracle::{cross_check, cross_check_with, instantiate_pds, Enumeration, ExplicitPds, FiniteUniverse, Item};
use atomreach::reachability::{Bottom, Engine};
use common::Order;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn universe(order: Order, n: i64) -> FiniteUniverse {
    FiniteUniverse::new(order.backend(), common::universe_atoms(order, n)).unwrap()
}

#[test]
fn classical_instances_agree_exactly_on_every_configuration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..30 {
        let order = if i % 2 == 0 { Order::Equality } else { Order::Total };
        let theory = Theory::new(order.backend());
        let (pds, nfa) = common::valid_instance(&mut rng, &theory, order, &[0]);
        let report = cross_check_with(&theory, &universe(order, 2), &pds, &nfa, 4, Enumeration::Exhaustive, |_, _, _| {})
            .unwrap();
        assert!(report.exact);
        assert!(report.is_ok(), "{report}");
        let letters = pds.alphabet.components.len();
        let expected: usize = (0..=4).map(|i| letters.pow(i)).sum::<usize>() * pds.locations.components.len();
        assert_eq!(report.configurations, expected);
    }
}

#[test]
fn running_example_against_both_oracles() {
    let theory = Theory::new(AtomBackend::total_order());
    let (pds, nfa) = (mono_pds(&theory).unwrap(), nfa_a(&theory).unwrap());
    let u = universe(Order::Total, 4);
    let mut visited = 0;
    let report = cross_check_with(&theory, &u, &pds, &nfa, 4, Enumeration::Exhaustive, |config, explicit, symbolic| {
        visited += 1;
        let word: Vec<i64> = config
            .stack
            .iter()
            .map(|(_, atoms)| atoms[0].to_string().parse().unwrap())
            .collect();
        assert_eq!(symbolic, common::in_prestar_n(&word), "{config}");
        // the finite instantiation can only lose predecessors
        assert!(!explicit || symbolic, "{config}");
    })
    .unwrap();
    assert!(report.is_ok(), "{report}");
    assert_eq!(visited, 1 + 4 + 16 + 64 + 256);
    assert!(report.explicit_members < report.symbolic_members);
}

/// Locations reachable in the instantiated system from the given starts,
/// with stacks of at most `max_stack` letters.
fn explicit_reachable(pds: &ExplicitPds, starts: Vec<(Item, Vec<Item>)>, max_stack: usize) -> BTreeSet<String> {
    let mut seen: BTreeSet<(Item, Vec<Item>)> = starts.iter().cloned().collect();
    let mut queue: VecDeque<(Item, Vec<Item>)> = starts.into();
    let mut out = BTreeSet::new();
    while let Some((loc, stack)) = queue.pop_front() {
        out.insert(loc.0.clone());
        let Some(top) = stack.last() else {
            continue;
        };
        let mut next = Vec::new();
        for (p, k, p2) in &pds.pop {
            if *p == loc && k == top {
                next.push((p2.clone(), stack[..stack.len() - 1].to_vec()));
            }
        }
        if stack.len() < max_stack {
            for (p, k, p2, k1, k2) in &pds.push {
                if *p == loc && k == top {
                    let mut s = stack[..stack.len() - 1].to_vec();
                    s.push(k2.clone());
                    s.push(k1.clone());
                    next.push((p2.clone(), s));
                }
            }
        }
        for c in next {
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    out
}

#[test]
fn location_reachability_contains_the_instantiation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut positive = 0;
    for i in 0..24 {
        let order = if i % 2 == 0 { Order::Equality } else { Order::Total };
        let theory = Theory::new(order.backend());
        let (pds, _) = common::valid_instance(&mut rng, &theory, order, &[0, 1]);
        let epds = instantiate_pds(&universe(order, 3), &pds).unwrap();
        let engine = Engine::new(theory);
        for p in pds.locations.labels() {
            for k in pds.alphabet.labels() {
                let starts = epds
                    .locations
                    .iter()
                    .filter(|l| &l.0 == p)
                    .flat_map(|l| {
                        epds.letters
                            .iter()
                            .filter(|b| &b.0 == k)
                            .map(move |b| (l.clone(), vec![b.clone()]))
                    })
                    .collect();
                let reached = explicit_reachable(&epds, starts, 5);
                for q in pds.locations.labels() {
                    let symbolic = engine.reach_decision(&pds, p, k, &Bottom::Any, q).unwrap();
                    if reached.contains(q) {
                        positive += 1;
                        assert!(symbolic, "{p} {k} -> {q}");
                    }
                }
            }
        }
    }
    assert!(positive > 0);
}

/// Words `k(a) k(b)` from `lI` with `a R b`.
fn two_letter_words(theory: &Theory, relation: &str) -> FoNfa {
    let mut c = FoNfa {
        alphabet: mono_pds(theory).unwrap().alphabet,
        ..FoNfa::default()
    };
    c.states.insert_full(theory, "lI", 0).unwrap();
    c.states.insert_full(theory, "c1", 1).unwrap();
    c.states.insert_full(theory, "c2", 0).unwrap();
    c.finals.insert("c2".into(), theory.full(0).unwrap());
    let t = |a: &str, b: &str| (a.to_string(), "k".to_string(), b.to_string());
    c.delta
        .insert(t("lI", "c1"), theory.ldnf_of("eq(p1,y1)", &["y1", "p1"]).unwrap());
    c.delta
        .insert(t("c1", "c2"), theory.ldnf_of(&format!("{relation}(x1,y1)"), &["x1", "y1"]).unwrap());
    c
}

#[test]
fn regular_source_sets() {
    let theory = Theory::new(AtomBackend::total_order());
    let (pds, b) = (mono_pds(&theory).unwrap(), nfa_a(&theory).unwrap());
    let engine = Engine::new(theory.clone());
    // even words in the backward reachability set start with a1 <= a2
    assert!(engine.decision_reachability(&pds, &b, &two_letter_words(&theory, "le")).unwrap());
    assert!(engine.decision_reachability(&pds, &b, &two_letter_words(&theory, "eq")).unwrap());
    assert!(!engine.decision_reachability(&pds, &b, &two_letter_words(&theory, "gt")).unwrap());
    // N itself is a source of N
    assert!(engine.decision_reachability(&pds, &b, &b).unwrap());
}

#[test]
fn sub_universes_only_lose_members() {
    let theory = Theory::new(AtomBackend::total_order());
    let (pds, nfa): (FoPds, FoNfa) = (mono_pds(&theory).unwrap(), nfa_a(&theory).unwrap());
    let mut members = Vec::new();
    for n in 1..=4 {
        let report = cross_check(&theory, &universe(Order::Total, n), &pds, &nfa, 3).unwrap();
        assert!(report.is_ok(), "{report}");
        members.push(report.explicit_members);
    }
    assert!(members.windows(2).all(|w| w[0] <= w[1]), "{members:?}");
}
