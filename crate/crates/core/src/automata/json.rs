use serde_json::{json, Map, Value};

use crate::atoms::Vocabulary;
use crate::logic::Ldnf;

use super::{FoNfa, FoPds, FoSet};

fn var_names(width: usize) -> Vec<String> {
    (1..=width).map(|i| format!("v{i}")).collect()
}

/// Clauses as lists of complete literal strings over `v1..vn`.
fn clauses_json(vocab: &Vocabulary, d: &Ldnf) -> Value {
    let names = var_names(d.width());
    Value::Array(
        d.clauses()
            .iter()
            .map(|c| c.literals(vocab).iter().map(|l| Value::String(l.render(&names))).collect())
            .collect(),
    )
}

fn component_json(vocab: &Vocabulary, dim: usize, d: &Ldnf) -> Value {
    json!({ "dim": dim, "clauses": clauses_json(vocab, d) })
}

pub fn set_to_json(vocab: &Vocabulary, set: &FoSet) -> Value {
    let map: Map<String, Value> = set
        .components
        .iter()
        .map(|(label, c)| (label.clone(), component_json(vocab, c.dim, &c.constraint)))
        .collect();
    Value::Object(map)
}

pub fn nfa_to_json(vocab: &Vocabulary, nfa: &FoNfa) -> Value {
    let finals: Map<String, Value> = nfa
        .finals
        .iter()
        .map(|(label, d)| (label.clone(), component_json(vocab, d.width(), d)))
        .collect();
    let delta: Vec<Value> = nfa
        .delta
        .iter()
        .map(|((from, letter, to), d)| {
            json!({
                "from": from,
                "letter": letter,
                "to": to,
                "dim": d.width(),
                "clauses": clauses_json(vocab, d),
            })
        })
        .collect();
    json!({
        "alphabet": set_to_json(vocab, &nfa.alphabet),
        "states": set_to_json(vocab, &nfa.states),
        "finals": finals,
        "delta": delta,
    })
}

pub fn pds_to_json(vocab: &Vocabulary, pds: &FoPds) -> Value {
    let push: Vec<Value> = pds
        .push
        .iter()
        .map(|((l, k, l2, k1, k2), d)| {
            json!({
                "from": l,
                "letter": k,
                "to": l2,
                "push": [k1, k2],
                "dim": d.width(),
                "clauses": clauses_json(vocab, d),
            })
        })
        .collect();
    let pop: Vec<Value> = pds
        .pop
        .iter()
        .map(|((l, k, l2), d)| {
            json!({
                "from": l,
                "letter": k,
                "to": l2,
                "dim": d.width(),
                "clauses": clauses_json(vocab, d),
            })
        })
        .collect();
    json!({
        "alphabet": set_to_json(vocab, &pds.alphabet),
        "locations": set_to_json(vocab, &pds.locations),
        "push": push,
        "pop": pop,
    })
}
