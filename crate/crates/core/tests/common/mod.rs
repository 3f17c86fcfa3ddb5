//! Oracles and generators shared by the integration tests and the
//! acceptance target. Nothing here calls into the normalization code
//! except to build the objects under test.
#![allow(dead_code)]

use atomreach::atoms::{AtomBackend, ConcreteAtom};
use atomreach::automata::{validate, Configuration, FoNfa, FoPds, FoSet};
use atomreach::logic::{Expr, Formula, Ldnf, Theory};
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// running example

/// `a1 R a2 R' a3 ...` with the relations alternating, starting with `>=`
/// when `first_ge`.
pub fn alternates(word: &[i64], first_ge: bool) -> bool {
    word.windows(2).enumerate().all(|(i, w)| {
        if (i % 2 == 0) == first_ge {
            w[0] >= w[1]
        } else {
            w[0] <= w[1]
        }
    })
}

/// The configurations of the NFA `A`: odd length, `a1 >= a2 <= a3 >= ...`.
pub fn in_n(word: &[i64]) -> bool {
    !word.len().is_multiple_of(2) && alternates(word, true)
}

/// Backward reachability set of `N` under `Mono`: `N` together with the
/// nonempty even-length words `a2 <= a3 >= ... <= a(2n+1)`.
pub fn in_prestar_n(word: &[i64]) -> bool {
    in_n(word) || (!word.is_empty() && word.len().is_multiple_of(2) && alternates(word, false))
}

pub fn mono_config(word: &[i64]) -> Configuration {
    Configuration {
        location: "lI".into(),
        state_atoms: vec![],
        stack: word.iter().map(|&a| ("k".to_string(), vec![ConcreteAtom::integer(a)])).collect(),
    }
}

/// All words over `0..universe` of length at most `max_len`.
pub fn words(universe: i64, max_len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..universe {
                let mut v: Vec<i64> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

// ---------------------------------------------------------------------------
// counting

/// Lists the set partitions of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, prefix: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=blocks {
            prefix.push(b);
            go(n, prefix, blocks.max(b + 1), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), 0, &mut out);
    out
}

// ---------------------------------------------------------------------------
// formulas

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Equality,
    Total,
}

impl Order {
    pub fn backend(self) -> AtomBackend {
        match self {
            Order::Equality => AtomBackend::equality(),
            Order::Total => AtomBackend::total_order(),
        }
    }

    pub fn atom(self, v: i64) -> ConcreteAtom {
        match self {
            Order::Equality => ConcreteAtom::Nat(v as u64),
            Order::Total => ConcreteAtom::integer(v),
        }
    }

    fn relations(self) -> &'static [&'static str] {
        match self {
            Order::Equality => &["eq"],
            Order::Total => &["eq", "le", "lt"],
        }
    }

    /// Values a quantifier has to try given the values in scope: one per
    /// orbit of the extended tuple.
    fn candidates(self, scope: &[f64]) -> Vec<f64> {
        let mut vs: Vec<f64> = scope.to_vec();
        vs.sort_by(f64::total_cmp);
        vs.dedup();
        match (self, vs.first(), vs.last()) {
            (_, None, _) | (_, _, None) => vec![0.0],
            (Order::Equality, _, Some(&max)) => {
                vs.push(max + 1.0);
                vs
            }
            (Order::Total, Some(&min), Some(&max)) => {
                let mut out = vec![min - 1.0, max + 1.0];
                for w in vs.windows(2) {
                    out.push((w[0] + w[1]) / 2.0);
                }
                out.extend(vs);
                out
            }
        }
    }
}

/// Direct evaluation over the atoms: quantifiers range over the orbit
/// representatives of the current environment.
pub fn eval(order: Order, e: &Expr, env: &mut Vec<(String, f64)>) -> bool {
    let lookup = |env: &[(String, f64)], v: &str| {
        env.iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|&(_, x)| x)
            .unwrap_or_else(|| panic!("unbound `{v}`"))
    };
    match e {
        Expr::True => true,
        Expr::False => false,
        Expr::Rel(r, args) => {
            let (a, b) = (lookup(env, &args[0]), lookup(env, &args[1]));
            match r.as_str() {
                "eq" => a == b,
                "le" => a <= b,
                "lt" => a < b,
                other => panic!("unexpected relation {other}"),
            }
        }
        Expr::Not(e) => !eval(order, e, env),
        Expr::And(es) => es.iter().all(|e| eval(order, e, env)),
        Expr::Or(es) => es.iter().any(|e| eval(order, e, env)),
        Expr::Exists(v, body) | Expr::Forall(v, body) => {
            let values: Vec<f64> = env.iter().map(|&(_, x)| x).collect();
            let want = matches!(e, Expr::Exists(..));
            for c in order.candidates(&values) {
                env.push((v.clone(), c));
                let r = eval(order, body, env);
                env.pop();
                if r == want {
                    return want;
                }
            }
            !want
        }
    }
}

pub const FREE: [&str; 3] = ["a", "b", "c"];

/// A random formula over the first `free` of `a, b, c` with at most
/// `max_quantifiers` quantifiers, each binding a fresh variable.
pub fn random_formula(rng: &mut impl Rng, order: Order, free: usize, max_quantifiers: usize) -> Formula {
    fn go(
        rng: &mut impl Rng,
        order: Order,
        scope: &mut Vec<String>,
        size: usize,
        quantifiers: &mut usize,
        max_quantifiers: usize,
    ) -> Expr {
        let atom = |rng: &mut dyn rand::RngCore, scope: &[String]| {
            if scope.is_empty() {
                return if rng.gen_bool(0.5) { Expr::True } else { Expr::False };
            }
            let r = *order.relations().choose(rng).unwrap();
            let a = scope.choose(rng).unwrap();
            let b = scope.choose(rng).unwrap();
            Expr::rel(r, &[a, b])
        };
        if size == 0 {
            return atom(rng, scope);
        }
        match rng.gen_range(0..7) {
            0 | 1 => atom(rng, scope),
            2 => Expr::not(go(rng, order, scope, size - 1, quantifiers, max_quantifiers)),
            3 => Expr::And(vec![
                go(rng, order, scope, size / 2, quantifiers, max_quantifiers),
                go(rng, order, scope, size / 2, quantifiers, max_quantifiers),
            ]),
            4 => Expr::Or(vec![
                go(rng, order, scope, size / 2, quantifiers, max_quantifiers),
                go(rng, order, scope, size / 2, quantifiers, max_quantifiers),
            ]),
            _ if *quantifiers < max_quantifiers => {
                *quantifiers += 1;
                let v = format!("q{quantifiers}");
                scope.push(v.clone());
                let body = go(rng, order, scope, size - 1, quantifiers, max_quantifiers);
                scope.pop();
                if rng.gen_bool(0.5) {
                    Expr::exists(&v, body)
                } else {
                    Expr::forall(&v, body)
                }
            }
            _ => atom(rng, scope),
        }
    }
    let mut scope: Vec<String> = FREE[..free].iter().map(|s| s.to_string()).collect();
    let mut quantifiers = 0;
    let body = go(rng, order, &mut scope, 6, &mut quantifiers, max_quantifiers);
    Formula::new(body, scope).expect("well-formed by construction")
}

/// All tuples of length `width` over `0..sample`.
pub fn assignments(width: usize, sample: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..width {
        out = out
            .into_iter()
            .flat_map(|t: Vec<i64>| {
                (0..sample as i64).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Checks `d` against direct evaluation of `f` on every assignment into a
/// sample of `width + quantifier depth` atoms; returns the first mismatch.
pub fn ldnf_disagreement(order: Order, f: &Formula, d: &Ldnf) -> Option<Vec<i64>> {
    let backend = order.backend();
    let sample = f.dim() + f.body.quantifier_depth();
    for t in assignments(f.dim(), sample) {
        let atoms: Vec<ConcreteAtom> = t.iter().map(|&v| order.atom(v)).collect();
        let clause = backend.complete_clause_of(&atoms).unwrap();
        let mut env: Vec<(String, f64)> = f.free.iter().cloned().zip(t.iter().map(|&v| v as f64)).collect();
        if d.contains(&clause) != eval(order, &f.body, &mut env) {
            return Some(t);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// random machines

/// A conjunction of up to two random literals over `width` variables, as an
/// ldnf; never empty.
pub fn random_guard(rng: &mut impl Rng, theory: &Theory, order: Order, width: usize) -> Ldnf {
    let names: Vec<String> = (0..width).map(|i| format!("v{i}")).collect();
    loop {
        let n = if width == 0 { 0 } else { rng.gen_range(0..=2) };
        let lits: Vec<Expr> = (0..n)
            .map(|_| {
                let r = *order.relations().choose(rng).unwrap();
                let lit = Expr::rel(r, &[names.choose(rng).unwrap(), names.choose(rng).unwrap()]);
                if rng.gen_bool(0.3) {
                    Expr::not(lit)
                } else {
                    lit
                }
            })
            .collect();
        let f = Formula::new(Expr::And(lits), names.clone()).unwrap();
        let d = theory.fo_to_ldnf(&f).unwrap();
        if !d.is_empty() {
            return d;
        }
    }
}

/// Shape of a random (PDS, NFA) pair: dimension choices and counts.
#[derive(Debug, Clone)]
pub struct Shape {
    pub letter_dims: Vec<usize>,
    pub location_dims: Vec<usize>,
    pub state_dims: Vec<usize>,
    pub letters: usize,
    pub locations: usize,
    /// NFA states beyond the locations.
    pub extra_states: usize,
    pub push_rules: usize,
    pub pop_rules: usize,
    pub transitions: usize,
}

impl Shape {
    /// At most two components per family, dimensions up to 2.
    pub fn small(rng: &mut impl Rng, dims: &[usize]) -> Shape {
        Shape {
            letter_dims: dims.to_vec(),
            location_dims: dims.to_vec(),
            state_dims: dims.to_vec(),
            letters: rng.gen_range(1..=2),
            locations: rng.gen_range(1..=2),
            extra_states: rng.gen_range(0..=2),
            push_rules: rng.gen_range(1..=3),
            pop_rules: rng.gen_range(1..=3),
            transitions: rng.gen_range(1..=4),
        }
    }
}

fn pick<'a>(rng: &mut impl Rng, xs: &'a [String]) -> &'a String {
    xs.choose(rng).unwrap()
}

/// One random pair of the given shape; all components are unconstrained.
/// Returns `None` when the pair fails validation (for instance on the
/// width budget).
pub fn random_instance(rng: &mut impl Rng, theory: &Theory, order: Order, shape: &Shape) -> Option<(FoPds, FoNfa)> {
    let letters: Vec<String> = (0..shape.letters).map(|i| format!("k{i}")).collect();
    let locations: Vec<String> = (0..shape.locations).map(|i| format!("p{i}")).collect();
    let extra: Vec<String> = (0..shape.extra_states).map(|i| format!("s{i}")).collect();
    let mut alphabet = FoSet::new();
    for k in &letters {
        alphabet.insert_full(theory, k, *shape.letter_dims.choose(rng).unwrap()).unwrap();
    }
    let mut locs = FoSet::new();
    for p in &locations {
        locs.insert_full(theory, p, *shape.location_dims.choose(rng).unwrap()).unwrap();
    }
    let mut states = locs.clone();
    for s in &extra {
        states.insert_full(theory, s, *shape.state_dims.choose(rng).unwrap()).unwrap();
    }
    let dl = |l: &str| states.dim(l).unwrap();
    let dk = |k: &str| alphabet.dim(k).unwrap();

    let mut pds = FoPds {
        alphabet: alphabet.clone(),
        locations: locs,
        ..FoPds::default()
    };
    for _ in 0..shape.push_rules {
        let (l, k, l2) = (pick(rng, &locations), pick(rng, &letters), pick(rng, &locations));
        let (k1, k2) = (pick(rng, &letters), pick(rng, &letters));
        let w = dl(l) + dk(k) + dl(l2) + dk(k1) + dk(k2);
        if w > theory.max_width() {
            return None;
        }
        let guard = random_guard(rng, theory, order, w);
        pds.push.insert((l.clone(), k.clone(), l2.clone(), k1.clone(), k2.clone()), guard);
    }
    for _ in 0..shape.pop_rules {
        let (l, k, l2) = (pick(rng, &locations), pick(rng, &letters), pick(rng, &locations));
        let guard = random_guard(rng, theory, order, dl(l) + dk(k) + dl(l2));
        pds.pop.insert((l.clone(), k.clone(), l2.clone()), guard);
    }

    let all_states: Vec<String> = states.labels().cloned().collect();
    let mut nfa = FoNfa {
        alphabet: alphabet.clone(),
        states: states.clone(),
        ..FoNfa::default()
    };
    for s in &all_states {
        if rng.gen_bool(0.5) {
            nfa.finals.insert(s.clone(), random_guard(rng, theory, order, dl(s)));
        }
    }
    if !extra.is_empty() {
        for _ in 0..shape.transitions {
            let (q, k, q2) = (pick(rng, &all_states), pick(rng, &letters), pick(rng, &extra));
            let guard = random_guard(rng, theory, order, dl(q) + dk(k) + dl(q2));
            nfa.delta.insert((q.clone(), k.clone(), q2.clone()), guard);
        }
    }
    validate(theory, &pds, &nfa).is_empty().then_some((pds, nfa))
}

/// Draws shapes until a valid instance comes out.
pub fn valid_instance(rng: &mut impl Rng, theory: &Theory, order: Order, dims: &[usize]) -> (FoPds, FoNfa) {
    loop {
        let shape = Shape::small(rng, dims);
        if let Some(found) = random_instance(rng, theory, order, &shape) {
            return found;
        }
    }
}

pub fn universe_atoms(order: Order, n: i64) -> Vec<ConcreteAtom> {
    (0..n).map(|v| order.atom(v)).collect()
}
