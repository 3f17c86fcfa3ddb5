//! Induced-substructure decisions for the shipped homogeneous structures,
//! together with one-point extension generators used by clause enumeration.

use std::collections::BTreeSet;

use super::structure::all_tuples;
use super::{AtomsError, FiniteStructure, Vocabulary};

fn expect_vocab(s: &FiniteStructure, backend: &str, expected: &[(&str, usize)]) -> Result<(), AtomsError> {
    let v = s.vocabulary();
    let ok = v.len() == expected.len() + 1
        && expected
            .iter()
            .enumerate()
            .all(|(i, (name, arity))| v.name(i + 1) == *name && v.arity(i + 1) == *arity);
    if ok {
        Ok(())
    } else {
        let want = Vocabulary::new(expected.iter().map(|&(n, a)| (n, a)))
            .map(|v| v.to_string())
            .unwrap_or_default();
        Err(AtomsError::VocabularyMismatch {
            backend: backend.to_string(),
            expected: want,
            found: v.to_string(),
        })
    }
}

fn reflexive(s: &FiniteStructure, r: usize) -> bool {
    (0..s.size()).all(|i| s.get(r, &[i, i]))
}

fn irreflexive(s: &FiniteStructure, r: usize) -> bool {
    (0..s.size()).all(|i| !s.get(r, &[i, i]))
}

fn symmetric(s: &FiniteStructure, r: usize) -> bool {
    let n = s.size();
    (0..n).all(|i| (0..n).all(|j| s.get(r, &[i, j]) == s.get(r, &[j, i])))
}

fn antisymmetric(s: &FiniteStructure, r: usize) -> bool {
    let n = s.size();
    (0..n).all(|i| (0..n).all(|j| i == j || !(s.get(r, &[i, j]) && s.get(r, &[j, i]))))
}

fn transitive(s: &FiniteStructure, r: usize) -> bool {
    let n = s.size();
    for i in 0..n {
        for j in 0..n {
            if !s.get(r, &[i, j]) {
                continue;
            }
            for k in 0..n {
                if s.get(r, &[j, k]) && !s.get(r, &[i, k]) {
                    return false;
                }
            }
        }
    }
    true
}

fn total(s: &FiniteStructure, r: usize) -> bool {
    let n = s.size();
    (0..n).all(|i| (0..n).all(|j| s.get(r, &[i, j]) || s.get(r, &[j, i])))
}

pub fn embeds_equality(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "equality", &[])?;
    Ok(s.eq_is_diagonal())
}

pub fn embeds_total_order(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "total_order", &[("le", 2)])?;
    Ok(s.eq_is_diagonal() && reflexive(s, 1) && antisymmetric(s, 1) && transitive(s, 1) && total(s, 1))
}

pub fn embeds_equivalence(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "equivalence", &[("R", 2)])?;
    Ok(s.eq_is_diagonal() && reflexive(s, 1) && symmetric(s, 1) && transitive(s, 1))
}

pub fn embeds_partial_order(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "partial_order", &[("le", 2)])?;
    Ok(s.eq_is_diagonal() && reflexive(s, 1) && antisymmetric(s, 1) && transitive(s, 1))
}

pub fn embeds_graph(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "graph", &[("E", 2)])?;
    Ok(s.eq_is_diagonal() && irreflexive(s, 1) && symmetric(s, 1))
}

pub fn embeds_tournament(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "tournament", &[("E", 2)])?;
    let n = s.size();
    let exactly_one = (0..n).all(|i| {
        (0..n).all(|j| i == j || (s.get(1, &[i, j]) != s.get(1, &[j, i])))
    });
    Ok(s.eq_is_diagonal() && irreflexive(s, 1) && exactly_one)
}

/// Betweenness induced by a linear order given as positions: `B(x, y, z)` iff
/// `x` lies strictly between `y` and `z`.
pub(crate) fn between_in(pos: &[usize], x: usize, y: usize, z: usize) -> bool {
    (pos[y] < pos[x] && pos[x] < pos[z]) || (pos[z] < pos[x] && pos[x] < pos[y])
}

/// Cyclic order induced by a circular arrangement given as positions.
pub(crate) fn cyclic_in(pos: &[usize], x: usize, y: usize, z: usize) -> bool {
    let (a, b, c) = (pos[x], pos[y], pos[z]);
    (a < b && b < c) || (c < a && a < b) || (b < c && c < a)
}

/// Searches for an arrangement (sequence of elements) whose induced ternary
/// relation equals relation 1 of `s`. Elements are placed one at a time and
/// every triple among placed elements is checked as soon as it is complete,
/// so the search explores permutations with prefix pruning.
fn find_arrangement(
    s: &FiniteStructure,
    induced: fn(&[usize], usize, usize, usize) -> bool,
    fix_first: bool,
) -> Option<Vec<usize>> {
    let n = s.size();
    if !s.eq_is_diagonal() {
        return None;
    }
    let mut seq: Vec<usize> = Vec::with_capacity(n);
    let mut pos = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn consistent(
        s: &FiniteStructure,
        induced: fn(&[usize], usize, usize, usize) -> bool,
        seq: &[usize],
        pos: &[usize],
    ) -> bool {
        // positions of placed elements are a prefix of 0..; the last placed is new
        let new = *seq.last().unwrap();
        for &a in seq {
            for &b in seq {
                for t in [[new, a, b], [a, new, b], [a, b, new]] {
                    if s.get(1, &t) != induced(pos, t[0], t[1], t[2]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        s: &FiniteStructure,
        induced: fn(&[usize], usize, usize, usize) -> bool,
        seq: &mut Vec<usize>,
        pos: &mut Vec<usize>,
        used: &mut Vec<bool>,
        n: usize,
    ) -> bool {
        if seq.len() == n {
            return true;
        }
        for e in 0..n {
            if used[e] {
                continue;
            }
            used[e] = true;
            pos[e] = seq.len();
            seq.push(e);
            if consistent(s, induced, seq, pos) && go(s, induced, seq, pos, used, n) {
                return true;
            }
            seq.pop();
            pos[e] = usize::MAX;
            used[e] = false;
        }
        false
    }

    // a triple involving an unplaced element has pos = MAX, so the consistency
    // check only ever sees placed elements: it iterates over `seq` alone.
    if n == 0 {
        return Some(seq);
    }
    if fix_first {
        used[0] = true;
        pos[0] = 0;
        seq.push(0);
        if !consistent(s, induced, &seq, &pos) {
            return None;
        }
    }
    if go(s, induced, &mut seq, &mut pos, &mut used, n) {
        Some(seq)
    } else {
        None
    }
}

pub(crate) fn betweenness_order(s: &FiniteStructure) -> Option<Vec<usize>> {
    find_arrangement(s, between_in, false)
}

pub(crate) fn cyclic_arrangement(s: &FiniteStructure) -> Option<Vec<usize>> {
    find_arrangement(s, cyclic_in, true)
}

pub fn embeds_betweenness(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "betweenness", &[("B", 3)])?;
    Ok(betweenness_order(s).is_some())
}

pub fn embeds_cyclic(s: &FiniteStructure) -> Result<bool, AtomsError> {
    expect_vocab(s, "cyclic", &[("K", 3)])?;
    Ok(cyclic_arrangement(s).is_some())
}

/// Builds the structure on `seq.len()` elements induced by an arrangement.
fn from_arrangement(
    vocab: &std::sync::Arc<Vocabulary>,
    seq: &[usize],
    induced: fn(&[usize], usize, usize, usize) -> bool,
) -> FiniteStructure {
    let n = seq.len();
    let mut pos = vec![0; n];
    for (p, &e) in seq.iter().enumerate() {
        pos[e] = p;
    }
    let mut s = FiniteStructure::discrete(vocab.clone(), n);
    for t in all_tuples(n, 3) {
        if induced(&pos, t[0], t[1], t[2]) {
            s.set(1, &t, true);
        }
    }
    s
}

// ---- one-point extensions ---------------------------------------------------
//
// Each function returns every structure on `s.size() + 1` elements that
// restricts to `s` on the first `s.size()` elements and embeds. `s` itself must
// embed.

pub(crate) fn extend_equality(s: &FiniteStructure) -> Vec<FiniteStructure> {
    vec![s.with_new_element()]
}

pub(crate) fn extend_total_order(s: &FiniteStructure) -> Vec<FiniteStructure> {
    let n = s.size();
    // rank of each element = number of strictly smaller elements
    let rank: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && s.get(1, &[j, i])).count())
        .collect();
    (0..=n)
        .map(|slot| {
            let mut t = s.with_new_element();
            t.set(1, &[n, n], true);
            for (j, &r) in rank.iter().enumerate() {
                if r < slot {
                    t.set(1, &[j, n], true);
                } else {
                    t.set(1, &[n, j], true);
                }
            }
            t
        })
        .collect()
}

pub(crate) fn extend_equivalence(s: &FiniteStructure) -> Vec<FiniteStructure> {
    let n = s.size();
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        if !reps.iter().any(|&r| s.get(1, &[r, i])) {
            reps.push(i);
        }
    }
    let mut out = Vec::with_capacity(reps.len() + 1);
    for &r in &reps {
        let mut t = s.with_new_element();
        t.set(1, &[n, n], true);
        for j in 0..n {
            if s.get(1, &[r, j]) {
                t.set(1, &[n, j], true);
                t.set(1, &[j, n], true);
            }
        }
        out.push(t);
    }
    let mut fresh = s.with_new_element();
    fresh.set(1, &[n, n], true);
    out.push(fresh);
    out
}

pub(crate) fn extend_partial_order(s: &FiniteStructure) -> Vec<FiniteStructure> {
    let n = s.size();
    let mut out = Vec::new();
    // 0: incomparable, 1: new < j, 2: j < new
    let mut choice = vec![0u8; n];
    loop {
        let mut t = s.with_new_element();
        t.set(1, &[n, n], true);
        for (j, &c) in choice.iter().enumerate() {
            match c {
                1 => t.set(1, &[n, j], true),
                2 => t.set(1, &[j, n], true),
                _ => {}
            }
        }
        if antisymmetric(&t, 1) && transitive(&t, 1) {
            out.push(t);
        }
        // odometer
        let mut k = 0;
        while k < n && choice[k] == 2 {
            choice[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        choice[k] += 1;
    }
    out
}

fn extend_binary_by_subsets(s: &FiniteStructure, tournament: bool) -> Vec<FiniteStructure> {
    let n = s.size();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let mut t = s.with_new_element();
        for j in 0..n {
            let bit = mask >> j & 1 == 1;
            if tournament {
                if bit {
                    t.set(1, &[n, j], true);
                } else {
                    t.set(1, &[j, n], true);
                }
            } else if bit {
                t.set(1, &[n, j], true);
                t.set(1, &[j, n], true);
            }
        }
        out.push(t);
    }
    out
}

pub(crate) fn extend_graph(s: &FiniteStructure) -> Vec<FiniteStructure> {
    extend_binary_by_subsets(s, false)
}

pub(crate) fn extend_tournament(s: &FiniteStructure) -> Vec<FiniteStructure> {
    extend_binary_by_subsets(s, true)
}

/// Inserting the new element into every slot of one inducing arrangement
/// yields all extensions: any other inducing arrangement of `s` is its
/// reversal (betweenness) or a rotation (cyclic), which give the same set.
fn extend_arrangement(
    s: &FiniteStructure,
    seq: Vec<usize>,
    induced: fn(&[usize], usize, usize, usize) -> bool,
    slots: usize,
) -> Vec<FiniteStructure> {
    let n = s.size();
    let mut out = BTreeSet::new();
    for slot in 0..slots {
        let mut seq2 = seq.clone();
        seq2.insert(slot, n);
        out.insert(from_arrangement(s.vocabulary(), &seq2, induced));
    }
    out.into_iter().collect()
}

pub(crate) fn extend_betweenness(s: &FiniteStructure) -> Vec<FiniteStructure> {
    match betweenness_order(s) {
        Some(seq) => extend_arrangement(s, seq, between_in, s.size() + 1),
        None => Vec::new(),
    }
}

pub(crate) fn extend_cyclic(s: &FiniteStructure) -> Vec<FiniteStructure> {
    match cyclic_arrangement(s) {
        // inserting at the front is the same circle as inserting at the back
        Some(seq) => extend_arrangement(s, seq, cyclic_in, s.size().max(1)),
        None => Vec::new(),
    }
}

/// Brute-force one-point extensions: every assignment to the tuples that
/// mention the new element, filtered by `embeds`. Exponential in the number of
/// such tuples; used as a reference for the specialised generators.
pub fn extend_brute_force(
    s: &FiniteStructure,
    embeds: impl Fn(&FiniteStructure) -> bool,
) -> Vec<FiniteStructure> {
    let n = s.size();
    let vocab = s.vocabulary().clone();
    let mut slots: Vec<(usize, Vec<usize>)> = Vec::new();
    for rel in 1..vocab.len() {
        for t in all_tuples(n + 1, vocab.arity(rel)) {
            if t.contains(&n) {
                slots.push((rel, t));
            }
        }
    }
    assert!(slots.len() <= 24, "brute-force extension over {} tuples", slots.len());
    let base = s.with_new_element();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << slots.len()) {
        let mut t = base.clone();
        for (i, (rel, tuple)) in slots.iter().enumerate() {
            if mask >> i & 1 == 1 {
                t.set(*rel, tuple, true);
            }
        }
        if embeds(&t) {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn vocab(rels: &[(&str, usize)]) -> Arc<Vocabulary> {
        Arc::new(Vocabulary::new(rels.iter().copied()).unwrap())
    }

    fn st(rels: &[(&str, usize)], size: usize, tuples: Vec<(&str, Vec<Vec<usize>>)>) -> FiniteStructure {
        FiniteStructure::from_tuples(vocab(rels), size, tuples).unwrap()
    }

    fn diag(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|i| vec![i, i]).collect()
    }

    #[test]
    fn equality_examples() {
        assert!(embeds_equality(&st(&[], 3, vec![("eq", diag(3))])).unwrap());
        let mut off = diag(2);
        off.push(vec![0, 1]);
        assert!(!embeds_equality(&st(&[], 2, vec![("eq", off)])).unwrap());
        assert!(embeds_equality(&st(&[], 0, vec![("eq", vec![])])).unwrap());
    }

    #[test]
    fn vocabulary_mismatch_is_an_error() {
        let s = st(&[("le", 2)], 1, vec![]);
        assert!(matches!(embeds_equality(&s), Err(AtomsError::VocabularyMismatch { .. })));
        assert!(matches!(embeds_graph(&s), Err(AtomsError::VocabularyMismatch { .. })));
        assert!(embeds_total_order(&s).is_ok());
    }

    #[test]
    fn total_order_examples() {
        let le = &[("le", 2)];
        let mut chain = diag(3);
        chain.extend([vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert!(embeds_total_order(&st(le, 3, vec![("le", chain)])).unwrap());
        let mut broken = diag(3);
        broken.extend([vec![0, 1], vec![1, 2]]);
        assert!(!embeds_total_order(&st(le, 3, vec![("le", broken)])).unwrap());
        assert!(!embeds_total_order(&st(le, 2, vec![("le", diag(2))])).unwrap());
    }

    #[test]
    fn equivalence_examples() {
        let r = &[("R", 2)];
        let mut two = diag(3);
        two.extend([vec![0, 1], vec![1, 0]]);
        assert!(embeds_equivalence(&st(r, 3, vec![("R", two)])).unwrap());
        let mut bad = diag(3);
        bad.extend([vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1]]);
        assert!(!embeds_equivalence(&st(r, 3, vec![("R", bad)])).unwrap());
        assert!(embeds_equivalence(&st(r, 1, vec![("R", vec![vec![0, 0]])])).unwrap());
    }

    #[test]
    fn partial_order_examples() {
        let le = &[("le", 2)];
        assert!(embeds_partial_order(&st(le, 2, vec![("le", diag(2))])).unwrap());
        let mut chain = diag(3);
        chain.extend([vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert!(embeds_partial_order(&st(le, 3, vec![("le", chain)])).unwrap());
        let mut broken = diag(3);
        broken.extend([vec![0, 1], vec![1, 2]]);
        assert!(!embeds_partial_order(&st(le, 3, vec![("le", broken)])).unwrap());
    }

    #[test]
    fn graph_examples() {
        let e = &[("E", 2)];
        let c4: Vec<Vec<usize>> = (0..4)
            .flat_map(|i| [vec![i, (i + 1) % 4], vec![(i + 1) % 4, i]])
            .collect();
        assert!(embeds_graph(&st(e, 4, vec![("E", c4)])).unwrap());
        assert!(!embeds_graph(&st(e, 2, vec![("E", vec![vec![0, 0]])])).unwrap());
        assert!(!embeds_graph(&st(e, 2, vec![("E", vec![vec![0, 1]])])).unwrap());
    }

    #[test]
    fn tournament_examples() {
        let e = &[("E", 2)];
        let cyc = vec![vec![0, 1], vec![1, 2], vec![2, 0]];
        assert!(embeds_tournament(&st(e, 3, vec![("E", cyc)])).unwrap());
        assert!(!embeds_tournament(&st(e, 2, vec![("E", vec![vec![0, 1], vec![1, 0]])])).unwrap());
        assert!(!embeds_tournament(&st(e, 2, vec![("E", vec![])])).unwrap());
    }

    /// Relation induced by a permutation, computed straight from the definition.
    fn induced_by(order: &[usize], f: fn(&[usize], usize, usize, usize) -> bool) -> Vec<Vec<usize>> {
        let n = order.len();
        let mut pos = vec![0; n];
        for (p, &e) in order.iter().enumerate() {
            pos[e] = p;
        }
        all_tuples(n, 3).into_iter().filter(|t| f(&pos, t[0], t[1], t[2])).collect()
    }

    #[test]
    fn betweenness_examples() {
        let b = &[("B", 3)];
        let rel = induced_by(&[0, 1, 2], between_in);
        assert_eq!(rel, vec![vec![1, 0, 2], vec![1, 2, 0]]);
        assert!(embeds_betweenness(&st(b, 3, vec![("B", rel)])).unwrap());
        assert!(!embeds_betweenness(&st(b, 3, vec![("B", vec![vec![0, 1, 2], vec![1, 0, 2]])])).unwrap());
        assert!(embeds_betweenness(&st(b, 1, vec![])).unwrap());
        assert!(embeds_betweenness(&st(b, 0, vec![])).unwrap());
    }

    #[test]
    fn cyclic_examples() {
        let k = &[("K", 3)];
        let rel = vec![vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]];
        assert_eq!(
            induced_by(&[0, 1, 2], cyclic_in).into_iter().collect::<BTreeSet<_>>(),
            rel.iter().cloned().collect::<BTreeSet<_>>()
        );
        assert!(embeds_cyclic(&st(k, 3, vec![("K", rel)])).unwrap());
        assert!(!embeds_cyclic(&st(k, 3, vec![("K", vec![vec![0, 1, 2], vec![0, 2, 1]])])).unwrap());
        assert!(embeds_cyclic(&st(k, 2, vec![])).unwrap());
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for slot in 0..=p.len() {
                let mut q = p.clone();
                q.insert(slot, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn ternary_orders_accept_exactly_the_induced_relations() {
        // every induced relation embeds; every other relation over 4 elements
        // that is a union of some induced relations' tuples but not itself
        // induced must fail
        for (name, f, check) in [
            ("B", between_in as fn(&[usize], usize, usize, usize) -> bool, embeds_betweenness as fn(&FiniteStructure) -> Result<bool, AtomsError>),
            ("K", cyclic_in, embeds_cyclic),
        ] {
            let rels = &[(name, 3)];
            let induced: BTreeSet<Vec<Vec<usize>>> =
                permutations(4).iter().map(|p| induced_by(p, f)).collect();
            for rel in &induced {
                assert!(check(&st(rels, 4, vec![(name, rel.clone())])).unwrap());
            }
            // drop one tuple from each induced relation: never induced
            for rel in &induced {
                for skip in 0..rel.len() {
                    let mut r = rel.clone();
                    r.remove(skip);
                    if !induced.contains(&r) {
                        assert!(!check(&st(rels, 4, vec![(name, r)])).unwrap());
                    }
                }
            }
        }
    }

    type Embeds = fn(&FiniteStructure) -> Result<bool, AtomsError>;
    type Extend = fn(&FiniteStructure) -> Vec<FiniteStructure>;

    fn embeds_for(name: &str) -> (Vec<(&'static str, usize)>, Embeds, Extend) {
        match name {
            "equality" => (vec![], embeds_equality, extend_equality),
            "total_order" => (vec![("le", 2)], embeds_total_order, extend_total_order),
            "equivalence" => (vec![("R", 2)], embeds_equivalence, extend_equivalence),
            "partial_order" => (vec![("le", 2)], embeds_partial_order, extend_partial_order),
            "graph" => (vec![("E", 2)], embeds_graph, extend_graph),
            "tournament" => (vec![("E", 2)], embeds_tournament, extend_tournament),
            "betweenness" => (vec![("B", 3)], embeds_betweenness, extend_betweenness),
            "cyclic" => (vec![("K", 3)], embeds_cyclic, extend_cyclic),
            _ => unreachable!(),
        }
    }

    #[test]
    fn specialised_extensions_match_brute_force() {
        for name in [
            "equality",
            "total_order",
            "equivalence",
            "partial_order",
            "graph",
            "tournament",
            "betweenness",
            "cyclic",
        ] {
            let (rels, embeds, extend) = embeds_for(name);
            let v = vocab(&rels);
            let mut level = vec![FiniteStructure::discrete(v, 0)];
            for _ in 0..3 {
                let mut next = BTreeSet::new();
                for s in &level {
                    let fast: BTreeSet<_> = extend(s).into_iter().collect();
                    let slow: BTreeSet<_> =
                        extend_brute_force(s, |t| embeds(t).unwrap()).into_iter().collect();
                    assert_eq!(fast, slow, "{name} extensions of {s:?}");
                    next.extend(fast);
                }
                level = next.into_iter().collect();
            }
        }
    }
}
