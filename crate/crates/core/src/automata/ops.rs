use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::atoms::ConcreteAtom;
use crate::logic::{Clause, Conjunct, Ldnf, Theory};

use super::{AutomataError, FoNfa, FoSet};

/// Number of orbits of an FO-definable set: the total clause count.
pub fn orbit_count(s: &FoSet) -> usize {
    s.components.values().map(|c| c.constraint.len()).sum()
}

fn range(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

fn concat(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Synchronous product: state `a*b` carries the atoms of `a` followed by
/// those of `b`, and both machines read the same letter.
pub fn product_nfa(theory: &Theory, a: &FoNfa, b: &FoNfa) -> Result<FoNfa, AutomataError> {
    if a.alphabet != b.alphabet {
        return Err(AutomataError::AlphabetMismatch);
    }
    let pair = |la: &str, lb: &str| format!("{la}*{lb}");
    let both = |da: usize, fa: &Ldnf, db: usize, fb: &Ldnf| {
        theory.conjoin_project(
            da + db,
            &[Conjunct::new(fa, range(0, da)), Conjunct::new(fb, range(da, db))],
            &range(0, da + db),
        )
    };
    let mut out = FoNfa {
        alphabet: a.alphabet.clone(),
        ..FoNfa::default()
    };
    for (la, ca) in &a.states.components {
        for (lb, cb) in &b.states.components {
            let constraint = both(ca.dim, &ca.constraint, cb.dim, &cb.constraint)?;
            out.states.insert(pair(la, lb), ca.dim + cb.dim, constraint)?;
            if let (Some(fa), Some(fb)) = (a.finals.get(la), b.finals.get(lb)) {
                let fin = both(ca.dim, fa, cb.dim, fb)?;
                if !fin.is_empty() {
                    out.finals.insert(pair(la, lb), fin);
                }
            }
        }
    }
    for ((la, k, la2), da) in &a.delta {
        for ((lb, k2, lb2), db) in &b.delta {
            if k != k2 {
                continue;
            }
            let dim = |s: &FoSet, l: &str, kind| s.require(kind, l).map(|c| c.dim);
            let (xa, xb) = (dim(&a.states, la, "state")?, dim(&b.states, lb, "state")?);
            let y = dim(&a.alphabet, k, "letter")?;
            let (xa2, xb2) = (dim(&a.states, la2, "state")?, dim(&b.states, lb2, "state")?);
            let width = xa + xb + y + xa2 + xb2;
            let (sa, sb) = (range(0, xa), range(xa, xb));
            let ys = range(xa + xb, y);
            let (ta, tb) = (range(xa + xb + y, xa2), range(xa + xb + y + xa2, xb2));
            let joint = theory.conjoin_project(
                width,
                &[
                    Conjunct::new(da, concat(&[&sa, &ys, &ta])),
                    Conjunct::new(db, concat(&[&sb, &ys, &tb])),
                ],
                &range(0, width),
            )?;
            if !joint.is_empty() {
                out.delta.insert((pair(la, lb), k.clone(), pair(la2, lb2)), joint);
            }
        }
    }
    Ok(out)
}

/// Whether some word is accepted from some state of the given components.
pub fn nfa_nonempty(theory: &Theory, nfa: &FoNfa, starts: &[String]) -> Result<bool, AutomataError> {
    let starts = starts
        .iter()
        .map(|s| Ok((s.clone(), nfa.states.require("state", s)?.constraint.clone())))
        .collect::<Result<Vec<_>, AutomataError>>()?;
    nfa_nonempty_from(theory, nfa, &starts)
}

/// Nonemptiness from explicitly constrained start components.
///
/// Breadth-first search over orbit states `(index, clause)`: by
/// equivariance, an orbit can take a transition into an orbit iff any of its
/// members can.
pub fn nfa_nonempty_from(theory: &Theory, nfa: &FoNfa, starts: &[(String, Ldnf)]) -> Result<bool, AutomataError> {
    let mut by_source: BTreeMap<&str, Vec<(&str, &str, &Ldnf)>> = BTreeMap::new();
    for ((from, letter, to), d) in &nfa.delta {
        by_source.entry(from).or_default().push((letter, to, d));
    }
    let mut seen: BTreeSet<(String, Clause)> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for (label, start) in starts {
        let states = &nfa.states.require("state", label)?.constraint;
        for c in start.clauses() {
            if states.contains(c) && seen.insert((label.clone(), c.clone())) {
                queue.push_back((label.clone(), c.clone()));
            }
        }
    }
    while let Some((label, tau)) = queue.pop_front() {
        if nfa.finals.get(&label).is_some_and(|f| f.contains(&tau)) {
            return Ok(true);
        }
        let here = Ldnf::singleton(tau);
        let dx = here.width();
        for &(letter, to, d) in by_source.get(label.as_str()).into_iter().flatten() {
            let dy = nfa.alphabet.require("letter", letter)?.dim;
            let dx2 = nfa.states.require("state", to)?.dim;
            let width = dx + dy + dx2;
            let next = theory.conjoin_project(
                width,
                &[Conjunct::new(&here, range(0, dx)), Conjunct::new(d, range(0, width))],
                &range(dx + dy, dx2),
            )?;
            for c in next.clauses() {
                if seen.insert((to.to_string(), c.clone())) {
                    queue.push_back((to.to_string(), c.clone()));
                }
            }
        }
    }
    Ok(false)
}

/// For every state index, the clauses over (context atoms, state atoms) of
/// the states from which the remaining word is accepted.
pub type AcceptSets = BTreeMap<String, Ldnf>;

/// Symbolic acceptance relative to a fixed context of distinct concrete
/// atoms. Words are processed from the end; every intermediate state block
/// is projected away as soon as it has been read past, so the width never
/// exceeds the context size plus two state blocks.
pub struct Acceptor<'a> {
    theory: &'a Theory,
    nfa: &'a FoNfa,
    context: Vec<ConcreteAtom>,
    tau0: Ldnf,
    by_letter: BTreeMap<&'a str, Vec<(&'a str, &'a str, &'a Ldnf)>>,
    memo: HashMap<(String, Vec<usize>, AcceptSets), AcceptSets>,
}

impl<'a> Acceptor<'a> {
    /// `context` must consist of pairwise distinct atoms.
    pub fn new(theory: &'a Theory, nfa: &'a FoNfa, context: Vec<ConcreteAtom>) -> Result<Acceptor<'a>, AutomataError> {
        let tau0 = Ldnf::singleton(theory.atoms().complete_clause_of(&context)?);
        let mut by_letter: BTreeMap<&str, Vec<(&str, &str, &Ldnf)>> = BTreeMap::new();
        for ((from, letter, to), d) in &nfa.delta {
            by_letter.entry(letter).or_default().push((from, to, d));
        }
        Ok(Acceptor {
            theory,
            nfa,
            context,
            tau0,
            by_letter,
            memo: HashMap::new(),
        })
    }

    pub fn context(&self) -> &[ConcreteAtom] {
        &self.context
    }

    pub fn position(&self, atom: &ConcreteAtom) -> Option<usize> {
        self.context.iter().position(|a| a == atom)
    }

    pub fn positions(&self, atoms: &[ConcreteAtom]) -> Result<Vec<usize>, AutomataError> {
        atoms
            .iter()
            .map(|a| {
                self.position(a).ok_or_else(|| AutomataError::UnknownIndex {
                    kind: "context atom",
                    label: a.to_string(),
                })
            })
            .collect()
    }

    fn c(&self) -> usize {
        self.context.len()
    }

    /// Sets for the empty remaining word: the final states.
    pub fn empty_word(&self) -> Result<AcceptSets, AutomataError> {
        let c = self.c();
        let mut out = AcceptSets::new();
        for (label, comp) in &self.nfa.states.components {
            let Some(fin) = self.nfa.finals.get(label) else {
                continue;
            };
            let width = c + comp.dim;
            let sets = self.theory.conjoin_project(
                width,
                &[Conjunct::new(&self.tau0, range(0, c)), Conjunct::new(fin, range(c, comp.dim))],
                &range(0, width),
            )?;
            if !sets.is_empty() {
                out.insert(label.clone(), sets);
            }
        }
        Ok(out)
    }

    /// Sets for the word `(letter, context[positions]) · w`, given the sets for `w`.
    pub fn step(&mut self, letter: &str, positions: &[usize], next: &AcceptSets) -> Result<AcceptSets, AutomataError> {
        let key = (letter.to_string(), positions.to_vec(), next.clone());
        if let Some(found) = self.memo.get(&key) {
            return Ok(found.clone());
        }
        let dy = self.nfa.alphabet.require("letter", letter)?.dim;
        if dy != positions.len() {
            return Err(AutomataError::DimensionMismatch {
                what: format!("letter `{letter}`"),
                expected: dy,
                found: positions.len(),
            });
        }
        let c = self.c();
        let mut out = AcceptSets::new();
        for &(from, to, d) in self.by_letter.get(letter).into_iter().flatten() {
            let Some(after) = next.get(to) else {
                continue;
            };
            let dx = self.nfa.states.require("state", from)?.dim;
            let dx2 = self.nfa.states.require("state", to)?.dim;
            let width = c + dx + dx2;
            let ctx = range(0, c);
            let src = range(c, dx);
            let dst = range(c + dx, dx2);
            let sets = self.theory.conjoin_project(
                width,
                &[
                    Conjunct::new(&self.tau0, ctx.clone()),
                    Conjunct::new(d, concat(&[&src, positions, &dst])),
                    Conjunct::new(after, concat(&[&ctx, &dst])),
                ],
                &range(0, c + dx),
            )?;
            if !sets.is_empty() {
                match out.get_mut(from) {
                    Some(acc) => acc.union_in_place(&sets)?,
                    None => {
                        out.insert(from.to_string(), sets);
                    }
                }
            }
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// Sets for a whole word given as context positions.
    pub fn word(&mut self, word: &[(String, Vec<usize>)]) -> Result<AcceptSets, AutomataError> {
        let mut sets = self.empty_word()?;
        for (letter, positions) in word.iter().rev() {
            sets = self.step(letter, positions, &sets)?;
        }
        Ok(sets)
    }

    /// Whether the state `(state, context[positions])` is in the sets.
    pub fn accepts(&self, sets: &AcceptSets, state: &str, positions: &[usize]) -> Result<bool, AutomataError> {
        let dim = self.nfa.states.require("state", state)?.dim;
        if dim != positions.len() {
            return Err(AutomataError::DimensionMismatch {
                what: format!("state `{state}`"),
                expected: dim,
                found: positions.len(),
            });
        }
        let Some(found) = sets.get(state) else {
            return Ok(false);
        };
        let vars = concat(&[&range(0, self.c()), positions]);
        let clause = self.tau0.clauses().first().unwrap().restrict(self.theory.vocabulary(), &vars);
        Ok(found.contains(&clause))
    }

    /// Whether some state tuple satisfying `start` is in the sets.
    pub fn accepts_some(&self, sets: &AcceptSets, state: &str, start: &Ldnf) -> Result<bool, AutomataError> {
        let Some(found) = sets.get(state) else {
            return Ok(false);
        };
        let c = self.c();
        let dim = start.width();
        let witness = self.theory.conjoin_project(
            c + dim,
            &[Conjunct::new(found, range(0, c + dim)), Conjunct::new(start, range(c, dim))],
            &[],
        )?;
        Ok(!witness.is_empty())
    }
}

/// Whether `nfa` accepts `word` (top letter first) from the state
/// `(start.0, start.1)`.
pub fn nfa_accepts(
    theory: &Theory,
    nfa: &FoNfa,
    start: (&str, &[ConcreteAtom]),
    word: &[(String, Vec<ConcreteAtom>)],
) -> Result<bool, AutomataError> {
    let (state, atoms) = start;
    let sdim = nfa.states.require("state", state)?.dim;
    if sdim != atoms.len() {
        return Err(AutomataError::DimensionMismatch {
            what: format!("state `{state}`"),
            expected: sdim,
            found: atoms.len(),
        });
    }
    for (letter, letter_atoms) in word {
        let dim = nfa.alphabet.require("letter", letter)?.dim;
        if dim != letter_atoms.len() {
            return Err(AutomataError::DimensionMismatch {
                what: format!("letter `{letter}`"),
                expected: dim,
                found: letter_atoms.len(),
            });
        }
    }
    let mut context: Vec<ConcreteAtom> = Vec::new();
    for a in atoms.iter().chain(word.iter().flat_map(|(_, xs)| xs.iter())) {
        if !context.contains(a) {
            context.push(a.clone());
        }
    }
    let mut acceptor = Acceptor::new(theory, nfa, context)?;
    let start_positions = acceptor.positions(atoms)?;
    let positional = word
        .iter()
        .map(|(l, xs)| Ok((l.clone(), acceptor.positions(xs)?)))
        .collect::<Result<Vec<_>, AutomataError>>()?;
    let sets = acceptor.word(&positional)?;
    acceptor.accepts(&sets, state, &start_positions)
}
