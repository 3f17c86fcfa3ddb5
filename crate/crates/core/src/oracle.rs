//! Explicit-state ground truth: FO-definable machines instantiated over a
//! finite set of concrete atoms, saturated classically.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::atoms::{AtomBackend, AtomsError, ConcreteAtom, FiniteStructure};
use crate::automata::{Acceptor, AcceptSets, AutomataError, Configuration, FoNfa, FoPds, FoSet};
use crate::logic::{Clause, Ldnf, Theory};
use crate::saturation::{saturate, SaturationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Atoms(#[from] AtomsError),
    #[error(transparent)]
    Saturation(#[from] SaturationError),
    #[error("atom `{0}` occurs twice in the universe")]
    DuplicateAtom(String),
    #[error("atom `{0}` is not in the universe")]
    OutsideUniverse(String),
    #[error("universe is over `{universe}` but the theory is over `{theory}`")]
    BackendMismatch { universe: String, theory: String },
}

impl From<AutomataError> for OracleError {
    fn from(e: AutomataError) -> OracleError {
        OracleError::Saturation(e.into())
    }
}

/// A finite set of pairwise distinct concrete atoms of one backend.
#[derive(Debug, Clone)]
pub struct FiniteUniverse {
    backend: AtomBackend,
    atoms: Vec<ConcreteAtom>,
    structure: FiniteStructure,
}

impl FiniteUniverse {
    pub fn new(backend: AtomBackend, atoms: Vec<ConcreteAtom>) -> Result<FiniteUniverse, OracleError> {
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(OracleError::DuplicateAtom(a.to_string()));
            }
        }
        let structure = backend.structure_of(&atoms)?;
        Ok(FiniteUniverse {
            backend,
            atoms,
            structure,
        })
    }

    /// Parses a comma-separated atom list, e.g. `0,1,2,3`.
    pub fn parse(backend: AtomBackend, text: &str) -> Result<FiniteUniverse, OracleError> {
        let atoms = text
            .split(',')
            .map(|t| backend.parse_atom(t))
            .collect::<Result<Vec<_>, _>>()?;
        FiniteUniverse::new(backend, atoms)
    }

    /// Default universe for the backends with a concrete model: four atoms
    /// for equality, total order and equivalence (2 classes of 2), six graph
    /// vertices.
    pub fn default_for(backend: &AtomBackend) -> Option<FiniteUniverse> {
        let text = match backend.name().as_str() {
            "equality" => "#0,#1,#2,#3",
            "total_order" => "0,1,2,3",
            "equivalence" => "0:0,0:1,1:0,1:1",
            "graph" => "#0,#1,#2,#3,#4,#5",
            _ => return None,
        };
        FiniteUniverse::parse(backend.clone(), text).ok()
    }

    pub fn backend(&self) -> &AtomBackend {
        &self.backend
    }

    pub fn atoms(&self) -> &[ConcreteAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &ConcreteAtom) -> Result<usize, OracleError> {
        self.atoms
            .iter()
            .position(|a| a == atom)
            .ok_or_else(|| OracleError::OutsideUniverse(atom.to_string()))
    }

    pub fn atoms_of(&self, indices: &[usize]) -> Vec<ConcreteAtom> {
        indices.iter().map(|&i| self.atoms[i].clone()).collect()
    }

    /// The complete clause satisfied by a tuple of universe indices.
    pub fn clause_of(&self, tuple: &[usize]) -> Clause {
        let mut mapped = Vec::with_capacity(4);
        Clause::from_fn(self.backend.vocabulary(), tuple.len(), |rel, args| {
            mapped.clear();
            mapped.extend(args.iter().map(|&i| tuple[i]));
            self.structure.get(rel, &mapped)
        })
    }

    /// All index tuples whose complete clause lies in `d`, in lexicographic order.
    pub fn instantiate(&self, d: &Ldnf) -> Vec<Vec<usize>> {
        let vocab = self.backend.vocabulary();
        let n = d.width();
        let prefixes: Vec<BTreeSet<Clause>> = (0..=n)
            .map(|i| {
                let vars: Vec<usize> = (0..i).collect();
                d.clauses().iter().map(|c| c.restrict(vocab, &vars)).collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut tuple = Vec::with_capacity(n);
        self.extend_tuple(&prefixes, &mut tuple, &mut out);
        out
    }

    fn extend_tuple(&self, prefixes: &[BTreeSet<Clause>], tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !prefixes[tuple.len()].contains(&self.clause_of(tuple)) {
            return;
        }
        if tuple.len() + 1 == prefixes.len() {
            out.push(tuple.clone());
            return;
        }
        for a in 0..self.atoms.len() {
            tuple.push(a);
            self.extend_tuple(prefixes, tuple, out);
            tuple.pop();
        }
    }
}

/// An instantiated state, location or letter: index label and universe indices.
pub type Item = (String, Vec<usize>);
pub type ExplicitTransition = (Item, Item, Item);
pub type ExplicitPush = (Item, Item, Item, Item, Item);
type ItemTriple<'a> = (&'a Item, &'a Item, &'a Item);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplicitNfa {
    pub letters: BTreeSet<Item>,
    pub states: BTreeSet<Item>,
    pub finals: BTreeSet<Item>,
    pub delta: BTreeSet<ExplicitTransition>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplicitPds {
    pub letters: BTreeSet<Item>,
    pub locations: BTreeSet<Item>,
    pub push: BTreeSet<ExplicitPush>,
    pub pop: BTreeSet<ExplicitTransition>,
}

fn split(tuple: &[usize], dims: &[usize]) -> Vec<Vec<usize>> {
    let mut start = 0;
    dims.iter()
        .map(|&d| {
            let part = tuple[start..start + d].to_vec();
            start += d;
            part
        })
        .collect()
}

fn dims_of(set: &FoSet, kind: &'static str, labels: &[&str]) -> Result<Vec<usize>, OracleError> {
    labels
        .iter()
        .map(|l| {
            set.dim(l).ok_or_else(|| {
                AutomataError::UnknownIndex {
                    kind,
                    label: l.to_string(),
                }
                .into()
            })
        })
        .collect()
}

pub fn instantiate_set(u: &FiniteUniverse, set: &FoSet) -> BTreeSet<Item> {
    set.components
        .iter()
        .flat_map(|(label, c)| u.instantiate(&c.constraint).into_iter().map(move |t| (label.clone(), t)))
        .collect()
}

pub fn instantiate_nfa(u: &FiniteUniverse, nfa: &FoNfa) -> Result<ExplicitNfa, OracleError> {
    let mut out = ExplicitNfa {
        letters: instantiate_set(u, &nfa.alphabet),
        states: instantiate_set(u, &nfa.states),
        ..ExplicitNfa::default()
    };
    for (label, fin) in &nfa.finals {
        out.finals.extend(u.instantiate(fin).into_iter().map(|t| (label.clone(), t)));
    }
    for ((from, k, to), d) in &nfa.delta {
        let mut dims = dims_of(&nfa.states, "state", &[from])?;
        dims.extend(dims_of(&nfa.alphabet, "letter", &[k])?);
        dims.extend(dims_of(&nfa.states, "state", &[to])?);
        for t in u.instantiate(d) {
            let mut parts = split(&t, &dims).into_iter();
            let mut next = |label: &str| (label.to_string(), parts.next().unwrap());
            out.delta.insert((next(from), next(k), next(to)));
        }
    }
    Ok(out)
}

pub fn instantiate_pds(u: &FiniteUniverse, pds: &FoPds) -> Result<ExplicitPds, OracleError> {
    let mut out = ExplicitPds {
        letters: instantiate_set(u, &pds.alphabet),
        locations: instantiate_set(u, &pds.locations),
        ..ExplicitPds::default()
    };
    for ((l, k, l2, k1, k2), d) in &pds.push {
        let mut dims = dims_of(&pds.locations, "location", &[l])?;
        dims.extend(dims_of(&pds.alphabet, "letter", &[k])?);
        dims.extend(dims_of(&pds.locations, "location", &[l2])?);
        dims.extend(dims_of(&pds.alphabet, "letter", &[k1, k2])?);
        for t in u.instantiate(d) {
            let mut parts = split(&t, &dims).into_iter();
            let mut next = |label: &str| (label.to_string(), parts.next().unwrap());
            out.push.insert((next(l), next(k), next(l2), next(k1), next(k2)));
        }
    }
    for ((l, k, l2), d) in &pds.pop {
        let mut dims = dims_of(&pds.locations, "location", &[l])?;
        dims.extend(dims_of(&pds.alphabet, "letter", &[k])?);
        dims.extend(dims_of(&pds.locations, "location", &[l2])?);
        for t in u.instantiate(d) {
            let mut parts = split(&t, &dims).into_iter();
            let mut next = |label: &str| (label.to_string(), parts.next().unwrap());
            out.pop.insert((next(l), next(k), next(l2)));
        }
    }
    Ok(out)
}

/// Classical saturation with a worklist. A push rule `(p,γ) -> (p',γ'γ'')`
/// meeting a transition `(p',γ',q)` leaves the obligation that any
/// `(q,γ'',q')` yields `(p,γ,q')`; obligations are kept per `(q,γ'')`.
pub fn explicit_saturate(pds: &ExplicitPds, nfa: &ExplicitNfa) -> ExplicitNfa {
    let mut by_top: HashMap<(&Item, &Item), Vec<ItemTriple>> = HashMap::new();
    for (p, k, p2, k1, k2) in &pds.push {
        by_top.entry((p2, k1)).or_default().push((p, k, k2));
    }
    let mut rel: BTreeSet<ExplicitTransition> = BTreeSet::new();
    let mut targets: HashMap<(Item, Item), Vec<Item>> = HashMap::new();
    let mut pending: HashMap<(Item, Item), HashSet<(Item, Item)>> = HashMap::new();
    let mut work: VecDeque<ExplicitTransition> = nfa.delta.iter().chain(&pds.pop).cloned().collect();
    while let Some(t) = work.pop_front() {
        if !rel.insert(t.clone()) {
            continue;
        }
        let (q, k, q2) = t;
        targets.entry((q.clone(), k.clone())).or_default().push(q2.clone());
        if let Some(waiting) = pending.get(&(q.clone(), k.clone())) {
            for (p, g) in waiting {
                work.push_back((p.clone(), g.clone(), q2.clone()));
            }
        }
        for &(p, g, k2) in by_top.get(&(&q, &k)).into_iter().flatten() {
            let key = (q2.clone(), k2.clone());
            if pending.entry(key.clone()).or_default().insert((p.clone(), g.clone())) {
                for q3 in targets.get(&key).into_iter().flatten() {
                    work.push_back((p.clone(), g.clone(), q3.clone()));
                }
            }
        }
    }
    ExplicitNfa {
        delta: rel,
        ..nfa.clone()
    }
}

/// Explicit transitions indexed by (source, letter).
pub struct ExplicitIndex<'a> {
    nfa: &'a ExplicitNfa,
    targets: HashMap<(&'a Item, &'a Item), Vec<&'a Item>>,
    by_letter: HashMap<&'a Item, Vec<(&'a Item, &'a Item)>>,
}

impl<'a> ExplicitIndex<'a> {
    pub fn new(nfa: &'a ExplicitNfa) -> ExplicitIndex<'a> {
        let mut targets: HashMap<(&Item, &Item), Vec<&Item>> = HashMap::new();
        let mut by_letter: HashMap<&Item, Vec<(&Item, &Item)>> = HashMap::new();
        for (q, k, q2) in &nfa.delta {
            targets.entry((q, k)).or_default().push(q2);
            by_letter.entry(k).or_default().push((q, q2));
        }
        ExplicitIndex {
            nfa,
            targets,
            by_letter,
        }
    }

    /// Forward simulation from one state.
    pub fn accepts(&self, start: &Item, word: &[Item]) -> bool {
        let mut current: BTreeSet<&Item> = BTreeSet::from([start]);
        for letter in word {
            current = current
                .iter()
                .flat_map(|q| self.targets.get(&(*q, letter)).into_iter().flatten().copied())
                .collect();
        }
        current.iter().any(|q| self.nfa.finals.contains(*q))
    }

    /// States from which `letter · w` is accepted, given those for `w`.
    pub fn step_back(&self, letter: &Item, after: &BTreeSet<Item>) -> BTreeSet<Item> {
        self.by_letter
            .get(letter)
            .into_iter()
            .flatten()
            .filter(|(_, q2)| after.contains(*q2))
            .map(|(q, _)| (*q).clone())
            .collect()
    }
}

fn item_of(u: &FiniteUniverse, label: &str, atoms: &[ConcreteAtom]) -> Result<Item, OracleError> {
    let idx = atoms.iter().map(|a| u.index_of(a)).collect::<Result<Vec<_>, _>>()?;
    Ok((label.to_string(), idx))
}

/// Membership of a configuration over universe atoms in the backward
/// reachability set of the instantiated system.
pub fn explicit_prestar_member(
    u: &FiniteUniverse,
    pds: &ExplicitPds,
    nfa: &ExplicitNfa,
    c: &Configuration,
) -> Result<bool, OracleError> {
    let saturated = explicit_saturate(pds, nfa);
    let start = item_of(u, &c.location, &c.state_atoms)?;
    let word = c
        .stack
        .iter()
        .map(|(k, atoms)| item_of(u, k, atoms))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExplicitIndex::new(&saturated).accepts(&start, &word))
}

/// One disagreement found by [`cross_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discrepancy {
    Membership {
        configuration: Configuration,
        explicit: bool,
        symbolic: bool,
    },
    Transition {
        transition: String,
        explicit: bool,
        symbolic: bool,
    },
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        match self {
            Discrepancy::Membership {
                configuration,
                explicit,
                symbolic,
            } => write!(
                f,
                "configuration {configuration}: explicit {}, symbolic {}",
                yn(*explicit),
                yn(*symbolic)
            ),
            Discrepancy::Transition {
                transition,
                explicit,
                symbolic,
            } => write!(
                f,
                "saturated transition {transition}: explicit {}, symbolic {}",
                yn(*explicit),
                yn(*symbolic)
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossCheckReport {
    /// Whether all dimensions are 0, in which case agreement must be exact.
    pub exact: bool,
    pub configurations: usize,
    pub explicit_members: usize,
    pub symbolic_members: usize,
    pub explicit_transitions: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl CrossCheckReport {
    pub fn is_ok(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", if self.exact { "exact" } else { "containment" })?;
        writeln!(f, "configurations: {}", self.configurations)?;
        writeln!(f, "explicit members: {}", self.explicit_members)?;
        writeln!(f, "symbolic members: {}", self.symbolic_members)?;
        writeln!(f, "explicit saturated transitions: {}", self.explicit_transitions)?;
        writeln!(f, "discrepancies: {}", self.discrepancies.len())?;
        for d in &self.discrepancies {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

fn all_dims_zero(pds: &FoPds, nfa: &FoNfa) -> bool {
    [&pds.alphabet, &pds.locations, &nfa.alphabet, &nfa.states]
        .iter()
        .all(|s| s.components.values().all(|c| c.dim == 0))
}

fn render_item(u: &FiniteUniverse, (label, idx): &Item) -> String {
    let atoms: Vec<String> = u.atoms_of(idx).iter().map(|a| a.to_string()).collect();
    format!("{label}({})", atoms.join(","))
}

/// Which configurations [`cross_check_with`] visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumeration {
    /// Skips stack suffixes that no instantiated state accepts (and, in
    /// exact mode, that no symbolic state accepts either).
    Pruned,
    /// Every configuration up to the stack bound.
    Exhaustive,
}

/// Compares symbolic and explicit saturation on every configuration over
/// the universe with at most `stack_bound` letters, reporting where an
/// explicit member is not a symbolic member (or, for dimension-0 systems,
/// any disagreement), plus saturated transitions of the instantiation that
/// the symbolic result misses.
pub fn cross_check(
    theory: &Theory,
    u: &FiniteUniverse,
    pds: &FoPds,
    nfa: &FoNfa,
    stack_bound: usize,
) -> Result<CrossCheckReport, OracleError> {
    cross_check_with(theory, u, pds, nfa, stack_bound, Enumeration::Pruned, |_, _, _| {})
}

/// [`cross_check`] with a choice of enumeration and a callback receiving
/// every visited configuration with the explicit and symbolic answers.
pub fn cross_check_with(
    theory: &Theory,
    u: &FiniteUniverse,
    pds: &FoPds,
    nfa: &FoNfa,
    stack_bound: usize,
    enumeration: Enumeration,
    mut visit: impl FnMut(&Configuration, bool, bool),
) -> Result<CrossCheckReport, OracleError> {
    if theory.atoms() != u.backend() {
        return Err(OracleError::BackendMismatch {
            universe: u.backend().name(),
            theory: theory.atoms().name(),
        });
    }
    let exact = all_dims_zero(pds, nfa);
    let symbolic = saturate(theory, pds, nfa)?.automaton;
    let (epds, enfa) = (instantiate_pds(u, pds)?, instantiate_nfa(u, nfa)?);
    let explicit = explicit_saturate(&epds, &enfa);
    let mut report = CrossCheckReport {
        exact,
        explicit_transitions: explicit.delta.len(),
        ..CrossCheckReport::default()
    };

    let symbolic_delta = instantiate_nfa(u, &symbolic)?.delta;
    let transition = |(q, k, q2): &ExplicitTransition| {
        format!("{} -{}-> {}", render_item(u, q), render_item(u, k), render_item(u, q2))
    };
    for t in explicit.delta.difference(&symbolic_delta) {
        report.discrepancies.push(Discrepancy::Transition {
            transition: transition(t),
            explicit: true,
            symbolic: false,
        });
    }
    if exact {
        for t in symbolic_delta.difference(&explicit.delta) {
            report.discrepancies.push(Discrepancy::Transition {
                transition: transition(t),
                explicit: false,
                symbolic: true,
            });
        }
    }

    // The symbolic side works relative to the whole universe, so letter
    // atoms are addressed by their universe index. Its width is the
    // universe size plus two state blocks.
    let max_state = symbolic.states.components.values().map(|c| c.dim).max().unwrap_or(0);
    let needed = u.len() + 2 * max_state;
    let wide;
    let sym_theory = if needed > theory.max_width() {
        wide = Theory::with_max_width(theory.atoms().clone(), needed);
        &wide
    } else {
        theory
    };
    let mut acceptor = Acceptor::new(sym_theory, &symbolic, u.atoms().to_vec())?;
    let index = ExplicitIndex::new(&explicit);
    let starts: Vec<Item> = epds.locations.iter().cloned().collect();
    let letters: Vec<Item> = epds.letters.iter().cloned().collect();
    let mut search = Search {
        u,
        acceptor: &mut acceptor,
        index: &index,
        starts: &starts,
        letters: &letters,
        bound: stack_bound,
        prune: enumeration == Enumeration::Pruned,
        exact,
        report: &mut report,
        visit: &mut visit,
    };
    let explicit_empty = explicit.finals.clone();
    let symbolic_empty = search.acceptor.empty_word()?;
    let mut word = Vec::new();
    search.run(&mut word, &explicit_empty, &symbolic_empty)?;
    Ok(report)
}

struct Search<'s, 'a, F> {
    u: &'s FiniteUniverse,
    acceptor: &'s mut Acceptor<'a>,
    index: &'s ExplicitIndex<'s>,
    starts: &'s [Item],
    letters: &'s [Item],
    bound: usize,
    prune: bool,
    exact: bool,
    report: &'s mut CrossCheckReport,
    visit: &'s mut F,
}

impl<F: FnMut(&Configuration, bool, bool)> Search<'_, '_, F> {
    /// `word` holds the stack suffix top-last; the sets are for that suffix.
    fn run(&mut self, word: &mut Vec<Item>, explicit: &BTreeSet<Item>, symbolic: &AcceptSets) -> Result<(), OracleError> {
        for start in self.starts {
            let e = explicit.contains(start);
            let s = self.acceptor.accepts(symbolic, &start.0, &start.1)?;
            self.report.configurations += 1;
            self.report.explicit_members += usize::from(e);
            self.report.symbolic_members += usize::from(s);
            let config = Configuration {
                location: start.0.clone(),
                state_atoms: self.u.atoms_of(&start.1),
                stack: word
                    .iter()
                    .rev()
                    .map(|(k, idx)| (k.clone(), self.u.atoms_of(idx)))
                    .collect(),
            };
            (self.visit)(&config, e, s);
            if (e && !s) || (self.exact && e != s) {
                self.report.discrepancies.push(Discrepancy::Membership {
                    configuration: config,
                    explicit: e,
                    symbolic: s,
                });
            }
        }
        if word.len() == self.bound {
            return Ok(());
        }
        for letter in self.letters {
            let e = self.index.step_back(letter, explicit);
            let s = self.acceptor.step(&letter.0, &letter.1, symbolic)?;
            if self.prune && e.is_empty() && (!self.exact || s.is_empty()) {
                continue;
            }
            word.push(letter.clone());
            self.run(word, &e, &s)?;
            word.pop();
        }
        Ok(())
    }
}

/// Breadth-first search for a run of the instantiated PDS from `from` that
/// empties the stack `word`, ending in any location; returns the reachable
/// end locations. Stacks longer than `max_stack` are not explored.
pub fn explicit_emptying_runs(pds: &ExplicitPds, from: &Item, word: &[Item], max_stack: usize) -> BTreeSet<Item> {
    type Config = (Item, Vec<Item>);
    let mut push_rules: BTreeMap<(&Item, &Item), Vec<ItemTriple>> = BTreeMap::new();
    for (p, k, p2, k1, k2) in &pds.push {
        push_rules.entry((p, k)).or_default().push((p2, k1, k2));
    }
    let mut pop_rules: BTreeMap<(&Item, &Item), Vec<&Item>> = BTreeMap::new();
    for (p, k, p2) in &pds.pop {
        pop_rules.entry((p, k)).or_default().push(p2);
    }
    // stacks are stored top-last
    let start: Config = (from.clone(), word.iter().rev().cloned().collect());
    let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut ends = BTreeSet::new();
    while let Some((p, stack)) = queue.pop_front() {
        let Some(top) = stack.last() else {
            ends.insert(p);
            continue;
        };
        let mut next = Vec::new();
        for &p2 in pop_rules.get(&(&p, top)).into_iter().flatten() {
            next.push((p2.clone(), stack[..stack.len() - 1].to_vec()));
        }
        if stack.len() < max_stack {
            for &(p2, k1, k2) in push_rules.get(&(&p, top)).into_iter().flatten() {
                let mut s = stack[..stack.len() - 1].to_vec();
                s.push(k2.clone());
                s.push(k1.clone());
                next.push((p2.clone(), s));
            }
        }
        for c in next {
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    ends
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{mono_pds, nfa_a};

    fn order(n: usize) -> FiniteUniverse {
        let text: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        FiniteUniverse::parse(AtomBackend::total_order(), &text.join(",")).unwrap()
    }

    #[test]
    fn instantiation_counts() {
        let t = Theory::new(AtomBackend::total_order());
        assert_eq!(order(2).instantiate(&t.full(2).unwrap()).len(), 4);
        let lt = t.ldnf_of("lt(a,b)", &["a", "b"]).unwrap();
        assert_eq!(order(3).instantiate(&lt), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(order(3).instantiate(&t.full(0).unwrap()), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn universe_must_be_distinct() {
        let err = FiniteUniverse::parse(AtomBackend::total_order(), "0,1,2/2").unwrap_err();
        assert_eq!(err, OracleError::DuplicateAtom("1".into()));
        let err = FiniteUniverse::parse(AtomBackend::partial_order(), "0").unwrap_err();
        assert!(matches!(err, OracleError::Atoms(AtomsError::CapabilityUnsupported { .. })));
    }

    #[test]
    fn default_universes() {
        for b in ["equality", "total_order", "equivalence", "graph"] {
            let backend = AtomBackend::parse(b).unwrap();
            assert!(FiniteUniverse::default_for(&backend).is_some(), "{b}");
        }
        assert!(FiniteUniverse::default_for(&AtomBackend::tournament()).is_none());
    }

    #[test]
    fn explicit_saturation_of_running_example() {
        let t = Theory::new(AtomBackend::total_order());
        let u = order(3);
        let (pds, a) = (mono_pds(&t).unwrap(), nfa_a(&t).unwrap());
        let (epds, ea) = (instantiate_pds(&u, &pds).unwrap(), instantiate_nfa(&u, &a).unwrap());
        let sat = explicit_saturate(&epds, &ea);
        let added: BTreeSet<_> = sat.delta.difference(&ea.delta).cloned().collect();
        let item = |l: &str, v: &[usize]| (l.to_string(), v.to_vec());
        let expected: BTreeSet<_> = (0..3)
            .flat_map(|y| (y..3).map(move |x| (y, x)))
            .map(|(y, x)| (item("lI", &[]), item("k", &[y]), item("l1", &[x])))
            .collect();
        assert_eq!(expected.len(), 6);
        // y = 2 would need a pushed letter above the largest atom
        let missing = (item("lI", &[]), item("k", &[2]), item("l1", &[2]));
        assert!(added.is_subset(&expected));
        assert_eq!(expected.difference(&added).collect::<Vec<_>>(), vec![&missing]);
    }

    #[test]
    fn explicit_membership() {
        let t = Theory::new(AtomBackend::total_order());
        let u = order(4);
        let (pds, a) = (mono_pds(&t).unwrap(), nfa_a(&t).unwrap());
        let (epds, ea) = (instantiate_pds(&u, &pds).unwrap(), instantiate_nfa(&u, &a).unwrap());
        let config = |xs: &[i64]| Configuration {
            location: "lI".into(),
            state_atoms: vec![],
            stack: xs.iter().map(|&x| ("k".to_string(), vec![ConcreteAtom::integer(x)])).collect(),
        };
        assert!(explicit_prestar_member(&u, &epds, &ea, &config(&[2, 1, 3])).unwrap());
        assert!(!explicit_prestar_member(&u, &epds, &ea, &config(&[3, 1])).unwrap());
        assert!(!explicit_prestar_member(&u, &epds, &ea, &config(&[])).unwrap());
    }

    #[test]
    fn pop_only_saturation_adds_pop_rules() {
        let mut pds = ExplicitPds::default();
        let item = |l: &str| (l.to_string(), vec![]);
        pds.pop.insert((item("p"), item("a"), item("q")));
        let mut nfa = ExplicitNfa::default();
        nfa.delta.insert((item("q"), item("a"), item("f")));
        let sat = explicit_saturate(&pds, &nfa);
        assert_eq!(sat.delta.len(), 2);
    }

    #[test]
    fn cross_check_running_example() {
        let t = Theory::new(AtomBackend::total_order());
        let (pds, a) = (mono_pds(&t).unwrap(), nfa_a(&t).unwrap());
        let report = cross_check(&t, &order(4), &pds, &a, 4).unwrap();
        assert!(report.is_ok(), "{report}");
        assert!(report.explicit_members > 0);
        assert!(!report.exact);
    }
}
