use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::atoms::{all_tuples, AtomBackend, AtomsError, FiniteStructure, Vocabulary};

use super::{Clause, Expr, Formula, Ldnf, Literal, LogicError};

pub const DEFAULT_MAX_WIDTH: usize = 8;

/// One conjunct of a [`Theory::conjoin_project`] call: an ldnf whose variable
/// `p` is read as variable `map[p]` of the conjunction.
#[derive(Debug, Clone)]
pub struct Conjunct<'a> {
    pub ldnf: &'a Ldnf,
    pub map: Vec<usize>,
}

impl<'a> Conjunct<'a> {
    pub fn new(ldnf: &'a Ldnf, map: Vec<usize>) -> Conjunct<'a> {
        Conjunct { ldnf, map }
    }
}

/// An atom backend together with the width budget and the cache of legal
/// clauses per width. Clones share the cache.
#[derive(Clone)]
pub struct Theory {
    atoms: AtomBackend,
    max_width: usize,
    legal: Arc<Mutex<HashMap<usize, Arc<Vec<Clause>>>>>,
}

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Theory")
            .field("atoms", &self.atoms.name())
            .field("max_width", &self.max_width)
            .finish()
    }
}

/// Quantifier-free formula with relations resolved to indices and variables
/// to positions.
#[derive(Debug, Clone)]
enum Qf {
    Const(bool),
    Lit(usize, Vec<usize>),
    Not(Box<Qf>),
    And(Vec<Qf>),
    Or(Vec<Qf>),
}

impl Qf {
    fn eval(&self, vocab: &Vocabulary, c: &Clause) -> bool {
        match self {
            Qf::Const(b) => *b,
            Qf::Lit(rel, args) => c.get(vocab, *rel, args),
            Qf::Not(q) => !q.eval(vocab, c),
            Qf::And(qs) => qs.iter().all(|q| q.eval(vocab, c)),
            Qf::Or(qs) => qs.iter().any(|q| q.eval(vocab, c)),
        }
    }
}

impl Theory {
    pub fn new(atoms: AtomBackend) -> Theory {
        Theory::with_max_width(atoms, DEFAULT_MAX_WIDTH)
    }

    pub fn with_max_width(atoms: AtomBackend, max_width: usize) -> Theory {
        Theory {
            atoms,
            max_width,
            legal: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn atoms(&self) -> &AtomBackend {
        &self.atoms
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        self.atoms.vocabulary()
    }

    pub fn max_width(&self) -> usize {
        self.max_width
    }

    pub fn check_width(&self, width: usize) -> Result<(), LogicError> {
        if width > self.max_width {
            Err(LogicError::WidthExceeded {
                width,
                budget: self.max_width,
            })
        } else {
            Ok(())
        }
    }

    /// A complete clause is legal iff it is consistent and its structure embeds.
    pub fn is_legal(&self, c: &Clause) -> Result<bool, LogicError> {
        if !c.is_consistent(self.vocabulary()) {
            return Ok(false);
        }
        Ok(self.atoms.embeds(&c.to_structure(self.vocabulary())?)?)
    }

    /// All legal complete clauses over `width` variables, sorted.
    ///
    /// Variables are placed one at a time: each either joins the equality
    /// class of an earlier variable or denotes a new element, in which case
    /// the structure grows by one of the backend's one-point extensions.
    pub fn legal_clauses(&self, width: usize) -> Result<Arc<Vec<Clause>>, LogicError> {
        self.check_width(width)?;
        if let Some(found) = self.legal.lock().unwrap().get(&width) {
            return Ok(found.clone());
        }
        fn go(atoms: &AtomBackend, s: &FiniteStructure, classes: &mut Vec<usize>, width: usize, out: &mut Vec<Clause>) {
            if classes.len() == width {
                out.push(Clause::from_classes(s, classes));
                return;
            }
            for c in 0..s.size() {
                classes.push(c);
                go(atoms, s, classes, width, out);
                classes.pop();
            }
            for ext in atoms.extensions(s) {
                classes.push(s.size());
                go(atoms, &ext, classes, width, out);
                classes.pop();
            }
        }
        let mut out = Vec::new();
        let empty = FiniteStructure::discrete(self.vocabulary().clone(), 0);
        go(&self.atoms, &empty, &mut Vec::new(), width, &mut out);
        out.sort();
        let out = Arc::new(out);
        self.legal.lock().unwrap().insert(width, out.clone());
        Ok(out)
    }

    /// Legal clauses found by brute force: every equality partition, every
    /// truth assignment of the other relations on the classes, filtered by
    /// the embedding check. Exponential; meant for small widths.
    pub fn legal_clauses_by_partitions(&self, width: usize) -> Result<Vec<Clause>, LogicError> {
        self.check_width(width)?;
        let vocab = self.vocabulary().clone();
        let mut out = BTreeSet::new();
        for classes in set_partitions(width) {
            let k = classes.iter().max().map_or(0, |m| m + 1);
            let slots: Vec<(usize, Vec<usize>)> = (1..vocab.len())
                .flat_map(|rel| all_tuples(k, vocab.arity(rel)).into_iter().map(move |t| (rel, t)))
                .collect();
            assert!(slots.len() < 32, "too many relation tuples for brute force");
            for mask in 0u64..(1 << slots.len()) {
                let mut s = FiniteStructure::discrete(vocab.clone(), k);
                for (i, (rel, t)) in slots.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        s.set(*rel, t, true);
                    }
                }
                if self.atoms.embeds(&s)? {
                    out.insert(Clause::from_classes(&s, &classes));
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// The ldnf of `true` over `width` variables.
    /// The literals of a legal clause that the others do not determine.
    ///
    /// Left out: reflexive and mirrored equalities, literals mentioning a
    /// variable other than the first of its equality class, and reflexive
    /// literals such as `le(x,x)` when no other choice for them is legal.
    pub fn essential_literals(&self, c: &Clause) -> Vec<Literal> {
        let vocab = self.vocabulary();
        let literals = c.literals(vocab);
        let Some(classes) = c.eq_classes(vocab) else {
            return literals;
        };
        let is_rep: Vec<bool> = (0..c.width()).map(|v| !classes[..v].contains(&classes[v])).collect();
        let reflexive = |l: &Literal| l.rel != "eq" && l.args.windows(2).all(|w| w[0] == w[1]);
        let drop_reflexive = self.reflexive_forced(c, &is_rep);
        literals
            .into_iter()
            .filter(|l| {
                let [a, b] = l.args[..] else {
                    return l.rel != "eq" && l.args.iter().all(|&v| is_rep[v]) && !(drop_reflexive && reflexive(l));
                };
                if l.rel == "eq" {
                    a < b && is_rep[a] && (is_rep[b] || classes[a] == classes[b])
                } else {
                    is_rep[a] && is_rep[b] && !(drop_reflexive && reflexive(l))
                }
            })
            .collect()
    }

    /// Whether the reflexive literals of a legal clause are the only legal
    /// choice given the rest; checked on the representatives of the
    /// equality classes, for at most 12 such literals.
    fn reflexive_forced(&self, c: &Clause, is_rep: &[bool]) -> bool {
        let vocab = self.vocabulary();
        let reps: Vec<usize> = (0..c.width()).filter(|&v| is_rep[v]).collect();
        let r = c.restrict(vocab, &reps);
        let slots: Vec<(usize, usize)> = (1..vocab.len())
            .flat_map(|rel| (0..reps.len()).map(move |v| (rel, v)))
            .collect();
        if slots.len() > 12 {
            return false;
        }
        (1u32..1 << slots.len()).all(|mask| {
            let flipped = Clause::from_fn(vocab, reps.len(), |rel, args| {
                let base = r.get(vocab, rel, args);
                let flip = rel != Vocabulary::EQ
                    && args.windows(2).all(|w| w[0] == w[1])
                    && slots
                        .iter()
                        .position(|&(sr, sv)| sr == rel && args.first() == Some(&sv))
                        .is_some_and(|i| mask >> i & 1 == 1);
                base != flip
            });
            !self.is_legal(&flipped).unwrap_or(false)
        })
    }

    /// Renders a clause by its essential literals, `true` if there are none.
    pub fn render_clause(&self, c: &Clause, names: &[String]) -> String {
        let lits: Vec<String> = self.essential_literals(c).iter().map(|l| l.render(names)).collect();
        if lits.is_empty() {
            "true".into()
        } else {
            lits.join(" & ")
        }
    }

    /// Renders an ldnf of legal clauses compactly; parsing the text over the
    /// same variables gives back the same ldnf.
    pub fn render_ldnf(&self, d: &Ldnf, names: &[String]) -> String {
        if d.is_empty() {
            return "false".into();
        }
        if d.width() == 0 {
            return "true".into();
        }
        let parts: Vec<String> = d
            .clauses()
            .iter()
            .map(|c| format!("({})", self.render_clause(c, names)))
            .collect();
        parts.join(" | ")
    }

    pub fn full(&self, width: usize) -> Result<Ldnf, LogicError> {
        let all = self.legal_clauses(width)?;
        Ldnf::from_clauses(width, all.iter().cloned())
    }

    /// Negation: the legal clauses of the same width missing from `d`.
    pub fn complement(&self, d: &Ldnf) -> Result<Ldnf, LogicError> {
        let all = self.legal_clauses(d.width())?;
        Ldnf::from_clauses(d.width(), all.iter().filter(|c| !d.contains(c)).cloned())
    }

    /// `∃ v. d`, by dropping every literal that mentions `v`.
    pub fn eliminate_exists(&self, v: usize, d: &Ldnf) -> Result<Ldnf, LogicError> {
        if v >= d.width() {
            return Err(LogicError::UnknownVariable(format!("#{v}")));
        }
        let keep: Vec<usize> = (0..d.width()).filter(|&i| i != v).collect();
        Ok(d.restrict(self.vocabulary(), &keep))
    }

    fn resolve_rel(&self, name: &str, args: Vec<usize>) -> Result<Qf, LogicError> {
        let vocab = self.vocabulary();
        if let Some(rel) = vocab.index_of(name) {
            if vocab.arity(rel) != args.len() {
                return Err(AtomsError::ArityMismatch {
                    relation: name.to_string(),
                    expected: vocab.arity(rel),
                    found: args.len(),
                }
                .into());
            }
            return Ok(Qf::Lit(rel, args));
        }
        // strict and reversed comparisons, available whenever `le` is
        if let (Some(le), 2) = (vocab.index_of("le"), args.len()) {
            let (a, b) = (args[0], args[1]);
            let lt = |a: usize, b: usize| {
                Qf::And(vec![
                    Qf::Lit(le, vec![a, b]),
                    Qf::Not(Box::new(Qf::Lit(Vocabulary::EQ, vec![a, b]))),
                ])
            };
            match name {
                "lt" => return Ok(lt(a, b)),
                "gt" => return Ok(lt(b, a)),
                "ge" => return Ok(Qf::Lit(le, vec![b, a])),
                _ => {}
            }
        }
        Err(AtomsError::UnknownRelation {
            relation: name.to_string(),
            vocabulary: vocab.to_string(),
        }
        .into())
    }

    /// Negation normal form with quantifiers pulled out. Bound variables get
    /// fresh positions after the free ones, in prefix order; `prefix` records
    /// `(is_exists, position)`.
    fn prenex(
        &self,
        e: &Expr,
        negated: bool,
        env: &mut Vec<(String, usize)>,
        next: &mut usize,
        prefix: &mut Vec<(bool, usize)>,
    ) -> Result<Qf, LogicError> {
        let lookup = |env: &Vec<(String, usize)>, v: &str| {
            env.iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, p)| p)
                .ok_or_else(|| LogicError::UnknownVariable(v.to_string()))
        };
        Ok(match e {
            Expr::True => Qf::Const(!negated),
            Expr::False => Qf::Const(negated),
            Expr::Rel(name, args) => {
                let args = args.iter().map(|a| lookup(env, a)).collect::<Result<Vec<_>, _>>()?;
                let lit = self.resolve_rel(name, args)?;
                if negated {
                    Qf::Not(Box::new(lit))
                } else {
                    lit
                }
            }
            Expr::Not(inner) => self.prenex(inner, !negated, env, next, prefix)?,
            Expr::And(es) | Expr::Or(es) => {
                let parts = es
                    .iter()
                    .map(|e| self.prenex(e, negated, env, next, prefix))
                    .collect::<Result<Vec<_>, _>>()?;
                if matches!(e, Expr::And(_)) != negated {
                    Qf::And(parts)
                } else {
                    Qf::Or(parts)
                }
            }
            Expr::Exists(v, body) | Expr::Forall(v, body) => {
                let exists = matches!(e, Expr::Exists(..)) != negated;
                let pos = *next;
                *next += 1;
                prefix.push((exists, pos));
                env.push((v.clone(), pos));
                let q = self.prenex(body, negated, env, next, prefix);
                env.pop();
                q?
            }
        })
    }

    fn matrix_to_ldnf(&self, q: &Qf, width: usize) -> Result<Ldnf, LogicError> {
        let vocab = self.vocabulary();
        let all = self.legal_clauses(width)?;
        Ldnf::from_clauses(width, all.iter().filter(|c| q.eval(vocab, c)).cloned())
    }

    /// The legal clauses over the free variables that satisfy a
    /// quantifier-free formula.
    pub fn qf_to_ldnf(&self, f: &Formula) -> Result<Ldnf, LogicError> {
        if !f.body.is_quantifier_free() {
            return Err(LogicError::NotQuantifierFree);
        }
        self.fo_to_ldnf(f)
    }

    /// Normalizes a first-order formula: prenex form, the matrix as an ldnf
    /// over free and bound variables, then quantifiers eliminated innermost
    /// first (`∀` as `¬∃¬`).
    pub fn fo_to_ldnf(&self, f: &Formula) -> Result<Ldnf, LogicError> {
        let mut env: Vec<(String, usize)> = f.free.iter().cloned().zip(0..).collect();
        let mut next = f.free.len();
        let mut prefix = Vec::new();
        let matrix = self.prenex(&f.body, false, &mut env, &mut next, &mut prefix)?;
        let width = next;
        self.check_width(width)?;
        let mut d = self.matrix_to_ldnf(&matrix, width)?;
        for &(exists, pos) in prefix.iter().rev() {
            debug_assert_eq!(pos, d.width() - 1);
            d = if exists {
                self.eliminate_exists(pos, &d)?
            } else {
                let neg = self.complement(&d)?;
                self.complement(&self.eliminate_exists(pos, &neg)?)?
            };
        }
        Ok(d)
    }

    pub fn satisfiable(&self, f: &Formula) -> Result<bool, LogicError> {
        Ok(!self.fo_to_ldnf(f)?.is_empty())
    }

    /// Parses and normalizes formula text over the given free variables.
    pub fn ldnf_of(&self, text: &str, free: &[&str]) -> Result<Ldnf, LogicError> {
        self.fo_to_ldnf(&Formula::parse(text, free)?)
    }

    /// `∃ (vars outside keep). ⋀ conjuncts`, as an ldnf over `keep`.
    ///
    /// Searches amalgamations directly: variables are placed one by one
    /// (kept variables first) as in [`Theory::legal_clauses`], and a partial
    /// placement is abandoned as soon as some conjunct has no clause agreeing
    /// with it on the variables placed so far. Once the kept variables are
    /// placed, the rest only has to be shown to exist.
    pub fn conjoin_project(&self, width: usize, conjuncts: &[Conjunct], keep: &[usize]) -> Result<Ldnf, LogicError> {
        self.check_width(width)?;
        let vocab = self.vocabulary();
        for c in conjuncts {
            if c.map.len() != c.ldnf.width() {
                return Err(LogicError::WidthMismatch {
                    left: c.map.len(),
                    right: c.ldnf.width(),
                });
            }
            if let Some(&v) = c.map.iter().find(|&&v| v >= width) {
                return Err(LogicError::UnknownVariable(format!("#{v}")));
            }
        }
        for (i, &v) in keep.iter().enumerate() {
            if v >= width || keep[..i].contains(&v) {
                return Err(LogicError::Malformed(format!("bad kept variable #{v}")));
            }
        }
        if conjuncts.iter().any(|c| c.ldnf.is_empty()) {
            return Ok(Ldnf::empty(keep.len()));
        }

        // placement order: kept variables, then the others as they appear
        let mut order: Vec<usize> = keep.to_vec();
        for c in conjuncts {
            for &v in &c.map {
                if !order.contains(&v) {
                    order.push(v);
                }
            }
        }
        let mut step_of = vec![usize::MAX; width];
        for (t, &v) in order.iter().enumerate() {
            step_of[v] = t;
        }

        // per step: for every conjunct that gains a variable, the allowed
        // restrictions onto its placed positions
        let mut checks: Vec<Vec<(Vec<usize>, HashSet<Clause>)>> = vec![Vec::new(); order.len()];
        for c in conjuncts {
            let mut prev = 0;
            for (t, step_checks) in checks.iter_mut().enumerate() {
                let positions: Vec<usize> = (0..c.map.len()).filter(|&p| step_of[c.map[p]] <= t).collect();
                if positions.len() == prev {
                    continue;
                }
                prev = positions.len();
                let allowed: HashSet<Clause> = c.ldnf.clauses().iter().map(|cl| cl.restrict(vocab, &positions)).collect();
                let vars: Vec<usize> = positions.iter().map(|&p| c.map[p]).collect();
                step_checks.push((vars, allowed));
            }
        }

        let mut search = Amalgam {
            atoms: &self.atoms,
            order: &order,
            checks: &checks,
            keep,
            class_of: vec![usize::MAX; width],
            found: BTreeSet::new(),
        };
        let empty = FiniteStructure::discrete(vocab.clone(), 0);
        search.collect(0, &empty);
        Ldnf::from_clauses(keep.len(), search.found)
    }
}

struct Amalgam<'a> {
    atoms: &'a AtomBackend,
    order: &'a [usize],
    checks: &'a [Vec<(Vec<usize>, HashSet<Clause>)>],
    keep: &'a [usize],
    class_of: Vec<usize>,
    found: BTreeSet<Clause>,
}

impl Amalgam<'_> {
    fn passes(&self, t: usize, s: &FiniteStructure) -> bool {
        self.checks[t].iter().all(|(vars, allowed)| {
            let classes: Vec<usize> = vars.iter().map(|&v| self.class_of[v]).collect();
            allowed.contains(&Clause::from_classes(s, &classes))
        })
    }

    /// Tries every placement of variable `order[t]`, calling `next` on each
    /// one that passes; stops early when `next` returns true.
    fn place(&mut self, t: usize, s: &FiniteStructure, next: fn(&mut Self, usize, &FiniteStructure) -> bool) -> bool {
        let v = self.order[t];
        for c in 0..s.size() {
            self.class_of[v] = c;
            if self.passes(t, s) && next(self, t + 1, s) {
                self.class_of[v] = usize::MAX;
                return true;
            }
        }
        for ext in self.atoms.extensions(s) {
            self.class_of[v] = s.size();
            if self.passes(t, &ext) && next(self, t + 1, &ext) {
                self.class_of[v] = usize::MAX;
                return true;
            }
        }
        self.class_of[v] = usize::MAX;
        false
    }

    fn collect(&mut self, t: usize, s: &FiniteStructure) -> bool {
        if t == self.keep.len() {
            let classes: Vec<usize> = self.keep.iter().map(|&v| self.class_of[v]).collect();
            let projected = Clause::from_classes(s, &classes);
            if !self.found.contains(&projected) && self.exists(t, s) {
                self.found.insert(projected);
            }
            return false;
        }
        self.place(t, s, Self::collect)
    }

    fn exists(&mut self, t: usize, s: &FiniteStructure) -> bool {
        if t == self.order.len() {
            return true;
        }
        self.place(t, s, Self::exists)
    }
}

/// Set partitions of `0..n` as restricted growth strings.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            go(n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), 0, &mut out);
    out
}
