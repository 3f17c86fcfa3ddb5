use std::fmt;

use crate::atoms::{all_tuples, get_bit, set_bit, tuple_index, words_for, FiniteStructure, Vocabulary};

use super::LogicError;

/// A relational literal over positional variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub rel: String,
    pub args: Vec<usize>,
}

impl Literal {
    pub fn new(positive: bool, rel: impl Into<String>, args: Vec<usize>) -> Literal {
        Literal {
            positive,
            rel: rel.into(),
            args,
        }
    }

    /// Renders the literal with the given variable names, e.g. `!le(y1,p1)`.
    pub fn render(&self, names: &[String]) -> String {
        let args: Vec<&str> = self.args.iter().map(|&i| names[i].as_str()).collect();
        format!("{}{}({})", if self.positive { "" } else { "!" }, self.rel, args.join(","))
    }
}

/// A complete clause over variables `0..width`: for every relation and every
/// argument tuple exactly one of the positive or negative literal holds.
///
/// Stored as one truth table per relation, `eq` included. The derived
/// ordering is the canonical order of clauses inside an ldnf.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    width: usize,
    bits: Vec<u64>,
}

impl Clause {
    /// The clause whose positive literals are exactly the tuples where `f` holds.
    pub fn from_fn(vocab: &Vocabulary, width: usize, mut f: impl FnMut(usize, &[usize]) -> bool) -> Clause {
        let mut bits = vec![0; words_for(vocab.table_len(width))];
        let mut offset = 0;
        let mut t = [0usize; 8];
        for rel in 0..vocab.len() {
            let arity = vocab.arity(rel);
            let count = width.pow(arity as u32);
            let t = &mut t[..arity];
            t.fill(0);
            for i in 0..count {
                if f(rel, t) {
                    set_bit(&mut bits, offset + i, true);
                }
                for slot in t.iter_mut().rev() {
                    *slot += 1;
                    if *slot < width {
                        break;
                    }
                    *slot = 0;
                }
            }
            offset += count;
        }
        Clause { width, bits }
    }

    /// The width-0 clause (true on the single empty tuple).
    pub fn empty() -> Clause {
        Clause {
            width: 0,
            bits: Vec::new(),
        }
    }

    /// Builds a clause from a literal list that mentions every tuple exactly once.
    pub fn from_literals(vocab: &Vocabulary, width: usize, literals: &[Literal]) -> Result<Clause, LogicError> {
        let total = vocab.table_len(width);
        let mut seen = vec![0u64; words_for(total)];
        let mut bits = vec![0u64; words_for(total)];
        for lit in literals {
            let rel = vocab.index_of(&lit.rel).ok_or_else(|| LogicError::Malformed(format!("unknown relation `{}`", lit.rel)))?;
            if lit.args.len() != vocab.arity(rel) || lit.args.iter().any(|&a| a >= width) {
                return Err(LogicError::Malformed(format!("bad arguments for `{}`", lit.rel)));
            }
            let i = vocab.table_offset(width, rel) + tuple_index(width, &lit.args);
            if get_bit(&seen, i) {
                if get_bit(&bits, i) != lit.positive {
                    return Err(LogicError::Malformed(format!("contradictory literals on `{}`", lit.rel)));
                }
                continue;
            }
            set_bit(&mut seen, i, true);
            set_bit(&mut bits, i, lit.positive);
        }
        if (0..total).any(|i| !get_bit(&seen, i)) {
            return Err(LogicError::Malformed("clause is not complete".into()));
        }
        Ok(Clause { width, bits })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, vocab: &Vocabulary, rel: usize, args: &[usize]) -> bool {
        get_bit(&self.bits, vocab.table_offset(self.width, rel) + tuple_index(self.width, args))
    }

    /// All literals, sorted by relation name, then arguments, then sign.
    pub fn literals(&self, vocab: &Vocabulary) -> Vec<Literal> {
        let mut out = Vec::with_capacity(vocab.table_len(self.width));
        for rel in 0..vocab.len() {
            for t in all_tuples(self.width, vocab.arity(rel)) {
                let positive = self.get(vocab, rel, &t);
                out.push(Literal::new(positive, vocab.name(rel), t));
            }
        }
        out.sort_by(|a, b| (&a.rel, &a.args, a.positive).cmp(&(&b.rel, &b.args, b.positive)));
        out
    }

    /// Renders the clause as a conjunction of literals, trivially true
    /// reflexive equalities omitted.
    pub fn render(&self, vocab: &Vocabulary, names: &[String]) -> String {
        let lits: Vec<String> = self
            .literals(vocab)
            .into_iter()
            .filter(|l| !(l.rel == "eq" && l.args[0] == l.args[1]))
            .map(|l| l.render(names))
            .collect();
        if lits.is_empty() {
            "true".into()
        } else {
            lits.join(" & ")
        }
    }

    /// Equality classes as a class number per variable, numbered by first
    /// occurrence, or `None` when `eq` is not an equivalence.
    pub(crate) fn eq_classes(&self, vocab: &Vocabulary) -> Option<Vec<usize>> {
        let n = self.width;
        let eq = |i: usize, j: usize| self.get(vocab, Vocabulary::EQ, &[i, j]);
        for i in 0..n {
            if !eq(i, i) {
                return None;
            }
            for j in 0..n {
                if eq(i, j) != eq(j, i) {
                    return None;
                }
                for k in 0..n {
                    if eq(i, j) && eq(j, k) && !eq(i, k) {
                        return None;
                    }
                }
            }
        }
        let mut classes = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            if classes[i] == usize::MAX {
                for (j, class) in classes.iter_mut().enumerate().skip(i) {
                    if eq(i, j) {
                        *class = next;
                    }
                }
                next += 1;
            }
        }
        Some(classes)
    }

    /// Whether `eq` is an equivalence and every literal is invariant under
    /// replacing variables by equal ones.
    pub fn is_consistent(&self, vocab: &Vocabulary) -> bool {
        let Some(classes) = self.eq_classes(vocab) else {
            return false;
        };
        let mut rep = vec![0; classes.iter().max().map_or(0, |m| m + 1)];
        for (i, &c) in classes.iter().enumerate().rev() {
            rep[c] = i;
        }
        for rel in 1..vocab.len() {
            for t in all_tuples(self.width, vocab.arity(rel)) {
                let canon: Vec<usize> = t.iter().map(|&i| rep[classes[i]]).collect();
                if self.get(vocab, rel, &t) != self.get(vocab, rel, &canon) {
                    return false;
                }
            }
        }
        true
    }

    /// The structure on equality classes; classes are numbered by first occurrence.
    pub fn to_structure(&self, vocab: &std::sync::Arc<Vocabulary>) -> Result<FiniteStructure, LogicError> {
        if !self.is_consistent(vocab) {
            return Err(LogicError::Inconsistent);
        }
        let classes = self.eq_classes(vocab).expect("consistent clause");
        let size = classes.iter().max().map_or(0, |m| m + 1);
        let mut reps = vec![0; size];
        for (i, &c) in classes.iter().enumerate().rev() {
            reps[c] = i;
        }
        let mut s = FiniteStructure::discrete(vocab.clone(), size);
        for rel in 1..vocab.len() {
            for t in all_tuples(size, vocab.arity(rel)) {
                let vars: Vec<usize> = t.iter().map(|&c| reps[c]).collect();
                s.set(rel, &t, self.get(vocab, rel, &vars));
            }
        }
        Ok(s)
    }

    /// The clause in which variable `i` denotes element `classes[i]` of `s`.
    pub fn from_classes(s: &FiniteStructure, classes: &[usize]) -> Clause {
        let vocab = s.vocabulary();
        let mut mapped = Vec::with_capacity(3);
        Clause::from_fn(vocab, classes.len(), |rel, args| {
            mapped.clear();
            mapped.extend(args.iter().map(|&a| classes[a]));
            s.get(rel, &mapped)
        })
    }

    /// The clause whose variable `j` is variable `vars[j]` of this clause.
    /// Repeated entries are allowed and produce equal variables.
    pub fn restrict(&self, vocab: &Vocabulary, vars: &[usize]) -> Clause {
        let mut mapped = Vec::with_capacity(3);
        Clause::from_fn(vocab, vars.len(), |rel, args| {
            mapped.clear();
            mapped.extend(args.iter().map(|&a| vars[a]));
            self.get(vocab, rel, &mapped)
        })
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clause(width={}, {:x?})", self.width, self.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn order() -> Arc<Vocabulary> {
        Arc::new(Vocabulary::new([("le", 2)]).unwrap())
    }

    fn lits(spec: &[(bool, &str, [usize; 2])]) -> Vec<Literal> {
        spec.iter().map(|&(p, r, a)| Literal::new(p, r, a.to_vec())).collect()
    }

    /// The x<y clause over (x, y).
    fn less() -> Vec<Literal> {
        lits(&[
            (true, "eq", [0, 0]),
            (false, "eq", [0, 1]),
            (false, "eq", [1, 0]),
            (true, "eq", [1, 1]),
            (true, "le", [0, 0]),
            (true, "le", [0, 1]),
            (false, "le", [1, 0]),
            (true, "le", [1, 1]),
        ])
    }

    #[test]
    fn from_literals_requires_completeness() {
        let v = order();
        assert!(Clause::from_literals(&v, 2, &less()).is_ok());
        let mut missing = less();
        missing.pop();
        assert!(matches!(Clause::from_literals(&v, 2, &missing), Err(LogicError::Malformed(_))));
        let mut contradict = less();
        contradict.push(Literal::new(true, "le", vec![1, 0]));
        assert!(matches!(Clause::from_literals(&v, 2, &contradict), Err(LogicError::Malformed(_))));
    }

    #[test]
    fn consistency_examples() {
        let v = order();
        let c = Clause::from_literals(&v, 2, &less()).unwrap();
        assert!(c.is_consistent(&v));
        // eq(x,y) with le(x,y), !le(y,x): substitution breaks invariance
        let mut bad = less();
        bad[1].positive = true;
        bad[2].positive = true;
        let c = Clause::from_literals(&v, 2, &bad).unwrap();
        assert!(!c.is_consistent(&v));
        // eq(x,y) but !eq(y,x)
        let mut asym = less();
        asym[1].positive = true;
        asym[6].positive = true;
        let c = Clause::from_literals(&v, 2, &asym).unwrap();
        assert!(!c.is_consistent(&v));
    }

    #[test]
    fn structure_of_clauses() {
        let v = order();
        let c = Clause::from_literals(&v, 2, &less()).unwrap();
        let s = c.to_structure(&v).unwrap();
        assert_eq!(s.size(), 2);
        assert!(s.get(1, &[0, 1]) && !s.get(1, &[1, 0]));
        let same = Clause::from_fn(&v, 2, |_, _| true);
        assert_eq!(same.to_structure(&v).unwrap().size(), 1);
        assert_eq!(Clause::empty().to_structure(&v).unwrap().size(), 0);
    }

    #[test]
    fn literals_are_sorted_and_round_trip() {
        let v = order();
        let c = Clause::from_literals(&v, 2, &less()).unwrap();
        let out = c.literals(&v);
        assert_eq!(out.len(), 8);
        assert_eq!(out[0], Literal::new(true, "eq", vec![0, 0]));
        assert_eq!(out[5], Literal::new(true, "le", vec![0, 1]));
        assert_eq!(Clause::from_literals(&v, 2, &out).unwrap(), c);
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(c.render(&v, &names), "!eq(x,y) & !eq(y,x) & le(x,x) & le(x,y) & !le(y,x) & le(y,y)");
    }

    #[test]
    fn restrict_and_duplicate() {
        let v = order();
        let c = Clause::from_literals(&v, 2, &less()).unwrap();
        let swapped = c.restrict(&v, &[1, 0]);
        assert!(swapped.get(&v, 1, &[1, 0]));
        assert!(!swapped.get(&v, 1, &[0, 1]));
        let dup = c.restrict(&v, &[0, 0]);
        assert!(dup.get(&v, 0, &[0, 1]));
        let s = c.to_structure(&v).unwrap();
        assert_eq!(Clause::from_classes(&s, &[0, 1]), c);
    }
}
