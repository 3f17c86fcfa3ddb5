use std::collections::BTreeSet;

use crate::atoms::Vocabulary;

use super::{Clause, LogicError};

/// A disjunction of pairwise distinct legal complete clauses over the
/// variables `0..width`. The empty disjunction is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ldnf {
    width: usize,
    clauses: BTreeSet<Clause>,
}

impl Ldnf {
    pub fn empty(width: usize) -> Ldnf {
        Ldnf {
            width,
            clauses: BTreeSet::new(),
        }
    }

    /// The width-0 ldnf that holds.
    pub fn truth() -> Ldnf {
        Ldnf {
            width: 0,
            clauses: BTreeSet::from([Clause::empty()]),
        }
    }

    pub fn singleton(clause: Clause) -> Ldnf {
        Ldnf {
            width: clause.width(),
            clauses: BTreeSet::from([clause]),
        }
    }

    pub fn from_clauses(width: usize, clauses: impl IntoIterator<Item = Clause>) -> Result<Ldnf, LogicError> {
        let mut out = Ldnf::empty(width);
        for c in clauses {
            out.insert(c)?;
        }
        Ok(out)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn clauses(&self) -> &BTreeSet<Clause> {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, c: &Clause) -> bool {
        self.clauses.contains(c)
    }

    /// Adds a clause; returns whether it was new.
    pub fn insert(&mut self, c: Clause) -> Result<bool, LogicError> {
        if c.width() != self.width {
            return Err(LogicError::WidthMismatch {
                left: self.width,
                right: c.width(),
            });
        }
        Ok(self.clauses.insert(c))
    }

    fn same_width(&self, other: &Ldnf) -> Result<(), LogicError> {
        if self.width == other.width {
            Ok(())
        } else {
            Err(LogicError::WidthMismatch {
                left: self.width,
                right: other.width,
            })
        }
    }

    pub fn union(&self, other: &Ldnf) -> Result<Ldnf, LogicError> {
        self.same_width(other)?;
        Ok(Ldnf {
            width: self.width,
            clauses: self.clauses.union(&other.clauses).cloned().collect(),
        })
    }

    pub fn union_in_place(&mut self, other: &Ldnf) -> Result<(), LogicError> {
        self.same_width(other)?;
        self.clauses.extend(other.clauses.iter().cloned());
        Ok(())
    }

    pub fn intersection(&self, other: &Ldnf) -> Result<Ldnf, LogicError> {
        self.same_width(other)?;
        Ok(Ldnf {
            width: self.width,
            clauses: self.clauses.intersection(&other.clauses).cloned().collect(),
        })
    }

    /// Clauses of `self` missing from `other`.
    pub fn difference(&self, other: &Ldnf) -> Result<Ldnf, LogicError> {
        self.same_width(other)?;
        Ok(Ldnf {
            width: self.width,
            clauses: self.clauses.difference(&other.clauses).cloned().collect(),
        })
    }

    /// Semantic entailment, which for ldnfs is clause-set inclusion.
    pub fn entails(&self, other: &Ldnf) -> Result<bool, LogicError> {
        self.same_width(other)?;
        Ok(self.clauses.is_subset(&other.clauses))
    }

    /// Reindexes every clause so that variable `j` of the result is variable
    /// `vars[j]`. Dropping a variable this way is existential projection.
    pub fn restrict(&self, vocab: &Vocabulary, vars: &[usize]) -> Ldnf {
        Ldnf {
            width: vars.len(),
            clauses: self.clauses.iter().map(|c| c.restrict(vocab, vars)).collect(),
        }
    }

    /// Renders as `(lit & ...) | (...)`, or `false` / `true`.
    pub fn render(&self, vocab: &Vocabulary, names: &[String]) -> String {
        if self.clauses.is_empty() {
            return "false".into();
        }
        if self.width == 0 {
            return "true".into();
        }
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| format!("({})", c.render(vocab, names)))
            .collect();
        parts.join(" | ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::new([("le", 2)]).unwrap()
    }

    fn less(v: &Vocabulary) -> Clause {
        Clause::from_fn(v, 2, |rel, a| if rel == 0 { a[0] == a[1] } else { a[0] <= a[1] })
    }

    fn same(v: &Vocabulary) -> Clause {
        Clause::from_fn(v, 2, |_, _| true)
    }

    #[test]
    fn union_and_entailment() {
        let v = vocab();
        let lt = Ldnf::singleton(less(&v));
        let eq = Ldnf::singleton(same(&v));
        let both = lt.union(&eq).unwrap();
        assert_eq!(both.len(), 2);
        assert!(lt.entails(&both).unwrap());
        assert!(!eq.entails(&lt).unwrap());
        assert!(Ldnf::empty(2).entails(&lt).unwrap());
        assert_eq!(lt.union(&Ldnf::empty(2)).unwrap(), lt);
        assert_eq!(lt.union(&lt).unwrap(), lt);
        assert!(matches!(lt.union(&Ldnf::truth()), Err(LogicError::WidthMismatch { .. })));
    }

    #[test]
    fn restrict_merges_duplicates() {
        let v = vocab();
        let both = Ldnf::from_clauses(2, [less(&v), same(&v)]).unwrap();
        let projected = both.restrict(&v, &[0]);
        assert_eq!(projected.len(), 1);
        assert_eq!(both.restrict(&v, &[]), Ldnf::truth());
        assert_eq!(Ldnf::empty(2).restrict(&v, &[]), Ldnf::empty(0));
    }

    #[test]
    fn render_constants() {
        let v = vocab();
        assert_eq!(Ldnf::empty(1).render(&v, &["x".into()]), "false");
        assert_eq!(Ldnf::truth().render(&v, &[]), "true");
    }
}
