use std::fmt;
use std::sync::Arc;

use super::AtomsError;

/// A relation symbol of a vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
}

/// Finite relational vocabulary. Equality (`eq`, binary) is always the first relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vocabulary {
    relations: Vec<Relation>,
}

impl Vocabulary {
    /// Index of the equality relation.
    pub const EQ: usize = 0;

    /// Builds a vocabulary from the non-equality relations; `eq` is prepended.
    pub fn new<S: Into<String>>(
        relations: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, AtomsError> {
        let mut out = vec![Relation {
            name: "eq".into(),
            arity: 2,
        }];
        for (name, arity) in relations {
            let name = name.into();
            if arity == 0 {
                return Err(AtomsError::InvalidVocabulary(format!(
                    "relation `{name}` has arity 0"
                )));
            }
            if out.iter().any(|r| r.name == name) {
                return Err(AtomsError::InvalidVocabulary(format!(
                    "duplicate relation `{name}`"
                )));
            }
            out.push(Relation { name, arity });
        }
        Ok(Vocabulary { relations: out })
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].arity
    }

    pub fn name(&self, rel: usize) -> &str {
        &self.relations[rel].name
    }

    /// Number of bits needed to store one truth table per relation over `n` elements.
    pub(crate) fn table_len(&self, n: usize) -> usize {
        self.relations.iter().map(|r| n.pow(r.arity as u32)).sum()
    }

    pub(crate) fn table_offset(&self, n: usize, rel: usize) -> usize {
        self.relations[..rel]
            .iter()
            .map(|r| n.pow(r.arity as u32))
            .sum()
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .relations
            .iter()
            .map(|r| format!("{}/{}", r.name, r.arity))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[inline]
pub(crate) fn tuple_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

#[inline]
pub(crate) fn get_bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(bits: &mut [u64], i: usize, v: bool) {
    if v {
        bits[i / 64] |= 1 << (i % 64);
    } else {
        bits[i / 64] &= !(1 << (i % 64));
    }
}

pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// All tuples in `0..n` of the given arity, in lexicographic order.
pub(crate) fn all_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let total = n.pow(arity as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        out.push(t);
    }
    out
}

/// A finite structure over a vocabulary, with elements `0..size`.
///
/// Structures are post-quotient: `eq` is expected to be the diagonal, and
/// constructors set it that way unless told otherwise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteStructure {
    vocab: Arc<Vocabulary>,
    size: usize,
    bits: Vec<u64>,
}

impl FiniteStructure {
    /// Structure with every relation empty except `eq`, which is the diagonal.
    pub fn discrete(vocab: Arc<Vocabulary>, size: usize) -> Self {
        let words = words_for(vocab.table_len(size));
        let mut s = FiniteStructure {
            vocab,
            size,
            bits: vec![0; words],
        };
        for i in 0..size {
            s.set(Vocabulary::EQ, &[i, i], true);
        }
        s
    }

    /// Builds a structure from named tuple sets. When `eq` is not listed it
    /// defaults to the diagonal.
    pub fn from_tuples<'a>(
        vocab: Arc<Vocabulary>,
        size: usize,
        tuples: impl IntoIterator<Item = (&'a str, Vec<Vec<usize>>)>,
    ) -> Result<Self, AtomsError> {
        let mut s = FiniteStructure::discrete(vocab, size);
        let mut eq_given = false;
        let mut sets = Vec::new();
        for (name, ts) in tuples {
            let rel = s
                .vocab
                .index_of(name)
                .ok_or_else(|| AtomsError::UnknownRelation {
                    relation: name.to_string(),
                    vocabulary: s.vocab.to_string(),
                })?;
            if rel == Vocabulary::EQ {
                eq_given = true;
            }
            sets.push((rel, ts));
        }
        if eq_given {
            for i in 0..size {
                s.set(Vocabulary::EQ, &[i, i], false);
            }
        }
        for (rel, ts) in sets {
            let arity = s.vocab.arity(rel);
            for t in ts {
                if t.len() != arity {
                    return Err(AtomsError::ArityMismatch {
                        relation: s.vocab.name(rel).to_string(),
                        expected: arity,
                        found: t.len(),
                    });
                }
                if let Some(&e) = t.iter().find(|&&e| e >= size) {
                    return Err(AtomsError::ElementOutOfRange { element: e, size });
                }
                s.set(rel, &t, true);
            }
        }
        Ok(s)
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn index(&self, rel: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.vocab.arity(rel));
        self.vocab.table_offset(self.size, rel) + tuple_index(self.size, args)
    }

    #[inline]
    pub fn get(&self, rel: usize, args: &[usize]) -> bool {
        get_bit(&self.bits, self.index(rel, args))
    }

    pub fn set(&mut self, rel: usize, args: &[usize], value: bool) {
        let i = self.index(rel, args);
        set_bit(&mut self.bits, i, value);
    }

    /// Tuples on which `rel` holds, in lexicographic order.
    pub fn tuples(&self, rel: usize) -> Vec<Vec<usize>> {
        all_tuples(self.size, self.vocab.arity(rel))
            .into_iter()
            .filter(|t| self.get(rel, t))
            .collect()
    }

    /// Whether `eq` is exactly the diagonal.
    pub fn eq_is_diagonal(&self) -> bool {
        (0..self.size).all(|i| (0..self.size).all(|j| self.get(Vocabulary::EQ, &[i, j]) == (i == j)))
    }

    /// Induced substructure on `elements` (new element `i` is old `elements[i]`).
    pub fn restrict(&self, elements: &[usize]) -> FiniteStructure {
        let mut out = FiniteStructure {
            vocab: self.vocab.clone(),
            size: elements.len(),
            bits: vec![0; words_for(self.vocab.table_len(elements.len()))],
        };
        for rel in 0..self.vocab.len() {
            for t in all_tuples(elements.len(), self.vocab.arity(rel)) {
                let old: Vec<usize> = t.iter().map(|&i| elements[i]).collect();
                if self.get(rel, &old) {
                    out.set(rel, &t, true);
                }
            }
        }
        out
    }

    /// Copy of this structure with one extra element that takes part in no
    /// tuple other than `eq(n, n)`.
    pub fn with_new_element(&self) -> FiniteStructure {
        let n = self.size;
        let mut out = FiniteStructure::discrete(self.vocab.clone(), n + 1);
        for rel in 0..self.vocab.len() {
            for t in all_tuples(n, self.vocab.arity(rel)) {
                out.set(rel, &t, self.get(rel, &t));
            }
        }
        out.set(Vocabulary::EQ, &[n, n], true);
        out
    }
}

impl fmt::Debug for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteStructure(size={}", self.size)?;
        for rel in 0..self.vocab.len() {
            write!(f, ", {}={:?}", self.vocab.name(rel), self.tuples(rel))?;
        }
        write!(f, ")")
    }
}
