//! Homogeneous atom structures: vocabularies, finite structures, embedding
//! decisions, and concrete models where one is computable.

mod concrete;
pub(crate) mod embed;
mod structure;
mod wreath;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

pub use concrete::ConcreteAtom;
pub use embed::{
    embeds_betweenness, embeds_cyclic, embeds_equality, embeds_equivalence, embeds_graph,
    embeds_partial_order, embeds_total_order, embeds_tournament, extend_brute_force,
};
pub use structure::{FiniteStructure, Relation, Vocabulary};
pub use wreath::wreath_embeds;

pub(crate) use structure::{all_tuples, get_bit, set_bit, tuple_index, words_for};

use crate::logic::Clause;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomsError {
    #[error("vocabulary mismatch for {backend}: expected {expected}, found {found}")]
    VocabularyMismatch {
        backend: String,
        expected: String,
        found: String,
    },
    #[error("backend `{backend}` has no concrete model")]
    CapabilityUnsupported { backend: String },
    #[error("unknown atom backend `{0}`")]
    UnknownBackend(String),
    #[error("relation `{relation}` is not in vocabulary {vocabulary}")]
    UnknownRelation { relation: String, vocabulary: String },
    #[error("relation `{relation}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("`{text}` is not a {backend} atom")]
    BadAtom { backend: String, text: String },
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("element {element} out of range for a structure of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Kind {
    Equality,
    TotalOrder,
    Equivalence,
    PartialOrder,
    Graph,
    Tournament,
    Betweenness,
    Cyclic,
    Wreath(Box<AtomBackend>, Box<AtomBackend>),
}

/// A homogeneous relational structure used as the atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomBackend {
    kind: Kind,
    vocab: Arc<Vocabulary>,
}

impl AtomBackend {
    fn simple(kind: Kind, rels: &[(&str, usize)]) -> AtomBackend {
        let vocab = Vocabulary::new(rels.iter().copied()).expect("builtin vocabulary");
        AtomBackend {
            kind,
            vocab: Arc::new(vocab),
        }
    }

    pub fn equality() -> AtomBackend {
        Self::simple(Kind::Equality, &[])
    }

    pub fn total_order() -> AtomBackend {
        Self::simple(Kind::TotalOrder, &[("le", 2)])
    }

    pub fn equivalence() -> AtomBackend {
        Self::simple(Kind::Equivalence, &[("R", 2)])
    }

    pub fn partial_order() -> AtomBackend {
        Self::simple(Kind::PartialOrder, &[("le", 2)])
    }

    pub fn graph() -> AtomBackend {
        Self::simple(Kind::Graph, &[("E", 2)])
    }

    pub fn tournament() -> AtomBackend {
        Self::simple(Kind::Tournament, &[("E", 2)])
    }

    pub fn betweenness() -> AtomBackend {
        Self::simple(Kind::Betweenness, &[("B", 3)])
    }

    pub fn cyclic() -> AtomBackend {
        Self::simple(Kind::Cyclic, &[("K", 3)])
    }

    pub fn wreath(a: AtomBackend, b: AtomBackend) -> AtomBackend {
        let vocab = wreath::wreath_vocabulary(&a.vocab, &b.vocab).expect("wreath vocabulary");
        AtomBackend {
            kind: Kind::Wreath(Box::new(a), Box::new(b)),
            vocab: Arc::new(vocab),
        }
    }

    /// Parses a backend name such as `total_order` or `wreath(equality,wreath(equality,equality))`.
    pub fn parse(text: &str) -> Result<AtomBackend, AtomsError> {
        let t = text.trim();
        let unknown = || AtomsError::UnknownBackend(text.trim().to_string());
        match t {
            "equality" => return Ok(Self::equality()),
            "total_order" => return Ok(Self::total_order()),
            "equivalence" => return Ok(Self::equivalence()),
            "partial_order" => return Ok(Self::partial_order()),
            "graph" => return Ok(Self::graph()),
            "tournament" => return Ok(Self::tournament()),
            "betweenness" => return Ok(Self::betweenness()),
            "cyclic" => return Ok(Self::cyclic()),
            _ => {}
        }
        let inner = t
            .strip_prefix("wreath")
            .map(str::trim_start)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(unknown)?;
        let mut depth = 0usize;
        for (i, c) in inner.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.checked_sub(1).ok_or_else(unknown)?,
                ',' if depth == 0 => {
                    let a = Self::parse(&inner[..i])?;
                    let b = Self::parse(&inner[i + 1..])?;
                    return Ok(Self::wreath(a, b));
                }
                _ => {}
            }
        }
        Err(unknown())
    }

    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Equality => "equality".into(),
            Kind::TotalOrder => "total_order".into(),
            Kind::Equivalence => "equivalence".into(),
            Kind::PartialOrder => "partial_order".into(),
            Kind::Graph => "graph".into(),
            Kind::Tournament => "tournament".into(),
            Kind::Betweenness => "betweenness".into(),
            Kind::Cyclic => "cyclic".into(),
            Kind::Wreath(a, b) => format!("wreath({},{})", a.name(), b.name()),
        }
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    /// Decides whether `s` is (isomorphic to) an induced substructure of the atoms.
    pub fn embeds(&self, s: &FiniteStructure) -> Result<bool, AtomsError> {
        match &self.kind {
            Kind::Equality => embeds_equality(s),
            Kind::TotalOrder => embeds_total_order(s),
            Kind::Equivalence => embeds_equivalence(s),
            Kind::PartialOrder => embeds_partial_order(s),
            Kind::Graph => embeds_graph(s),
            Kind::Tournament => embeds_tournament(s),
            Kind::Betweenness => embeds_betweenness(s),
            Kind::Cyclic => embeds_cyclic(s),
            Kind::Wreath(a, b) => wreath_embeds(a, b, s),
        }
    }

    /// All structures on `s.size() + 1` elements that embed and restrict to
    /// `s` on the first `s.size()` elements. `s` must embed.
    pub fn extensions(&self, s: &FiniteStructure) -> Vec<FiniteStructure> {
        match &self.kind {
            Kind::Equality => embed::extend_equality(s),
            Kind::TotalOrder => embed::extend_total_order(s),
            Kind::Equivalence => embed::extend_equivalence(s),
            Kind::PartialOrder => embed::extend_partial_order(s),
            Kind::Graph => embed::extend_graph(s),
            Kind::Tournament => embed::extend_tournament(s),
            Kind::Betweenness => embed::extend_betweenness(s),
            Kind::Cyclic => embed::extend_cyclic(s),
            Kind::Wreath(a, b) => wreath::wreath_extensions(a, b, s),
        }
    }

    pub fn has_model(&self) -> bool {
        match &self.kind {
            Kind::Equality | Kind::TotalOrder | Kind::Equivalence | Kind::Graph => true,
            Kind::Wreath(a, b) => a.has_model() && b.has_model(),
            _ => false,
        }
    }

    fn unsupported(&self) -> AtomsError {
        AtomsError::CapabilityUnsupported { backend: self.name() }
    }

    pub fn parse_atom(&self, text: &str) -> Result<ConcreteAtom, AtomsError> {
        let text = text.trim();
        let bad = || AtomsError::BadAtom {
            backend: self.name(),
            text: text.to_string(),
        };
        match &self.kind {
            Kind::Equality | Kind::Graph => concrete::parse_nat(text).map(ConcreteAtom::Nat).ok_or_else(bad),
            Kind::TotalOrder => concrete::parse_rational(text)
                .map(ConcreteAtom::Rational)
                .ok_or_else(bad),
            Kind::Equivalence => concrete::parse_pair(text)
                .map(|(c, m)| ConcreteAtom::Pair(c, m))
                .ok_or_else(bad),
            Kind::Wreath(a, b) => {
                if !self.has_model() {
                    return Err(self.unsupported());
                }
                let (x, y) = concrete::split_wreath(text).ok_or_else(bad)?;
                Ok(ConcreteAtom::Wreath(Box::new(a.parse_atom(x)?), Box::new(b.parse_atom(y)?)))
            }
            _ => Err(self.unsupported()),
        }
    }

    fn check_atom(&self, atom: &ConcreteAtom) -> Result<(), AtomsError> {
        let ok = match (&self.kind, atom) {
            (Kind::Equality | Kind::Graph, ConcreteAtom::Nat(_)) => true,
            (Kind::TotalOrder, ConcreteAtom::Rational(_)) => true,
            (Kind::Equivalence, ConcreteAtom::Pair(..)) => true,
            (Kind::Wreath(a, b), ConcreteAtom::Wreath(x, y)) => {
                a.check_atom(x)?;
                b.check_atom(y)?;
                true
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(AtomsError::BadAtom {
                backend: self.name(),
                text: atom.to_string(),
            })
        }
    }

    /// Truth of relation number `rel` on concrete atoms that are already
    /// known to belong to this backend.
    fn eval_index(&self, rel: usize, args: &[&ConcreteAtom]) -> bool {
        if rel == Vocabulary::EQ {
            return args[0] == args[1];
        }
        match (&self.kind, args) {
            (Kind::TotalOrder, [ConcreteAtom::Rational(p), ConcreteAtom::Rational(q)]) => p <= q,
            (Kind::Equivalence, [ConcreteAtom::Pair(c, _), ConcreteAtom::Pair(d, _)]) => c == d,
            (Kind::Graph, [ConcreteAtom::Nat(i), ConcreteAtom::Nat(j)]) => {
                let (lo, hi) = if i < j { (*i, *j) } else { (*j, *i) };
                lo != hi && lo < 64 && hi >> lo & 1 == 1
            }
            (Kind::Wreath(a, b), _) => {
                let (xs, ys): (Vec<&ConcreteAtom>, Vec<&ConcreteAtom>) = args
                    .iter()
                    .map(|atom| match atom {
                        ConcreteAtom::Wreath(x, y) => (&**x, &**y),
                        _ => unreachable!("atoms are checked before evaluation"),
                    })
                    .unzip();
                let na = a.vocab.len();
                if rel <= na {
                    a.eval_index(rel - 1, &xs)
                } else {
                    xs.windows(2).all(|w| w[0] == w[1]) && b.eval_index(rel - na, &ys)
                }
            }
            _ => unreachable!("atoms are checked before evaluation"),
        }
    }

    /// Truth value of a named relation on concrete atoms.
    pub fn eval_relation(&self, rel: &str, args: &[ConcreteAtom]) -> Result<bool, AtomsError> {
        if !self.has_model() {
            return Err(self.unsupported());
        }
        let idx = self.vocab.index_of(rel).ok_or_else(|| AtomsError::UnknownRelation {
            relation: rel.to_string(),
            vocabulary: self.vocab.to_string(),
        })?;
        let arity = self.vocab.arity(idx);
        if args.len() != arity {
            return Err(AtomsError::ArityMismatch {
                relation: rel.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        for a in args {
            self.check_atom(a)?;
        }
        let refs: Vec<&ConcreteAtom> = args.iter().collect();
        Ok(self.eval_index(idx, &refs))
    }

    /// The complete clause over positions `0..atoms.len()` satisfied by `atoms`.
    pub fn complete_clause_of(&self, atoms: &[ConcreteAtom]) -> Result<Clause, AtomsError> {
        if !self.has_model() {
            return Err(self.unsupported());
        }
        for a in atoms {
            self.check_atom(a)?;
        }
        Ok(Clause::from_fn(&self.vocab, atoms.len(), |rel, args| {
            let refs: Vec<&ConcreteAtom> = args.iter().map(|&i| &atoms[i]).collect();
            self.eval_index(rel, &refs)
        }))
    }

    /// The structure induced on pairwise distinct atoms.
    pub fn structure_of(&self, atoms: &[ConcreteAtom]) -> Result<FiniteStructure, AtomsError> {
        if !self.has_model() {
            return Err(self.unsupported());
        }
        for a in atoms {
            self.check_atom(a)?;
        }
        let mut s = FiniteStructure::discrete(self.vocab.clone(), atoms.len());
        for rel in 0..self.vocab.len() {
            for t in all_tuples(atoms.len(), self.vocab.arity(rel)) {
                let refs: Vec<&ConcreteAtom> = t.iter().map(|&i| &atoms[i]).collect();
                s.set(rel, &t, self.eval_index(rel, &refs));
            }
        }
        Ok(s)
    }
}

impl fmt::Display for AtomBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for AtomBackend {
    type Err = AtomsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AtomBackend::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names_round_trip() {
        for name in [
            "equality",
            "total_order",
            "equivalence",
            "partial_order",
            "graph",
            "tournament",
            "betweenness",
            "cyclic",
            "wreath(equality,equality)",
            "wreath(total_order,wreath(equality,graph))",
        ] {
            assert_eq!(AtomBackend::parse(name).unwrap().name(), name);
        }
        assert_eq!(
            AtomBackend::parse(" wreath( equality , total_order ) ").unwrap().name(),
            "wreath(equality,total_order)"
        );
        assert!(matches!(AtomBackend::parse("rado"), Err(AtomsError::UnknownBackend(_))));
        assert!(AtomBackend::parse("wreath(equality)").is_err());
    }

    #[test]
    fn total_order_model() {
        let b = AtomBackend::total_order();
        let half = b.parse_atom("1/2").unwrap();
        let two_thirds = b.parse_atom("2/3").unwrap();
        assert!(b.eval_relation("le", &[half.clone(), two_thirds.clone()]).unwrap());
        assert!(!b.eval_relation("le", &[two_thirds, half]).unwrap());
        assert!(b.eval_relation("eq", &[b.parse_atom("2/4").unwrap(), b.parse_atom("1/2").unwrap()]).unwrap());
    }

    #[test]
    fn graph_bit_model() {
        let b = AtomBackend::graph();
        let e = |i: &str, j: &str| b.eval_relation("E", &[b.parse_atom(i).unwrap(), b.parse_atom(j).unwrap()]).unwrap();
        assert!(e("#0", "#1"));
        assert!(e("#1", "#0"));
        assert!(e("#1", "#2"));
        assert!(!e("#0", "#2"));
        assert!(e("#1", "#3"));
        assert!(!e("#3", "#3"));
    }

    #[test]
    fn equivalence_model() {
        let b = AtomBackend::equivalence();
        let x = b.parse_atom("3:1").unwrap();
        let y = b.parse_atom("3:9").unwrap();
        assert!(b.eval_relation("R", &[x.clone(), y.clone()]).unwrap());
        assert!(!b.eval_relation("eq", &[x, y]).unwrap());
    }

    #[test]
    fn wreath_model() {
        let b = AtomBackend::parse("wreath(total_order,equality)").unwrap();
        let x = b.parse_atom("(1|#0)").unwrap();
        let y = b.parse_atom("(1|#5)").unwrap();
        let z = b.parse_atom("(1/2|#0)").unwrap();
        assert!(b.eval_relation("eq_a", &[x.clone(), y.clone()]).unwrap());
        assert!(!b.eval_relation("eq", &[x.clone(), y.clone()]).unwrap());
        assert!(b.eval_relation("le_a", &[z.clone(), x.clone()]).unwrap());
        assert!(!b.eval_relation("eq_a", &[z, x]).unwrap());
        assert_eq!(y.to_string(), "(1|#5)");
    }

    #[test]
    fn model_less_backends_refuse() {
        for b in [AtomBackend::partial_order(), AtomBackend::tournament(), AtomBackend::betweenness(), AtomBackend::cyclic()] {
            assert!(!b.has_model());
            assert!(matches!(b.parse_atom("1"), Err(AtomsError::CapabilityUnsupported { .. })));
            assert!(matches!(b.eval_relation("eq", &[]), Err(AtomsError::CapabilityUnsupported { .. })));
            assert!(matches!(b.complete_clause_of(&[]), Err(AtomsError::CapabilityUnsupported { .. })));
        }
        let w = AtomBackend::parse("wreath(equality,cyclic)").unwrap();
        assert!(!w.has_model());
    }

    #[test]
    fn eval_checks_arity_and_atoms() {
        let b = AtomBackend::total_order();
        let one = b.parse_atom("1").unwrap();
        assert!(matches!(b.eval_relation("le", std::slice::from_ref(&one)), Err(AtomsError::ArityMismatch { .. })));
        assert!(matches!(b.eval_relation("E", &[one.clone(), one.clone()]), Err(AtomsError::UnknownRelation { .. })));
        assert!(matches!(
            b.eval_relation("le", &[one, ConcreteAtom::Nat(1)]),
            Err(AtomsError::BadAtom { .. })
        ));
        assert!(b.parse_atom("#1").is_err());
    }
}
