//! Wreath products `A ⊗ B`: every atom of `A` is replaced by a copy of `B`.
//!
//! Vocabulary layout: `eq`, then every relation of `A` (its `eq` included)
//! with suffix `_a`, then every non-equality relation of `B` with suffix `_b`.
//! `eq_a` relates atoms in the same block. `B`'s own `eq` is left out because
//! inside a block it coincides with the global `eq`.

use std::collections::BTreeSet;

use super::structure::all_tuples;
use super::{AtomBackend, AtomsError, FiniteStructure, Vocabulary};

pub(crate) fn wreath_vocabulary(a: &Vocabulary, b: &Vocabulary) -> Result<Vocabulary, AtomsError> {
    let a_rels = a.relations().iter().map(|r| (format!("{}_a", r.name), r.arity));
    let b_rels = b.relations()[1..].iter().map(|r| (format!("{}_b", r.name), r.arity));
    Vocabulary::new(a_rels.chain(b_rels))
}

struct Layout {
    /// Number of relations of `A`, `eq` included.
    na: usize,
    nb: usize,
}

impl Layout {
    fn new(a: &AtomBackend, b: &AtomBackend) -> Layout {
        Layout {
            na: a.vocabulary().len(),
            nb: b.vocabulary().len(),
        }
    }

    fn a_rel(&self, r: usize) -> usize {
        1 + r
    }

    /// `r` ranges over the non-equality relations of `B` (`r >= 1`).
    fn b_rel(&self, r: usize) -> usize {
        self.na + r
    }
}

/// Whether `s` is an induced substructure of `a ⊗ b`.
///
/// Searches for the block partition element by element (restricted growth
/// strings), rejecting a partial assignment as soon as a `B`-tuple crosses
/// blocks or an `A`-relation is not uniform on blocks.
pub fn wreath_embeds(a: &AtomBackend, b: &AtomBackend, s: &FiniteStructure) -> Result<bool, AtomsError> {
    let expected = wreath_vocabulary(a.vocabulary(), b.vocabulary())?;
    if **s.vocabulary() != expected {
        return Err(AtomsError::VocabularyMismatch {
            backend: format!("wreath({},{})", a.name(), b.name()),
            expected: expected.to_string(),
            found: s.vocabulary().to_string(),
        });
    }
    if !s.eq_is_diagonal() {
        return Ok(false);
    }
    let layout = Layout::new(a, b);
    let mut search = Search {
        a,
        b,
        s,
        layout: &layout,
        block: Vec::new(),
        reps: Vec::new(),
    };
    search.run()
}

struct Search<'a> {
    a: &'a AtomBackend,
    b: &'a AtomBackend,
    s: &'a FiniteStructure,
    layout: &'a Layout,
    block: Vec<usize>,
    reps: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self) -> Result<bool, AtomsError> {
        let i = self.block.len();
        if i == self.s.size() {
            return self.finish();
        }
        for blk in 0..=self.reps.len() {
            let fresh = blk == self.reps.len();
            if fresh {
                self.reps.push(i);
            }
            self.block.push(blk);
            if self.newest_is_consistent() && self.run()? {
                return Ok(true);
            }
            self.block.pop();
            if fresh {
                self.reps.pop();
            }
        }
        Ok(false)
    }

    fn rep_of(&self, e: usize) -> usize {
        self.reps[self.block[e]]
    }

    fn newest_is_consistent(&self) -> bool {
        let i = self.block.len() - 1;
        let m = i + 1;
        for r in 0..self.layout.na {
            let rel = self.layout.a_rel(r);
            for t in all_tuples(m, self.a.vocabulary().arity(r)) {
                if !t.contains(&i) {
                    continue;
                }
                let image: Vec<usize> = t.iter().map(|&e| self.rep_of(e)).collect();
                if self.s.get(rel, &t) != self.s.get(rel, &image) {
                    return false;
                }
            }
        }
        for r in 1..self.layout.nb {
            let rel = self.layout.b_rel(r);
            for t in all_tuples(m, self.b.vocabulary().arity(r)) {
                if t.contains(&i) && self.s.get(rel, &t) && t.iter().any(|&e| self.block[e] != self.block[i]) {
                    return false;
                }
            }
        }
        true
    }

    fn finish(&self) -> Result<bool, AtomsError> {
        let q = quotient(self.a, self.layout, self.s, &self.reps);
        if !self.a.embeds(&q)? {
            return Ok(false);
        }
        for blk in 0..self.reps.len() {
            let members: Vec<usize> = (0..self.s.size()).filter(|&e| self.block[e] == blk).collect();
            if !self.b.embeds(&block_structure(self.b, self.layout, self.s, &members))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The `A`-structure on the given block representatives, read off `_a` relations.
fn quotient(a: &AtomBackend, layout: &Layout, s: &FiniteStructure, reps: &[usize]) -> FiniteStructure {
    let mut q = FiniteStructure::discrete(a.vocabulary().clone(), reps.len());
    for r in 0..layout.na {
        for t in all_tuples(reps.len(), a.vocabulary().arity(r)) {
            let image: Vec<usize> = t.iter().map(|&i| reps[i]).collect();
            q.set(r, &t, s.get(layout.a_rel(r), &image));
        }
    }
    q
}

/// The `B`-structure on one block, with `B`'s `eq` taken from the global `eq`.
fn block_structure(b: &AtomBackend, layout: &Layout, s: &FiniteStructure, members: &[usize]) -> FiniteStructure {
    let mut out = FiniteStructure::discrete(b.vocabulary().clone(), members.len());
    for r in 0..layout.nb {
        let rel = if r == Vocabulary::EQ { Vocabulary::EQ } else { layout.b_rel(r) };
        for t in all_tuples(members.len(), b.vocabulary().arity(r)) {
            let image: Vec<usize> = t.iter().map(|&i| members[i]).collect();
            out.set(r, &t, s.get(rel, &image));
        }
    }
    out
}

/// One-point extensions of a structure that embeds into `a ⊗ b`: the new atom
/// either joins an existing block (a one-point extension of that block's
/// `B`-structure) or opens a new block (a one-point extension of the quotient
/// paired with a one-element `B`-structure).
pub(crate) fn wreath_extensions(a: &AtomBackend, b: &AtomBackend, s: &FiniteStructure) -> Vec<FiniteStructure> {
    let layout = Layout::new(a, b);
    let n = s.size();
    let eq_a = layout.a_rel(Vocabulary::EQ);
    let mut reps: Vec<usize> = Vec::new();
    let mut block = vec![0; n];
    for (e, slot) in block.iter_mut().enumerate() {
        match reps.iter().position(|&r| s.get(eq_a, &[r, e])) {
            Some(blk) => *slot = blk,
            None => {
                *slot = reps.len();
                reps.push(e);
            }
        }
    }
    let q = quotient(a, &layout, s, &reps);
    let mut out = BTreeSet::new();

    let build = |q2: &FiniteStructure, new_block: usize, local: &FiniteStructure, members: &[usize]| {
        let mut t = s.with_new_element();
        let block_of = |e: usize| if e == n { new_block } else { block[e] };
        for r in 0..layout.na {
            for tuple in all_tuples(n + 1, a.vocabulary().arity(r)) {
                if tuple.contains(&n) {
                    let image: Vec<usize> = tuple.iter().map(|&e| block_of(e)).collect();
                    t.set(layout.a_rel(r), &tuple, q2.get(r, &image));
                }
            }
        }
        for r in 1..layout.nb {
            for tuple in all_tuples(n + 1, b.vocabulary().arity(r)) {
                if !tuple.contains(&n) || tuple.iter().any(|&e| block_of(e) != new_block) {
                    continue;
                }
                let image: Vec<usize> = tuple
                    .iter()
                    .map(|&e| if e == n { members.len() } else { members.iter().position(|&m| m == e).unwrap() })
                    .collect();
                t.set(layout.b_rel(r), &tuple, local.get(r, &image));
            }
        }
        t
    };

    for blk in 0..reps.len() {
        let members: Vec<usize> = (0..n).filter(|&e| block[e] == blk).collect();
        let bs = block_structure(b, &layout, s, &members);
        for ext in b.extensions(&bs) {
            out.insert(build(&q, blk, &ext, &members));
        }
    }
    let singletons = b.extensions(&FiniteStructure::discrete(b.vocabulary().clone(), 0));
    for qext in a.extensions(&q) {
        for single in &singletons {
            out.insert(build(&qext, reps.len(), single, &[]));
        }
    }
    out.into_iter().collect()
}
