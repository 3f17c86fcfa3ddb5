//! The spec file format: one atoms declaration followed by named PDS and
//! NFA blocks.
//!
//! ```text
//! atoms total_order
//!
//! pds Mono {
//!   letter k(1);
//!   loc lI(0);
//!   push lI k -> lI k k : lt(y1,u1) & eq(v1,y1);
//! }
//!
//! nfa A for Mono {
//!   state lI(0);
//!   state l0(1) final;
//!   state l1(1);
//!   trans lI k -> l0 : le(p1,y1);
//! }
//! ```
//!
//! Formulas run up to the next `;`. Their free variables are named by
//! block: `x1..` for the source location or state, `y1..` for the read
//! letter, `p1..` for the target, `u1..` and `v1..` for the two pushed
//! letters. Declarations may carry a constraint (`letter k(2): lt(y1,y2);`),
//! over `y1..` for letters and `x1..` for locations and states. A state
//! with a constraint gets its final marker from a separate
//! `final NAME [: formula];` declaration. Rule formulas are conjoined with
//! the constraints of their blocks. `//` starts a line comment.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use atomreach::atoms::{AtomBackend, AtomsError};
use atomreach::automata::{FoNfa, FoPds, FoSet};
use atomreach::logic::{Conjunct, Ldnf, LogicError, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Vocabulary,
    UnknownVariable,
    Dimension,
    Duplicate,
    UnknownName,
    WidthExceeded,
}

/// A spec file error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NfaBlock {
    /// The PDS whose alphabet the NFA reads.
    pub pds: String,
    pub nfa: FoNfa,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub atoms: AtomBackend,
    pub pds: BTreeMap<String, FoPds>,
    pub nfas: BTreeMap<String, NfaBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    budget: usize,
    theory: Option<Theory>,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Variable names `prefix1..prefixn`.
pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl<'a> Parser<'a> {
    fn position(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
        (line, column)
    }

    fn error(&self, offset: usize, kind: DiagnosticKind, message: impl Into<String>) -> Diagnostic {
        let (line, column) = self.position(offset);
        Diagnostic {
            line,
            column,
            kind,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = &self.text[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with("//") {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Result<Option<Token>, Diagnostic> {
        self.skip_trivia();
        let rest = &self.text[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Ok(None);
        };
        let start = self.pos;
        let token = |tok, len: usize| Token {
            tok,
            start,
            end: start + len,
        };
        if rest.starts_with("->") {
            return Ok(Some(token(Tok::Punct("->"), 2)));
        }
        for p in ["{", "}", "(", ")", ";", ":"] {
            if rest.starts_with(p) {
                return Ok(Some(token(Tok::Punct(p), 1)));
            }
        }
        if c.is_ascii_digit() {
            let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..len]
                .parse()
                .map_err(|_| self.error(start, DiagnosticKind::Syntax, "integer out of range"))?;
            return Ok(Some(token(Tok::Int(n), len)));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
            return Ok(Some(token(Tok::Ident(rest[..len].to_string()), len)));
        }
        Err(self.error(start, DiagnosticKind::Syntax, format!("unexpected character `{c}`")))
    }

    fn next(&mut self) -> Result<Token, Diagnostic> {
        match self.peek()? {
            Some(t) => {
                self.pos = t.end;
                Ok(t)
            }
            None => Err(self.error(self.pos, DiagnosticKind::Syntax, "unexpected end of input")),
        }
    }

    fn expect(&mut self, p: &'static str) -> Result<Token, Diagnostic> {
        let t = self.next()?;
        if t.tok == Tok::Punct(p) {
            Ok(t)
        } else {
            Err(self.error(t.start, DiagnosticKind::Syntax, format!("expected `{p}`")))
        }
    }

    fn at(&mut self, p: &'static str) -> Result<bool, Diagnostic> {
        Ok(matches!(self.peek()?, Some(Token { tok: Tok::Punct(q), .. }) if q == p))
    }

    fn at_keyword(&mut self, kw: &str) -> Result<bool, Diagnostic> {
        Ok(matches!(self.peek()?, Some(Token { tok: Tok::Ident(w), .. }) if w == kw))
    }

    fn ident(&mut self) -> Result<(String, usize), Diagnostic> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.start)),
            _ => Err(self.error(t.start, DiagnosticKind::Syntax, "expected a name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<usize, Diagnostic> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) if s == kw => Ok(t.start),
            _ => Err(self.error(t.start, DiagnosticKind::Syntax, format!("expected `{kw}`"))),
        }
    }

    fn int(&mut self) -> Result<usize, Diagnostic> {
        let t = self.next()?;
        match t.tok {
            Tok::Int(n) => Ok(n),
            _ => Err(self.error(t.start, DiagnosticKind::Syntax, "expected a dimension")),
        }
    }

    /// Raw formula text up to the next `;`, which is consumed.
    fn formula_text(&mut self) -> Result<(&'a str, usize), Diagnostic> {
        let start = self.pos;
        let Some(len) = self.text[start..].find(';') else {
            return Err(self.error(start, DiagnosticKind::Syntax, "formula is not terminated by `;`"));
        };
        self.pos = start + len + 1;
        Ok((&self.text[start..start + len], start))
    }

    fn theory(&self) -> &Theory {
        self.theory.as_ref().expect("atoms are declared first")
    }

    fn logic_error(&self, e: LogicError, text: &str, offset: usize) -> Diagnostic {
        match e {
            LogicError::Parse { offset: at, message } => self.error(offset + at, DiagnosticKind::Syntax, message),
            LogicError::UnknownVariable(v) => {
                let at = find_word(text, &v).unwrap_or(0);
                self.error(offset + at, DiagnosticKind::UnknownVariable, format!("unknown variable `{v}`"))
            }
            LogicError::Atoms(AtomsError::UnknownRelation { relation, vocabulary }) => {
                let at = find_word(text, &relation).unwrap_or(0);
                self.error(
                    offset + at,
                    DiagnosticKind::Vocabulary,
                    format!("vocabulary mismatch: relation `{relation}` is not in {vocabulary}"),
                )
            }
            e @ LogicError::Atoms(AtomsError::ArityMismatch { .. }) => {
                self.error(offset, DiagnosticKind::Vocabulary, e.to_string())
            }
            e @ LogicError::WidthExceeded { .. } => self.error(offset, DiagnosticKind::WidthExceeded, e.to_string()),
            e => self.error(offset, DiagnosticKind::Syntax, e.to_string()),
        }
    }

    fn formula(&mut self, blocks: &[(&str, usize)]) -> Result<(Ldnf, &'a str, usize), Diagnostic> {
        let (text, offset) = self.formula_text()?;
        let vars: Vec<String> = blocks.iter().flat_map(|&(p, n)| names(p, n)).collect();
        let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
        let d = self
            .theory()
            .ldnf_of(text, &refs)
            .map_err(|e| self.logic_error(e, text, offset))?;
        Ok((d, text, offset))
    }

    /// Conjoins `d` with the constraints of its consecutive blocks.
    fn restrict_to(&self, d: &Ldnf, blocks: &[&Ldnf], offset: usize) -> Result<Ldnf, Diagnostic> {
        let width = d.width();
        let mut conjuncts = vec![Conjunct::new(d, (0..width).collect())];
        let mut start = 0;
        for b in blocks {
            conjuncts.push(Conjunct::new(b, (start..start + b.width()).collect()));
            start += b.width();
        }
        let keep: Vec<usize> = (0..width).collect();
        self.theory()
            .conjoin_project(width, &conjuncts, &keep)
            .map_err(|e| self.logic_error(e, "", offset))
    }

    fn full(&self, dim: usize, offset: usize) -> Result<Ldnf, Diagnostic> {
        self.theory().full(dim).map_err(|e| self.logic_error(e, "", offset))
    }

    /// `NAME ( INT ) [: formula]` without the terminator when unconstrained.
    fn component(&mut self, prefix: &str) -> Result<(String, usize, usize, Option<Ldnf>), Diagnostic> {
        let (name, at) = self.ident()?;
        self.expect("(")?;
        let dim = self.int()?;
        self.expect(")")?;
        let constraint = if self.at(":")? {
            self.expect(":")?;
            Some(self.formula(&[(prefix, dim)])?.0)
        } else {
            None
        };
        Ok((name, at, dim, constraint))
    }

    fn insert_component(
        &self,
        set: &mut FoSet,
        what: &str,
        (name, at, dim, constraint): (String, usize, usize, Option<Ldnf>),
    ) -> Result<(), Diagnostic> {
        if set.contains(&name) {
            return Err(self.error(at, DiagnosticKind::Duplicate, format!("{what} `{name}` declared twice")));
        }
        let constraint = match constraint {
            Some(c) => c,
            None => self.full(dim, at)?,
        };
        set.insert(name, dim, constraint)
            .map_err(|e| self.error(at, DiagnosticKind::Dimension, e.to_string()))
    }

    fn lookup<'s>(&self, set: &'s FoSet, what: &str, (name, at): &(String, usize)) -> Result<&'s Ldnf, Diagnostic> {
        set.get(name)
            .map(|c| &c.constraint)
            .ok_or_else(|| self.error(*at, DiagnosticKind::UnknownName, format!("unknown {what} `{name}`")))
    }

    fn pds_block(&mut self) -> Result<FoPds, Diagnostic> {
        self.expect("{")?;
        let mut pds = FoPds::default();
        while !self.at("}")? {
            let (kw, at) = self.ident()?;
            match kw.as_str() {
                "letter" => {
                    let c = self.component("y")?;
                    if c.3.is_none() {
                        self.expect(";")?;
                    }
                    self.insert_component(&mut pds.alphabet, "letter", c)?;
                }
                "loc" => {
                    let c = self.component("x")?;
                    if c.3.is_none() {
                        self.expect(";")?;
                    }
                    self.insert_component(&mut pds.locations, "location", c)?;
                }
                "push" => {
                    let l = self.ident()?;
                    let k = self.ident()?;
                    self.expect("->")?;
                    let (l2, k1, k2) = (self.ident()?, self.ident()?, self.ident()?);
                    self.expect(":")?;
                    let blocks = [
                        self.lookup(&pds.locations, "location", &l)?,
                        self.lookup(&pds.alphabet, "letter", &k)?,
                        self.lookup(&pds.locations, "location", &l2)?,
                        self.lookup(&pds.alphabet, "letter", &k1)?,
                        self.lookup(&pds.alphabet, "letter", &k2)?,
                    ];
                    let dims: Vec<usize> = blocks.iter().map(|b| b.width()).collect();
                    let (d, _, offset) = self.formula(&[
                        ("x", dims[0]),
                        ("y", dims[1]),
                        ("p", dims[2]),
                        ("u", dims[3]),
                        ("v", dims[4]),
                    ])?;
                    let d = self.restrict_to(&d, &blocks, offset)?;
                    let key = (l.0, k.0, l2.0, k1.0, k2.0);
                    if pds.push.insert(key, d).is_some() {
                        return Err(self.error(at, DiagnosticKind::Duplicate, "push rule declared twice"));
                    }
                }
                "pop" => {
                    let l = self.ident()?;
                    let k = self.ident()?;
                    self.expect("->")?;
                    let l2 = self.ident()?;
                    self.expect(":")?;
                    let blocks = [
                        self.lookup(&pds.locations, "location", &l)?,
                        self.lookup(&pds.alphabet, "letter", &k)?,
                        self.lookup(&pds.locations, "location", &l2)?,
                    ];
                    let dims: Vec<usize> = blocks.iter().map(|b| b.width()).collect();
                    let (d, _, offset) = self.formula(&[("x", dims[0]), ("y", dims[1]), ("p", dims[2])])?;
                    let d = self.restrict_to(&d, &blocks, offset)?;
                    if pds.pop.insert((l.0, k.0, l2.0), d).is_some() {
                        return Err(self.error(at, DiagnosticKind::Duplicate, "pop rule declared twice"));
                    }
                }
                _ => {
                    return Err(self.error(
                        at,
                        DiagnosticKind::Syntax,
                        format!("expected `letter`, `loc`, `push` or `pop`, found `{kw}`"),
                    ))
                }
            }
        }
        self.expect("}")?;
        Ok(pds)
    }

    fn final_constraint(&mut self, nfa: &FoNfa, name: &str, at: usize) -> Result<Ldnf, Diagnostic> {
        let state = self.lookup(&nfa.states, "state", &(name.to_string(), at))?.clone();
        if self.at(":")? {
            self.expect(":")?;
            let (d, _, offset) = self.formula(&[("x", state.width())])?;
            self.restrict_to(&d, &[&state], offset)
        } else {
            self.expect(";")?;
            Ok(state)
        }
    }

    fn nfa_block(&mut self, alphabet: FoSet) -> Result<FoNfa, Diagnostic> {
        self.expect("{")?;
        let mut nfa = FoNfa {
            alphabet,
            ..FoNfa::default()
        };
        while !self.at("}")? {
            let (kw, at) = self.ident()?;
            match kw.as_str() {
                "state" => {
                    let c = self.component("x")?;
                    let constrained = c.3.is_some();
                    let (name, name_at) = (c.0.clone(), c.1);
                    self.insert_component(&mut nfa.states, "state", c)?;
                    if !constrained {
                        if self.at_keyword("final")? {
                            self.keyword("final")?;
                            let fin = self.final_constraint(&nfa, &name, name_at)?;
                            nfa.finals.insert(name, fin);
                        } else {
                            self.expect(";")?;
                        }
                    }
                }
                "final" => {
                    let (name, name_at) = self.ident()?;
                    let fin = self.final_constraint(&nfa, &name, name_at)?;
                    if nfa.finals.insert(name.clone(), fin).is_some() {
                        return Err(self.error(
                            name_at,
                            DiagnosticKind::Duplicate,
                            format!("state `{name}` marked final twice"),
                        ));
                    }
                }
                "trans" => {
                    let l = self.ident()?;
                    let k = self.ident()?;
                    self.expect("->")?;
                    let l2 = self.ident()?;
                    self.expect(":")?;
                    let blocks = [
                        self.lookup(&nfa.states, "state", &l)?,
                        self.lookup(&nfa.alphabet, "letter", &k)?,
                        self.lookup(&nfa.states, "state", &l2)?,
                    ];
                    let dims: Vec<usize> = blocks.iter().map(|b| b.width()).collect();
                    let (d, _, offset) = self.formula(&[("x", dims[0]), ("y", dims[1]), ("p", dims[2])])?;
                    let d = self.restrict_to(&d, &blocks, offset)?;
                    if nfa.delta.insert((l.0, k.0, l2.0), d).is_some() {
                        return Err(self.error(at, DiagnosticKind::Duplicate, "transition declared twice"));
                    }
                }
                _ => {
                    return Err(self.error(
                        at,
                        DiagnosticKind::Syntax,
                        format!("expected `state`, `final` or `trans`, found `{kw}`"),
                    ))
                }
            }
        }
        self.expect("}")?;
        Ok(nfa)
    }

    fn spec(&mut self) -> Result<SpecFile, Diagnostic> {
        self.skip_trivia();
        self.keyword("atoms")?;
        self.skip_trivia();
        let start = self.pos;
        let line_end = self.text[start..].find('\n').map_or(self.text.len(), |i| start + i);
        let decl = self.text[start..line_end].trim().trim_end_matches(';').trim();
        let atoms = AtomBackend::parse(decl).map_err(|e| self.error(start, DiagnosticKind::UnknownName, e.to_string()))?;
        self.pos = line_end;
        self.theory = Some(Theory::with_max_width(atoms.clone(), self.budget));
        let mut spec = SpecFile {
            atoms,
            pds: BTreeMap::new(),
            nfas: BTreeMap::new(),
        };
        while let Some(t) = self.peek()? {
            let (kw, at) = self.ident()?;
            match kw.as_str() {
                "pds" => {
                    let (name, name_at) = self.ident()?;
                    if spec.pds.contains_key(&name) {
                        return Err(self.error(name_at, DiagnosticKind::Duplicate, format!("PDS `{name}` declared twice")));
                    }
                    let pds = self.pds_block()?;
                    spec.pds.insert(name, pds);
                }
                "nfa" => {
                    let (name, name_at) = self.ident()?;
                    if spec.nfas.contains_key(&name) {
                        return Err(self.error(name_at, DiagnosticKind::Duplicate, format!("NFA `{name}` declared twice")));
                    }
                    self.keyword("for")?;
                    let (pds_name, pds_at) = self.ident()?;
                    let Some(pds) = spec.pds.get(&pds_name) else {
                        return Err(self.error(pds_at, DiagnosticKind::UnknownName, format!("unknown PDS `{pds_name}`")));
                    };
                    let nfa = self.nfa_block(pds.alphabet.clone())?;
                    spec.nfas.insert(name, NfaBlock { pds: pds_name, nfa });
                }
                _ => {
                    return Err(self.error(
                        at.min(t.start),
                        DiagnosticKind::Syntax,
                        format!("expected `pds` or `nfa`, found `{kw}`"),
                    ))
                }
            }
        }
        Ok(spec)
    }
}

fn find_word(text: &str, word: &str) -> Option<usize> {
    text.match_indices(word).map(|(i, _)| i).find(|&i| {
        let before = text[..i].chars().next_back().is_none_or(|c| !is_ident_char(c));
        let after = text[i + word.len()..].chars().next().is_none_or(|c| !is_ident_char(c));
        before && after
    })
}

/// Parses a spec file; formulas are normalized under the given width budget.
pub fn parse_spec(text: &str, max_width: usize) -> Result<SpecFile, Diagnostic> {
    let mut parser = Parser {
        text,
        pos: 0,
        theory: None,
        budget: max_width,
    };
    parser.spec()
}

fn write_constraint(out: &mut String, theory: &Theory, d: &Ldnf, prefix: &str) -> Result<(), LogicError> {
    if *d != theory.full(d.width())? {
        write!(out, ": {}", theory.render_ldnf(d, &names(prefix, d.width()))).unwrap();
    }
    Ok(())
}

fn rule_text(theory: &Theory, d: &Ldnf, blocks: &[(&str, usize)]) -> String {
    let vars: Vec<String> = blocks.iter().flat_map(|&(p, n)| names(p, n)).collect();
    theory.render_ldnf(d, &vars)
}

fn dim(set: &FoSet, label: &str) -> usize {
    set.dim(label).unwrap_or(0)
}

/// Renders one NFA block.
pub fn write_nfa(out: &mut String, theory: &Theory, name: &str, pds: &str, nfa: &FoNfa) -> Result<(), LogicError> {
    writeln!(out, "nfa {name} for {pds} {{").unwrap();
    let mut late_finals = Vec::new();
    for (label, c) in &nfa.states.components {
        write!(out, "  state {label}({})", c.dim).unwrap();
        let full = theory.full(c.dim)?;
        let fin = nfa.finals.get(label);
        if c.constraint != full {
            write_constraint(out, theory, &c.constraint, "x")?;
            if fin.is_some() {
                late_finals.push(label);
            }
        } else if let Some(fin) = fin {
            out.push_str(" final");
            if *fin != c.constraint {
                write!(out, ": {}", theory.render_ldnf(fin, &names("x", c.dim))).unwrap();
            }
        }
        out.push_str(";\n");
    }
    for label in late_finals {
        let c = &nfa.states.components[label];
        let fin = &nfa.finals[label];
        write!(out, "  final {label}").unwrap();
        if *fin != c.constraint {
            write!(out, ": {}", theory.render_ldnf(fin, &names("x", c.dim))).unwrap();
        }
        out.push_str(";\n");
    }
    for ((l, k, l2), d) in &nfa.delta {
        let blocks = [("x", dim(&nfa.states, l)), ("y", dim(&nfa.alphabet, k)), ("p", dim(&nfa.states, l2))];
        writeln!(out, "  trans {l} {k} -> {l2} : {};", rule_text(theory, d, &blocks)).unwrap();
    }
    out.push_str("}\n");
    Ok(())
}

/// Renders one PDS block.
pub fn write_pds(out: &mut String, theory: &Theory, name: &str, pds: &FoPds) -> Result<(), LogicError> {
    writeln!(out, "pds {name} {{").unwrap();
    for (label, c) in &pds.alphabet.components {
        write!(out, "  letter {label}({})", c.dim).unwrap();
        write_constraint(out, theory, &c.constraint, "y")?;
        out.push_str(";\n");
    }
    for (label, c) in &pds.locations.components {
        write!(out, "  loc {label}({})", c.dim).unwrap();
        write_constraint(out, theory, &c.constraint, "x")?;
        out.push_str(";\n");
    }
    let (locs, letters) = (&pds.locations, &pds.alphabet);
    for ((l, k, l2, k1, k2), d) in &pds.push {
        let blocks = [
            ("x", dim(locs, l)),
            ("y", dim(letters, k)),
            ("p", dim(locs, l2)),
            ("u", dim(letters, k1)),
            ("v", dim(letters, k2)),
        ];
        writeln!(out, "  push {l} {k} -> {l2} {k1} {k2} : {};", rule_text(theory, d, &blocks)).unwrap();
    }
    for ((l, k, l2), d) in &pds.pop {
        let blocks = [("x", dim(locs, l)), ("y", dim(letters, k)), ("p", dim(locs, l2))];
        writeln!(out, "  pop {l} {k} -> {l2} : {};", rule_text(theory, d, &blocks)).unwrap();
    }
    out.push_str("}\n");
    Ok(())
}

/// Renders a spec file in canonical form; parsing the result gives back `spec`.
pub fn serialize_spec(spec: &SpecFile, theory: &Theory) -> Result<String, LogicError> {
    let mut out = format!("atoms {}\n", spec.atoms.name());
    for (name, pds) in &spec.pds {
        out.push('\n');
        write_pds(&mut out, theory, name, pds)?;
    }
    for (name, block) in &spec.nfas {
        out.push('\n');
        write_nfa(&mut out, theory, name, &block.pds, &block.nfa)?;
    }
    Ok(out)
}
