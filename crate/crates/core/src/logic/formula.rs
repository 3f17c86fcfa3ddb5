use std::collections::BTreeSet;
use std::fmt;

use super::LogicError;

/// First-order formula syntax tree over relation names and variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    True,
    False,
    Rel(String, Vec<String>),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Exists(String, Box<Expr>),
    Forall(String, Box<Expr>),
}

impl Expr {
    pub fn rel(name: &str, args: &[&str]) -> Expr {
        Expr::Rel(name.to_string(), args.iter().map(|a| a.to_string()).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn exists(v: &str, e: Expr) -> Expr {
        Expr::Exists(v.to_string(), Box::new(e))
    }

    pub fn forall(v: &str, e: Expr) -> Expr {
        Expr::Forall(v.to_string(), Box::new(e))
    }

    /// Variables with a free occurrence.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match e {
                Expr::True | Expr::False => {}
                Expr::Rel(_, args) => {
                    for a in args {
                        if !bound.contains(a) {
                            out.insert(a.clone());
                        }
                    }
                }
                Expr::Not(e) => go(e, bound, out),
                Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| go(e, bound, out)),
                Expr::Exists(v, e) | Expr::Forall(v, e) => {
                    bound.push(v.clone());
                    go(e, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Expr::True | Expr::False | Expr::Rel(..) => true,
            Expr::Not(e) => e.is_quantifier_free(),
            Expr::And(es) | Expr::Or(es) => es.iter().all(Expr::is_quantifier_free),
            Expr::Exists(..) | Expr::Forall(..) => false,
        }
    }

    /// Number of quantifiers in the whole tree.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Expr::True | Expr::False | Expr::Rel(..) => 0,
            Expr::Not(e) => e.quantifier_count(),
            Expr::And(es) | Expr::Or(es) => es.iter().map(Expr::quantifier_count).sum(),
            Expr::Exists(_, e) | Expr::Forall(_, e) => 1 + e.quantifier_count(),
        }
    }

    /// Longest chain of nested quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Expr::True | Expr::False | Expr::Rel(..) => 0,
            Expr::Not(e) => e.quantifier_depth(),
            Expr::And(es) | Expr::Or(es) => es.iter().map(Expr::quantifier_depth).max().unwrap_or(0),
            Expr::Exists(_, e) | Expr::Forall(_, e) => 1 + e.quantifier_depth(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: top / quantifier body, 1: operand of |, 2: operand of &, 3: operand of !
        match self {
            Expr::True => f.write_str("true"),
            Expr::False => f.write_str("false"),
            Expr::Rel(r, args) => write!(f, "{}({})", r, args.join(",")),
            Expr::Not(e) => {
                f.write_str("!")?;
                e.fmt_prec(f, 3)
            }
            Expr::And(es) | Expr::Or(es) if es.is_empty() => {
                f.write_str(if matches!(self, Expr::And(_)) { "true" } else { "false" })
            }
            Expr::And(es) | Expr::Or(es) => {
                let (op, mine) = if matches!(self, Expr::And(_)) { (" & ", 2) } else { (" | ", 1) };
                let wrap = prec > mine && es.len() > 1;
                if wrap {
                    f.write_str("(")?;
                }
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    e.fmt_prec(f, if es.len() > 1 { mine + 1 } else { prec })?;
                }
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Exists(v, e) | Expr::Forall(v, e) => {
                let q = if matches!(self, Expr::Exists(..)) { "exists" } else { "forall" };
                if prec > 0 {
                    f.write_str("(")?;
                }
                write!(f, "{q} {v}. ")?;
                e.fmt_prec(f, 0)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A formula together with the ordered tuple of its free variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    pub body: Expr,
    pub free: Vec<String>,
}

impl Formula {
    /// Checks that every free variable is listed, that the list has no
    /// repetitions, and that no quantifier rebinds a listed or already bound
    /// variable.
    pub fn new(body: Expr, free: Vec<String>) -> Result<Formula, LogicError> {
        for (i, v) in free.iter().enumerate() {
            if free[..i].contains(v) {
                return Err(LogicError::Malformed(format!("variable `{v}` listed twice")));
            }
        }
        if let Some(v) = body.free_vars().into_iter().find(|v| !free.contains(v)) {
            return Err(LogicError::UnknownVariable(v));
        }
        fn check_binders(e: &Expr, scope: &mut Vec<String>) -> Result<(), LogicError> {
            match e {
                Expr::True | Expr::False | Expr::Rel(..) => Ok(()),
                Expr::Not(e) => check_binders(e, scope),
                Expr::And(es) | Expr::Or(es) => es.iter().try_for_each(|e| check_binders(e, scope)),
                Expr::Exists(v, e) | Expr::Forall(v, e) => {
                    if scope.contains(v) {
                        return Err(LogicError::Malformed(format!("variable `{v}` is bound where it is already in scope")));
                    }
                    scope.push(v.clone());
                    let r = check_binders(e, scope);
                    scope.pop();
                    r
                }
            }
        }
        check_binders(&body, &mut free.clone())?;
        Ok(Formula { body, free })
    }

    /// Parses formula text with the given free-variable tuple.
    pub fn parse(text: &str, free: &[&str]) -> Result<Formula, LogicError> {
        let body = parse_expr(text)?;
        Formula::new(body, free.iter().map(|s| s.to_string()).collect())
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Not,
    End,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                it.next();
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '&' => Tok::And,
            '|' => Tok::Or,
            '!' => Tok::Not,
            c if is_ident_start(c) => {
                let mut end = i;
                while let Some(&(j, d)) = it.peek() {
                    if is_ident_char(d) {
                        end = j + d.len_utf8();
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(text[i..end].to_string()), i));
                continue;
            }
            other => {
                return Err(LogicError::Parse {
                    offset: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        it.next();
        out.push((tok, i));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LogicError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, LogicError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("expected identifier"),
        }
    }

    fn or(&mut self) -> Result<Expr, LogicError> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Or(parts) })
    }

    fn and(&mut self) -> Result<Expr, LogicError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::And(parts) })
    }

    fn unary(&mut self) -> Result<Expr, LogicError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Expr::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Expr::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Expr::False)
            }
            Tok::Ident(s) if s == "exists" || s == "forall" => {
                self.bump();
                let mut vars = vec![self.ident()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    vars.push(self.ident()?);
                }
                self.expect(Tok::Dot, "`.` after quantified variables")?;
                let mut body = self.or()?;
                for v in vars.into_iter().rev() {
                    body = if s == "exists" {
                        Expr::Exists(v, Box::new(body))
                    } else {
                        Expr::Forall(v, Box::new(body))
                    };
                }
                Ok(body)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                self.expect(Tok::LParen, "`(` after relation name")?;
                let mut args = vec![self.ident()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.ident()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Rel(name, args))
            }
            Tok::End => self.error("unexpected end of formula"),
            _ => self.error("expected a formula"),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "true" | "false" | "exists" | "forall")
}

/// Parses formula text. Precedence from tightest: `!`, `&`, `|`; a
/// quantifier body extends as far to the right as possible.
pub fn parse_expr(text: &str) -> Result<Expr, LogicError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.or()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}
