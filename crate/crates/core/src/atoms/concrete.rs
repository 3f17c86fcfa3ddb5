use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// A concrete atom drawn from a backend's computable model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConcreteAtom {
    /// Equality atom or vertex of the graph BIT model.
    Nat(u64),
    /// Total-order atom; always in lowest terms with positive denominator.
    Rational(BigRational),
    /// Equivalence atom `(class, member)`.
    Pair(u64, u64),
    /// Wreath-product atom `(a, b)`.
    Wreath(Box<ConcreteAtom>, Box<ConcreteAtom>),
}

impl ConcreteAtom {
    pub fn rational(numer: i64, denom: i64) -> ConcreteAtom {
        ConcreteAtom::Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(n: i64) -> ConcreteAtom {
        ConcreteAtom::Rational(BigRational::from_integer(n.into()))
    }
}

impl fmt::Display for ConcreteAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcreteAtom::Nat(n) => write!(f, "#{n}"),
            ConcreteAtom::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            ConcreteAtom::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            ConcreteAtom::Pair(c, m) => write!(f, "{c}:{m}"),
            ConcreteAtom::Wreath(a, b) => write!(f, "({a}|{b})"),
        }
    }
}

pub(crate) fn parse_nat(text: &str) -> Option<u64> {
    let digits = text.strip_prefix('#').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub(crate) fn parse_rational(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let num = BigInt::from_str(num.trim()).ok()?;
    let den = match den {
        Some(d) => {
            let d = d.trim();
            if d.starts_with(['+', '-']) {
                return None;
            }
            BigInt::from_str(d).ok()?
        }
        None => BigInt::from(1),
    };
    if den.is_zero() || den.is_negative() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub(crate) fn parse_pair(text: &str) -> Option<(u64, u64)> {
    let (c, m) = text.split_once(':')?;
    Some((parse_plain(c.trim())?, parse_plain(m.trim())?))
}

fn parse_plain(text: &str) -> Option<u64> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Splits `(a|b)` at the `|` that sits directly inside the outer parentheses.
pub(crate) fn split_wreath(text: &str) -> Option<(&str, &str)> {
    let inner = text.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            '|' if depth == 0 => return Some((inner[..i].trim(), inner[i + 1..].trim())),
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let q = parse_rational("4/6").unwrap();
        assert_eq!(q, BigRational::new(2.into(), 3.into()));
        assert_eq!(ConcreteAtom::Rational(q).to_string(), "2/3");
        assert_eq!(ConcreteAtom::Rational(parse_rational("-8/4").unwrap()).to_string(), "-2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("1/-2").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn nat_and_pair_syntax() {
        assert_eq!(parse_nat("#12"), Some(12));
        assert_eq!(parse_nat("7"), Some(7));
        assert_eq!(parse_nat("#"), None);
        assert_eq!(parse_pair("3:9"), Some((3, 9)));
        assert_eq!(parse_pair("3"), None);
    }

    #[test]
    fn wreath_split_respects_nesting() {
        assert_eq!(split_wreath("(#1|#2)"), Some(("#1", "#2")));
        assert_eq!(split_wreath("((#1|#2)|#3)"), Some(("(#1|#2)", "#3")));
        assert_eq!(split_wreath("(#1|(#2|#3))"), Some(("#1", "(#2|#3)")));
        assert_eq!(split_wreath("#1|#2"), None);
    }
}
