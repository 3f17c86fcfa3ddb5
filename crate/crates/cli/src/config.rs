//! Parsing of configurations and letters given on the command line, e.g.
//! `lI | k(2) k(1) k(3)` or `l0(1/2) | k(3)`.

use atomreach::atoms::{AtomBackend, ConcreteAtom};
use atomreach::automata::Configuration;
use atomreach::reachability::Bottom;

/// `name` or `name(a,b,...)`, with the raw atom texts split at top-level commas.
struct Term<'a> {
    name: &'a str,
    args: Vec<&'a str>,
}

fn terms(text: &str) -> Result<Vec<Term<'_>>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let name_len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '\''))
            .unwrap_or(rest.len());
        if name_len == 0 {
            return Err(format!("expected a name at `{rest}`"));
        }
        let name = &rest[..name_len];
        rest = &rest[name_len..];
        let mut args = Vec::new();
        if rest.starts_with('(') {
            let mut depth = 0;
            let mut start = 1;
            let mut close = None;
            for (i, c) in rest.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            close = Some(i);
                            break;
                        }
                    }
                    ',' if depth == 1 => {
                        args.push(rest[start..i].trim());
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            let close = close.ok_or_else(|| format!("unbalanced parentheses after `{name}`"))?;
            let last = rest[start..close].trim();
            if !(args.is_empty() && last.is_empty()) {
                args.push(last);
            }
            rest = &rest[close + 1..];
        }
        out.push(Term { name, args });
        rest = rest.trim_start();
    }
    Ok(out)
}

fn atoms(backend: &AtomBackend, args: &[&str]) -> Result<Vec<ConcreteAtom>, String> {
    args.iter()
        .map(|a| backend.parse_atom(a).map_err(|e| e.to_string()))
        .collect()
}

/// Splits at the first `|` outside parentheses.
fn split_bar(text: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => return Some((&text[..i], &text[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Parses `loc[(atoms)] | letter[(atoms)] ...`, stack top first.
pub fn parse_configuration(backend: &AtomBackend, text: &str) -> Result<Configuration, String> {
    let (head, stack) = split_bar(text).ok_or("a configuration has the form `loc(atoms) | letter(atoms) ...`")?;
    let mut head = terms(head)?;
    if head.len() != 1 {
        return Err("expected exactly one location before `|`".into());
    }
    let loc = head.remove(0);
    let stack = terms(stack)?
        .into_iter()
        .map(|t| Ok((t.name.to_string(), atoms(backend, &t.args)?)))
        .collect::<Result<Vec<_>, String>>()?;
    Ok(Configuration {
        location: loc.name.to_string(),
        state_atoms: atoms(backend, &loc.args)?,
        stack,
    })
}

/// Parses `letter(atoms)`, `letter(any)` or `letter`.
pub fn parse_bottom(backend: &AtomBackend, text: &str) -> Result<(String, Bottom), String> {
    let mut ts = terms(text)?;
    if ts.len() != 1 {
        return Err("expected a single letter such as `k(any)`".into());
    }
    let t = ts.remove(0);
    let bottom = if t.args == ["any"] {
        Bottom::Any
    } else {
        Bottom::Atoms(atoms(backend, &t.args)?)
    };
    Ok((t.name.to_string(), bottom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configurations() {
        let q = AtomBackend::total_order();
        let c = parse_configuration(&q, "lI | k(2) k(1) k(3)").unwrap();
        assert_eq!(c.location, "lI");
        assert_eq!(c.stack.len(), 3);
        assert_eq!(c.to_string(), "lI | k(2) k(1) k(3)");
        let c = parse_configuration(&q, "l0(1/2) |").unwrap();
        assert_eq!(c.state_atoms, vec![q.parse_atom("1/2").unwrap()]);
        assert!(c.stack.is_empty());
        let w = AtomBackend::parse("wreath(equality,total_order)").unwrap();
        let c = parse_configuration(&w, "p((#1|2),(#0|1/3)) | k()").unwrap();
        assert_eq!(c.state_atoms.len(), 2);
        assert_eq!(c.stack, vec![("k".to_string(), vec![])]);
        assert!(parse_configuration(&q, "lI k(2)").is_err());
        assert!(parse_configuration(&q, "lI | k(x)").is_err());
    }

    #[test]
    fn bottoms() {
        let e = AtomBackend::equality();
        assert_eq!(parse_bottom(&e, "k(any)").unwrap(), ("k".to_string(), Bottom::Any));
        assert_eq!(
            parse_bottom(&e, "k(#3)").unwrap(),
            ("k".to_string(), Bottom::Atoms(vec![ConcreteAtom::Nat(3)]))
        );
        assert_eq!(parse_bottom(&e, "k").unwrap(), ("k".to_string(), Bottom::Atoms(vec![])));
    }
}
