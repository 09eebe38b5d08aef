use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Cursor, Tok};
use super::{Formula, Renaming, Vocabulary};
use crate::error::SyntaxError;

/// Relation algebra terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RaTerm {
    Atom(String),
    /// The identity relation.
    Id,
    /// The total relation over the domain.
    Top,
    Meet(Box<RaTerm>, Box<RaTerm>),
    Diff(Box<RaTerm>, Box<RaTerm>),
    Comp(Box<RaTerm>, Box<RaTerm>),
    Conv(Box<RaTerm>),
}

impl RaTerm {
    pub fn atom(name: &str) -> Self {
        RaTerm::Atom(name.to_string())
    }

    pub fn meet(a: Self, b: Self) -> Self {
        RaTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn diff(a: Self, b: Self) -> Self {
        RaTerm::Diff(Box::new(a), Box::new(b))
    }

    pub fn comp(a: Self, b: Self) -> Self {
        RaTerm::Comp(Box::new(a), Box::new(b))
    }

    pub fn conv(a: Self) -> Self {
        RaTerm::Conv(Box::new(a))
    }

    pub fn size(&self) -> usize {
        match self {
            RaTerm::Atom(_) | RaTerm::Id | RaTerm::Top => 1,
            RaTerm::Conv(a) => 1 + a.size(),
            RaTerm::Meet(a, b) | RaTerm::Diff(a, b) | RaTerm::Comp(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Applies `leaf` to every atomic subterm (atoms, `Id`, `Top`), keeping the
    /// operator skeleton.
    pub fn map_leaves(&self, leaf: &impl Fn(&RaTerm) -> RaTerm) -> RaTerm {
        match self {
            RaTerm::Atom(_) | RaTerm::Id | RaTerm::Top => leaf(self),
            RaTerm::Meet(a, b) => RaTerm::meet(a.map_leaves(leaf), b.map_leaves(leaf)),
            RaTerm::Diff(a, b) => RaTerm::diff(a.map_leaves(leaf), b.map_leaves(leaf)),
            RaTerm::Comp(a, b) => RaTerm::comp(a.map_leaves(leaf), b.map_leaves(leaf)),
            RaTerm::Conv(a) => RaTerm::conv(a.map_leaves(leaf)),
        }
    }

    fn write(&self, out: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        const MEET: u8 = 1;
        const COMP: u8 = 2;
        const POST: u8 = 3;
        let binary = |out: &mut fmt::Formatter<'_>, a: &RaTerm, b: &RaTerm, op: &str, level: u8| {
            if prec > level {
                out.write_str("(")?;
            }
            a.write(out, level)?;
            out.write_str(op)?;
            b.write(out, level + 1)?;
            if prec > level {
                out.write_str(")")?;
            }
            Ok(())
        };
        match self {
            RaTerm::Atom(r) => out.write_str(r),
            RaTerm::Id => out.write_str("id"),
            RaTerm::Top => out.write_str("top"),
            RaTerm::Meet(a, b) => binary(out, a, b, " & ", MEET),
            RaTerm::Diff(a, b) => binary(out, a, b, " - ", MEET),
            RaTerm::Comp(a, b) => binary(out, a, b, ";", COMP),
            RaTerm::Conv(a) => {
                a.write(out, POST)?;
                out.write_str("~")
            }
        }
    }
}

impl fmt::Display for RaTerm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(out, 0)
    }
}

impl Formula for RaTerm {
    fn vocabulary(&self) -> Vocabulary {
        fn go(t: &RaTerm, out: &mut BTreeSet<String>) {
            match t {
                RaTerm::Atom(r) => {
                    out.insert(r.clone());
                }
                RaTerm::Id | RaTerm::Top => {}
                RaTerm::Conv(a) => go(a, out),
                RaTerm::Meet(a, b) | RaTerm::Diff(a, b) | RaTerm::Comp(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut v = Vocabulary::default();
        go(self, &mut v.binary);
        v
    }

    fn rename_unchecked(&self, r: &Renaming) -> Self {
        self.map_leaves(&|leaf| match leaf {
            RaTerm::Atom(a) => RaTerm::Atom(r.binary_name(a).to_string()),
            other => other.clone(),
        })
    }
}

/// Parses a relation algebra term. Postfix `~` binds tightest, then `;`,
/// then `&` and `-`; all binary operators associate to the left.
pub fn parse_ra(text: &str) -> Result<RaTerm, SyntaxError> {
    let mut c = Cursor::new(text)?;
    let t = meet_level(&mut c)?;
    c.finish()?;
    Ok(t)
}

fn meet_level(c: &mut Cursor) -> Result<RaTerm, SyntaxError> {
    let mut acc = comp_level(c)?;
    loop {
        if c.eat(&Tok::Amp) {
            acc = RaTerm::meet(acc, comp_level(c)?);
        } else if c.eat(&Tok::Minus) {
            acc = RaTerm::diff(acc, comp_level(c)?);
        } else {
            return Ok(acc);
        }
    }
}

fn comp_level(c: &mut Cursor) -> Result<RaTerm, SyntaxError> {
    let mut acc = postfix(c)?;
    while c.eat(&Tok::Semi) {
        acc = RaTerm::comp(acc, postfix(c)?);
    }
    Ok(acc)
}

fn postfix(c: &mut Cursor) -> Result<RaTerm, SyntaxError> {
    let mut acc = primary(c)?;
    while c.eat(&Tok::Tilde) {
        acc = RaTerm::conv(acc);
    }
    Ok(acc)
}

fn primary(c: &mut Cursor) -> Result<RaTerm, SyntaxError> {
    match c.peek().cloned() {
        Some(Tok::Ident(name)) => {
            c.bump();
            Ok(match name.as_str() {
                "id" => RaTerm::Id,
                "top" => RaTerm::Top,
                _ => RaTerm::Atom(name),
            })
        }
        Some(Tok::LParen) => {
            c.bump();
            let t = meet_level(c)?;
            c.expect(&Tok::RParen)?;
            Ok(t)
        }
        _ => Err(c.unexpected("a relation term")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RaTerm {
        parse_ra(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("(R ; S)~"), RaTerm::conv(RaTerm::comp(RaTerm::atom("R"), RaTerm::atom("S"))));
        assert_eq!(p("R;R~"), RaTerm::comp(RaTerm::atom("R"), RaTerm::conv(RaTerm::atom("R"))));
        assert_eq!(p("id & top"), RaTerm::meet(RaTerm::Id, RaTerm::Top));
    }

    #[test]
    fn precedence() {
        assert_eq!(p("R & S ; T"), p("R & (S ; T)"));
        assert_eq!(p("R - S & T"), p("(R - S) & T"));
        assert_eq!(p("R;S;T"), p("(R;S);T"));
        assert_eq!(p("R;S~"), p("R;(S~)"));
    }

    #[test]
    fn printing_reparses() {
        for s in ["R - (S - T)", "(R & S);T", "(R;S)~~", "R;(S;T)", "top - id & R"] {
            let t = p(s);
            assert_eq!(p(&t.to_string()), t, "{s}");
        }
        assert_eq!(p("R - (S - T)").to_string(), "R - (S - T)");
        assert_eq!(p("(R - S) - T").to_string(), "R - S - T");
    }

    #[test]
    fn errors() {
        assert_eq!(parse_ra("R ;").unwrap_err().pos, 3);
        assert!(parse_ra("(R").is_err());
        assert!(parse_ra("~R").is_err());
    }
}
