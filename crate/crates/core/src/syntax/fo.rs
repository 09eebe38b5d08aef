use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Cursor, Tok};
use super::{Formula, Renaming, Vocabulary};
use crate::error::SyntaxError;

/// The three first-order variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::Z => 'z',
        }
    }

    fn from_name(s: &str) -> Option<Var> {
        match s {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "z" => Some(Var::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A binary atom used as a quantifier guard.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    pub rel: String,
    pub left: Var,
    pub right: Var,
}

impl Guard {
    pub fn new(rel: &str, left: Var, right: Var) -> Self {
        Guard { rel: rel.to_string(), left, right }
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.left == v || self.right == v
    }

    /// The guard variable that is not `v`, if the guard uses two distinct variables.
    pub fn other(&self, v: Var) -> Option<Var> {
        match (self.left == v, self.right == v) {
            (true, false) => Some(self.right),
            (false, true) => Some(self.left),
            _ => None,
        }
    }
}

/// First-order formulas over the variables `x`, `y`, `z`, with optionally
/// guarded quantifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoFormula {
    BinAtom(String, Var, Var),
    UnAtom(String, Var),
    Eq(Var, Var),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    /// `∃v (guard ∧ body)`, or plain `∃v body` without a guard.
    Exists(Var, Option<Guard>, Box<FoFormula>),
    /// `∀v (guard → body)`, or plain `∀v body` without a guard.
    Forall(Var, Option<Guard>, Box<FoFormula>),
}

use FoFormula as F;

impl FoFormula {
    pub fn bin(rel: &str, a: Var, b: Var) -> Self {
        F::BinAtom(rel.to_string(), a, b)
    }

    pub fn un(pred: &str, a: Var) -> Self {
        F::UnAtom(pred.to_string(), a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        F::Not(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Var, guard: Option<Guard>, body: Self) -> Self {
        F::Exists(v, guard, Box::new(body))
    }

    pub fn forall(v: Var, guard: Option<Guard>, body: Self) -> Self {
        F::Forall(v, guard, Box::new(body))
    }

    /// Free variables as a sorted set.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            F::BinAtom(_, a, b) | F::Eq(a, b) => BTreeSet::from([*a, *b]),
            F::UnAtom(_, a) => BTreeSet::from([*a]),
            F::Not(f) => f.free_vars(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            F::Exists(v, g, body) | F::Forall(v, g, body) => {
                let mut s = body.free_vars();
                if let Some(g) = g {
                    s.extend([g.left, g.right]);
                }
                s.remove(v);
                s
            }
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        match self {
            F::BinAtom(_, a, b) | F::Eq(a, b) => BTreeSet::from([*a, *b]),
            F::UnAtom(_, a) => BTreeSet::from([*a]),
            F::Not(f) => f.all_vars(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                let mut s = a.all_vars();
                s.extend(b.all_vars());
                s
            }
            F::Exists(v, g, body) | F::Forall(v, g, body) => {
                let mut s = body.all_vars();
                s.insert(*v);
                if let Some(g) = g {
                    s.extend([g.left, g.right]);
                }
                s
            }
        }
    }

    /// Quantifier depth; a guarded quantifier counts as a single step.
    pub fn depth(&self) -> usize {
        match self {
            F::BinAtom(..) | F::UnAtom(..) | F::Eq(..) => 0,
            F::Not(f) => f.depth(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => a.depth().max(b.depth()),
            F::Exists(_, _, body) | F::Forall(_, _, body) => body.depth() + 1,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            F::BinAtom(..) | F::UnAtom(..) | F::Eq(..) => 1,
            F::Not(f) => 1 + f.size(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => 1 + a.size() + b.size(),
            F::Exists(_, _, body) | F::Forall(_, _, body) => 1 + body.size(),
        }
    }

    /// Membership in the binary guarded fragment: every quantifier is guarded
    /// by a binary atom over the quantified variable and one other variable,
    /// its body has no free variables beyond those two, and the formula has at
    /// least one free variable.
    pub fn is_gf_bin(&self) -> bool {
        !self.free_vars().is_empty() && self.quantifiers_guarded()
    }

    fn quantifiers_guarded(&self) -> bool {
        match self {
            F::BinAtom(..) | F::UnAtom(..) | F::Eq(..) => true,
            F::Not(f) => f.quantifiers_guarded(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => a.quantifiers_guarded() && b.quantifiers_guarded(),
            F::Exists(v, g, body) | F::Forall(v, g, body) => {
                let Some(other) = g.as_ref().and_then(|g| g.other(*v)) else { return false };
                body.free_vars().iter().all(|u| *u == *v || *u == other) && body.quantifiers_guarded()
            }
        }
    }

    /// Renames a free variable's occurrences by a substitution map that is
    /// applied only to free occurrences.
    pub fn substitute_vars(&self, map: &dyn Fn(Var) -> Var) -> FoFormula {
        match self {
            F::BinAtom(r, a, b) => F::BinAtom(r.clone(), map(*a), map(*b)),
            F::UnAtom(p, a) => F::UnAtom(p.clone(), map(*a)),
            F::Eq(a, b) => F::Eq(map(*a), map(*b)),
            F::Not(f) => F::not(f.substitute_vars(map)),
            F::And(a, b) => F::and(a.substitute_vars(map), b.substitute_vars(map)),
            F::Or(a, b) => F::or(a.substitute_vars(map), b.substitute_vars(map)),
            F::Implies(a, b) => F::implies(a.substitute_vars(map), b.substitute_vars(map)),
            F::Exists(v, g, body) | F::Forall(v, g, body) => {
                let bound = *v;
                let inner = move |u: Var| if u == bound { u } else { map(u) };
                let g = g.as_ref().map(|g| Guard { rel: g.rel.clone(), left: inner(g.left), right: inner(g.right) });
                let body = Box::new(body.substitute_vars(&inner));
                if matches!(self, F::Exists(..)) {
                    F::Exists(bound, g, body)
                } else {
                    F::Forall(bound, g, body)
                }
            }
        }
    }

    fn write(&self, out: &mut fmt::Formatter<'_>, prec: u8, open_right: bool) -> fmt::Result {
        const IMP: u8 = 1;
        const OR: u8 = 2;
        const AND: u8 = 3;
        const UN: u8 = 4;
        let binary = |out: &mut fmt::Formatter<'_>, a: &F, b: &F, op: &str, level: u8| {
            let paren = prec > level;
            if paren {
                out.write_str("(")?;
            }
            a.write(out, level + 1, false)?;
            write!(out, " {op} ")?;
            b.write(out, level, paren || open_right)?;
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        };
        match self {
            F::BinAtom(r, a, b) => write!(out, "{r}({a},{b})"),
            F::UnAtom(p, a) => write!(out, "{p}({a})"),
            F::Eq(a, b) => write!(out, "{a} = {b}"),
            F::Not(f) => {
                out.write_str("~")?;
                f.write(out, UN, open_right)
            }
            F::And(a, b) => binary(out, a, b, "&", AND),
            F::Or(a, b) => binary(out, a, b, "|", OR),
            F::Implies(a, b) => binary(out, a, b, "->", IMP),
            F::Exists(v, g, body) | F::Forall(v, g, body) => {
                let q = if matches!(self, F::Exists(..)) { "E" } else { "A" };
                if !open_right {
                    out.write_str("(")?;
                }
                write!(out, "{q} {v}")?;
                if let Some(g) = g {
                    write!(out, " : {}({},{})", g.rel, g.left, g.right)?;
                }
                out.write_str(" . ")?;
                body.write(out, 0, true)?;
                if !open_right {
                    out.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(out, 0, true)
    }
}

impl Formula for FoFormula {
    fn vocabulary(&self) -> Vocabulary {
        fn go(f: &FoFormula, v: &mut Vocabulary) {
            match f {
                F::BinAtom(r, ..) => {
                    v.binary.insert(r.clone());
                }
                F::UnAtom(p, _) => {
                    v.unary.insert(p.clone());
                }
                F::Eq(..) => {}
                F::Not(f) => go(f, v),
                F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                    go(a, v);
                    go(b, v);
                }
                F::Exists(_, g, body) | F::Forall(_, g, body) => {
                    if let Some(g) = g {
                        v.binary.insert(g.rel.clone());
                    }
                    go(body, v);
                }
            }
        }
        let mut v = Vocabulary::default();
        go(self, &mut v);
        v
    }

    fn rename_unchecked(&self, r: &Renaming) -> Self {
        let guard = |g: &Option<Guard>| {
            g.as_ref().map(|g| Guard { rel: r.binary_name(&g.rel).to_string(), left: g.left, right: g.right })
        };
        match self {
            F::BinAtom(rel, a, b) => F::BinAtom(r.binary_name(rel).to_string(), *a, *b),
            F::UnAtom(p, a) => F::UnAtom(r.unary_name(p).to_string(), *a),
            F::Eq(..) => self.clone(),
            F::Not(f) => F::not(f.rename_unchecked(r)),
            F::And(a, b) => F::and(a.rename_unchecked(r), b.rename_unchecked(r)),
            F::Or(a, b) => F::or(a.rename_unchecked(r), b.rename_unchecked(r)),
            F::Implies(a, b) => F::implies(a.rename_unchecked(r), b.rename_unchecked(r)),
            F::Exists(v, g, body) => F::Exists(*v, guard(g), Box::new(body.rename_unchecked(r))),
            F::Forall(v, g, body) => F::Forall(*v, guard(g), Box::new(body.rename_unchecked(r))),
        }
    }
}

/// Parses the first-order surface syntax. Quantifier bodies extend as far
/// to the right as possible.
pub fn parse_fo(text: &str) -> Result<FoFormula, SyntaxError> {
    let mut c = Cursor::new(text)?;
    let f = implication(&mut c)?;
    c.finish()?;
    Ok(f)
}

fn implication(c: &mut Cursor) -> Result<FoFormula, SyntaxError> {
    let lhs = disjunction(c)?;
    if c.eat(&Tok::Arrow) {
        return Ok(F::implies(lhs, implication(c)?));
    }
    Ok(lhs)
}

fn disjunction(c: &mut Cursor) -> Result<FoFormula, SyntaxError> {
    let lhs = conjunction(c)?;
    if c.eat(&Tok::Bar) {
        return Ok(F::or(lhs, disjunction(c)?));
    }
    Ok(lhs)
}

fn conjunction(c: &mut Cursor) -> Result<FoFormula, SyntaxError> {
    let lhs = prefixed(c)?;
    if c.eat(&Tok::Amp) {
        return Ok(F::and(lhs, conjunction(c)?));
    }
    Ok(lhs)
}

fn var(c: &mut Cursor) -> Result<Var, SyntaxError> {
    if let Some(Tok::Ident(name)) = c.peek() {
        if let Some(v) = Var::from_name(name) {
            c.bump();
            return Ok(v);
        }
    }
    Err(c.unexpected("a variable (x, y or z)"))
}

fn prefixed(c: &mut Cursor) -> Result<FoFormula, SyntaxError> {
    if c.eat(&Tok::Tilde) {
        return Ok(F::not(prefixed(c)?));
    }
    let quantifier = match (c.peek(), c.peek_at(1)) {
        (Some(Tok::Ident(q)), Some(Tok::Ident(v))) if (q == "E" || q == "A") && Var::from_name(v).is_some() => {
            Some(q == "E")
        }
        _ => None,
    };
    let Some(existential) = quantifier else { return atom(c) };
    c.bump();
    let bound = var(c)?;
    let guard = if c.eat(&Tok::Colon) {
        let at = c.offset();
        match atom(c)? {
            F::BinAtom(rel, a, b) => {
                let g = Guard { rel, left: a, right: b };
                if !g.mentions(bound) {
                    return Err(SyntaxError::new(at, format!("guard must mention the quantified variable {bound}")));
                }
                Some(g)
            }
            _ => return Err(SyntaxError::new(at, "guards must be binary atoms")),
        }
    } else {
        None
    };
    c.expect(&Tok::Dot)?;
    let body = Box::new(implication(c)?);
    Ok(if existential { F::Exists(bound, guard, body) } else { F::Forall(bound, guard, body) })
}

fn atom(c: &mut Cursor) -> Result<FoFormula, SyntaxError> {
    match (c.peek().cloned(), c.peek_at(1).cloned()) {
        (Some(Tok::Ident(name)), Some(Tok::LParen)) => {
            c.bump();
            c.bump();
            let a = var(c)?;
            if c.eat(&Tok::Comma) {
                let b = var(c)?;
                c.expect(&Tok::RParen)?;
                Ok(F::BinAtom(name, a, b))
            } else {
                c.expect(&Tok::RParen)?;
                Ok(F::UnAtom(name, a))
            }
        }
        (Some(Tok::Ident(_)), Some(Tok::Equals)) => {
            let a = var(c)?;
            c.bump();
            let b = var(c)?;
            Ok(F::Eq(a, b))
        }
        (Some(Tok::LParen), _) => {
            c.bump();
            let f = implication(c)?;
            c.expect(&Tok::RParen)?;
            Ok(f)
        }
        _ => Err(c.unexpected("a formula")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Var::*;

    fn p(s: &str) -> FoFormula {
        parse_fo(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            p("E y : R(x,y) . P(y)"),
            F::exists(Y, Some(Guard::new("R", X, Y)), F::un("P", Y))
        );
        assert_eq!(p("x = y"), F::Eq(X, Y));
        assert_eq!(p("A z . ~Q(z)"), F::forall(Z, None, F::not(F::un("Q", Z))));
        assert_eq!(p("E(x)"), F::un("E", X));
        assert_eq!(p("x(y)"), F::un("x", Y));
    }

    #[test]
    fn quantifier_scope_extends_right() {
        assert_eq!(p("E y . P(y) & Q(x)"), F::exists(Y, None, F::and(F::un("P", Y), F::un("Q", X))));
        assert_eq!(p("Q(x) & E y . P(y) | P(x)"), F::and(F::un("Q", X), F::exists(Y, None, F::or(F::un("P", Y), F::un("P", X)))));
    }

    #[test]
    fn printing_reparses() {
        let cases = [
            "(E y . P(y)) & Q(x)",
            "~(E y : R(x,y) . P(y)) | x = y",
            "A x : S(y,x) . E y : R(x,y) . P(y) -> Q(x)",
            "(P(x) -> Q(x)) -> R(x,x)",
            "~~E z . z = z",
        ];
        for s in cases {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s} printed as {f}");
        }
        assert_eq!(p("(E y . P(y)) & Q(x)").to_string(), "(E y . P(y)) & Q(x)");
    }

    #[test]
    fn guard_checks() {
        assert!(parse_fo("E y : R(x,z) . P(y)").is_err());
        assert!(parse_fo("E y : P(y) . P(y)").is_err());
        assert!(parse_fo("E w . P(w)").is_err());
    }

    #[test]
    fn gf_bin_membership() {
        assert!(p("E y : R(x,y) . P(y)").is_gf_bin());
        assert!(p("E y : R(y,x) . P(y) & x = y").is_gf_bin());
        assert!(!p("E y . y = y & P(y)").is_gf_bin());
        assert!(!p("E y : R(y,y) . P(y)").is_gf_bin());
        assert!(p("E x : R(x,y) . E y : R(x,y) . R(x,y)").is_gf_bin());
        assert!(!p("E x . E y : R(x,y) . R(x,y)").is_gf_bin());
        assert!(!p("E y : R(x,y) . P(z)").is_gf_bin());
        assert!(p("P(x) & Q(z)").is_gf_bin());
    }

    #[test]
    fn depth_table() {
        assert_eq!(p("P(x)").depth(), 0);
        assert_eq!(p("~P(x) | R(x,y)").depth(), 0);
        assert_eq!(p("E y : R(x,y) . E x : R(y,x) . P(x)").depth(), 2);
        assert_eq!(p("(E y : R(x,y) . P(y)) | P(x)").depth(), 1);
    }

    #[test]
    fn free_variables() {
        assert_eq!(p("E y : R(x,y) . P(y)").free_vars(), BTreeSet::from([X]));
        assert_eq!(p("E y . R(x,z)").free_vars(), BTreeSet::from([X, Z]));
    }
}
