use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Cursor, Tok};
use super::{Formula, Renaming, Vocabulary};
use crate::error::SyntaxError;

/// Formulas of basic modal logic, graded modal logic, ML• and the bimodal
/// quasi-syntax. `Diamond` and `DiamondGeq(1, _)` are semantically equal but
/// kept apart in the tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModalFormula {
    Prop(String),
    Top,
    Bot,
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Implies(Box<ModalFormula>, Box<ModalFormula>),
    Diamond(Box<ModalFormula>),
    Box(Box<ModalFormula>),
    /// At least `k` successors satisfy the body.
    DiamondGeq(u32, Box<ModalFormula>),
    /// Dual of `DiamondGeq`: fewer than `k` successors falsify the body.
    BoxDualGeq(u32, Box<ModalFormula>),
    /// Infinitely many reflexive successors satisfy the body.
    Bullet(Box<ModalFormula>),
    BulletDual(Box<ModalFormula>),
    /// Diamond over the second accessibility relation of a quasi-model.
    DiamondB(Box<ModalFormula>),
    BoxB(Box<ModalFormula>),
}

/// Sublanguages of the modal family, ordered by the operators they admit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModalFragment {
    /// Basic modal logic.
    Basic,
    /// Graded modal logic.
    Graded,
    /// Basic modal logic with `•` and its dual.
    Bullet,
    /// Everything, including the second-relation modalities.
    Quasi,
}

/// Surface-syntax variants for printing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrintStyle {
    #[default]
    Canonical,
    /// Prints `<>` and `[]` as `<1>` and `[1]`.
    Gml,
}

use ModalFormula as M;

impl ModalFormula {
    pub fn prop(name: &str) -> Self {
        M::Prop(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        M::Not(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        M::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        M::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        M::Implies(Box::new(a), Box::new(b))
    }

    pub fn diamond(f: Self) -> Self {
        M::Diamond(Box::new(f))
    }

    pub fn boxed(f: Self) -> Self {
        M::Box(Box::new(f))
    }

    pub fn diamond_geq(k: u32, f: Self) -> Self {
        M::DiamondGeq(k, Box::new(f))
    }

    pub fn bullet(f: Self) -> Self {
        M::Bullet(Box::new(f))
    }

    /// Right-nested conjunction; `Top` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Self>) -> Self {
        let mut items: Vec<Self> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else { return M::Top };
        while let Some(f) = items.pop() {
            acc = M::and(f, acc);
        }
        acc
    }

    /// `□^k f`.
    pub fn box_power(k: usize, f: Self) -> Self {
        (0..k).fold(f, |acc, _| M::boxed(acc))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&ModalFormula> {
        match self {
            M::Prop(_) | M::Top | M::Bot => vec![],
            M::Not(f)
            | M::Diamond(f)
            | M::Box(f)
            | M::DiamondGeq(_, f)
            | M::BoxDualGeq(_, f)
            | M::Bullet(f)
            | M::BulletDual(f)
            | M::DiamondB(f)
            | M::BoxB(f) => vec![f],
            M::And(a, b) | M::Or(a, b) | M::Implies(a, b) => vec![a, b],
        }
    }

    /// Rebuilds this node with its children transformed by `g`.
    pub fn map_children(&self, mut g: impl FnMut(&ModalFormula) -> ModalFormula) -> ModalFormula {
        let mut b = |f: &ModalFormula| Box::new(g(f));
        match self {
            M::Prop(_) | M::Top | M::Bot => self.clone(),
            M::Not(f) => M::Not(b(f)),
            M::And(x, y) => {
                let x = b(x);
                M::And(x, b(y))
            }
            M::Or(x, y) => {
                let x = b(x);
                M::Or(x, b(y))
            }
            M::Implies(x, y) => {
                let x = b(x);
                M::Implies(x, b(y))
            }
            M::Diamond(f) => M::Diamond(b(f)),
            M::Box(f) => M::Box(b(f)),
            M::DiamondGeq(k, f) => M::DiamondGeq(*k, b(f)),
            M::BoxDualGeq(k, f) => M::BoxDualGeq(*k, b(f)),
            M::Bullet(f) => M::Bullet(b(f)),
            M::BulletDual(f) => M::BulletDual(b(f)),
            M::DiamondB(f) => M::DiamondB(b(f)),
            M::BoxB(f) => M::BoxB(b(f)),
        }
    }

    pub fn is_modal_operator(&self) -> bool {
        !matches!(self, M::Prop(_) | M::Top | M::Bot | M::Not(_) | M::And(..) | M::Or(..) | M::Implies(..))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(ModalFormula::size).sum::<usize>()
    }

    /// Maximal nesting of modal operators.
    pub fn depth(&self) -> usize {
        let inner = self.children().into_iter().map(ModalFormula::depth).max().unwrap_or(0);
        inner + usize::from(self.is_modal_operator())
    }

    /// Largest grade occurring in the formula (0 when ungraded).
    pub fn max_grade(&self) -> u32 {
        let own = match self {
            M::DiamondGeq(k, _) | M::BoxDualGeq(k, _) => *k,
            _ => 0,
        };
        self.children().into_iter().map(ModalFormula::max_grade).fold(own, u32::max)
    }

    pub fn in_fragment(&self, frag: ModalFragment) -> bool {
        let ok = match self {
            M::DiamondGeq(..) | M::BoxDualGeq(..) => matches!(frag, ModalFragment::Graded | ModalFragment::Quasi),
            M::Bullet(_) | M::BulletDual(_) => matches!(frag, ModalFragment::Bullet | ModalFragment::Quasi),
            M::DiamondB(_) | M::BoxB(_) => frag == ModalFragment::Quasi,
            _ => true,
        };
        ok && self.children().into_iter().all(|c| c.in_fragment(frag))
    }

    pub fn uses_second_relation(&self) -> bool {
        matches!(self, M::DiamondB(_) | M::BoxB(_)) || self.children().into_iter().any(ModalFormula::uses_second_relation)
    }

    pub fn uses_bullet(&self) -> bool {
        matches!(self, M::Bullet(_) | M::BulletDual(_)) || self.children().into_iter().any(ModalFormula::uses_bullet)
    }

    /// All subtrees, including the formula itself, deduplicated structurally.
    pub fn subformulas(&self) -> BTreeSet<ModalFormula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<ModalFormula>) {
        if out.insert(self.clone()) {
            for c in self.children() {
                c.collect_subformulas(out);
            }
        }
    }

    /// Replaces every occurrence of `Prop(p)` by `g`.
    pub fn substitute(&self, p: &str, g: &ModalFormula) -> ModalFormula {
        match self {
            M::Prop(q) if q == p => g.clone(),
            _ => self.map_children(|c| c.substitute(p, g)),
        }
    }

    /// Relativisation by `p`: the conjunction of `p` with the formula whose
    /// modalities only look at `p`-successors.
    pub fn relativize(&self, p: &str) -> ModalFormula {
        M::and(M::prop(p), self.relativize_body(p))
    }

    fn relativize_body(&self, p: &str) -> ModalFormula {
        let guard = |f: &ModalFormula| Box::new(M::and(M::prop(p), f.relativize_body(p)));
        let cond = |f: &ModalFormula| Box::new(M::implies(M::prop(p), f.relativize_body(p)));
        match self {
            M::Diamond(f) => M::Diamond(guard(f)),
            M::DiamondGeq(k, f) => M::DiamondGeq(*k, guard(f)),
            M::Bullet(f) => M::Bullet(guard(f)),
            M::DiamondB(f) => M::DiamondB(guard(f)),
            M::Box(f) => M::Box(cond(f)),
            M::BoxDualGeq(k, f) => M::BoxDualGeq(*k, cond(f)),
            M::BulletDual(f) => M::BulletDual(cond(f)),
            M::BoxB(f) => M::BoxB(cond(f)),
            _ => self.map_children(|c| c.relativize_body(p)),
        }
    }

    /// Rewrites into the primitive connectives `¬ ∧ ◇ ◇_k • ◇_b`, keeping
    /// `Top`, `Bot` and propositions.
    pub fn desugar(&self) -> ModalFormula {
        let neg = |f: &ModalFormula| M::not(f.desugar());
        match self {
            M::Or(a, b) => M::not(M::and(neg(a), neg(b))),
            M::Implies(a, b) => M::not(M::and(a.desugar(), neg(b))),
            M::Box(f) => M::not(M::diamond(neg(f))),
            M::BoxDualGeq(k, f) => M::not(M::diamond_geq(*k, neg(f))),
            M::BulletDual(f) => M::not(M::bullet(neg(f))),
            M::BoxB(f) => M::not(M::DiamondB(Box::new(neg(f)))),
            _ => self.map_children(ModalFormula::desugar),
        }
    }

    pub fn display(&self, style: PrintStyle) -> impl fmt::Display + '_ {
        Styled { f: self, style }
    }

    fn write(&self, out: &mut fmt::Formatter<'_>, prec: u8, style: PrintStyle) -> fmt::Result {
        const IMP: u8 = 1;
        const OR: u8 = 2;
        const AND: u8 = 3;
        const UN: u8 = 4;
        let binary = |out: &mut fmt::Formatter<'_>, a: &M, b: &M, op: &str, level: u8| {
            if prec > level {
                out.write_str("(")?;
            }
            a.write(out, level + 1, style)?;
            write!(out, " {op} ")?;
            b.write(out, level, style)?;
            if prec > level {
                out.write_str(")")?;
            }
            Ok(())
        };
        let unary = |out: &mut fmt::Formatter<'_>, op: &str, f: &M| {
            out.write_str(op)?;
            f.write(out, UN, style)
        };
        match self {
            M::Prop(p) => out.write_str(p),
            M::Top => out.write_str("true"),
            M::Bot => out.write_str("false"),
            M::Not(f) => unary(out, "~", f),
            M::And(a, b) => binary(out, a, b, "&", AND),
            M::Or(a, b) => binary(out, a, b, "|", OR),
            M::Implies(a, b) => binary(out, a, b, "->", IMP),
            M::Diamond(f) if style == PrintStyle::Gml => unary(out, "<1>", f),
            M::Box(f) if style == PrintStyle::Gml => unary(out, "[1]", f),
            M::Diamond(f) => unary(out, "<>", f),
            M::Box(f) => unary(out, "[]", f),
            M::DiamondGeq(k, f) => unary(out, &format!("<{k}>"), f),
            M::BoxDualGeq(k, f) => unary(out, &format!("[{k}]"), f),
            M::Bullet(f) => unary(out, "*", f),
            M::BulletDual(f) => unary(out, "#", f),
            M::DiamondB(f) => unary(out, "<.>", f),
            M::BoxB(f) => unary(out, "[.]", f),
        }
    }
}

struct Styled<'a> {
    f: &'a ModalFormula,
    style: PrintStyle,
}

impl fmt::Display for Styled<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.f.write(out, 0, self.style)
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(out, 0, PrintStyle::Canonical)
    }
}

impl Formula for ModalFormula {
    fn vocabulary(&self) -> Vocabulary {
        let mut v = Vocabulary::default();
        collect_props(self, &mut v.unary);
        v
    }

    fn rename_unchecked(&self, r: &Renaming) -> Self {
        match self {
            M::Prop(p) => M::Prop(r.unary_name(p).to_string()),
            _ => self.map_children(|c| c.rename_unchecked(r)),
        }
    }
}

fn collect_props(f: &ModalFormula, out: &mut BTreeSet<String>) {
    match f {
        M::Prop(p) => {
            out.insert(p.clone());
        }
        _ => f.children().into_iter().for_each(|c| collect_props(c, out)),
    }
}

/// Parses the modal surface syntax.
pub fn parse_modal(text: &str) -> Result<ModalFormula, SyntaxError> {
    let mut c = Cursor::new(text)?;
    let f = implication(&mut c)?;
    c.finish()?;
    Ok(f)
}

fn implication(c: &mut Cursor) -> Result<ModalFormula, SyntaxError> {
    let lhs = disjunction(c)?;
    if c.eat(&Tok::Arrow) {
        return Ok(M::implies(lhs, implication(c)?));
    }
    Ok(lhs)
}

fn disjunction(c: &mut Cursor) -> Result<ModalFormula, SyntaxError> {
    let lhs = conjunction(c)?;
    if c.eat(&Tok::Bar) {
        return Ok(M::or(lhs, disjunction(c)?));
    }
    Ok(lhs)
}

fn conjunction(c: &mut Cursor) -> Result<ModalFormula, SyntaxError> {
    let lhs = prefixed(c)?;
    if c.eat(&Tok::Amp) {
        return Ok(M::and(lhs, conjunction(c)?));
    }
    Ok(lhs)
}

fn prefixed(c: &mut Cursor) -> Result<ModalFormula, SyntaxError> {
    let wrap: fn(Box<M>) -> M = match c.peek() {
        Some(Tok::Tilde) => M::Not,
        Some(Tok::Diamond) => M::Diamond,
        Some(Tok::BoxOp) => M::Box,
        Some(Tok::Star) => M::Bullet,
        Some(Tok::Hash) => M::BulletDual,
        Some(Tok::DotDiamond) => M::DiamondB,
        Some(Tok::DotBox) => M::BoxB,
        Some(Tok::LAngle) | Some(Tok::LBracket) => {
            let diamond = c.bump() == Some(Tok::LAngle);
            let Some(&Tok::Nat(k)) = c.peek() else {
                return Err(c.unexpected("a grade"));
            };
            c.bump();
            c.expect(if diamond { &Tok::RAngle } else { &Tok::RBracket })?;
            let body = Box::new(prefixed(c)?);
            return Ok(if diamond { M::DiamondGeq(k, body) } else { M::BoxDualGeq(k, body) });
        }
        _ => return atom(c),
    };
    c.bump();
    Ok(wrap(Box::new(prefixed(c)?)))
}

fn atom(c: &mut Cursor) -> Result<ModalFormula, SyntaxError> {
    match c.peek().cloned() {
        Some(Tok::Ident(name)) => {
            c.bump();
            Ok(match name.as_str() {
                "true" => M::Top,
                "false" => M::Bot,
                _ => M::Prop(name),
            })
        }
        Some(Tok::LParen) => {
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

    fn p(s: &str) -> ModalFormula {
        parse_modal(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("<> p"), M::diamond(M::prop("p")));
        assert_eq!(p("<2>p"), M::diamond_geq(2, M::prop("p")));
        assert_eq!(p("[3] p"), M::BoxDualGeq(3, Box::new(M::prop("p"))));
        assert_eq!(p("<.>p & [.]q"), M::and(M::DiamondB(Box::new(M::prop("p"))), M::BoxB(Box::new(M::prop("q")))));
        assert_eq!(p("*p | #q"), M::or(M::bullet(M::prop("p")), M::BulletDual(Box::new(M::prop("q")))));
        assert_eq!(p("true -> false"), M::implies(M::Top, M::Bot));
        assert_ne!(p("<1>p"), p("<>p"));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("a & b | c -> d"), p("((a & b) | c) -> d"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a & b & c"), p("a & (b & c)"));
        assert_eq!(p("~<>a & b"), p("(~(<>a)) & b"));
    }

    #[test]
    fn printing_is_minimal_and_reparses() {
        for s in ["(a & b) & c", "a & b & c", "~(a | b)", "<>(a -> b) | [2]~c", "<.>[.]*#p", "(a -> b) -> c"] {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s}");
        }
        assert_eq!(p("(a & b) & c").to_string(), "(a & b) & c");
        assert_eq!(p("a & (b & c)").to_string(), "a & b & c");
        assert_eq!(p("<>p").display(PrintStyle::Gml).to_string(), "<1>p");
    }

    #[test]
    fn syntax_errors_report_position() {
        let e = parse_modal("p & ").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_modal("<x>p").unwrap_err();
        assert_eq!(e.pos, 1);
        assert!(parse_modal("p q").is_err());
        assert!(parse_modal("p $ q").is_err());
    }

    #[test]
    fn substitution_examples() {
        let g = p("q & r");
        assert_eq!(p("<>p").substitute("p", &g), p("<>(q & r)"));
        assert_eq!(p("<>s").substitute("p", &g), p("<>s"));
        assert_eq!(p("p & <>p").substitute("p", &p("~p")), p("~p & <>~p"));
    }

    #[test]
    fn relativization_examples() {
        assert_eq!(p("<>q").relativize("p"), p("p & <>(p & q)"));
        assert_eq!(p("q").relativize("p"), p("p & q"));
        assert_eq!(p("<2>q").relativize("p"), p("p & <2>(p & q)"));
        assert_eq!(p("[]q").relativize("p"), p("p & [](p -> q)"));
    }

    #[test]
    fn depth_and_subformulas() {
        assert_eq!(p("p & q").depth(), 0);
        assert_eq!(p("<>*p").depth(), 2);
        assert_eq!(p("<3>[]p | p").depth(), 2);
        let sub = |s: &str| p(s).subformulas().into_iter().collect::<Vec<_>>();
        assert_eq!(sub("<>p").len(), 2);
        assert_eq!(sub("p & p"), {
            let mut v = vec![p("p & p"), p("p")];
            v.sort();
            v
        });
        let mut want = vec![p("*(p | q)"), p("p | q"), p("p"), p("q")];
        want.sort();
        assert_eq!(sub("*(p | q)"), want);
    }

    #[test]
    fn fragments() {
        assert!(p("<>p & []q").in_fragment(ModalFragment::Basic));
        assert!(!p("<2>p").in_fragment(ModalFragment::Basic));
        assert!(p("<2>p").in_fragment(ModalFragment::Graded));
        assert!(p("*p").in_fragment(ModalFragment::Bullet));
        assert!(!p("<.>p").in_fragment(ModalFragment::Bullet));
        assert!(p("<.>p").in_fragment(ModalFragment::Quasi));
    }
}
