//! Evaluators for the modal family, relation algebra terms and first-order
//! formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::structures::{is_frame_k, Pair, PointedStructure, Structure, ACCESS, BULLET_ACCESS};
use crate::syntax::{FoFormula, Guard, ModalFormula, RaTerm, Var};

/// How `•` and the second relation are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemanticsMode {
    /// `•ψ` holds where infinitely many reflexive successors satisfy `ψ`;
    /// on a finite structure that is nowhere.
    Intended,
    /// `•` is the diamond of the relation `Rb`; the structure must be a
    /// frame of class K.
    Quasi,
}

impl fmt::Display for SemanticsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticsMode::Intended => "intended",
            SemanticsMode::Quasi => "quasi",
        })
    }
}

/// Result of [`eval_modal_detailed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalEvaluation {
    pub value: bool,
    /// Set when the formula contains `•` and was evaluated in intended mode:
    /// every bullet subformula was decided as false because the structure is
    /// finite.
    pub vacuous_on_finite: bool,
    /// Truth value at the point of every subformula, keyed by its printed
    /// form. Only filled when requested.
    pub trace: Option<BTreeMap<String, bool>>,
}

fn check_formula(f: &ModalFormula, mode: SemanticsMode) -> Result<()> {
    if mode == SemanticsMode::Intended && f.uses_second_relation() {
        return Err(Error::precondition("the Rb modalities <.> and [.] only exist in quasi mode"));
    }
    Ok(())
}

fn check_structure(m: &Structure, mode: SemanticsMode) -> Result<()> {
    if mode == SemanticsMode::Quasi && !is_frame_k(m) {
        return Err(Error::precondition("quasi mode needs a K-frame: Rb must be inside R and every Rb-target R-reflexive"));
    }
    Ok(())
}

fn check_mode(m: &Structure, f: &ModalFormula, mode: SemanticsMode) -> Result<()> {
    check_formula(f, mode)?;
    check_structure(m, mode)
}

/// A modal formula validated once for a mode, for evaluation on many
/// structures.
#[derive(Debug, Clone)]
pub struct ModalChecker<'f> {
    formula: &'f ModalFormula,
    mode: SemanticsMode,
}

impl<'f> ModalChecker<'f> {
    pub fn new(formula: &'f ModalFormula, mode: SemanticsMode) -> Result<Self> {
        check_formula(formula, mode)?;
        Ok(ModalChecker { formula, mode })
    }

    /// Truth of the formula at the point of `m`.
    pub fn eval(&self, m: &PointedStructure) -> Result<bool> {
        let w = m.require_single_point("modal evaluation")?;
        check_structure(&m.structure, self.mode)?;
        Ok(ModalCtx::new(&m.structure, self.mode).holds(w, self.formula))
    }
}

/// Truth of `f` at the point of `m`.
pub fn eval_modal(m: &PointedStructure, f: &ModalFormula, mode: SemanticsMode) -> Result<bool> {
    ModalChecker::new(f, mode)?.eval(m)
}

/// Like [`eval_modal`], also reporting the vacuous-bullet flag and, when
/// `explain` is set, the truth value of every subformula at the point.
pub fn eval_modal_detailed(
    m: &PointedStructure,
    f: &ModalFormula,
    mode: SemanticsMode,
    explain: bool,
) -> Result<ModalEvaluation> {
    let w = m.require_single_point("modal evaluation")?;
    check_mode(&m.structure, f, mode)?;
    let ctx = ModalCtx::new(&m.structure, mode);
    let trace = explain.then(|| f.subformulas().iter().map(|g| (g.to_string(), ctx.holds(w, g))).collect());
    Ok(ModalEvaluation {
        value: ctx.holds(w, f),
        vacuous_on_finite: mode == SemanticsMode::Intended && f.uses_bullet(),
        trace,
    })
}

/// The set of nodes where `f` holds, as a membership vector over the domain.
pub fn modal_extension(m: &Structure, f: &ModalFormula, mode: SemanticsMode) -> Result<Vec<bool>> {
    check_mode(m, f, mode)?;
    Ok(ModalCtx::new(m, mode).extension(f))
}

struct ModalCtx<'a> {
    m: &'a Structure,
    r: Option<&'a [Vec<usize>]>,
    rb: Option<&'a [Vec<usize>]>,
    mode: SemanticsMode,
}

impl<'a> ModalCtx<'a> {
    fn new(m: &'a Structure, mode: SemanticsMode) -> Self {
        ModalCtx { m, r: m.successor_lists(ACCESS), rb: m.successor_lists(BULLET_ACCESS), mode }
    }

    fn succ(lists: Option<&'a [Vec<usize>]>, w: usize) -> &'a [usize] {
        lists.map_or(&[][..], |l| l[w].as_slice())
    }

    fn holds(&self, w: usize, f: &ModalFormula) -> bool {
        use ModalFormula as M;
        let count_at_least = |lists, k: u32, g: &ModalFormula, want: bool| {
            if k == 0 {
                return true;
            }
            let mut seen = 0;
            for &v in Self::succ(lists, w) {
                if self.holds(v, g) == want {
                    seen += 1;
                    if seen >= k {
                        return true;
                    }
                }
            }
            false
        };
        match f {
            M::Prop(p) => self.m.holds(p, w),
            M::Top => true,
            M::Bot => false,
            M::Not(g) => !self.holds(w, g),
            M::And(a, b) => self.holds(w, a) && self.holds(w, b),
            M::Or(a, b) => self.holds(w, a) || self.holds(w, b),
            M::Implies(a, b) => !self.holds(w, a) || self.holds(w, b),
            M::Diamond(g) => Self::succ(self.r, w).iter().any(|&v| self.holds(v, g)),
            M::Box(g) => Self::succ(self.r, w).iter().all(|&v| self.holds(v, g)),
            M::DiamondGeq(k, g) => count_at_least(self.r, *k, g, true),
            M::BoxDualGeq(k, g) => !count_at_least(self.r, *k, g, false),
            M::Bullet(g) | M::DiamondB(g) => match self.mode {
                SemanticsMode::Intended => false,
                SemanticsMode::Quasi => Self::succ(self.rb, w).iter().any(|&v| self.holds(v, g)),
            },
            M::BulletDual(g) | M::BoxB(g) => match self.mode {
                SemanticsMode::Intended => true,
                SemanticsMode::Quasi => Self::succ(self.rb, w).iter().all(|&v| self.holds(v, g)),
            },
        }
    }

    fn extension(&self, f: &ModalFormula) -> Vec<bool> {
        use ModalFormula as M;
        let n = self.m.len();
        let count = |lists: Option<&'a [Vec<usize>]>, inner: &[bool], v: usize| {
            Self::succ(lists, v).iter().filter(|&&u| inner[u]).count()
        };
        let map = |inner: Vec<bool>, g: &dyn Fn(&[bool], usize) -> bool| (0..n).map(|v| g(&inner, v)).collect();
        match f {
            M::Prop(p) => (0..n).map(|v| self.m.holds(p, v)).collect(),
            M::Top => vec![true; n],
            M::Bot => vec![false; n],
            M::Not(g) => self.extension(g).into_iter().map(|b| !b).collect(),
            M::And(a, b) => self.extension(a).into_iter().zip(self.extension(b)).map(|(x, y)| x && y).collect(),
            M::Or(a, b) => self.extension(a).into_iter().zip(self.extension(b)).map(|(x, y)| x || y).collect(),
            M::Implies(a, b) => self.extension(a).into_iter().zip(self.extension(b)).map(|(x, y)| !x || y).collect(),
            M::Diamond(g) => map(self.extension(g), &|e, v| count(self.r, e, v) >= 1),
            M::Box(g) => map(self.extension(g), &|e, v| Self::succ(self.r, v).iter().all(|&u| e[u])),
            M::DiamondGeq(k, g) => map(self.extension(g), &|e, v| count(self.r, e, v) >= *k as usize),
            M::BoxDualGeq(k, g) => {
                map(self.extension(g), &|e, v| Self::succ(self.r, v).iter().filter(|&&u| !e[u]).count() < *k as usize)
            }
            M::Bullet(g) | M::DiamondB(g) => match self.mode {
                SemanticsMode::Intended => vec![false; n],
                SemanticsMode::Quasi => map(self.extension(g), &|e, v| count(self.rb, e, v) >= 1),
            },
            M::BulletDual(g) | M::BoxB(g) => match self.mode {
                SemanticsMode::Intended => vec![true; n],
                SemanticsMode::Quasi => map(self.extension(g), &|e, v| Self::succ(self.rb, v).iter().all(|&u| e[u])),
            },
        }
    }
}

/// Denotation of a relation algebra term as a set of index pairs.
pub fn eval_ra(m: &Structure, t: &RaTerm) -> BTreeSet<Pair> {
    let n = m.len();
    let mat = ra_matrix(m, t);
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| mat[a * n + b]).collect()
}

/// Same as [`eval_ra`] with pairs reported by node id.
pub fn eval_ra_ids(m: &Structure, t: &RaTerm) -> Vec<(String, String)> {
    eval_ra(m, t).into_iter().map(|(a, b)| (m.id(a).to_string(), m.id(b).to_string())).collect()
}

/// Whether `t` denotes the total relation.
pub fn ra_equiv_top(m: &Structure, t: &RaTerm) -> bool {
    ra_matrix(m, t).into_iter().all(|b| b)
}

fn ra_matrix(m: &Structure, t: &RaTerm) -> Vec<bool> {
    let n = m.len();
    match t {
        RaTerm::Atom(r) => {
            let mut out = vec![false; n * n];
            if let Some(pairs) = m.binary_map().get(r) {
                for &(a, b) in pairs {
                    out[a * n + b] = true;
                }
            }
            out
        }
        RaTerm::Id => (0..n * n).map(|i| i / n == i % n).collect(),
        RaTerm::Top => vec![true; n * n],
        RaTerm::Meet(a, b) => ra_matrix(m, a).into_iter().zip(ra_matrix(m, b)).map(|(x, y)| x && y).collect(),
        RaTerm::Diff(a, b) => ra_matrix(m, a).into_iter().zip(ra_matrix(m, b)).map(|(x, y)| x && !y).collect(),
        RaTerm::Comp(a, b) => {
            let (x, y) = (ra_matrix(m, a), ra_matrix(m, b));
            let mut out = vec![false; n * n];
            for u in 0..n {
                for v in (0..n).filter(|&v| x[u * n + v]) {
                    for w in 0..n {
                        out[u * n + w] |= y[v * n + w];
                    }
                }
            }
            out
        }
        RaTerm::Conv(a) => {
            let x = ra_matrix(m, a);
            (0..n * n).map(|i| x[(i % n) * n + i / n]).collect()
        }
    }
}

/// A partial assignment of nodes to the variables `x`, `y`, `z`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Assignment([Option<usize>; 3]);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    /// Assigns the points of a tuple to `x`, `y`, `z` in order.
    pub fn from_points(points: &[usize]) -> Self {
        let mut a = Assignment::new();
        for (v, &p) in Var::ALL.iter().zip(points) {
            a = a.with(*v, p);
        }
        a
    }

    pub fn with(mut self, v: Var, node: usize) -> Self {
        self.0[v.index()] = Some(node);
        self
    }

    pub fn get(&self, v: Var) -> Option<usize> {
        self.0[v.index()]
    }

    /// Resolves `(variable, node id)` bindings against `m`.
    pub fn from_ids(m: &Structure, bindings: &[(Var, &str)]) -> Result<Self> {
        bindings.iter().try_fold(Assignment::new(), |a, (v, id)| Ok(a.with(*v, m.node(id)?)))
    }
}

/// Truth of `f` in `m` under `a`.
pub fn eval_fo(m: &Structure, a: &Assignment, f: &FoFormula) -> Result<bool> {
    if let Some(v) = f.free_vars().into_iter().find(|v| a.get(*v).is_none()) {
        return Err(Error::UnboundVariable(v.name()));
    }
    if let Some(bad) = Var::ALL.iter().find_map(|v| a.get(*v).filter(|&d| d >= m.len())) {
        return Err(Error::precondition(format!("assignment refers to node #{bad} outside the domain")));
    }
    Ok(FoCtx::new(m).holds(&a.0, f))
}

struct FoCtx<'a> {
    m: &'a Structure,
    pred: BTreeMap<&'a str, Vec<Vec<usize>>>,
}

impl<'a> FoCtx<'a> {
    fn new(m: &'a Structure) -> Self {
        let pred = m
            .binary_map()
            .iter()
            .map(|(name, pairs)| {
                let mut lists = vec![Vec::new(); m.len()];
                for &(a, b) in pairs {
                    lists[b].push(a);
                }
                (name.as_str(), lists)
            })
            .collect();
        FoCtx { m, pred }
    }

    /// Candidate values for `v` that might satisfy the guard, given the
    /// current assignment.
    fn candidates(&self, a: &[Option<usize>; 3], v: Var, guard: Option<&Guard>) -> Vec<usize> {
        let all = || (0..self.m.len()).collect();
        let Some(g) = guard else { return all() };
        match g.other(v) {
            Some(u) if g.right == v => match a[u.index()] {
                Some(d) => self.m.successors(&g.rel, d).to_vec(),
                None => all(),
            },
            Some(u) => match (a[u.index()], self.pred.get(g.rel.as_str())) {
                (Some(d), Some(lists)) => lists[d].clone(),
                (Some(_), None) => Vec::new(),
                (None, _) => all(),
            },
            None => all(),
        }
    }

    fn holds(&self, a: &[Option<usize>; 3], f: &FoFormula) -> bool {
        use FoFormula as F;
        let val = |v: Var| a[v.index()].expect("free variables are bound");
        match f {
            F::BinAtom(r, x, y) => self.m.related(r, val(*x), val(*y)),
            F::UnAtom(p, x) => self.m.holds(p, val(*x)),
            F::Eq(x, y) => val(*x) == val(*y),
            F::Not(g) => !self.holds(a, g),
            F::And(p, q) => self.holds(a, p) && self.holds(a, q),
            F::Or(p, q) => self.holds(a, p) || self.holds(a, q),
            F::Implies(p, q) => !self.holds(a, p) || self.holds(a, q),
            F::Exists(v, g, body) | F::Forall(v, g, body) => {
                let existential = matches!(f, F::Exists(..));
                for d in self.candidates(a, *v, g.as_ref()) {
                    let mut b = *a;
                    b[v.index()] = Some(d);
                    let guarded = g.as_ref().is_none_or(|g| self.m.related(&g.rel, val_in(&b, g.left), val_in(&b, g.right)));
                    if !guarded {
                        continue;
                    }
                    if self.holds(&b, body) == existential {
                        return existential;
                    }
                }
                !existential
            }
        }
    }
}

fn val_in(a: &[Option<usize>; 3], v: Var) -> usize {
    a[v.index()].expect("guard variables are bound")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_fo, parse_modal, parse_ra};

    fn structure(domain: &[&str], unary: &[(&str, &[&str])], binary: &[(&str, &[(&str, &str)])]) -> Structure {
        Structure::new(
            domain.iter().map(|s| s.to_string()).collect(),
            unary.iter().map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect())).collect(),
            binary
                .iter()
                .map(|(k, v)| (k.to_string(), v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()))
                .collect(),
        )
        .unwrap()
    }

    fn at(m: &Structure, w: &str) -> PointedStructure {
        PointedStructure::at(m.clone(), w).unwrap()
    }

    fn ml(m: &PointedStructure, f: &str, mode: SemanticsMode) -> bool {
        eval_modal(m, &parse_modal(f).unwrap(), mode).unwrap()
    }

    #[test]
    fn modal_examples() {
        let chain = structure(&["a", "b"], &[("p", &["b"])], &[("R", &[("a", "b")])]);
        assert!(ml(&at(&chain, "a"), "<>p", SemanticsMode::Intended));
        let fork = structure(&["a", "b", "c"], &[("p", &["b", "c"])], &[("R", &[("a", "b"), ("a", "c")])]);
        assert!(ml(&at(&fork, "a"), "<2>p", SemanticsMode::Intended));
        assert!(!ml(&at(&fork, "a"), "<3>p", SemanticsMode::Intended));
        assert!(ml(&at(&fork, "b"), "<0>p", SemanticsMode::Intended));
    }

    #[test]
    fn bullet_in_both_modes() {
        let k = structure(&["a", "b"], &[("p", &["b"])], &[("R", &[("a", "b"), ("b", "b")]), ("Rb", &[("a", "b")])]);
        assert!(ml(&at(&k, "a"), "*p", SemanticsMode::Quasi));
        let plain = structure(&["a", "b"], &[("p", &["b"])], &[("R", &[("a", "b"), ("b", "b")])]);
        let f = parse_modal("*p").unwrap();
        let detail = eval_modal_detailed(&at(&plain, "a"), &f, SemanticsMode::Intended, false).unwrap();
        assert!(!detail.value);
        assert!(detail.vacuous_on_finite);
        assert!(ml(&at(&plain, "a"), "#p", SemanticsMode::Intended));
    }

    #[test]
    fn mode_preconditions() {
        let not_k = structure(&["a", "b"], &[], &[("R", &[("a", "b")]), ("Rb", &[("a", "b")])]);
        let f = parse_modal("*p").unwrap();
        assert!(matches!(eval_modal(&at(&not_k, "a"), &f, SemanticsMode::Quasi), Err(Error::Precondition(_))));
        let g = parse_modal("<.>p").unwrap();
        assert!(eval_modal(&at(&not_k, "a"), &g, SemanticsMode::Intended).is_err());
    }

    #[test]
    fn trace_lists_subformulas() {
        let chain = structure(&["a", "b"], &[("p", &["b"])], &[("R", &[("a", "b")])]);
        let f = parse_modal("<>p & ~p").unwrap();
        let d = eval_modal_detailed(&at(&chain, "a"), &f, SemanticsMode::Intended, true).unwrap();
        let trace = d.trace.unwrap();
        assert_eq!(trace.get("p"), Some(&false));
        assert_eq!(trace.get("<>p"), Some(&true));
        assert_eq!(trace.len(), 4);
    }

    #[test]
    fn extension_matches_pointwise() {
        let m = structure(
            &["a", "b", "c"],
            &[("p", &["b"]), ("q", &["a", "c"])],
            &[("R", &[("a", "b"), ("b", "c"), ("c", "c"), ("a", "c")])],
        );
        for s in ["<>p", "[]q", "<2>(p | q)", "[2]q", "~<>[]q -> p", "<0>false"] {
            let f = parse_modal(s).unwrap();
            let ext = modal_extension(&m, &f, SemanticsMode::Intended).unwrap();
            for (w, &value) in ext.iter().enumerate() {
                let pointed = PointedStructure::new(m.clone(), vec![w]).unwrap();
                assert_eq!(value, eval_modal(&pointed, &f, SemanticsMode::Intended).unwrap(), "{s} at {w}");
            }
        }
    }

    #[test]
    fn ra_examples() {
        let m = structure(&["a", "b"], &[], &[]);
        assert_eq!(eval_ra(&m, &RaTerm::Id), BTreeSet::from([(0, 0), (1, 1)]));
        let m = structure(&["a", "b", "c"], &[], &[("R", &[("a", "b")])]);
        assert_eq!(eval_ra(&m, &parse_ra("R;R~").unwrap()), BTreeSet::from([(0, 0)]));
        assert_eq!(eval_ra(&m, &parse_ra("R;top;R~").unwrap()), BTreeSet::from([(0, 0)]));
        assert_eq!(eval_ra_ids(&m, &parse_ra("R~").unwrap()), vec![("b".to_string(), "a".to_string())]);
    }

    #[test]
    fn ra_top_checks() {
        let m = structure(&["a", "b"], &[], &[("R", &[("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")])]);
        assert!(ra_equiv_top(&m, &RaTerm::Top));
        assert!(!ra_equiv_top(&m, &RaTerm::Id));
        assert!(ra_equiv_top(&m, &RaTerm::atom("R")));
        assert!(!ra_equiv_top(&m, &RaTerm::atom("S")));
    }

    #[test]
    fn fo_examples() {
        let m = structure(&["a", "b", "c"], &[("P", &["c"])], &[("R", &[("a", "b"), ("b", "c")])]);
        let a = Assignment::from_ids(&m, &[(Var::X, "a")]).unwrap();
        assert!(eval_fo(&m, &a, &parse_fo("x = x").unwrap()).unwrap());
        assert!(!eval_fo(&m, &a, &parse_fo("E y : R(x,y) . P(y)").unwrap()).unwrap());
        let b = Assignment::from_ids(&m, &[(Var::X, "b")]).unwrap();
        assert!(eval_fo(&m, &b, &parse_fo("E y : R(x,y) . P(y)").unwrap()).unwrap());
        let reuse = parse_fo("E y . R(x,y) & (E x . R(y,x) & P(x))").unwrap();
        assert!(eval_fo(&m, &a, &reuse).unwrap());
        let guarded_reuse = parse_fo("E y : R(x,y) . E x : R(y,x) . P(x)").unwrap();
        assert!(eval_fo(&m, &a, &guarded_reuse).unwrap());
    }

    #[test]
    fn fo_guards_in_both_directions() {
        let m = structure(&["a", "b"], &[("P", &["a"])], &[("R", &[("a", "b")])]);
        let b = Assignment::from_ids(&m, &[(Var::X, "b")]).unwrap();
        assert!(eval_fo(&m, &b, &parse_fo("E y : R(y,x) . P(y)").unwrap()).unwrap());
        assert!(!eval_fo(&m, &b, &parse_fo("E y : R(x,y) . y = y").unwrap()).unwrap());
        assert!(eval_fo(&m, &b, &parse_fo("A y : R(x,y) . P(y)").unwrap()).unwrap());
        assert!(eval_fo(&m, &b, &parse_fo("A y : S(y,x) . ~x = x").unwrap()).unwrap());
    }

    #[test]
    fn fo_unbound_variable() {
        let m = structure(&["a"], &[], &[]);
        let err = eval_fo(&m, &Assignment::new(), &parse_fo("P(y)").unwrap()).unwrap_err();
        assert!(matches!(err, Error::UnboundVariable('y')));
    }
}
