//! Satisfiability: a tableau for basic modal logic, the reduction of ML• to
//! basic modal logic over K-frames, an exhaustive small-model search used as
//! an independent oracle, and validity of the bullet axioms on a frame.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::semantics::{eval_modal, SemanticsMode};
use crate::structures::{Pair, PointedStructure, Structure, ACCESS, BULLET_ACCESS};
use crate::syntax::{Formula, ModalFormula, ModalFragment};

use ModalFormula as M;

/// Largest structure size accepted by [`bounded_model_search`].
pub const MAX_SEARCH_SIZE: usize = 5;

/// Outcome of a satisfiability check. A witness is present exactly when the
/// formula is satisfiable, and it has been model-checked before returning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub satisfiable: bool,
    pub witness: Option<PointedStructure>,
}

impl SatResult {
    fn unsat() -> Self {
        SatResult { satisfiable: false, witness: None }
    }

    fn verified(witness: PointedStructure, f: &ModalFormula, mode: SemanticsMode) -> Result<Self> {
        if !eval_modal(&witness, f, mode)? {
            return Err(Error::Internal(format!("constructed witness does not satisfy {f}")));
        }
        Ok(SatResult { satisfiable: true, witness: Some(witness) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Nnf {
    Lit(String, bool),
    Top,
    Bot,
    /// Flattened, sorted and without duplicates; at least two members.
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Dia(Box<Nnf>),
    Boxed(Box<Nnf>),
}

impl Nnf {
    fn complement(&self) -> Option<Nnf> {
        match self {
            Nnf::Lit(p, b) => Some(Nnf::Lit(p.clone(), !b)),
            Nnf::Top => Some(Nnf::Bot),
            Nnf::Bot => Some(Nnf::Top),
            _ => None,
        }
    }

    /// Builds an n-ary connective, folding constants and nested members of
    /// the same connective.
    fn junction(conj: bool, parts: Vec<Nnf>) -> Nnf {
        let (unit, zero) = if conj { (Nnf::Top, Nnf::Bot) } else { (Nnf::Bot, Nnf::Top) };
        let mut out = BTreeSet::new();
        for p in parts {
            match p {
                Nnf::And(ps) if conj => out.extend(ps),
                Nnf::Or(ps) if !conj => out.extend(ps),
                p if p == unit => {}
                p if p == zero => return zero,
                p => {
                    out.insert(p);
                }
            }
        }
        if out.iter().any(|p| p.complement().is_some_and(|c| out.contains(&c))) {
            return zero;
        }
        let mut items: Vec<Nnf> = out.into_iter().collect();
        match items.len() {
            0 => unit,
            1 => items.pop().expect("one member"),
            _ if conj => Nnf::And(items),
            _ => Nnf::Or(items),
        }
    }
}

fn nnf(f: &ModalFormula, positive: bool) -> Nnf {
    let two = |conj: bool, a: &ModalFormula, pa: bool, b: &ModalFormula, pb: bool| Nnf::junction(conj, vec![nnf(a, pa), nnf(b, pb)]);
    match (f, positive) {
        (M::Prop(p), pos) => Nnf::Lit(p.clone(), pos),
        (M::Top, true) | (M::Bot, false) => Nnf::Top,
        (M::Top, false) | (M::Bot, true) => Nnf::Bot,
        (M::Not(g), pos) => nnf(g, !pos),
        (M::And(x, y), pos) => two(pos, x, pos, y, pos),
        (M::Or(x, y), pos) => two(!pos, x, pos, y, pos),
        (M::Implies(x, y), true) => two(false, x, false, y, true),
        (M::Implies(x, y), false) => two(true, x, true, y, false),
        (M::Diamond(g), true) | (M::Box(g), false) => match nnf(g, positive) {
            Nnf::Bot => Nnf::Bot,
            inner => Nnf::Dia(Box::new(inner)),
        },
        (M::Box(g), true) | (M::Diamond(g), false) => match nnf(g, positive) {
            Nnf::Top => Nnf::Top,
            inner => Nnf::Boxed(Box::new(inner)),
        },
        _ => unreachable!("graded and bullet operators are rejected before the tableau runs"),
    }
}

struct TreeNode {
    props: BTreeSet<String>,
    children: Vec<Rc<TreeNode>>,
}

/// Tableau over sets of NNF formulas with memoisation of whole sets.
///
/// Disjunctions are simplified against the set before branching (a member
/// already present satisfies them, a member whose complement is present is
/// dropped), the second branch records the complement of a literal first
/// branch, and every diamond is checked against the boxes present so far
/// before any branching, since later steps only add boxes.
#[derive(Default)]
struct Tableau {
    memo: HashMap<BTreeSet<Nnf>, Option<Rc<TreeNode>>>,
}

impl Tableau {
    fn sat(&mut self, set: BTreeSet<Nnf>) -> Option<Rc<TreeNode>> {
        if let Some(known) = self.memo.get(&set) {
            return known.clone();
        }
        let result = self.expand(&set);
        self.memo.insert(set, result.clone());
        result
    }

    fn successor(set: &BTreeSet<Nnf>, g: &Nnf) -> BTreeSet<Nnf> {
        let mut next: BTreeSet<Nnf> = set.iter().filter_map(|f| if let Nnf::Boxed(b) = f { Some((**b).clone()) } else { None }).collect();
        next.insert(g.clone());
        next
    }

    fn expand(&mut self, set: &BTreeSet<Nnf>) -> Option<Rc<TreeNode>> {
        if set.contains(&Nnf::Bot) || set.iter().any(|f| matches!(f, Nnf::Lit(..)) && set.contains(&f.complement().expect("literal"))) {
            return None;
        }
        if let Some(f) = set.iter().find(|f| matches!(f, Nnf::And(..) | Nnf::Top)).cloned() {
            let mut rest = set.clone();
            rest.remove(&f);
            if let Nnf::And(parts) = f {
                rest.extend(parts);
            }
            return self.sat(rest);
        }
        // Simplify one disjunction against the set, if possible.
        for f in set {
            let Nnf::Or(parts) = f else { continue };
            if parts.iter().any(|p| set.contains(p)) {
                let mut rest = set.clone();
                rest.remove(f);
                return self.sat(rest);
            }
            let live: Vec<Nnf> =
                parts.iter().filter(|p| !p.complement().is_some_and(|c| set.contains(&c))).cloned().collect();
            if live.len() < parts.len() {
                let mut rest = set.clone();
                rest.remove(f);
                rest.insert(Nnf::junction(false, live));
                return self.sat(rest);
            }
        }
        let dias: Vec<&Nnf> = set.iter().filter_map(|f| if let Nnf::Dia(g) = f { Some(&**g) } else { None }).collect();
        let has_or = set.iter().any(|f| matches!(f, Nnf::Or(..)));
        if has_or {
            for g in &dias {
                self.sat(Self::successor(set, g))?;
            }
            let f = set.iter().find(|f| matches!(f, Nnf::Or(..))).cloned().expect("disjunction present");
            let Nnf::Or(parts) = &f else { unreachable!() };
            let mut rest = set.clone();
            rest.remove(&f);
            let (first, others) = parts.split_first().expect("at least two members");
            let mut left = rest.clone();
            left.insert(first.clone());
            if let Some(node) = self.sat(left) {
                return Some(node);
            }
            if let Some(c) = first.complement() {
                rest.insert(c);
            }
            rest.insert(Nnf::junction(false, others.to_vec()));
            return self.sat(rest);
        }
        let mut children = Vec::new();
        for g in dias {
            children.push(self.sat(Self::successor(set, g))?);
        }
        let props = set.iter().filter_map(|f| if let Nnf::Lit(p, true) = f { Some(p.clone()) } else { None }).collect();
        Some(Rc::new(TreeNode { props, children }))
    }
}

/// Unfolds a tableau model into a tree structure with nodes `w0, w1, …` in
/// breadth-first order.
fn tree_structure(root: &Rc<TreeNode>) -> Result<Structure> {
    let mut ids = Vec::new();
    let mut unary: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut edges = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([(Rc::clone(root), None::<usize>)]);
    while let Some((node, parent)) = queue.pop_front() {
        let v = ids.len();
        ids.push(format!("w{v}"));
        for p in &node.props {
            unary.entry(p.clone()).or_default().insert(v);
        }
        if let Some(u) = parent {
            edges.insert((u, v));
        }
        for c in &node.children {
            queue.push_back((Rc::clone(c), Some(v)));
        }
    }
    Structure::from_indexed(ids, unary, BTreeMap::from([(ACCESS.to_string(), edges)]))
}

/// Satisfiability of a basic modal formula by tableau. A satisfiable
/// formula comes with a finite tree model.
pub fn sat_basic_modal(f: &ModalFormula) -> Result<SatResult> {
    if !f.in_fragment(ModalFragment::Basic) {
        return Err(Error::precondition(format!("{f} is not a basic modal formula")));
    }
    let mut tableau = Tableau::default();
    match tableau.sat(BTreeSet::from([nnf(f, true)])) {
        None => Ok(SatResult::unsat()),
        Some(root) => {
            let witness = PointedStructure::new(tree_structure(&root)?, vec![0])?;
            SatResult::verified(witness, f, SemanticsMode::Intended)
        }
    }
}

/// The first of `_r`, `_r0`, `_r1`, … that does not occur in `f`.
pub fn fresh_letter(f: &ModalFormula) -> String {
    let used = f.vocabulary().unary;
    std::iter::once("_r".to_string()).chain((0..).map(|i| format!("_r{i}"))).find(|c| !used.contains(c)).expect("infinitely many candidates")
}

fn star(f: &ModalFormula, r: &str) -> ModalFormula {
    match f {
        M::Bullet(g) => M::diamond(M::and(M::prop(r), star(g, r))),
        _ => f.map_children(|c| star(c, r)),
    }
}

/// Translates an ML• formula into a basic modal formula that is satisfiable
/// iff the original is satisfiable on a K-frame: each `•ψ` becomes
/// `◇(r ∧ ψ*)` for a fresh letter `r`, and for every subformula `ψ` and
/// every `k` up to the modal depth the conjunct `□^k(r ∧ ψ* → ◇ψ*)` is
/// added. The formula is first rewritten into `¬ ∧ ◇ •`, so the
/// subformulas range over that form.
pub fn reduce_bullet(f: &ModalFormula) -> Result<ModalFormula> {
    if !f.in_fragment(ModalFragment::Bullet) || f.max_grade() > 0 || has_graded(f) {
        return Err(Error::precondition(format!("{f} is not an ML• formula")));
    }
    let r = fresh_letter(f);
    let core = f.desugar();
    let mut parts = vec![star(&core, &r)];
    let subs = core.subformulas();
    for k in 0..=f.depth() {
        for psi in &subs {
            let s = star(psi, &r);
            let body = M::implies(M::and(M::prop(&r), s.clone()), M::diamond(s));
            parts.push(M::box_power(k, body));
        }
    }
    Ok(M::conjunction(parts))
}

fn has_graded(f: &ModalFormula) -> bool {
    matches!(f, M::DiamondGeq(..) | M::BoxDualGeq(..)) || f.children().into_iter().any(has_graded)
}

/// Satisfiability of an ML• formula on K-frames via [`reduce_bullet`]. The
/// witness is the tableau model of the reduction with `Rb` set to the
/// `R`-edges into `r`-nodes, every `r`-node made `R`-reflexive and `r`
/// dropped; it is checked in quasi mode.
pub fn sat_bullet(f: &ModalFormula) -> Result<SatResult> {
    let reduced = reduce_bullet(f)?;
    let r = fresh_letter(f);
    let basic = sat_basic_modal(&reduced)?;
    let Some(model) = basic.witness else { return Ok(SatResult::unsat()) };
    let s = &model.structure;
    let marked = s.extension(&r);
    let edges = s.pairs(ACCESS);
    let bullet: BTreeSet<Pair> = edges.iter().copied().filter(|(_, v)| marked.contains(v)).collect();
    let mut access = edges;
    access.extend(marked.iter().map(|&v| (v, v)));
    let mut unary = s.unary_map().clone();
    unary.remove(&r);
    let binary = BTreeMap::from([(ACCESS.to_string(), access), (BULLET_ACCESS.to_string(), bullet)]);
    let k_model = Structure::from_indexed(s.ids().to_vec(), unary, binary)?;
    SatResult::verified(PointedStructure::new(k_model, model.points)?, f, SemanticsMode::Quasi)
}

/// Replaces `•` by `⊥` and its dual by `⊤`, then simplifies constants away.
fn fold_intended(f: &ModalFormula) -> ModalFormula {
    match f {
        M::Bullet(_) => M::Bot,
        M::BulletDual(_) => M::Top,
        _ => simplify(&f.map_children(fold_intended)),
    }
}

fn simplify(f: &ModalFormula) -> ModalFormula {
    match f {
        M::Not(g) => match **g {
            M::Top => M::Bot,
            M::Bot => M::Top,
            _ => f.clone(),
        },
        M::And(a, b) => match (&**a, &**b) {
            (M::Bot, _) | (_, M::Bot) => M::Bot,
            (M::Top, x) | (x, M::Top) => x.clone(),
            _ => f.clone(),
        },
        M::Or(a, b) => match (&**a, &**b) {
            (M::Top, _) | (_, M::Top) => M::Top,
            (M::Bot, x) | (x, M::Bot) => x.clone(),
            _ => f.clone(),
        },
        M::Implies(a, b) => match (&**a, &**b) {
            (M::Bot, _) | (_, M::Top) => M::Top,
            (M::Top, x) => x.clone(),
            _ => f.clone(),
        },
        M::Diamond(g) | M::DiamondGeq(_, g) if **g == M::Bot && !matches!(f, M::DiamondGeq(0, _)) => M::Bot,
        M::Box(g) | M::BoxDualGeq(_, g) if **g == M::Top => M::Top,
        _ => f.clone(),
    }
}

/// A rooted frame on at most [`MAX_SEARCH_SIZE`] nodes, with successor sets
/// as bit masks. Node 0 is the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Frame {
    n: u8,
    r: [u8; MAX_SEARCH_SIZE],
    rb: [u8; MAX_SEARCH_SIZE],
}

type FrameKey = (usize, bool, usize);

fn frame_cache() -> &'static Mutex<HashMap<FrameKey, Arc<Vec<Frame>>>> {
    static CACHE: OnceLock<Mutex<HashMap<FrameKey, Arc<Vec<Frame>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All frames on exactly `n` nodes, up to isomorphism fixing the root, in
/// which every node is within `bound` steps of the root and nodes at
/// distance exactly `bound` have no successors other than an optional loop
/// (kept in quasi mode so that they can be `Rb`-targets). Every model of a
/// formula of modal depth `bound` has a generated and cut submodel of this
/// shape satisfying the formula.
fn frames(n: usize, quasi: bool, bound: usize) -> Arc<Vec<Frame>> {
    let key = (n, quasi, bound);
    if let Some(f) = frame_cache().lock().expect("frame cache").get(&key) {
        return Arc::clone(f);
    }
    let mut out = Vec::new();
    for levels in level_sequences(n, bound.min(n - 1)) {
        enumerate_level_frames(&levels, quasi, bound, &mut out);
    }
    let out = Arc::new(out);
    frame_cache().lock().expect("frame cache").insert(key, Arc::clone(&out));
    out
}

/// Non-decreasing level assignments starting at the root, without gaps.
fn level_sequences(n: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0];
    fn go(n: usize, bound: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().expect("root present");
        for l in [last, last + 1] {
            if l <= bound && (l > 0 || cur.is_empty()) {
                cur.push(l);
                go(n, bound, cur, out);
                cur.pop();
            }
        }
    }
    go(n, bound, &mut cur, &mut out);
    out
}

fn permute_rows(rows: &[u8], perm: &[usize]) -> [u8; MAX_SEARCH_SIZE] {
    let mut out = [0u8; MAX_SEARCH_SIZE];
    for (u, &row) in rows.iter().enumerate() {
        let mut mapped = 0u8;
        for (v, &pv) in perm.iter().enumerate() {
            if row & (1 << v) != 0 {
                mapped |= 1 << pv;
            }
        }
        out[perm[u]] = mapped;
    }
    out
}

fn code(rows: &[u8]) -> u32 {
    rows.iter().enumerate().fold(0, |acc, (u, &r)| acc | (u32::from(r) << (5 * u)))
}

/// Permutations of the nodes that map every level onto itself.
fn level_permutations(levels: &[usize]) -> Vec<Vec<usize>> {
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    let mut start = 0;
    while start < levels.len() {
        let end = (start..levels.len()).find(|&i| levels[i] != levels[start]).unwrap_or(levels.len());
        let block: Vec<usize> = (start..end).collect();
        let mut next = Vec::new();
        for p in &perms {
            for q in permutations(&block) {
                let mut joined = p.clone();
                joined.extend(q);
                next.push(joined);
            }
        }
        perms = next;
        start = end;
    }
    perms
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn enumerate_level_frames(levels: &[usize], quasi: bool, bound: usize, out: &mut Vec<Frame>) {
    let n = levels.len();
    let choices: Vec<u8> = (0..n)
        .map(|u| {
            if levels[u] == bound {
                if quasi {
                    1 << u
                } else {
                    0
                }
            } else {
                (0..n).filter(|&v| levels[v] <= levels[u] + 1).fold(0, |m, v| m | (1 << v))
            }
        })
        .collect();
    let perms: Vec<Vec<usize>> = level_permutations(levels).into_iter().skip(1).collect();
    let mut rows = [0u8; MAX_SEARCH_SIZE];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        u: usize,
        n: usize,
        levels: &[usize],
        choices: &[u8],
        perms: &[Vec<usize>],
        quasi: bool,
        rows: &mut [u8; MAX_SEARCH_SIZE],
        out: &mut Vec<Frame>,
    ) {
        if u == n {
            emit(n, levels, perms, quasi, rows, out);
            return;
        }
        let mask = choices[u];
        let mut sub = mask;
        loop {
            rows[u] = sub;
            rec(u + 1, n, levels, choices, perms, quasi, rows, out);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        rows[u] = 0;
    }
    rec(0, n, levels, &choices, &perms, quasi, &mut rows, out);
}

fn emit(n: usize, levels: &[usize], perms: &[Vec<usize>], quasi: bool, rows: &[u8; MAX_SEARCH_SIZE], out: &mut Vec<Frame>) {
    // Every node below the root needs a predecessor one level up.
    for v in 1..n {
        if !(0..n).any(|u| levels[u] + 1 == levels[v] && rows[u] & (1 << v) != 0) {
            return;
        }
    }
    let own = code(&rows[..n]);
    let mut automorphisms = Vec::new();
    for p in perms {
        let c = code(&permute_rows(&rows[..n], p)[..n]);
        if c < own {
            return;
        }
        if c == own {
            automorphisms.push(p);
        }
    }
    if !quasi {
        out.push(Frame { n: n as u8, r: *rows, rb: [0; MAX_SEARCH_SIZE] });
        return;
    }
    let reflexive = (0..n).filter(|&v| rows[v] & (1 << v) != 0).fold(0u8, |m, v| m | (1 << v));
    let eligible: Vec<u8> = (0..n).map(|u| rows[u] & reflexive).collect();
    let mut rb = [0u8; MAX_SEARCH_SIZE];
    fn rec(u: usize, n: usize, eligible: &[u8], autos: &[&Vec<usize>], rows: &[u8; MAX_SEARCH_SIZE], rb: &mut [u8; MAX_SEARCH_SIZE], out: &mut Vec<Frame>) {
        if u == n {
            let own = code(&rb[..n]);
            if autos.iter().all(|p| code(&permute_rows(&rb[..n], p)[..n]) >= own) {
                out.push(Frame { n: n as u8, r: *rows, rb: *rb });
            }
            return;
        }
        let mask = eligible[u];
        let mut sub = mask;
        loop {
            rb[u] = sub;
            rec(u + 1, n, eligible, autos, rows, rb, out);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        rb[u] = 0;
    }
    rec(0, n, &eligible, &automorphisms, rows, &mut rb, out);
}

/// A formula compiled into a list of operations over earlier entries.
#[derive(Debug, Clone, Copy)]
enum Op {
    Letter(usize),
    Const(bool),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Dia(usize),
    Box(usize),
    AtLeast(u32, usize),
    AtMostBelow(u32, usize),
    BDia(usize),
    BBox(usize),
}

struct Compiled {
    ops: Vec<Op>,
    index: HashMap<ModalFormula, usize>,
}

impl Compiled {
    fn new(f: &ModalFormula, letters: &[String]) -> Compiled {
        let mut c = Compiled { ops: Vec::new(), index: HashMap::new() };
        c.add(f, letters);
        c
    }

    fn add(&mut self, f: &ModalFormula, letters: &[String]) -> usize {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        let mut sub = |g: &ModalFormula| self.add(g, letters);
        let op = match f {
            M::Prop(p) => Op::Letter(letters.iter().position(|l| l == p).expect("letter collected")),
            M::Top => Op::Const(true),
            M::Bot => Op::Const(false),
            M::Not(g) => Op::Not(sub(g)),
            M::And(a, b) => {
                let a = sub(a);
                Op::And(a, sub(b))
            }
            M::Or(a, b) => {
                let a = sub(a);
                Op::Or(a, sub(b))
            }
            M::Implies(a, b) => {
                let a = sub(a);
                Op::Implies(a, sub(b))
            }
            M::Diamond(g) => Op::Dia(sub(g)),
            M::Box(g) => Op::Box(sub(g)),
            M::DiamondGeq(k, g) => Op::AtLeast(*k, sub(g)),
            M::BoxDualGeq(k, g) => Op::AtMostBelow(*k, sub(g)),
            M::Bullet(g) | M::DiamondB(g) => Op::BDia(sub(g)),
            M::BulletDual(g) | M::BoxB(g) => Op::BBox(sub(g)),
        };
        self.ops.push(op);
        let i = self.ops.len() - 1;
        self.index.insert(f.clone(), i);
        i
    }
}

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Truth of every compiled subformula at every node for 64 valuations at a
/// time; valuation bit `node * letters + letter` says whether the letter
/// holds at the node. Returns a word whose set bits are the valuations of
/// the chunk making the formula true at the root.
fn eval_chunk(ops: &[Op], frame: &Frame, letters: usize, chunk: u64, vals: &mut Vec<[u64; MAX_SEARCH_SIZE]>) -> u64 {
    let n = frame.n as usize;
    vals.clear();
    let succ = |row: u8| (0..n).filter(move |v| row & (1 << v) != 0);
    for op in ops {
        let mut w = [0u64; MAX_SEARCH_SIZE];
        for u in 0..n {
            w[u] = match *op {
                Op::Letter(l) => {
                    let bit = u * letters + l;
                    if bit < 6 {
                        PATTERNS[bit]
                    } else if (chunk >> (bit - 6)) & 1 == 1 {
                        !0
                    } else {
                        0
                    }
                }
                Op::Const(b) => {
                    if b {
                        !0
                    } else {
                        0
                    }
                }
                Op::Not(a) => !vals[a][u],
                Op::And(a, b) => vals[a][u] & vals[b][u],
                Op::Or(a, b) => vals[a][u] | vals[b][u],
                Op::Implies(a, b) => !vals[a][u] | vals[b][u],
                Op::Dia(a) => succ(frame.r[u]).fold(0, |acc, v| acc | vals[a][v]),
                Op::Box(a) => succ(frame.r[u]).fold(!0, |acc, v| acc & vals[a][v]),
                Op::BDia(a) => succ(frame.rb[u]).fold(0, |acc, v| acc | vals[a][v]),
                Op::BBox(a) => succ(frame.rb[u]).fold(!0, |acc, v| acc & vals[a][v]),
                Op::AtLeast(k, a) => at_least(k, succ(frame.r[u]).map(|v| vals[a][v])),
                Op::AtMostBelow(k, a) => !at_least(k, succ(frame.r[u]).map(|v| !vals[a][v])),
            };
        }
        vals.push(w);
    }
    vals.last().map_or(0, |w| w[0])
}

/// Bit-sliced "at least k of the words have this bit set".
fn at_least(k: u32, words: impl Iterator<Item = u64>) -> u64 {
    if k == 0 {
        return !0;
    }
    let k = k as usize;
    let mut counters = vec![0u64; k + 1];
    counters[0] = !0;
    for x in words {
        for j in (1..=k).rev() {
            counters[j] |= counters[j - 1] & x;
        }
    }
    counters[k]
}

/// Exhaustive search for a model of `f` with at most `max_size` nodes. In
/// quasi mode only K-frames are searched. Structures are enumerated up to
/// isomorphism and cut to the modal depth of `f`; every valuation of the
/// letters of `f` is tried.
pub fn bounded_model_search(f: &ModalFormula, mode: SemanticsMode, max_size: usize) -> Result<SatResult> {
    if max_size > MAX_SEARCH_SIZE {
        return Err(Error::Budget(format!("model search is limited to {MAX_SEARCH_SIZE} nodes, asked for {max_size}")));
    }
    let quasi = mode == SemanticsMode::Quasi;
    if !quasi && f.uses_second_relation() {
        return Err(Error::precondition("the Rb modalities <.> and [.] only exist in quasi mode"));
    }
    let target = if quasi { f.clone() } else { fold_intended(f) };
    if target == M::Bot {
        return Ok(SatResult::unsat());
    }
    let letters: Vec<String> = target.vocabulary().unary.into_iter().collect();
    let compiled = Compiled::new(&target, &letters);
    let depth = target.depth();
    let mut vals = Vec::with_capacity(compiled.ops.len());
    for n in 1..=max_size {
        let bits = n * letters.len();
        if bits >= 6 + 63 {
            return Err(Error::Budget(format!("{bits} valuation bits exceed the search budget")));
        }
        let chunks: u64 = if bits <= 6 { 1 } else { 1 << (bits - 6) };
        let valid: u64 = if bits >= 6 { !0 } else { (1u64 << (1u32 << bits)) - 1 };
        for frame in frames(n, quasi, depth.min(n)).iter() {
            for chunk in 0..chunks {
                let hits = eval_chunk(&compiled.ops, frame, letters.len(), chunk, &mut vals) & valid;
                if hits != 0 {
                    let valuation = chunk * 64 + u64::from(hits.trailing_zeros());
                    let witness = frame_structure(frame, quasi, &letters, valuation)?;
                    return SatResult::verified(witness, f, mode);
                }
            }
        }
    }
    Ok(SatResult::unsat())
}

fn frame_structure(frame: &Frame, quasi: bool, letters: &[String], valuation: u64) -> Result<PointedStructure> {
    let n = frame.n as usize;
    let ids = (0..n).map(|i| format!("n{i}")).collect();
    let mut unary: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for (l, name) in letters.iter().enumerate() {
        let ext = (0..n).filter(|u| valuation >> (u * letters.len() + l) & 1 == 1).collect();
        unary.insert(name.clone(), ext);
    }
    let pairs = |rows: &[u8; MAX_SEARCH_SIZE]| -> BTreeSet<Pair> {
        (0..n).flat_map(|u| (0..n).filter(move |v| rows[u] & (1 << v) != 0).map(move |v| (u, v))).collect()
    };
    let mut binary = BTreeMap::from([(ACCESS.to_string(), pairs(&frame.r))]);
    if quasi {
        binary.insert(BULLET_ACCESS.to_string(), pairs(&frame.rb));
    }
    PointedStructure::new(Structure::from_indexed(ids, unary, binary)?, vec![0])
}

/// Whether `•p → ◇p` and `#(p → ◇p)` hold at every node of the bimodal
/// frame under every valuation of `p`, reading `•` as the `Rb` diamond.
/// Frames outside K are evaluated the same way, so the check also serves
/// to show that an axiom fails on them.
pub fn frame_axioms_valid_on_k(frame: &Structure, max_nodes: usize) -> Result<bool> {
    let n = frame.len();
    if n > max_nodes {
        return Err(Error::Budget(format!("frame has {n} nodes, the limit is {max_nodes}")));
    }
    if n >= 64 {
        return Err(Error::Budget("valuations of more than 63 nodes cannot be enumerated".into()));
    }
    let row = |rel: &str, u: usize| frame.successors(rel, u).iter().fold(0u64, |m, &v| m | (1 << v));
    let r: Vec<u64> = (0..n).map(|u| row(ACCESS, u)).collect();
    let rb: Vec<u64> = (0..n).map(|u| row(BULLET_ACCESS, u)).collect();
    for p in 0..(1u64 << n) {
        // Nodes where ◇p holds.
        let dia_p = (0..n).filter(|&u| r[u] & p != 0).fold(0u64, |m, u| m | (1 << u));
        for (w, &succ) in rb.iter().enumerate() {
            let bullet_p = succ & p != 0;
            let diamond_p = dia_p >> w & 1 == 1;
            if bullet_p && !diamond_p {
                return Ok(false);
            }
            // #(p → ◇p): every Rb-successor satisfies ¬p ∨ ◇p.
            if succ & p & !dia_p != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::is_frame_k;
    use crate::syntax::parse_modal;

    fn m(s: &str) -> ModalFormula {
        parse_modal(s).unwrap()
    }

    fn frame(n: usize, r: &[(usize, usize)], rb: &[(usize, usize)]) -> Structure {
        Structure::from_indexed(
            (0..n).map(|i| format!("n{i}")).collect(),
            BTreeMap::new(),
            BTreeMap::from([
                (ACCESS.to_string(), r.iter().copied().collect()),
                (BULLET_ACCESS.to_string(), rb.iter().copied().collect()),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn tableau_examples() {
        assert!(!sat_basic_modal(&m("p & ~p")).unwrap().satisfiable);
        assert!(!sat_basic_modal(&m("<>p & []~p")).unwrap().satisfiable);
        let r = sat_basic_modal(&m("<>p & <>~p & [](q -> p)")).unwrap();
        assert!(r.satisfiable);
        assert_eq!(r.witness.unwrap().structure.len(), 3);
        let single = sat_basic_modal(&m("p")).unwrap().witness.unwrap();
        assert_eq!(single.structure.len(), 1);
        assert!(single.structure.holds("p", 0));
    }

    #[test]
    fn tableau_rejects_other_fragments() {
        assert!(sat_basic_modal(&m("<2>p")).is_err());
        assert!(sat_basic_modal(&m("*p")).is_err());
    }

    #[test]
    fn tableau_handles_boxes_and_nesting() {
        assert!(sat_basic_modal(&m("[]false")).unwrap().satisfiable);
        assert!(!sat_basic_modal(&m("<><>p & [][]~p")).unwrap().satisfiable);
        assert!(sat_basic_modal(&m("<>(<>p | q) & [](~q) & []([]~p | r)")).unwrap().satisfiable);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_bullet(&m("p")).unwrap(), m("p & (_r & p -> <>p)"));
        let red = reduce_bullet(&m("*p")).unwrap();
        assert!(red.subformulas().contains(&m("<>(_r & p)")));
        assert!(red.in_fragment(ModalFragment::Basic));
        let g = m("*_r & <>_r0");
        assert_eq!(fresh_letter(&g), "_r1");
        let red = reduce_bullet(&g).unwrap();
        assert!(red.vocabulary().unary.contains("_r1"));
        assert!(reduce_bullet(&m("<2>p")).is_err());
    }

    #[test]
    fn bullet_satisfiability() {
        assert!(!sat_bullet(&m("*p & ~<>p")).unwrap().satisfiable);
        assert!(!sat_bullet(&m("p & ~p")).unwrap().satisfiable);
        let r = sat_bullet(&m("*p")).unwrap();
        let w = r.witness.unwrap();
        assert!(is_frame_k(&w.structure));
        assert!(eval_modal(&w, &m("*p"), SemanticsMode::Quasi).unwrap());
        assert!(sat_bullet(&m("#~p & <>p")).unwrap().satisfiable);
        assert!(!sat_bullet(&m("*q & #(~<>q)")).unwrap().satisfiable);
    }

    #[test]
    fn bounded_search_examples() {
        assert!(bounded_model_search(&m("<>p"), SemanticsMode::Intended, 2).unwrap().satisfiable);
        let quasi = bounded_model_search(&m("*p"), SemanticsMode::Quasi, 2).unwrap();
        let w = quasi.witness.unwrap();
        // The smallest witness is a single reflexive node in both relations.
        assert_eq!(w.structure.len(), 1);
        assert!(is_frame_k(&w.structure));
        let strict = bounded_model_search(&m("*p & ~p"), SemanticsMode::Quasi, 2).unwrap();
        assert_eq!(strict.witness.unwrap().structure.len(), 2);
        assert!(!bounded_model_search(&m("*p"), SemanticsMode::Intended, 5).unwrap().satisfiable);
        assert!(matches!(bounded_model_search(&m("p"), SemanticsMode::Intended, 6), Err(Error::Budget(_))));
    }

    #[test]
    fn bounded_search_counts_successors() {
        let r = bounded_model_search(&m("<3>p & [2]~p"), SemanticsMode::Intended, 4).unwrap();
        assert!(!r.satisfiable);
        let f = m("~p & <3>p & ~<4>true");
        let r = bounded_model_search(&f, SemanticsMode::Intended, 4).unwrap();
        assert_eq!(r.witness.unwrap().structure.len(), 4);
        assert!(!bounded_model_search(&f, SemanticsMode::Intended, 3).unwrap().satisfiable);
    }

    #[test]
    fn bounded_search_needs_depth_two_models() {
        let f = m("<>(p & <>~p) & <>(~p & <>p) & []([]q)");
        let r = bounded_model_search(&f, SemanticsMode::Intended, 5).unwrap();
        assert!(r.satisfiable);
        let chain = m("p & <>(~p & q & <>(~p & ~q & <>(~p & q & []false)))");
        assert!(!bounded_model_search(&chain, SemanticsMode::Intended, 3).unwrap().satisfiable);
        assert!(bounded_model_search(&chain, SemanticsMode::Intended, 4).unwrap().satisfiable);
    }

    #[test]
    fn frame_counts() {
        // Two nodes, unbounded: the root reaches node 1 and may carry a
        // loop; node 1 may have a loop and an edge back.
        assert_eq!(frames(2, false, 2).len(), 8);
        assert_eq!(frames(2, false, 1).len(), 2);
        assert_eq!(frames(1, false, 0).len(), 1);
        assert_eq!(frames(1, false, 1).len(), 2);
        assert_eq!(frames(1, true, 0).len(), 3);
        // Three nodes at depth one: the two leaves are interchangeable.
        assert_eq!(frames(3, false, 1).len(), 2);
    }

    #[test]
    fn axioms_on_small_frames() {
        assert!(frame_axioms_valid_on_k(&frame(2, &[(0, 1), (1, 1)], &[(0, 1)]), 4).unwrap());
        assert!(!frame_axioms_valid_on_k(&frame(2, &[(0, 1)], &[(0, 1)]), 4).unwrap());
        assert!(frame_axioms_valid_on_k(&frame(3, &[(0, 1), (1, 2)], &[]), 4).unwrap());
        assert!(frame_axioms_valid_on_k(&frame(5, &[], &[]), 4).is_err());
    }

    #[test]
    fn axioms_agree_with_the_evaluator() {
        let bullet_axiom = m("*p -> <>p");
        let dual_axiom = m("#(p -> <>p)");
        let f = frame(3, &[(0, 1), (1, 1), (1, 2), (2, 2), (0, 2)], &[(0, 1), (1, 2)]);
        assert!(is_frame_k(&f));
        for p in 0..8usize {
            let ext: BTreeSet<usize> = (0..3).filter(|v| p >> v & 1 == 1).collect();
            let s = f.with_unary("p", ext).unwrap();
            for w in 0..3 {
                let pw = PointedStructure::new(s.clone(), vec![w]).unwrap();
                assert!(eval_modal(&pw, &bullet_axiom, SemanticsMode::Quasi).unwrap());
                assert!(eval_modal(&pw, &dual_axiom, SemanticsMode::Quasi).unwrap());
            }
        }
        assert!(frame_axioms_valid_on_k(&f, 3).unwrap());
    }
}
