//! Constructions on models and formulas: tree unravelling, characteristic
//! formulas of finite trees, adding copies of subtrees, `Subtree`, relation
//! algebra relativisation and translation, guarded distance, guarded cuts
//! and binary guarded unravelling.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::structures::{is_tree, tree_root, Pair, PointedStructure, Structure, ACCESS};
use crate::syntax::{FoFormula, ModalFormula, RaTerm, Var, Vocabulary};

/// Separator between the source ids in the names of path nodes.
pub const PATH_SEPARATOR: char = '/';

/// Collects indexed unary and binary facts for a structure under construction.
#[derive(Default)]
struct Builder {
    ids: Vec<String>,
    unary: BTreeMap<String, BTreeSet<usize>>,
    binary: BTreeMap<String, BTreeSet<Pair>>,
}

impl Builder {
    fn node(&mut self, id: String, src: &Structure, copy_of: usize) -> usize {
        let v = self.ids.len();
        self.ids.push(id);
        for (p, ext) in src.unary_map() {
            let set = self.unary.entry(p.clone()).or_default();
            if ext.contains(&copy_of) {
                set.insert(v);
            }
        }
        v
    }

    fn edge(&mut self, rel: &str, a: usize, b: usize) {
        self.binary.entry(rel.to_string()).or_default().insert((a, b));
    }

    fn finish(self) -> Result<Structure> {
        Structure::from_indexed(self.ids, self.unary, self.binary)
    }
}

/// Depth-truncated tree unravelling along [`ACCESS`]: one node per path of
/// at most `depth` steps from the point, named by the ids along the path.
/// Unary facts are those of the path's last element; other binary
/// relations are not carried over.
pub fn unravel(m: &PointedStructure, depth: usize) -> Result<PointedStructure> {
    let w = m.require_single_point("unravel")?;
    let s = &m.structure;
    let mut b = Builder::default();
    let root = b.node(s.id(w).to_string(), s, w);
    b.binary.insert(ACCESS.to_string(), BTreeSet::new());
    let mut queue = VecDeque::from([(root, w, 0usize)]);
    while let Some((node, last, len)) = queue.pop_front() {
        if len == depth {
            continue;
        }
        for &next in s.successors(ACCESS, last) {
            let name = format!("{}{PATH_SEPARATOR}{}", b.ids[node], s.id(next));
            let child = b.node(name, s, next);
            b.edge(ACCESS, node, child);
            queue.push_back((child, next, len + 1));
        }
    }
    PointedStructure::new(b.finish()?, vec![root])
}

fn children_lists(t: &PointedStructure) -> &[Vec<usize>] {
    t.structure.successor_lists(ACCESS).unwrap_or(&[])
}

/// The graded modal formula ψ_T that holds at the root of a finite tree
/// exactly when that tree is isomorphic to `t`, relative to `vocab`.
pub fn gml_char_formula(t: &PointedStructure, vocab: &Vocabulary) -> Result<ModalFormula> {
    if !is_tree(t) {
        return Err(Error::precondition("characteristic formulas are defined for finite trees only"));
    }
    let s = &t.structure;
    if let Some(p) = s.unary_names().find(|p| !s.extension(p).is_empty() && !vocab.unary.contains(*p)) {
        return Err(Error::precondition(format!("letter {p:?} of the tree is missing from the vocabulary")));
    }
    let letters: Vec<&str> = vocab.unary.iter().map(String::as_str).collect();
    let children = children_lists(t);
    Ok(char_node(s, children, &letters, t.point()))
}

fn char_node(s: &Structure, children: &[Vec<usize>], letters: &[&str], v: usize) -> ModalFormula {
    use ModalFormula as M;
    let mut parts: Vec<M> =
        letters.iter().map(|p| if s.holds(p, v) { M::prop(p) } else { M::not(M::prop(p)) }).collect();
    let kids: &[usize] = children.get(v).map_or(&[], Vec::as_slice);
    if kids.is_empty() {
        parts.push(M::not(M::diamond(M::Top)));
        return M::conjunction(parts);
    }
    let mut classes: BTreeMap<M, u32> = BTreeMap::new();
    for &c in kids {
        *classes.entry(char_node(s, children, letters, c)).or_default() += 1;
    }
    for (psi, count) in classes {
        parts.push(M::diamond_geq(count, psi.clone()));
        parts.push(M::not(M::diamond_geq(count + 1, psi)));
    }
    parts.push(M::not(M::diamond_geq(kids.len() as u32 + 1, M::Top)));
    M::conjunction(parts)
}

fn fresh_id(taken: &HashSet<String>, base: String) -> String {
    let mut id = base;
    while taken.contains(&id) {
        id.push('\'');
    }
    id
}

/// Attaches `count` disjoint copies of the tree `t` below the node `v` of
/// the tree `m`.
pub fn add_copies(m: &PointedStructure, v: &str, t: &PointedStructure, count: usize) -> Result<PointedStructure> {
    if !is_tree(m) || !is_tree(t) {
        return Err(Error::precondition("add_copies needs two trees"));
    }
    let src = &m.structure;
    let anchor = src.node(v)?;
    let mut ids: Vec<String> = src.ids().to_vec();
    let mut taken: HashSet<String> = ids.iter().cloned().collect();
    let mut unary = src.unary_map().clone();
    let mut binary = src.binary_map().clone();
    let ts = &t.structure;
    for copy in 0..count {
        let offset = ids.len();
        for id in ts.ids() {
            let fresh = fresh_id(&taken, format!("{v}+{copy}{PATH_SEPARATOR}{id}"));
            taken.insert(fresh.clone());
            ids.push(fresh);
        }
        for (p, ext) in ts.unary_map() {
            unary.entry(p.clone()).or_default().extend(ext.iter().map(|x| x + offset));
        }
        for (r, pairs) in ts.binary_map() {
            binary.entry(r.clone()).or_default().extend(pairs.iter().map(|&(a, b)| (a + offset, b + offset)));
        }
        binary.entry(ACCESS.to_string()).or_default().insert((anchor, t.point() + offset));
    }
    PointedStructure::new(Structure::from_indexed(ids, unary, binary)?, m.points.clone())
}

/// `Subtree(T, n, p)`: the largest subtree containing the point `n` whose
/// nodes all satisfy `p`. The point is kept and need not be the root of the
/// result.
pub fn subtree(t: &PointedStructure, p: &str) -> Result<PointedStructure> {
    if t.points.len() != 1 || tree_root(&t.structure).is_none() {
        return Err(Error::precondition("subtree needs a tree with a single point"));
    }
    let s = &t.structure;
    let n = t.point();
    if !s.holds(p, n) {
        return Err(Error::precondition(format!("the point {} does not satisfy {p}", s.id(n))));
    }
    let mut parent = vec![None; s.len()];
    for &(a, b) in &s.pairs(ACCESS) {
        parent[b] = Some(a);
    }
    let mut root = n;
    while let Some(up) = parent[root].filter(|&u| s.holds(p, u)) {
        root = up;
    }
    let mut keep = vec![false; s.len()];
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        keep[u] = true;
        stack.extend(s.successors(ACCESS, u).iter().copied().filter(|&c| s.holds(p, c)));
    }
    t.induced(&keep)
}

/// `⊤_R = R;(top;R~)`, the relation linking every element of the domain of
/// `r` (its first coordinates) to every other.
pub fn top_of(r: &str) -> RaTerm {
    RaTerm::comp(RaTerm::atom(r), RaTerm::comp(RaTerm::Top, RaTerm::conv(RaTerm::atom(r))))
}

/// Relativises a term to the domain of `r` by meeting every atomic subterm
/// with `⊤_R`. The domain of `r` is the set of its first coordinates.
pub fn ra_relativize(t: &RaTerm, r: &str) -> RaTerm {
    t.map_leaves(&|leaf| RaTerm::meet(leaf.clone(), top_of(r)))
}

/// Translates a term into a first-order formula with free variables `x`
/// (source) and `y` (target) that uses no variables besides `x`, `y`, `z`.
pub fn ra_to_fo3(t: &RaTerm) -> FoFormula {
    translate(t, Var::X, Var::Y)
}

fn third(u: Var, v: Var) -> Var {
    Var::ALL.into_iter().find(|w| *w != u && *w != v).expect("three variables")
}

fn translate(t: &RaTerm, u: Var, v: Var) -> FoFormula {
    use FoFormula as F;
    match t {
        RaTerm::Atom(r) => F::bin(r, u, v),
        RaTerm::Id => F::Eq(u, v),
        RaTerm::Top => F::Eq(u, u),
        RaTerm::Meet(a, b) => F::and(translate(a, u, v), translate(b, u, v)),
        RaTerm::Diff(a, b) => F::and(translate(a, u, v), F::not(translate(b, u, v))),
        RaTerm::Conv(a) => translate(a, v, u),
        RaTerm::Comp(a, b) => {
            let w = third(u, v);
            F::exists(w, None, F::and(translate(a, u, w), translate(b, w, v)))
        }
    }
}

/// Least number of guarded steps from the tuple `from` to `to`, where a step
/// moves between two elements that occur together in a binary fact.
pub fn guarded_dist(m: &Structure, from: &[usize], to: usize) -> Option<usize> {
    guarded_distances(m, from)[to]
}

fn guarded_distances(m: &Structure, from: &[usize]) -> Vec<Option<usize>> {
    let adj = m.guarded_neighbours();
    let mut dist = vec![None; m.len()];
    let mut queue = VecDeque::new();
    for &s in from {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued nodes have distances");
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// `Cut((M, s), n)`: the substructure on the elements within guarded
/// distance `n` of the points.
pub fn cut_guarded(m: &PointedStructure, n: usize) -> Result<PointedStructure> {
    let keep: Vec<bool> = guarded_distances(&m.structure, &m.points).iter().map(|d| d.is_some_and(|d| d <= n)).collect();
    m.induced(&keep)
}

/// A guarded path in the binary unravelling: the root elements followed by
/// steps that each introduce one new element guarded together with the
/// element introduced by the previous step (or with a root element, for
/// the first step).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedPath {
    pub root: Vec<usize>,
    /// For each step, the element it is anchored on and the new element.
    pub steps: Vec<(usize, usize)>,
}

impl GuardedPath {
    /// The guarded sets along the path; the root set comes first.
    pub fn sets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![self.root.clone()];
        out.extend(self.steps.iter().map(|&(a, t)| vec![a, t]));
        out
    }

    /// The element introduced last, which is the only active element of the
    /// final set; `None` for the root path.
    pub fn active(&self) -> Option<usize> {
        self.steps.last().map(|s| s.1)
    }

    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Binary guarded unravelling truncated at paths of `depth` steps.
///
/// The root tuple's distinct elements become the root objects, and every
/// guarded path gets one new object for its last element. A fact holds
/// between two objects when it holds between their source elements and the
/// objects are both roots, a parent and its child, or the same object.
/// Steps never return to an element of the set they leave, so an element
/// with a self-loop is not copied again.
pub fn gf_unravel_bin(m: &PointedStructure, depth: usize) -> Result<PointedStructure> {
    Ok(gf_unravel_bin_paths(m, depth)?.0)
}

/// As [`gf_unravel_bin`], also returning the guarded path of every object.
pub fn gf_unravel_bin_paths(m: &PointedStructure, depth: usize) -> Result<(PointedStructure, Vec<GuardedPath>)> {
    if m.points.len() > 2 {
        return Err(Error::precondition("binary guarded unravelling takes at most two points"));
    }
    let s = &m.structure;
    let adj = s.guarded_neighbours();
    let mut roots: Vec<usize> = Vec::new();
    for &p in &m.points {
        if !roots.contains(&p) {
            roots.push(p);
        }
    }
    let mut b = Builder::default();
    let mut origin: Vec<usize> = Vec::new();
    let mut paths: Vec<GuardedPath> = Vec::new();
    for &r in &roots {
        b.node(s.id(r).to_string(), s, r);
        origin.push(r);
        paths.push(GuardedPath { root: roots.clone(), steps: Vec::new() });
    }
    let copy_facts = |b: &mut Builder, origin: &[usize], x: usize, y: usize| {
        for (rel, pairs) in s.binary_map() {
            if pairs.contains(&(origin[x], origin[y])) {
                b.edge(rel, x, y);
            }
        }
    };
    for x in 0..roots.len() {
        for y in 0..roots.len() {
            copy_facts(&mut b, &origin, x, y);
        }
    }
    let mut queue: VecDeque<usize> = (0..roots.len()).collect();
    let mut expanded_roots = false;
    while let Some(obj) = queue.pop_front() {
        let path = paths[obj].clone();
        if path.steps.len() == depth {
            continue;
        }
        let anchors: Vec<usize> = match path.active() {
            None if !expanded_roots => {
                expanded_roots = true;
                (0..roots.len()).collect()
            }
            None => continue,
            Some(_) => vec![obj],
        };
        let current: Vec<usize> = path.sets().pop().expect("paths are non-empty");
        for anchor in anchors {
            let u = origin[anchor];
            for &t in &adj[u] {
                if t == u || current.contains(&t) {
                    continue;
                }
                let name = format!("{}{PATH_SEPARATOR}{}", b.ids[anchor], s.id(t));
                let child = b.node(name, s, t);
                origin.push(t);
                let mut steps = path.steps.clone();
                steps.push((u, t));
                paths.push(GuardedPath { root: roots.clone(), steps });
                copy_facts(&mut b, &origin, anchor, child);
                copy_facts(&mut b, &origin, child, anchor);
                copy_facts(&mut b, &origin, child, child);
                queue.push_back(child);
            }
        }
    }
    let point_objects = m.points.iter().map(|p| roots.iter().position(|r| r == p).expect("root")).collect();
    Ok((PointedStructure::new(b.finish()?, point_objects)?, paths))
}
