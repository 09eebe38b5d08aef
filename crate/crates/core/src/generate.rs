//! Seeded generators for structures, formulas and exhaustive small corpora.
//!
//! Every random object is drawn from a [`Sampler`] built from a `(seed,
//! index)` pair, so any single case can be reproduced without replaying the
//! ones before it. Formula samplers pick uniformly among the productions
//! allowed by the remaining modal (or quantifier) depth and size budget.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::structures::{Pair, PointedStructure, Structure, ACCESS, BULLET_ACCESS};
use crate::syntax::{FoFormula, Guard, ModalFormula, RaTerm, Var};

/// Random source for one case.
pub struct Sampler {
    rng: ChaCha8Rng,
}

/// Which modal operators a sampled formula may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModalShape {
    pub depth: usize,
    pub size: usize,
    /// Largest grade of `<k>` and `[k]`; zero disables graded operators.
    pub max_grade: u32,
    pub bullet: bool,
}

impl ModalShape {
    pub fn basic(depth: usize) -> Self {
        ModalShape { depth, size: 12, max_grade: 0, bullet: false }
    }

    pub fn graded(depth: usize, max_grade: u32) -> Self {
        ModalShape { depth, size: 12, max_grade, bullet: false }
    }

    pub fn bullet(depth: usize) -> Self {
        ModalShape { depth, size: 10, max_grade: 0, bullet: true }
    }
}

#[derive(Clone, Copy)]
enum ModalProd {
    Leaf,
    Not,
    And,
    Or,
    Implies,
    Diamond,
    Box,
    DiamondGeq,
    BoxDualGeq,
    Bullet,
    BulletDual,
}

impl Sampler {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A structure on `n0, n1, …` whose size is drawn from `nodes`. Each
    /// letter holds at each node and each pair is in each relation with
    /// the given probabilities.
    pub fn structure(&mut self, nodes: RangeInclusive<usize>, letters: &[&str], rels: &[&str], letter_p: f64, edge_p: f64) -> Structure {
        let n = self.rng.gen_range(nodes);
        let ids = (0..n).map(|i| format!("n{i}")).collect();
        let unary = letters
            .iter()
            .map(|p| (p.to_string(), (0..n).filter(|_| self.rng.gen_bool(letter_p)).collect()))
            .collect();
        let binary = rels
            .iter()
            .map(|r| {
                let pairs: BTreeSet<Pair> =
                    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|_| self.rng.gen_bool(edge_p)).collect();
                (r.to_string(), pairs)
            })
            .collect();
        Structure::from_indexed(ids, unary, binary).expect("generated structures are well formed")
    }

    /// A structure pointed at a random node.
    pub fn pointed(&mut self, nodes: RangeInclusive<usize>, letters: &[&str], rels: &[&str], edge_p: f64) -> PointedStructure {
        let s = self.structure(nodes, letters, rels, 0.5, edge_p);
        let w = self.rng.gen_range(0..s.len());
        PointedStructure::new(s, vec![w]).expect("point inside the domain")
    }

    /// A random modal formula over `letters` within `shape`.
    pub fn modal(&mut self, letters: &[&str], shape: ModalShape) -> ModalFormula {
        self.modal_rec(letters, &shape, shape.depth, shape.size)
    }

    fn modal_rec(&mut self, letters: &[&str], shape: &ModalShape, depth: usize, size: usize) -> ModalFormula {
        use ModalProd as P;
        let mut prods = vec![P::Leaf];
        if size >= 2 {
            prods.push(P::Not);
            if depth > 0 {
                prods.extend([P::Diamond, P::Box]);
                if shape.max_grade > 0 {
                    prods.extend([P::DiamondGeq, P::BoxDualGeq]);
                }
                if shape.bullet {
                    prods.extend([P::Bullet, P::BulletDual]);
                }
            }
        }
        if size >= 3 {
            prods.extend([P::And, P::Or, P::Implies]);
        }
        let prod = *prods.choose(&mut self.rng).expect("leaf is always allowed");
        let unary = |s: &mut Self, d: usize| s.modal_rec(letters, shape, d, size - 1);
        match prod {
            P::Leaf => self.leaf(letters),
            P::Not => ModalFormula::not(unary(self, depth)),
            P::Diamond => ModalFormula::diamond(unary(self, depth - 1)),
            P::Box => ModalFormula::boxed(unary(self, depth - 1)),
            P::Bullet => ModalFormula::bullet(unary(self, depth - 1)),
            P::BulletDual => ModalFormula::BulletDual(Box::new(unary(self, depth - 1))),
            P::DiamondGeq => {
                let k = self.rng.gen_range(0..=shape.max_grade);
                ModalFormula::diamond_geq(k, unary(self, depth - 1))
            }
            P::BoxDualGeq => {
                let k = self.rng.gen_range(0..=shape.max_grade);
                ModalFormula::BoxDualGeq(k, Box::new(unary(self, depth - 1)))
            }
            P::And | P::Or | P::Implies => {
                let left = self.rng.gen_range(1..size - 1);
                let a = self.modal_rec(letters, shape, depth, left);
                let b = self.modal_rec(letters, shape, depth, size - 1 - left);
                match prod {
                    P::And => ModalFormula::and(a, b),
                    P::Or => ModalFormula::or(a, b),
                    _ => ModalFormula::implies(a, b),
                }
            }
        }
    }

    fn leaf(&mut self, letters: &[&str]) -> ModalFormula {
        match self.rng.gen_range(0..letters.len() + 1) {
            i if i < letters.len() => ModalFormula::prop(letters[i]),
            _ if self.rng.gen_bool(0.5) => ModalFormula::Top,
            _ => ModalFormula::Bot,
        }
    }

    /// A relation algebra term over `rels` with at most `size` nodes.
    pub fn ra(&mut self, rels: &[&str], size: usize) -> RaTerm {
        let mut prods = vec![0];
        if size >= 2 {
            prods.push(1);
        }
        if size >= 3 {
            prods.extend([2, 3, 4]);
        }
        match *prods.choose(&mut self.rng).expect("leaf is always allowed") {
            0 => match self.rng.gen_range(0..rels.len() + 2) {
                i if i < rels.len() => RaTerm::atom(rels[i]),
                i if i == rels.len() => RaTerm::Id,
                _ => RaTerm::Top,
            },
            1 => RaTerm::conv(self.ra(rels, size - 1)),
            op => {
                let left = self.rng.gen_range(1..size - 1);
                let a = self.ra(rels, left);
                let b = self.ra(rels, size - 1 - left);
                match op {
                    2 => RaTerm::meet(a, b),
                    3 => RaTerm::diff(a, b),
                    _ => RaTerm::comp(a, b),
                }
            }
        }
    }

    /// A GF_bin formula whose free variables are among `free` (one or two
    /// distinct variables), with quantifier depth at most `depth`.
    pub fn gf_bin(&mut self, letters: &[&str], rels: &[&str], free: &[Var], depth: usize, size: usize) -> FoFormula {
        let mut prods = vec![0];
        if size >= 2 {
            prods.push(1);
            if depth > 0 {
                prods.extend([4, 5]);
            }
        }
        if size >= 3 {
            prods.extend([2, 3]);
        }
        match *prods.choose(&mut self.rng).expect("atoms are always allowed") {
            0 => self.gf_atom(letters, rels, free),
            1 => FoFormula::not(self.gf_bin(letters, rels, free, depth, size - 1)),
            op @ (2 | 3) => {
                let left = self.rng.gen_range(1..size - 1);
                let a = self.gf_bin(letters, rels, free, depth, left);
                let b = self.gf_bin(letters, rels, free, depth, size - 1 - left);
                if op == 2 {
                    FoFormula::and(a, b)
                } else {
                    FoFormula::or(a, b)
                }
            }
            op => {
                let keep = *free.choose(&mut self.rng).expect("free variables present");
                let fresh: Vec<Var> = Var::ALL.into_iter().filter(|&v| v != keep).collect();
                let bound = *fresh.choose(&mut self.rng).expect("two other variables");
                let rel = rels.choose(&mut self.rng).expect("relations present");
                let guard = if self.rng.gen_bool(0.5) { Guard::new(rel, keep, bound) } else { Guard::new(rel, bound, keep) };
                let body = self.gf_bin(letters, rels, &[keep, bound], depth - 1, size - 1);
                if op == 4 {
                    FoFormula::exists(bound, Some(guard), body)
                } else {
                    FoFormula::forall(bound, Some(guard), body)
                }
            }
        }
    }

    fn gf_atom(&mut self, letters: &[&str], rels: &[&str], free: &[Var]) -> FoFormula {
        let a = *free.choose(&mut self.rng).expect("free variables present");
        let b = *free.choose(&mut self.rng).expect("free variables present");
        match self.rng.gen_range(0..3) {
            0 if !letters.is_empty() => FoFormula::un(letters.choose(&mut self.rng).expect("letters present"), a),
            1 if a != b => FoFormula::Eq(a, b),
            _ => FoFormula::bin(rels.choose(&mut self.rng).expect("relations present"), a, b),
        }
    }

    /// A pair of bisimilar pointed models over [`ACCESS`]: the left one is
    /// random, the right one gives every node one or two copies, and every
    /// copy keeps a non-empty choice of copies of each of its successors.
    /// The sides are swapped at random.
    pub fn bisimilar_pair(&mut self, nodes: RangeInclusive<usize>, letters: &[&str], edge_p: f64) -> (PointedStructure, PointedStructure) {
        let m = self.pointed(nodes, letters, &[ACCESS], edge_p);
        let s = &m.structure;
        let copies: Vec<usize> = (0..s.len()).map(|_| self.rng.gen_range(1..=2)).collect();
        let mut ids = Vec::new();
        let mut first = Vec::new();
        for (v, &c) in copies.iter().enumerate() {
            first.push(ids.len());
            ids.extend((0..c).map(|i| format!("{}.{i}", s.id(v))));
        }
        let mut unary: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (p, ext) in s.unary_map() {
            let set = ext.iter().flat_map(|&v| first[v]..first[v] + copies[v]).collect();
            unary.insert(p.clone(), set);
        }
        let mut edges = BTreeSet::new();
        for (v, &cv) in copies.iter().enumerate() {
            for i in 0..cv {
                for &u in s.successors(ACCESS, v) {
                    let chosen: Vec<usize> = match copies[u] {
                        1 => vec![0],
                        _ => match self.rng.gen_range(0..3) {
                            0 => vec![0],
                            1 => vec![1],
                            _ => vec![0, 1],
                        },
                    };
                    edges.extend(chosen.into_iter().map(|j| (first[v] + i, first[u] + j)));
                }
            }
        }
        let n = Structure::from_indexed(ids, unary, BTreeMap::from([(ACCESS.to_string(), edges)])).expect("well formed copy");
        let w = m.point();
        let point = first[w] + self.rng.gen_range(0..copies[w]);
        let n = PointedStructure::new(n, vec![point]).expect("point inside the domain");
        if self.rng.gen_bool(0.5) {
            (n, m)
        } else {
            (m, n)
        }
    }

    /// The structure with its nodes renamed and listed in a random order.
    pub fn shuffled(&mut self, s: &Structure) -> Structure {
        let mut perm: Vec<usize> = (0..s.len()).collect();
        perm.shuffle(&mut self.rng);
        let ids = (0..s.len()).map(|i| format!("m{i}")).collect();
        let unary = s.unary_map().iter().map(|(p, ext)| (p.clone(), ext.iter().map(|&v| perm[v]).collect())).collect();
        let binary =
            s.binary_map().iter().map(|(r, pairs)| (r.clone(), pairs.iter().map(|&(a, b)| (perm[a], perm[b])).collect())).collect();
        Structure::from_indexed(ids, unary, binary).expect("a permutation keeps the structure well formed")
    }
}

/// An unordered rooted tree with a bit mask of letters at each node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Tree {
    size: usize,
    label: u32,
    children: Vec<usize>,
}

/// Every rooted tree over `letters` with at most `max_nodes` nodes, up to
/// isomorphism, as structures over [`ACCESS`] pointed at the root. Nodes
/// are named `t0, t1, …` in breadth-first order.
pub fn all_trees(max_nodes: usize, letters: &[&str]) -> Vec<PointedStructure> {
    let labels = 1u32 << letters.len();
    let mut trees: Vec<Tree> = Vec::new();
    for size in 1..=max_nodes {
        let smaller = trees.len();
        let mut multisets = Vec::new();
        child_multisets(&trees[..smaller], size - 1, 0, &mut Vec::new(), &mut multisets);
        for children in multisets {
            for label in 0..labels {
                trees.push(Tree { size, label, children: children.clone() });
            }
        }
    }
    trees.iter().map(|t| tree_structure(&trees, t, letters)).collect()
}

fn child_multisets(trees: &[Tree], remaining: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    for i in from..trees.len() {
        if trees[i].size <= remaining {
            cur.push(i);
            child_multisets(trees, remaining - trees[i].size, i, cur, out);
            cur.pop();
        }
    }
}

fn tree_structure(all: &[Tree], root: &Tree, letters: &[&str]) -> PointedStructure {
    let mut ids = Vec::new();
    let mut unary: BTreeMap<String, BTreeSet<usize>> = letters.iter().map(|l| (l.to_string(), BTreeSet::new())).collect();
    let mut edges = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([(root, None::<usize>)]);
    while let Some((t, parent)) = queue.pop_front() {
        let v = ids.len();
        ids.push(format!("t{v}"));
        for (i, l) in letters.iter().enumerate() {
            if t.label >> i & 1 == 1 {
                unary.get_mut(*l).expect("letter present").insert(v);
            }
        }
        if let Some(p) = parent {
            edges.insert((p, v));
        }
        queue.extend(t.children.iter().map(|&c| (&all[c], Some(v))));
    }
    let s = Structure::from_indexed(ids, unary, BTreeMap::from([(ACCESS.to_string(), edges)])).expect("trees are well formed");
    PointedStructure::new(s, vec![0]).expect("root present")
}

/// Every bimodal frame over [`ACCESS`] and [`BULLET_ACCESS`] on exactly
/// `n` nodes `f0, f1, …`, unlabelled and not reduced up to isomorphism.
pub fn all_bimodal_frames(n: usize) -> impl Iterator<Item = Structure> {
    let cells = n * n;
    (0u64..1 << (2 * cells)).map(move |code| {
        let rel = |offset: usize| -> BTreeSet<Pair> {
            (0..cells).filter(|i| code >> (offset + i) & 1 == 1).map(|i| (i / n, i % n)).collect()
        };
        let ids = (0..n).map(|i| format!("f{i}")).collect();
        let binary = BTreeMap::from([(ACCESS.to_string(), rel(0)), (BULLET_ACCESS.to_string(), rel(cells))]);
        Structure::from_indexed(ids, BTreeMap::new(), binary).expect("frames are well formed")
    })
}
