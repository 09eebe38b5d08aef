//! Equivalence checkers: bisimulation (plain, bounded, counting), k-pebble
//! games, potential isomorphism and guarded bisimulation for the binary
//! guarded fragment. Every game is solved as a greatest fixpoint over an
//! explicitly enumerated set of positions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::structures::{isomorphic, Pair, PointedStructure, Structure, ACCESS};

/// A finite injective map between the domains of two structures, stored as
/// pairs sorted by their first component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PartialMap(Vec<Pair>);

impl PartialMap {
    /// Builds a map from pairs; `None` unless the pairs form an injective
    /// function.
    pub fn new(pairs: impl IntoIterator<Item = Pair>) -> Option<Self> {
        let set: BTreeSet<Pair> = pairs.into_iter().collect();
        let dom: BTreeSet<usize> = set.iter().map(|p| p.0).collect();
        let ran: BTreeSet<usize> = set.iter().map(|p| p.1).collect();
        (dom.len() == set.len() && ran.len() == set.len()).then(|| PartialMap(set.into_iter().collect()))
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, a: usize) -> Option<usize> {
        self.0.iter().find(|p| p.0 == a).map(|p| p.1)
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.0.iter().map(|p| p.0).collect()
    }

    pub fn range(&self) -> BTreeSet<usize> {
        self.0.iter().map(|p| p.1).collect()
    }

    /// The map with the pair `(a, b)` added.
    fn extended(&self, a: usize, b: usize) -> PartialMap {
        let mut pairs = self.0.clone();
        let at = pairs.partition_point(|p| p.0 < a);
        pairs.insert(at, (a, b));
        PartialMap(pairs)
    }

    /// Whether the map preserves and reflects every unary and binary fact
    /// of either structure.
    pub fn is_partial_iso(&self, m: &Structure, n: &Structure) -> bool {
        let names = Names::of(m, n);
        self.0.iter().all(|&(a, b)| pair_compatible(&names, m, n, a, b))
            && self.0.iter().all(|&(a, b)| self.0.iter().all(|&(c, d)| edges_compatible(&names, m, n, (a, b), (c, d))))
    }

    pub fn to_json(&self, m: &Structure, n: &Structure) -> Value {
        Value::Array(self.0.iter().map(|&(a, b)| json!([m.id(a), n.id(b)])).collect())
    }
}

/// Supporting evidence returned with a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The largest relation between the two domains closed under the game
    /// conditions.
    Relation(Vec<Pair>),
    /// The surviving family of positions.
    Family(Vec<PartialMap>),
    /// Number of rounds after which the spoiler wins.
    Level(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameResult {
    pub equivalent: bool,
    pub witness: Option<Witness>,
    /// Remarks on how the instance was read, e.g. nodes excluded from the
    /// guarded sets.
    pub notes: Vec<String>,
}

impl GameResult {
    fn new(equivalent: bool, witness: Option<Witness>) -> Self {
        GameResult { equivalent, witness, notes: Vec::new() }
    }

    /// JSON rendering of the witness with node ids.
    pub fn witness_json(&self, m: &Structure, n: &Structure) -> Value {
        let pair = |&(a, b): &Pair| json!([m.id(a), n.id(b)]);
        match &self.witness {
            None => Value::Null,
            Some(Witness::Relation(r)) => json!({ "relation": r.iter().map(pair).collect::<Vec<_>>() }),
            Some(Witness::Family(f)) => json!({ "family": f.iter().map(|p| p.to_json(m, n)).collect::<Vec<_>>() }),
            Some(Witness::Level(k)) => json!({ "level": k }),
        }
    }
}

struct Names {
    unary: Vec<String>,
    binary: Vec<String>,
}

impl Names {
    fn of(m: &Structure, n: &Structure) -> Names {
        let unary: BTreeSet<&str> = m.unary_names().chain(n.unary_names()).collect();
        let binary: BTreeSet<&str> = m.binary_names().chain(n.binary_names()).collect();
        Names {
            unary: unary.into_iter().map(String::from).collect(),
            binary: binary.into_iter().map(String::from).collect(),
        }
    }
}

fn atoms_agree(names: &Names, m: &Structure, n: &Structure, a: usize, b: usize) -> bool {
    names.unary.iter().all(|p| m.holds(p, a) == n.holds(p, b))
}

fn pair_compatible(names: &Names, m: &Structure, n: &Structure, a: usize, b: usize) -> bool {
    atoms_agree(names, m, n, a, b) && names.binary.iter().all(|r| m.related(r, a, a) == n.related(r, b, b))
}

fn edges_compatible(names: &Names, m: &Structure, n: &Structure, (a, b): Pair, (c, d): Pair) -> bool {
    names.binary.iter().all(|r| m.related(r, a, c) == n.related(r, b, d) && m.related(r, c, a) == n.related(r, d, b))
}

fn two_points(m: &PointedStructure, n: &PointedStructure, op: &str) -> Result<(usize, usize)> {
    Ok((m.require_single_point(op)?, n.require_single_point(op)?))
}

/// One zig/zag sweep: keeps the pairs of `z` whose successors can be
/// matched inside `z` in both directions.
fn refine(m: &Structure, n: &Structure, z: &[bool]) -> Vec<bool> {
    let nn = n.len();
    let mut out = z.to_vec();
    for a in 0..m.len() {
        for b in 0..nn {
            if !z[a * nn + b] {
                continue;
            }
            let (sa, sb) = (m.successors(ACCESS, a), n.successors(ACCESS, b));
            let zig = sa.iter().all(|&a2| sb.iter().any(|&b2| z[a2 * nn + b2]));
            let zag = sb.iter().all(|&b2| sa.iter().any(|&a2| z[a2 * nn + b2]));
            out[a * nn + b] = zig && zag;
        }
    }
    out
}

fn harmony(m: &Structure, n: &Structure) -> Vec<bool> {
    let names = Names::of(m, n);
    let nn = n.len();
    (0..m.len() * nn).map(|i| atoms_agree(&names, m, n, i / nn, i % nn)).collect()
}

fn relation_of(z: &[bool], nn: usize) -> Vec<Pair> {
    z.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (i / nn, i % nn)).collect()
}

/// Bisimilarity of two pointed Kripke models over the relation `R`.
pub fn bisimilar(m: &PointedStructure, n: &PointedStructure) -> Result<GameResult> {
    let (w, v) = two_points(m, n, "bisimulation")?;
    let (ms, ns) = (&m.structure, &n.structure);
    let mut z = harmony(ms, ns);
    loop {
        let next = refine(ms, ns, &z);
        if next == z {
            break;
        }
        z = next;
    }
    let nn = ns.len();
    Ok(GameResult::new(z[w * nn + v], Some(Witness::Relation(relation_of(&z, nn)))))
}

/// Whether the duplicator survives `k` rounds of the bisimulation game.
/// When not, the witness is the round at which the spoiler wins.
pub fn bisimilar_depth(m: &PointedStructure, n: &PointedStructure, k: usize) -> Result<GameResult> {
    let (w, v) = two_points(m, n, "bounded bisimulation")?;
    let (ms, ns) = (&m.structure, &n.structure);
    let nn = ns.len();
    let mut z = harmony(ms, ns);
    for level in 0..=k {
        if !z[w * nn + v] {
            return Ok(GameResult::new(false, Some(Witness::Level(level))));
        }
        if level < k {
            let next = refine(ms, ns, &z);
            if next == z {
                break;
            }
            z = next;
        }
    }
    Ok(GameResult::new(true, Some(Witness::Relation(relation_of(&z, nn)))))
}

/// Graded bisimilarity: joint partition refinement in which related nodes
/// must have equally many successors in every block.
pub fn counting_bisimilar(m: &PointedStructure, n: &PointedStructure) -> Result<GameResult> {
    let (w, v) = two_points(m, n, "counting bisimulation")?;
    let (ms, ns) = (&m.structure, &n.structure);
    let off = ms.len();
    let total = off + ns.len();
    let names = Names::of(ms, ns);
    let node = |i: usize| if i < off { (ms, i) } else { (ns, i - off) };
    let succ = |i: usize| -> Vec<usize> {
        if i < off {
            ms.successors(ACCESS, i).to_vec()
        } else {
            ns.successors(ACCESS, i - off).iter().map(|s| s + off).collect()
        }
    };
    let succs: Vec<Vec<usize>> = (0..total).map(succ).collect();
    let initial: Vec<Vec<bool>> = (0..total)
        .map(|i| {
            let (s, x) = node(i);
            names.unary.iter().map(|p| s.holds(p, x)).collect()
        })
        .collect();
    let mut class = canonical_classes(&initial);
    let mut count = class.iter().max().map_or(0, |c| c + 1);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..total)
            .map(|i| {
                let mut s: Vec<usize> = succs[i].iter().map(|&j| class[j]).collect();
                s.sort_unstable();
                (class[i], s)
            })
            .collect();
        let next = canonical_classes(&sigs);
        let next_count = next.iter().max().map_or(0, |c| c + 1);
        class = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }
    let relation = (0..off)
        .flat_map(|a| (0..ns.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| class[a] == class[b + off])
        .collect();
    Ok(GameResult::new(class[w] == class[v + off], Some(Witness::Relation(relation))))
}

fn canonical_classes<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let distinct: BTreeSet<&T> = sigs.iter().collect();
    let ids: BTreeMap<&T, usize> = distinct.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    sigs.iter().map(|s| ids[s]).collect()
}

/// Whether a non-empty k-pebble potential isomorphism exists between `m`
/// and `n`.
pub fn pebble_equiv(m: &Structure, n: &Structure, k: usize) -> Result<GameResult> {
    if k == 0 {
        return Err(Error::precondition("the pebble game needs at least one pebble"));
    }
    let names = Names::of(m, n);
    let mut positions: Vec<PartialMap> = vec![PartialMap::default()];
    let mut frontier = 0;
    while frontier < positions.len() {
        let f = positions[frontier].clone();
        frontier += 1;
        if f.len() >= k {
            continue;
        }
        let start = f.0.last().map_or(0, |p| p.0 + 1);
        let range = f.range();
        for a in start..m.len() {
            for b in (0..n.len()).filter(|b| !range.contains(b)) {
                if pair_compatible(&names, m, n, a, b)
                    && f.0.iter().all(|&p| edges_compatible(&names, m, n, p, (a, b)))
                {
                    positions.push(f.extended(a, b));
                }
            }
        }
    }
    let index: HashMap<PartialMap, usize> = positions.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut alive = vec![true; positions.len()];
    let is_alive = |alive: &[bool], p: &PartialMap| index.get(p).is_some_and(|&i| alive[i]);
    loop {
        let mut changed = false;
        for i in 0..positions.len() {
            if !alive[i] {
                continue;
            }
            let f = &positions[i];
            let restricted_dead = (0..f.len()).any(|j| {
                let mut g = f.clone();
                g.0.remove(j);
                !is_alive(&alive, &g)
            });
            let game_lost = f.len() < k && {
                let (dom, ran) = (f.domain(), f.range());
                let forth = (0..m.len())
                    .filter(|a| !dom.contains(a))
                    .all(|a| (0..n.len()).any(|b| !ran.contains(&b) && is_alive(&alive, &f.extended(a, b))));
                let back = forth
                    && (0..n.len())
                        .filter(|b| !ran.contains(b))
                        .all(|b| (0..m.len()).any(|a| !dom.contains(&a) && is_alive(&alive, &f.extended(a, b))));
                !(forth && back)
            };
            if restricted_dead || game_lost {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let family: Vec<PartialMap> = positions.into_iter().zip(&alive).filter(|(_, &a)| a).map(|(p, _)| p).collect();
    Ok(GameResult::new(alive[0], Some(Witness::Family(family))))
}

/// Potential isomorphism of finite structures, which is isomorphism.
pub fn potential_iso(m: &Structure, n: &Structure) -> bool {
    isomorphic(m, n)
}

/// Guarded subsets of size one or two: pairs covered by a binary fact, and
/// singletons occurring in a binary fact or among `roots`.
fn guarded_sets(m: &Structure, roots: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut in_fact = vec![false; m.len()];
    let mut pairs = BTreeSet::new();
    for set in m.binary_map().values() {
        for &(a, b) in set {
            in_fact[a] = true;
            in_fact[b] = true;
            if a != b {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut isolated = Vec::new();
    for (v, &fact) in in_fact.iter().enumerate() {
        if fact || roots.contains(&v) {
            sets.push(vec![v]);
        } else {
            isolated.push(v);
        }
    }
    sets.extend(pairs.into_iter().map(|(a, b)| vec![a, b]));
    (sets, isolated)
}

/// Guarded bisimilarity of two structures rooted at tuples of one or two
/// elements.
pub fn gf_bin_bisimilar(m: &PointedStructure, n: &PointedStructure) -> Result<GameResult> {
    let (s, t) = (&m.points, &n.points);
    if s.len() != t.len() || s.is_empty() || s.len() > 2 {
        return Err(Error::precondition(format!(
            "guarded bisimulation needs root tuples of equal length 1 or 2, got {} and {}",
            s.len(),
            t.len()
        )));
    }
    let (ms, ns) = (&m.structure, &n.structure);
    let (m_sets, m_isolated) = guarded_sets(ms, s);
    let (n_sets, n_isolated) = guarded_sets(ns, t);
    let mut notes = Vec::new();
    for (label, st, iso) in [("left", ms, &m_isolated), ("right", ns, &n_isolated)] {
        if !iso.is_empty() {
            let ids: Vec<&str> = iso.iter().map(|&v| st.id(v)).collect();
            notes.push(format!("{label}: nodes outside every binary fact are not guarded: {}", ids.join(", ")));
        }
    }
    let root = PartialMap::new(s.iter().copied().zip(t.iter().copied()));
    let root = match root {
        Some(r) if r.is_partial_iso(ms, ns) && s.iter().zip(t).all(|(a, b)| r.get(*a) == Some(*b)) => r,
        _ => {
            notes.push("the root tuples do not induce a partial isomorphism".into());
            return Ok(GameResult { equivalent: false, witness: None, notes });
        }
    };

    // Positions: partial isomorphisms between guarded sets, plus the root map.
    let mut positions: Vec<PartialMap> = Vec::new();
    for x in &m_sets {
        for y in n_sets.iter().filter(|y| y.len() == x.len()) {
            let candidates: Vec<PartialMap> = if x.len() == 1 {
                vec![PartialMap(vec![(x[0], y[0])])]
            } else {
                vec![PartialMap(vec![(x[0], y[0]), (x[1], y[1])]), PartialMap(vec![(x[0], y[1]), (x[1], y[0])])]
            };
            positions.extend(candidates.into_iter().filter(|f| f.is_partial_iso(ms, ns)));
        }
    }
    let root_index = match positions.iter().position(|p| *p == root) {
        Some(i) => i,
        None => {
            positions.push(root.clone());
            positions.len() - 1
        }
    };
    let by_domain = group_by(&positions, |p| p.domain().into_iter().collect());
    let by_range = group_by(&positions, |p| p.range().into_iter().collect());
    let mut alive = vec![true; positions.len()];
    loop {
        let mut changed = false;
        for i in 0..positions.len() {
            if !alive[i] {
                continue;
            }
            let f = &positions[i];
            let dom = f.domain();
            let ran = f.range();
            let forth = m_sets.iter().filter(|z| z.iter().any(|a| dom.contains(a))).all(|z| {
                by_domain.get(z).is_some_and(|cands| {
                    cands.iter().any(|&j| alive[j] && z.iter().all(|a| f.get(*a).is_none_or(|b| positions[j].get(*a) == Some(b))))
                })
            });
            let back = forth
                && n_sets.iter().filter(|w| w.iter().any(|b| ran.contains(b))).all(|w| {
                    by_range.get(w).is_some_and(|cands| {
                        cands.iter().any(|&j| {
                            alive[j]
                                && f.0.iter().filter(|p| w.contains(&p.1)).all(|p| positions[j].get(p.0) == Some(p.1))
                        })
                    })
                });
            if !(forth && back) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let equivalent = alive[root_index];
    let family = positions.into_iter().zip(&alive).filter(|(_, &a)| a).map(|(p, _)| p).collect();
    Ok(GameResult { equivalent, witness: Some(Witness::Family(family)), notes })
}

fn group_by(positions: &[PartialMap], key: impl Fn(&PartialMap) -> Vec<usize>) -> HashMap<Vec<usize>, Vec<usize>> {
    let mut out: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        out.entry(key(p)).or_default().push(i);
    }
    out
}
