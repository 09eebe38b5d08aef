//! Finite relational structures over unary and binary predicates.
//!
//! A [`Structure`] doubles as a Kripke model (accessibility relation named
//! [`ACCESS`]) and as a bimodal quasi-model (second relation named
//! [`BULLET_ACCESS`]). Relation names that a structure does not mention
//! denote the empty relation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the Kripke accessibility relation.
pub const ACCESS: &str = "R";
/// Name of the second accessibility relation of a quasi-model.
pub const BULLET_ACCESS: &str = "Rb";

/// A pair of node indices.
pub type Pair = (usize, usize);

/// A finite structure. Nodes are addressed by index into the domain; the
/// original string ids are kept for I/O.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    unary: BTreeMap<String, BTreeSet<usize>>,
    binary: BTreeMap<String, BTreeSet<Pair>>,
    succ: BTreeMap<String, Vec<Vec<usize>>>,
}

/// A structure together with a non-empty tuple of distinguished nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedStructure {
    pub structure: Structure,
    pub points: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    domain: Vec<String>,
    #[serde(default)]
    unary: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    binary: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<String>>,
}

impl Structure {
    /// Builds a structure from index-based interpretations.
    pub fn from_indexed(
        ids: Vec<String>,
        unary: BTreeMap<String, BTreeSet<usize>>,
        binary: BTreeMap<String, BTreeSet<Pair>>,
    ) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if id.is_empty() {
                return Err(Error::EmptyId);
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let n = ids.len();
        for name in unary.keys() {
            if binary.contains_key(name) {
                return Err(Error::ArityClash(name.clone()));
            }
        }
        for set in unary.values() {
            if let Some(&bad) = set.iter().find(|&&v| v >= n) {
                return Err(Error::UndeclaredId(format!("#{bad}")));
            }
        }
        for set in binary.values() {
            if let Some(&(a, b)) = set.iter().find(|&&(a, b)| a >= n || b >= n) {
                return Err(Error::UndeclaredId(format!("#{}", a.max(b))));
            }
        }
        let succ = binary
            .iter()
            .map(|(name, pairs)| {
                let mut lists = vec![Vec::new(); n];
                for &(a, b) in pairs {
                    lists[a].push(b);
                }
                (name.clone(), lists)
            })
            .collect();
        Ok(Structure { ids, index, unary, binary, succ })
    }

    /// Builds a structure from id-based interpretations.
    pub fn new(
        domain: Vec<String>,
        unary: BTreeMap<String, Vec<String>>,
        binary: BTreeMap<String, Vec<(String, String)>>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, id) in domain.iter().enumerate() {
            if index.insert(id.as_str(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| Error::UndeclaredId(id.to_string()));
        let mut un = BTreeMap::new();
        for (name, members) in &unary {
            let set = members.iter().map(|m| lookup(m)).collect::<Result<BTreeSet<_>>>()?;
            un.insert(name.clone(), set);
        }
        let mut bin = BTreeMap::new();
        for (name, pairs) in &binary {
            let set = pairs
                .iter()
                .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
                .collect::<Result<BTreeSet<_>>>()?;
            bin.insert(name.clone(), set);
        }
        Structure::from_indexed(domain, un, bin)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(Structure::parse_document(text)?.0)
    }

    /// Parses a document that may carry a `points` key, resolving the
    /// points to indices.
    pub fn from_json_with_points(text: &str) -> Result<(Self, Option<Vec<usize>>)> {
        let (s, points) = Structure::parse_document(text)?;
        let points = points.map(|ps| ps.iter().map(|p| s.node(p)).collect::<Result<Vec<_>>>()).transpose()?;
        Ok((s, points))
    }

    fn parse_document(text: &str) -> Result<(Self, Option<Vec<String>>)> {
        let doc: Document = serde_json::from_str(text)?;
        let binary = doc
            .binary
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().map(|[a, b]| (a, b)).collect()))
            .collect();
        let s = Structure::new(doc.domain, doc.unary, binary)?;
        Ok((s, doc.points))
    }

    fn document(&self, points: Option<&[usize]>) -> Document {
        Document {
            domain: self.ids.clone(),
            unary: self
                .unary
                .iter()
                .map(|(k, set)| (k.clone(), set.iter().map(|&v| self.ids[v].clone()).collect()))
                .collect(),
            binary: self
                .binary
                .iter()
                .map(|(k, set)| {
                    let pairs = set.iter().map(|&(a, b)| [self.ids[a].clone(), self.ids[b].clone()]).collect();
                    (k.clone(), pairs)
                })
                .collect(),
            points: points.map(|ps| ps.iter().map(|&p| self.ids[p].clone()).collect()),
        }
    }

    /// Serializes in the canonical JSON layout: members and pairs in domain order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document(None)).expect("structure documents always serialize")
    }

    /// The canonical JSON document as a value.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.document(None)).expect("structure documents always serialize")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UndeclaredId(id.to_string()))
    }

    pub fn unary_names(&self) -> impl Iterator<Item = &str> {
        self.unary.keys().map(String::as_str)
    }

    pub fn binary_names(&self) -> impl Iterator<Item = &str> {
        self.binary.keys().map(String::as_str)
    }

    pub fn unary_map(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.unary
    }

    pub fn binary_map(&self) -> &BTreeMap<String, BTreeSet<Pair>> {
        &self.binary
    }

    pub fn holds(&self, pred: &str, node: usize) -> bool {
        self.unary.get(pred).is_some_and(|s| s.contains(&node))
    }

    pub fn related(&self, rel: &str, a: usize, b: usize) -> bool {
        self.binary.get(rel).is_some_and(|s| s.contains(&(a, b)))
    }

    /// The extension of a unary predicate (empty when absent).
    pub fn extension(&self, pred: &str) -> BTreeSet<usize> {
        self.unary.get(pred).cloned().unwrap_or_default()
    }

    /// The pairs of a binary relation (empty when absent).
    pub fn pairs(&self, rel: &str) -> BTreeSet<Pair> {
        self.binary.get(rel).cloned().unwrap_or_default()
    }

    /// Successor lists of a binary relation, one per node.
    pub fn successor_lists(&self, rel: &str) -> Option<&[Vec<usize>]> {
        self.succ.get(rel).map(Vec::as_slice)
    }

    pub fn successors(&self, rel: &str, node: usize) -> &[usize] {
        match self.succ.get(rel) {
            Some(lists) => &lists[node],
            None => &[],
        }
    }

    /// True iff some binary fact contains both nodes (in either order).
    pub fn co_guarded(&self, a: usize, b: usize) -> bool {
        self.binary.values().any(|s| s.contains(&(a, b)) || s.contains(&(b, a)))
    }

    /// Adjacency of the Gaifman-style graph induced by all binary facts.
    pub fn guarded_neighbours(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.len()];
        for pairs in self.binary.values() {
            for &(a, b) in pairs {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj
    }

    /// Returns a copy with the extension of `pred` replaced.
    pub fn with_unary(&self, pred: &str, members: BTreeSet<usize>) -> Result<Structure> {
        let mut unary = self.unary.clone();
        unary.insert(pred.to_string(), members);
        Structure::from_indexed(self.ids.clone(), unary, self.binary.clone())
    }

    /// Returns a copy with the pairs of `rel` replaced.
    pub fn with_binary(&self, rel: &str, pairs: BTreeSet<Pair>) -> Result<Structure> {
        let mut binary = self.binary.clone();
        binary.insert(rel.to_string(), pairs);
        Structure::from_indexed(self.ids.clone(), self.unary.clone(), binary)
    }

    /// Induced substructure on the nodes for which `keep` is true, in domain
    /// order. Returns the substructure and the old-to-new index map. All
    /// predicate names are retained, even when their restriction is empty.
    pub fn induced(&self, keep: &[bool]) -> Result<(Structure, Vec<Option<usize>>)> {
        let mut remap = vec![None; self.len()];
        let mut ids = Vec::new();
        for (i, id) in self.ids.iter().enumerate() {
            if keep[i] {
                remap[i] = Some(ids.len());
                ids.push(id.clone());
            }
        }
        let unary = self
            .unary
            .iter()
            .map(|(k, set)| (k.clone(), set.iter().filter_map(|&v| remap[v]).collect()))
            .collect();
        let binary = self
            .binary
            .iter()
            .map(|(k, set)| {
                let pairs = set
                    .iter()
                    .filter_map(|&(a, b)| Some((remap[a]?, remap[b]?)))
                    .collect();
                (k.clone(), pairs)
            })
            .collect();
        Ok((Structure::from_indexed(ids, unary, binary)?, remap))
    }
}

impl PointedStructure {
    pub fn new(structure: Structure, points: Vec<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::precondition("a pointed structure needs at least one point"));
        }
        if let Some(&p) = points.iter().find(|&&p| p >= structure.len()) {
            return Err(Error::UndeclaredId(format!("#{p}")));
        }
        Ok(PointedStructure { structure, points })
    }

    /// Points the structure at the node with the given id.
    pub fn at(structure: Structure, id: &str) -> Result<Self> {
        let p = structure.node(id)?;
        PointedStructure::new(structure, vec![p])
    }

    pub fn with_ids(structure: Structure, ids: &[&str]) -> Result<Self> {
        let points = ids.iter().map(|id| structure.node(id)).collect::<Result<Vec<_>>>()?;
        PointedStructure::new(structure, points)
    }

    /// Parses a pointed document; the `points` key is required.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let (s, points) = Structure::parse_document(text)?;
        let points = points.ok_or_else(|| Error::precondition("pointed structure document lacks \"points\""))?;
        let idx = points.iter().map(|p| s.node(p)).collect::<Result<Vec<_>>>()?;
        PointedStructure::new(s, idx)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.structure.document(Some(&self.points)))
            .expect("structure documents always serialize")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.structure.document(Some(&self.points))).expect("structure documents always serialize")
    }

    /// The single point of a modally pointed structure.
    pub fn point(&self) -> usize {
        self.points[0]
    }

    pub fn point_id(&self) -> &str {
        self.structure.id(self.point())
    }

    pub(crate) fn require_single_point(&self, op: &str) -> Result<usize> {
        if self.points.len() != 1 {
            return Err(Error::precondition(format!("{op} needs exactly one point, got {}", self.points.len())));
        }
        Ok(self.points[0])
    }

    /// Restricts to the induced substructure on `keep`, which must contain every point.
    pub(crate) fn induced(&self, keep: &[bool]) -> Result<PointedStructure> {
        let (s, remap) = self.structure.induced(keep)?;
        let points = self
            .points
            .iter()
            .map(|&p| remap[p].ok_or_else(|| Error::Internal("point dropped from induced substructure".into())))
            .collect::<Result<Vec<_>>>()?;
        PointedStructure::new(s, points)
    }
}

/// Parses a structure document.
pub fn load_structure(bytes: &[u8]) -> Result<Structure> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::precondition(format!("document is not UTF-8: {e}")))?;
    Structure::from_json_str(text)
}

/// Breadth-first distances along `rel` from `root` (None = unreachable).
pub fn distances(m: &Structure, rel: &str, root: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; m.len()];
    dist[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in m.successors(rel, u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// The submodel generated by the point along [`ACCESS`].
pub fn generated_submodel(m: &PointedStructure) -> Result<PointedStructure> {
    let w = m.require_single_point("generated_submodel")?;
    let keep: Vec<bool> = distances(&m.structure, ACCESS, w).iter().map(Option::is_some).collect();
    m.induced(&keep)
}

/// The submodel of nodes reachable from the point in at most `k` steps.
pub fn cut_depth(m: &PointedStructure, k: usize) -> Result<PointedStructure> {
    let w = m.require_single_point("cut_depth")?;
    let keep: Vec<bool> = distances(&m.structure, ACCESS, w)
        .iter()
        .map(|d| d.is_some_and(|d| d <= k))
        .collect();
    m.induced(&keep)
}

/// The substructure induced by the extension of `pred`.
pub fn restrict(m: &Structure, pred: &str) -> Result<Structure> {
    let keep: Vec<bool> = (0..m.len()).map(|v| m.holds(pred, v)).collect();
    if !keep.iter().any(|&k| k) {
        return Err(Error::EmptyRestriction(pred.to_string()));
    }
    Ok(m.induced(&keep)?.0)
}

/// True iff [`ACCESS`] is a finite tree rooted at the point.
pub fn is_tree(m: &PointedStructure) -> bool {
    m.points.len() == 1 && tree_root(&m.structure) == Some(m.point())
}

/// The root of [`ACCESS`] when it forms a finite tree: a unique node without
/// predecessor from which everything is reachable, every other node having
/// exactly one predecessor.
pub fn tree_root(s: &Structure) -> Option<usize> {
    let mut indegree = vec![0usize; s.len()];
    for &(_, b) in s.binary.get(ACCESS).into_iter().flatten() {
        indegree[b] += 1;
    }
    let mut roots = (0..s.len()).filter(|&v| indegree[v] == 0);
    let root = roots.next()?;
    if roots.next().is_some() || indegree.iter().any(|&d| d > 1) {
        return None;
    }
    distances(s, ACCESS, root).iter().all(Option::is_some).then_some(root)
}

/// True iff the frame belongs to the quasi-model class: every [`BULLET_ACCESS`]
/// pair is an [`ACCESS`] pair whose target is [`ACCESS`]-reflexive.
pub fn is_frame_k(m: &Structure) -> bool {
    m.binary
        .get(BULLET_ACCESS)
        .into_iter()
        .flatten()
        .all(|&(w, v)| m.related(ACCESS, w, v) && m.related(ACCESS, v, v))
}

/// Isomorphism test by backtracking with degree-signature pruning. Intended
/// for small structures only.
pub fn isomorphic(m: &Structure, n: &Structure) -> bool {
    if m.len() != n.len() {
        return false;
    }
    let unary: BTreeSet<&str> = m.unary_names().chain(n.unary_names()).collect();
    let binary: BTreeSet<&str> = m.binary_names().chain(n.binary_names()).collect();
    for &p in &unary {
        if m.unary.get(p).map_or(0, BTreeSet::len) != n.unary.get(p).map_or(0, BTreeSet::len) {
            return false;
        }
    }
    for &r in &binary {
        if m.binary.get(r).map_or(0, BTreeSet::len) != n.binary.get(r).map_or(0, BTreeSet::len) {
            return false;
        }
    }
    let unary: Vec<&str> = unary.into_iter().collect();
    let binary: Vec<&str> = binary.into_iter().collect();
    let sig_m = signatures(m, &unary, &binary);
    let sig_n = signatures(n, &unary, &binary);
    let mut sorted_m = sig_m.clone();
    let mut sorted_n = sig_n.clone();
    sorted_m.sort();
    sorted_n.sort();
    if sorted_m != sorted_n {
        return false;
    }
    let mut image = vec![usize::MAX; m.len()];
    let mut used = vec![false; n.len()];
    extend_iso(m, n, &binary, &sig_m, &sig_n, 0, &mut image, &mut used)
}

fn signatures(s: &Structure, unary: &[&str], binary: &[&str]) -> Vec<Vec<usize>> {
    let mut sigs = vec![Vec::with_capacity(unary.len() + 3 * binary.len()); s.len()];
    for &p in unary {
        for (v, sig) in sigs.iter_mut().enumerate() {
            sig.push(usize::from(s.holds(p, v)));
        }
    }
    for &r in binary {
        let mut out = vec![0; s.len()];
        let mut inn = vec![0; s.len()];
        let mut lp = vec![0; s.len()];
        for &(a, b) in s.binary.get(r).into_iter().flatten() {
            out[a] += 1;
            inn[b] += 1;
            if a == b {
                lp[a] = 1;
            }
        }
        for (v, sig) in sigs.iter_mut().enumerate() {
            sig.extend([out[v], inn[v], lp[v]]);
        }
    }
    sigs
}

#[allow(clippy::too_many_arguments)]
fn extend_iso(
    m: &Structure,
    n: &Structure,
    binary: &[&str],
    sig_m: &[Vec<usize>],
    sig_n: &[Vec<usize>],
    next: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if next == m.len() {
        return true;
    }
    for cand in 0..n.len() {
        if used[cand] || sig_m[next] != sig_n[cand] {
            continue;
        }
        let consistent = (0..next).all(|prev| {
            let p = image[prev];
            binary.iter().all(|r| {
                m.related(r, next, prev) == n.related(r, cand, p) && m.related(r, prev, next) == n.related(r, p, cand)
            })
        });
        if !consistent {
            continue;
        }
        image[next] = cand;
        used[cand] = true;
        if extend_iso(m, n, binary, sig_m, sig_n, next + 1, image, used) {
            return true;
        }
        used[cand] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(json: &str) -> Structure {
        Structure::from_json_str(json).unwrap()
    }

    fn ids(m: &Structure) -> Vec<&str> {
        m.ids().iter().map(String::as_str).collect()
    }

    #[test]
    fn load_examples() {
        let one = load_structure(br#"{"domain":["w0"],"unary":{},"binary":{}}"#).unwrap();
        assert_eq!(one.len(), 1);
        let err = load_structure(br#"{"domain":["a"],"unary":{"p":["b"]},"binary":{}}"#).unwrap_err();
        assert!(matches!(err, Error::UndeclaredId(ref id) if id == "b"));
        let chain = load_structure(br#"{"domain":["a","b"],"unary":{"p":["a"]},"binary":{"R":[["a","b"]]}}"#).unwrap();
        assert!(chain.holds("p", 0) && !chain.holds("p", 1));
        assert!(chain.related("R", 0, 1));
    }

    #[test]
    fn load_rejects_bad_documents() {
        assert!(matches!(load_structure(b"{"), Err(Error::Json(_))));
        assert!(matches!(
            load_structure(br#"{"domain":["a"],"unary":{"p":[]},"binary":{"p":[]}}"#),
            Err(Error::ArityClash(_))
        ));
        assert!(matches!(load_structure(br#"{"domain":[],"unary":{},"binary":{}}"#), Err(Error::EmptyDomain)));
        assert!(matches!(load_structure(br#"{"domain":["a","a"]}"#), Err(Error::DuplicateId(_))));
        assert!(matches!(load_structure(br#"{"domain":[""]}"#), Err(Error::EmptyId)));
    }

    #[test]
    fn json_is_stable() {
        let text = r#"{"domain":["b","a"],"unary":{"p":["a","b"]},"binary":{"R":[["a","b"],["b","a"]]}}"#;
        let m = s(text);
        let again = s(&m.to_json());
        assert_eq!(m, again);
        assert_eq!(m.to_json(), again.to_json());
        // members are listed in domain order
        assert!(m.to_json().find("\"b\"").unwrap() < m.to_json().find("\"a\"").unwrap());
    }

    #[test]
    fn generated_submodel_examples() {
        let m = PointedStructure::at(s(r#"{"domain":["a","b"]}"#), "a").unwrap();
        assert_eq!(ids(&generated_submodel(&m).unwrap().structure), ["a"]);
        let cyc = PointedStructure::at(s(r#"{"domain":["a","b"],"binary":{"R":[["a","b"],["b","a"]]}}"#), "a").unwrap();
        assert_eq!(generated_submodel(&cyc).unwrap(), cyc);
        let chain =
            PointedStructure::at(s(r#"{"domain":["a","b","c"],"unary":{"p":["c"]},"binary":{"R":[["a","b"],["b","c"]]}}"#), "b")
                .unwrap();
        let g = generated_submodel(&chain).unwrap();
        assert_eq!(ids(&g.structure), ["b", "c"]);
        assert_eq!(g.point_id(), "b");
        assert!(g.structure.holds("p", 1));
        assert!(g.structure.related("R", 0, 1));
    }

    #[test]
    fn cut_depth_examples() {
        let chain = PointedStructure::at(s(r#"{"domain":["a","b","c"],"binary":{"R":[["a","b"],["b","c"]]}}"#), "a").unwrap();
        assert_eq!(ids(&cut_depth(&chain, 1).unwrap().structure), ["a", "b"]);
        let looped = PointedStructure::at(
            s(r#"{"domain":["a","b"],"unary":{"p":["a"]},"binary":{"R":[["a","a"],["a","b"]]}}"#),
            "a",
        )
        .unwrap();
        let zero = cut_depth(&looped, 0).unwrap();
        assert_eq!(ids(&zero.structure), ["a"]);
        assert!(zero.structure.holds("p", 0) && zero.structure.related("R", 0, 0));
        let cyc = PointedStructure::at(s(r#"{"domain":["a","b"],"binary":{"R":[["a","b"],["b","a"]]}}"#), "a").unwrap();
        assert_eq!(cut_depth(&cyc, 5).unwrap(), cyc);
    }

    #[test]
    fn restrict_examples() {
        let m = s(r#"{"domain":["a","b"],"unary":{"p":["a"]},"binary":{"R":[["a","b"]]}}"#);
        let r = restrict(&m, "p").unwrap();
        assert_eq!(ids(&r), ["a"]);
        assert!(r.pairs("R").is_empty());
        assert!(r.holds("p", 0));
        let all = s(r#"{"domain":["a","b"],"unary":{"p":["a","b"]},"binary":{"R":[["a","b"]]}}"#);
        assert_eq!(restrict(&all, "p").unwrap(), all);
        let three = s(r#"{"domain":["a","b","c"],"unary":{"p":["a","c"]},"binary":{"R":[["a","b"],["b","c"],["a","c"]]}}"#);
        let r = restrict(&three, "p").unwrap();
        assert_eq!(ids(&r), ["a", "c"]);
        assert_eq!(r.pairs("R"), BTreeSet::from([(0, 1)]));
        assert!(matches!(restrict(&three, "q"), Err(Error::EmptyRestriction(_))));
    }

    #[test]
    fn tree_examples() {
        let t = |json: &str| is_tree(&PointedStructure::at(s(json), "a").unwrap());
        assert!(t(r#"{"domain":["a","b","c"],"binary":{"R":[["a","b"],["b","c"]]}}"#));
        assert!(!t(r#"{"domain":["a","b"],"binary":{"R":[["a","b"],["b","a"]]}}"#));
        assert!(!t(r#"{"domain":["a","b","c"],"binary":{"R":[["a","b"],["a","c"],["b","c"]]}}"#));
        assert!(!t(r#"{"domain":["a","b"]}"#));
        assert!(t(r#"{"domain":["a"]}"#));
        assert!(!t(r#"{"domain":["a"],"binary":{"R":[["a","a"]]}}"#));
    }

    #[test]
    fn frame_k_examples() {
        assert!(is_frame_k(&s(r#"{"domain":["a","b"],"binary":{"R":[["a","b"],["b","b"]],"Rb":[["a","b"]]}}"#)));
        assert!(!is_frame_k(&s(r#"{"domain":["a","b"],"binary":{"R":[["a","b"]],"Rb":[["a","b"]]}}"#)));
        assert!(is_frame_k(&s(r#"{"domain":["a","b"],"binary":{"R":[["a","b"]]}}"#)));
    }

    #[test]
    fn isomorphism_examples() {
        let m = s(r#"{"domain":["a","b","c"],"unary":{"p":["b"]},"binary":{"R":[["a","b"],["b","c"],["c","c"]]}}"#);
        assert!(isomorphic(&m, &m));
        assert!(!isomorphic(&s(r#"{"domain":["a"],"unary":{"p":["a"]}}"#), &s(r#"{"domain":["a"]}"#)));
        assert!(isomorphic(
            &s(r#"{"domain":["a","b"],"binary":{"R":[["a","b"]]}}"#),
            &s(r#"{"domain":["c","d"],"binary":{"R":[["c","d"]]}}"#)
        ));
        // same degree signatures, different shape: a 6-cycle vs two 3-cycles
        let six = s(r#"{"domain":["0","1","2","3","4","5"],"binary":{"R":[["0","1"],["1","2"],["2","3"],["3","4"],["4","5"],["5","0"]]}}"#);
        let two = s(r#"{"domain":["0","1","2","3","4","5"],"binary":{"R":[["0","1"],["1","2"],["2","0"],["3","4"],["4","5"],["5","3"]]}}"#);
        assert!(!isomorphic(&six, &two));
        // an explicitly empty name equals an absent one
        assert!(isomorphic(&s(r#"{"domain":["a"],"unary":{"q":[]}}"#), &s(r#"{"domain":["a"]}"#)));
    }
}
