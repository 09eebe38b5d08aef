//! Property suites that replay the invariants of the workbench on seeded or
//! exhaustive corpora. Each suite reports every failing case with enough
//! data to reproduce it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::decision::{bounded_model_search, frame_axioms_valid_on_k, sat_bullet};
use crate::equivalence::{bisimilar, pebble_equiv};
use crate::error::{Error, Result};
use crate::generate::{all_bimodal_frames, all_trees, ModalShape, Sampler};
use crate::semantics::{eval_fo, eval_modal, eval_ra_ids, Assignment, ModalChecker, SemanticsMode};
use crate::structures::{is_frame_k, is_tree, isomorphic, restrict, PointedStructure, Structure, ACCESS};
use crate::syntax::{parse_modal, RaTerm, Var, Vocabulary};
use crate::transforms::{cut_guarded, gf_unravel_bin_paths, gml_char_formula, guarded_dist, ra_relativize, ra_to_fo3, unravel};

/// The available suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    UnravelInvariance,
    BisimInvariance,
    CharFormula,
    RaRelativize,
    Ra2fo,
    DistanceDepth,
    GfUnravel,
    ReductionEquisat,
    AxiomsK,
    PebbleVsIso,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::UnravelInvariance,
        Suite::BisimInvariance,
        Suite::CharFormula,
        Suite::RaRelativize,
        Suite::Ra2fo,
        Suite::DistanceDepth,
        Suite::GfUnravel,
        Suite::ReductionEquisat,
        Suite::AxiomsK,
        Suite::PebbleVsIso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::UnravelInvariance => "unravel-invariance",
            Suite::BisimInvariance => "bisim-invariance",
            Suite::CharFormula => "char-formula",
            Suite::RaRelativize => "ra-relativize",
            Suite::Ra2fo => "ra2fo",
            Suite::DistanceDepth => "distance-depth",
            Suite::GfUnravel => "gf-unravel",
            Suite::ReductionEquisat => "reduction-equisat",
            Suite::AxiomsK => "axioms-K",
            Suite::PebbleVsIso => "pebble-vs-iso",
        }
    }

    /// Number of seeded cases when none is requested. Exhaustive suites
    /// ignore the case count.
    pub fn default_cases(self) -> usize {
        match self {
            Suite::RaRelativize | Suite::Ra2fo => 300,
            Suite::ReductionEquisat => 150,
            Suite::GfUnravel | Suite::PebbleVsIso => 100,
            _ => 200,
        }
    }

    /// Whether the suite draws its structures from a corpus when one is
    /// supplied.
    pub fn uses_corpus(self) -> bool {
        matches!(
            self,
            Suite::UnravelInvariance | Suite::RaRelativize | Suite::Ra2fo | Suite::DistanceDepth | Suite::GfUnravel
        )
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// One failing case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub index: u64,
    pub seed: u64,
    pub input: Value,
    pub expected: Value,
    pub got: Value,
}

/// Outcome of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} cases, {} passed, {} failed ({} ms)",
            self.suite,
            self.cases,
            self.cases.saturating_sub(self.failures.len()),
            self.failures.len(),
            self.elapsed_ms
        )
    }
}

/// Parameters shared by all suites.
#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub seed: u64,
    pub cases: Option<usize>,
    /// Structures to use instead of generated ones, for the suites that
    /// take a corpus. A structure without points is pointed at its first
    /// node.
    pub corpus: Option<Vec<PointedStructure>>,
}

/// Runs one suite.
pub fn run_suite(suite: Suite, opts: &CheckOptions) -> Result<CheckReport> {
    if opts.corpus.as_ref().is_some_and(Vec::is_empty) {
        return Err(Error::precondition("the corpus contains no structures"));
    }
    let start = Instant::now();
    let mut run = Run { opts, cases: 0, failures: Vec::new() };
    let n = opts.cases.unwrap_or_else(|| suite.default_cases()) as u64;
    match suite {
        Suite::UnravelInvariance => (0..n).try_for_each(|i| run.unravel_invariance(i))?,
        Suite::BisimInvariance => {
            (0..n).try_for_each(|i| run.bisim_invariance(i))?;
            run.bullet_counterexample(n)?;
        }
        Suite::CharFormula => run.char_formula()?,
        Suite::RaRelativize => (0..n).try_for_each(|i| run.ra_relativize(i))?,
        Suite::Ra2fo => (0..n).try_for_each(|i| run.ra2fo(i))?,
        Suite::DistanceDepth => (0..n).try_for_each(|i| run.distance_depth(i))?,
        Suite::GfUnravel => (0..n).try_for_each(|i| run.gf_unravel(i))?,
        Suite::ReductionEquisat => (0..n).try_for_each(|i| run.reduction_equisat(i))?,
        Suite::AxiomsK => run.axioms_k()?,
        Suite::PebbleVsIso => {
            (0..n).try_for_each(|i| run.pebble_vs_iso(i))?;
            run.linear_orders(n)?;
        }
    }
    Ok(CheckReport {
        suite: suite.name().to_string(),
        cases: run.cases,
        failures: run.failures,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

const LETTERS: [&str; 3] = ["p", "q", "r"];
const FO_LETTERS: [&str; 2] = ["P", "Q"];
const RELS: [&str; 2] = ["R", "S"];

struct Run<'a> {
    opts: &'a CheckOptions,
    cases: usize,
    failures: Vec<Failure>,
}

impl Run<'_> {
    fn sampler(&self, index: u64) -> Sampler {
        Sampler::new(self.opts.seed, index)
    }

    fn record(&mut self, index: u64, ok: bool, input: impl FnOnce() -> Value, expected: Value, got: Value) {
        self.cases += 1;
        if !ok {
            self.failures.push(Failure { index, seed: self.opts.seed, input: input(), expected, got });
        }
    }

    fn corpus_case(&self, index: u64) -> Option<PointedStructure> {
        let corpus = self.opts.corpus.as_ref()?;
        Some(corpus[index as usize % corpus.len()].clone())
    }

    fn unravel_invariance(&mut self, i: u64) -> Result<()> {
        let mut g = self.sampler(i);
        let m = match self.corpus_case(i) {
            Some(m) => PointedStructure::new(m.structure, vec![m.points[0]])?,
            None => {
                let density = g.rng().gen_range(0.1..0.45);
                g.pointed(1..=8, &LETTERS, &[ACCESS], density)
            }
        };
        let f = g.modal(&LETTERS, ModalShape::graded(3, 3));
        let before = eval_modal(&m, &f, SemanticsMode::Intended)?;
        let u = unravel(&m, f.depth())?;
        let after = eval_modal(&u, &f, SemanticsMode::Intended)?;
        let tree = is_tree(&u);
        let input = || json!({ "structure": m.to_json_value(), "formula": f.to_string() });
        self.record(i, before == after && tree, input, json!({ "value": before, "tree": true }), json!({ "value": after, "tree": tree }));
        Ok(())
    }

    fn bisim_invariance(&mut self, i: u64) -> Result<()> {
        let mut g = self.sampler(i);
        let density = g.rng().gen_range(0.15..0.5);
        let (m, n) = g.bisimilar_pair(1..=6, &LETTERS[..2], density);
        let related = bisimilar(&m, &n)?.equivalent;
        for _ in 0..5 {
            let f = g.modal(&LETTERS[..2], ModalShape::basic(3));
            let left = eval_modal(&m, &f, SemanticsMode::Intended)?;
            let right = eval_modal(&n, &f, SemanticsMode::Intended)?;
            let input = || json!({ "left": m.to_json_value(), "right": n.to_json_value(), "formula": f.to_string() });
            self.record(i, related && left == right, input, json!({ "bisimilar": true, "value": left }), json!({ "bisimilar": related, "value": right }));
        }
        Ok(())
    }

    /// Two bisimilar K-structures that `•p` tells apart in quasi mode.
    fn bullet_counterexample(&mut self, index: u64) -> Result<()> {
        let doc = |rb: &str| {
            format!(r#"{{"domain":["a","b"],"unary":{{"p":["b"]}},"binary":{{"R":[["a","b"],["b","b"]],"Rb":[{rb}]}},"points":["a"]}}"#)
        };
        let m = PointedStructure::from_json_str(&doc(r#"["a","b"]"#))?;
        let n = PointedStructure::from_json_str(&doc(""))?;
        let f = parse_modal("*p")?;
        let related = bisimilar(&m, &n)?.equivalent;
        let left = eval_modal(&m, &f, SemanticsMode::Quasi)?;
        let right = eval_modal(&n, &f, SemanticsMode::Quasi)?;
        let input = || json!({ "left": m.to_json_value(), "right": n.to_json_value(), "formula": f.to_string() });
        self.record(index, related && left != right, input, json!({ "bisimilar": true, "differ": true }), json!({ "bisimilar": related, "differ": left != right }));
        Ok(())
    }

    fn char_formula(&mut self) -> Result<()> {
        let letters = ["p", "q"];
        let vocab = Vocabulary::unary(letters);
        let trees = all_trees(5, &letters);
        let keys: Vec<(usize, Vec<usize>)> = trees
            .iter()
            .map(|t| (t.structure.len(), letters.iter().map(|l| t.structure.extension(l).len()).collect()))
            .collect();
        let mut index = 0u64;
        for (i, t) in trees.iter().enumerate() {
            let psi = gml_char_formula(t, &vocab)?;
            let checker = ModalChecker::new(&psi, SemanticsMode::Intended)?;
            for (j, u) in trees.iter().enumerate() {
                let got = checker.eval(u)?;
                // Equal sizes and letter counts are necessary for an
                // isomorphism; the full test runs only when they match.
                let expected = keys[i] == keys[j] && isomorphic(&t.structure, &u.structure);
                let input = || json!({ "tree": t.to_json_value(), "candidate": u.to_json_value(), "formula": psi.to_string() });
                self.record(index, got == expected, input, json!(expected), json!(got));
                index += 1;
            }
        }
        Ok(())
    }

    /// A structure over `R` and `S` in which `R` is not empty, with a term.
    fn ra_case(&self, i: u64) -> (Structure, RaTerm) {
        let mut g = self.sampler(i);
        let s = match self.corpus_case(i) {
            Some(m) => m.structure,
            None => {
                let density = g.rng().gen_range(0.1..0.5);
                let s = g.structure(1..=5, &[], &RELS, 0.5, density);
                if s.pairs("R").is_empty() {
                    let (a, b) = (g.rng().gen_range(0..s.len()), g.rng().gen_range(0..s.len()));
                    s.with_binary("R", BTreeSet::from([(a, b)])).expect("pair inside the domain")
                } else {
                    s
                }
            }
        };
        let size = g.rng().gen_range(1..=6);
        (s, g.ra(&RELS, size))
    }

    fn ra_relativize(&mut self, i: u64) -> Result<()> {
        let (s, t) = self.ra_case(i);
        let dom: BTreeSet<usize> = s.pairs("R").into_iter().map(|(a, _)| a).collect();
        if dom.is_empty() {
            return Ok(());
        }
        let marker = fresh_unary(&s);
        let restricted = restrict(&s.with_unary(&marker, dom)?, &marker)?;
        let relativized = ra_relativize(&t, "R");
        let got = eval_ra_ids(&s, &relativized);
        let expected = eval_ra_ids(&restricted, &t);
        let input = || json!({ "structure": s.to_json_value(), "term": t.to_string(), "relativized": relativized.to_string() });
        self.record(i, got == expected, input, json!(expected), json!(got));
        Ok(())
    }

    fn ra2fo(&mut self, i: u64) -> Result<()> {
        let (s, t) = self.ra_case(i);
        let f = ra_to_fo3(&t);
        let expected: BTreeSet<(String, String)> = eval_ra_ids(&s, &t).into_iter().collect();
        let mut got = BTreeSet::new();
        for a in 0..s.len() {
            for b in 0..s.len() {
                if eval_fo(&s, &Assignment::new().with(Var::X, a).with(Var::Y, b), &f)? {
                    got.insert((s.id(a).to_string(), s.id(b).to_string()));
                }
            }
        }
        let audit = f.all_vars().len() <= 3 && f.free_vars().iter().all(|v| matches!(v, Var::X | Var::Y));
        let input = || json!({ "structure": s.to_json_value(), "term": t.to_string(), "translation": f.to_string() });
        self.record(i, got == expected && audit, input, json!({ "pairs": expected, "three_variables": true }), json!({ "pairs": got, "three_variables": audit }));
        Ok(())
    }

    /// A structure over `P`, `Q`, `R`, `S` pointed at one element or at
    /// both ends of an `R`-pair, with the matching free variables.
    fn guarded_case(&self, i: u64, g: &mut Sampler, nodes: std::ops::RangeInclusive<usize>) -> (PointedStructure, Vec<Var>) {
        let m = match self.corpus_case(i) {
            Some(m) => m,
            None => {
                let density = g.rng().gen_range(0.1..0.35);
                let s = g.structure(nodes, &FO_LETTERS, &RELS, 0.5, density);
                let pairs: Vec<_> = s.pairs("R").into_iter().filter(|(a, b)| a != b).collect();
                let points = if !pairs.is_empty() && g.rng().gen_bool(0.4) {
                    let (a, b) = pairs[g.rng().gen_range(0..pairs.len())];
                    vec![a, b]
                } else {
                    vec![g.rng().gen_range(0..s.len())]
                };
                PointedStructure::new(s, points).expect("points inside the domain")
            }
        };
        let m = if m.points.len() > 2 { PointedStructure::new(m.structure, m.points[..2].to_vec()).expect("prefix of the points") } else { m };
        let free = Var::ALL[..m.points.len()].to_vec();
        (m, free)
    }

    fn distance_depth(&mut self, i: u64) -> Result<()> {
        let mut g = self.sampler(i);
        let (m, free) = self.guarded_case(i, &mut g, 1..=7);
        let f = g.gf_bin(&FO_LETTERS, &RELS, &free, 2, 10);
        let cut = cut_guarded(&m, f.depth())?;
        let before = eval_fo(&m.structure, &Assignment::from_points(&m.points), &f)?;
        let after = eval_fo(&cut.structure, &Assignment::from_points(&cut.points), &f)?;
        let input = || json!({ "structure": m.to_json_value(), "formula": f.to_string(), "cut": cut.to_json_value() });
        self.record(i, before == after, input, json!(before), json!(after));
        Ok(())
    }

    fn gf_unravel(&mut self, i: u64) -> Result<()> {
        let mut g = self.sampler(i);
        let (m, free) = self.guarded_case(i, &mut g, 1..=6);
        let (u, paths) = gf_unravel_bin_paths(&m, 3)?;
        let mut wrong = Vec::new();
        for (obj, path) in paths.iter().enumerate() {
            let dist = guarded_dist(&u.structure, &u.points, obj);
            if dist != Some(path.len() - 1) {
                wrong.push(json!({ "object": u.structure.id(obj), "distance": dist, "path_length": path.len() }));
            }
        }
        let input = || json!({ "structure": m.to_json_value() });
        let ok = wrong.is_empty();
        self.record(i, ok, input, json!({ "distance_mismatches": [] }), json!({ "distance_mismatches": wrong }));
        for _ in 0..4 {
            let f = g.gf_bin(&FO_LETTERS, &RELS, &free, 2, 10);
            let before = eval_fo(&m.structure, &Assignment::from_points(&m.points), &f)?;
            let after = eval_fo(&u.structure, &Assignment::from_points(&u.points), &f)?;
            let input = || json!({ "structure": m.to_json_value(), "formula": f.to_string() });
            self.record(i, before == after, input, json!(before), json!(after));
        }
        Ok(())
    }

    fn reduction_equisat(&mut self, i: u64) -> Result<()> {
        let mut g = self.sampler(i);
        let f = g.modal(&LETTERS[..2], ModalShape::bullet(2));
        let bounded = bounded_model_search(&f, SemanticsMode::Quasi, 4)?;
        let reduced = sat_bullet(&f)?;
        let mut witnesses_ok = true;
        for w in [&bounded.witness, &reduced.witness].into_iter().flatten() {
            witnesses_ok &= is_frame_k(&w.structure) && eval_modal(w, &f, SemanticsMode::Quasi)?;
        }
        let consistent = !bounded.satisfiable || reduced.satisfiable;
        let input = || json!({ "formula": f.to_string() });
        self.record(
            i,
            consistent && witnesses_ok,
            input,
            json!({ "bounded": bounded.satisfiable, "reduction": bounded.satisfiable || reduced.satisfiable, "witnesses_verified": true }),
            json!({ "bounded": bounded.satisfiable, "reduction": reduced.satisfiable, "witnesses_verified": witnesses_ok }),
        );
        Ok(())
    }

    fn axioms_k(&mut self) -> Result<()> {
        let mut index = 0u64;
        for n in 1..=3 {
            for frame in all_bimodal_frames(n) {
                let expected = is_frame_k(&frame);
                let got = frame_axioms_valid_on_k(&frame, 3)?;
                let input = || json!({ "frame": frame.to_json_value() });
                self.record(index, got == expected, input, json!(expected), json!(got));
                index += 1;
            }
        }
        Ok(())
    }

    fn pebble_vs_iso(&mut self, i: u64) -> Result<()> {
        let mut g = self.sampler(i);
        let density = g.rng().gen_range(0.15..0.5);
        let m = g.structure(1..=6, &["p"], &[ACCESS], 0.5, density);
        let mut n = g.shuffled(&m);
        if g.rng().gen_bool(0.5) {
            let (a, b) = (g.rng().gen_range(0..n.len()), g.rng().gen_range(0..n.len()));
            let mut pairs = n.pairs(ACCESS);
            if !pairs.remove(&(a, b)) {
                pairs.insert((a, b));
            }
            n = n.with_binary(ACCESS, pairs)?;
        }
        let size = m.len();
        let verdicts = (1..=size).map(|k| Ok(pebble_equiv(&m, &n, k)?.equivalent)).collect::<Result<Vec<bool>>>()?;
        let antitone = verdicts.windows(2).all(|w| !w[1] || w[0]);
        let iso = isomorphic(&m, &n);
        let full = verdicts[size - 1];
        let input = || json!({ "left": m.to_json_value(), "right": n.to_json_value() });
        self.record(
            i,
            antitone && full == iso,
            input,
            json!({ "antitone": true, "pebble_at_domain_size": iso }),
            json!({ "antitone": antitone, "pebble_at_domain_size": full, "verdicts": verdicts }),
        );
        Ok(())
    }

    fn linear_orders(&mut self, index: u64) -> Result<()> {
        let order = |n: usize| {
            let ids = (0..n).map(|i| format!("e{i}")).collect();
            let lt = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            Structure::from_indexed(ids, Default::default(), [(ACCESS.to_string(), lt)].into()).expect("orders are well formed")
        };
        let (m, n) = (order(3), order(4));
        let got = pebble_equiv(&m, &n, 3)?.equivalent;
        let input = || json!({ "left": m.to_json_value(), "right": n.to_json_value(), "k": 3 });
        self.record(index, !got, input, json!(false), json!(got));
        Ok(())
    }
}

fn fresh_unary(s: &Structure) -> String {
    let used: BTreeSet<&str> = s.unary_names().chain(s.binary_names()).collect();
    std::iter::once("_dom".to_string())
        .chain((0..).map(|i| format!("_dom{i}")))
        .find(|c| !used.contains(c.as_str()))
        .expect("infinitely many candidates")
}
