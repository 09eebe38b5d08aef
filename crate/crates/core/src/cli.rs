//! Command-line front end.
//!
//! Exit codes: 0 success (and "sat" / "equivalent"), 1 "unsat" /
//! "distinguishable" or a failing `check`, 64 usage error, 65 malformed
//! formula or structure, 66 missing input file or empty corpus, 70 violated
//! precondition, 74 output could not be written.

use std::ffi::OsString;
use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::check::{run_suite, CheckOptions, CheckReport, Suite};
use crate::decision::{bounded_model_search, sat_basic_modal, sat_bullet, SatResult};
use crate::equivalence::{bisimilar, bisimilar_depth, counting_bisimilar, gf_bin_bisimilar, pebble_equiv, potential_iso, GameResult};
use crate::error::Error;
use crate::semantics::{eval_fo, eval_modal_detailed, eval_ra, eval_ra_ids, ra_equiv_top, Assignment, SemanticsMode};
use crate::structures::{cut_depth, generated_submodel, restrict, PointedStructure, Structure};
use crate::syntax::{parse_fo, parse_modal, parse_ra, ModalFormula, ModalFragment, Vocabulary};
use crate::transforms::{add_copies, cut_guarded, gf_unravel_bin, gml_char_formula, ra_relativize, ra_to_fo3, subtree, unravel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_PRECONDITION: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "logicwb", version, about = "Evaluate, decide, compare and transform modal and guarded logics on finite structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula on a structure.
    Eval(EvalArgs),
    /// Decide satisfiability of a modal formula.
    Sat(SatArgs),
    /// Compare two structures with a game.
    Equiv(EquivArgs),
    /// Apply a model or formula construction.
    Transform(TransformArgs),
    /// Run property suites.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Logic {
    Ml,
    Gml,
    Mlb,
    Ra,
    Fo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Intended,
    Quasi,
}

impl From<Mode> for SemanticsMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Intended => SemanticsMode::Intended,
            Mode::Quasi => SemanticsMode::Quasi,
        }
    }
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Formula text.
    #[arg(long, conflicts_with = "formula_file")]
    formula: Option<String>,
    /// File holding the formula text.
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    logic: Logic,
    /// Structure document.
    #[arg(long)]
    model: PathBuf,
    /// Point of evaluation for the modal logics.
    #[arg(long, conflicts_with = "points")]
    point: Option<String>,
    /// Comma-separated points, bound to x, y, z in order.
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<String>>,
    #[command(flatten)]
    formula: FormulaArgs,
    #[arg(long, value_enum, default_value = "intended")]
    mode: Mode,
    /// Print the truth value of every subformula.
    #[arg(long)]
    explain: bool,
    /// Print the denotation of a relation algebra term.
    #[arg(long)]
    relation: bool,
}

#[derive(Args, Debug)]
struct SatArgs {
    #[arg(long, value_enum)]
    logic: Logic,
    #[command(flatten)]
    formula: FormulaArgs,
    /// Write the verified witness here.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Search exhaustively up to this many nodes instead.
    #[arg(long)]
    bounded: Option<usize>,
    #[arg(long, value_enum, default_value = "intended")]
    mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Bisim,
    BisimK,
    Counting,
    Pebble,
    Piso,
    Gfbin,
}

#[derive(Args, Debug)]
struct EquivArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Left structure as PATH or PATH:POINT[,POINT].
    #[arg(long)]
    left: String,
    /// Right structure as PATH or PATH:POINT[,POINT].
    #[arg(long)]
    right: String,
    /// Rounds or pebbles for bisim-k and pebble.
    #[arg(long)]
    k: Option<usize>,
    /// Print the winning relation, family or distinguishing level.
    #[arg(long)]
    witness: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Op {
    Unravel,
    Cut,
    Gensub,
    Restrict,
    Subtree,
    GfUnravel,
    GuardedCut,
    AddCopies,
    CharFormula,
    RaRelativize,
    Ra2fo,
    RelativizeMl,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long, value_enum)]
    op: Op,
    /// Input structure as PATH or PATH:POINT[,POINT].
    #[arg(long)]
    model: Option<String>,
    #[command(flatten)]
    formula: FormulaArgs,
    #[arg(long)]
    depth: Option<usize>,
    /// Unary predicate for restrict, subtree and relativize-ml.
    #[arg(long)]
    pred: Option<String>,
    /// Relation whose domain ra-relativize restricts to.
    #[arg(long, default_value = "R")]
    rel: String,
    /// Number of copies for add-copies.
    #[arg(long)]
    count: Option<usize>,
    /// Node that receives the copies.
    #[arg(long)]
    at: Option<String>,
    /// Pointed tree copied by add-copies, as PATH or PATH:ROOT.
    #[arg(long)]
    tree: Option<String>,
    /// Comma-separated letters for char-formula.
    #[arg(long, value_delimiter = ',')]
    vocab: Option<Vec<String>>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Suite name, or "all".
    #[arg(long)]
    suite: String,
    /// Directory of structure documents.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cases: Option<usize>,
}

/// An error with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Json(_)
            | Error::Syntax(_)
            | Error::UndeclaredId(_)
            | Error::DuplicateId(_)
            | Error::EmptyId
            | Error::EmptyDomain
            | Error::ArityClash(_) => EXIT_DATA,
            Error::Io(_) => EXIT_NO_INPUT,
            Error::Precondition(_)
            | Error::UnboundVariable(_)
            | Error::EmptyRestriction(_)
            | Error::Budget(_)
            | Error::Internal(_) => EXIT_PRECONDITION,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the command line with the process's standard streams.
pub fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let color = stderr.is_terminal();
    run_with(args, &mut stdout.lock(), &mut stderr.lock(), color)
}

/// Runs the command line against the given streams. `terminal` says
/// whether `err` is a terminal, for `LOGICWB_COLOR=auto`.
pub fn run_with(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write, terminal: bool) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let color = match color_choice(terminal) {
        Ok(c) => c,
        Err(f) => {
            let _ = writeln!(err, "logicwb: {}", f.message);
            return f.code;
        }
    };
    let mut ctx = Ctx { out, err, color };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(&mut ctx, a),
        Command::Sat(a) => cmd_sat(&mut ctx, a),
        Command::Equiv(a) => cmd_equiv(&mut ctx, a),
        Command::Transform(a) => cmd_transform(&mut ctx, a),
        Command::Check(a) => cmd_check(&mut ctx, a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.err, "logicwb: {}", f.message);
            f.code
        }
    }
}

fn color_choice(terminal: bool) -> Result<bool, Failure> {
    match std::env::var("LOGICWB_COLOR").as_deref() {
        Err(_) | Ok("auto") => Ok(terminal),
        Ok("always") => Ok(true),
        Ok("never") => Ok(false),
        Ok(other) => Err(Failure::usage(format!("LOGICWB_COLOR must be auto, always or never, not {other:?}"))),
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

impl Ctx<'_> {
    fn line(&mut self, text: impl AsRef<str>) -> Result<(), Failure> {
        writeln!(self.out, "{}", text.as_ref()).map_err(write_failure)
    }

    fn note(&mut self, text: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", text.as_ref());
    }

    fn paint(&self, text: &str, good: bool) -> String {
        if self.color {
            format!("\x1b[{}m{text}\x1b[0m", if good { 32 } else { 31 })
        } else {
            text.to_string()
        }
    }
}

fn write_failure(e: io::Error) -> Failure {
    Failure { code: EXIT_IO, message: format!("cannot write output: {e}") }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: EXIT_NO_INPUT, message: format!("cannot read {}: {e}", path.display()) })
}

fn load_model(path: &Path) -> Result<(Structure, Option<Vec<usize>>), Failure> {
    let text = read_text(path)?;
    Structure::from_json_with_points(&text).map_err(|e| Failure { code: EXIT_DATA, message: format!("{}: {e}", path.display()) })
}

/// Splits `PATH:P1,P2` at the last colon when the part before it names an
/// existing file.
fn split_spec(spec: &str) -> (PathBuf, Option<Vec<String>>) {
    if let Some((path, points)) = spec.rsplit_once(':') {
        if !Path::new(spec).exists() && !points.is_empty() {
            return (PathBuf::from(path), Some(points.split(',').map(str::to_string).collect()));
        }
    }
    (PathBuf::from(spec), None)
}

/// Loads a structure spec, taking points from the spec or else from the
/// document.
fn load_spec(spec: &str) -> Result<(Structure, Option<Vec<usize>>), Failure> {
    let (path, ids) = split_spec(spec);
    let (s, doc_points) = load_model(&path)?;
    let points = match ids {
        Some(ids) => Some(ids.iter().map(|id| s.node(id)).collect::<Result<Vec<_>, _>>()?),
        None => doc_points,
    };
    Ok((s, points))
}

fn pointed(s: Structure, points: Option<Vec<usize>>, what: &str) -> Result<PointedStructure, Failure> {
    let points = points.ok_or_else(|| Failure::usage(format!("{what} needs a point")))?;
    Ok(PointedStructure::new(s, points)?)
}

fn formula_text(f: &FormulaArgs) -> Result<String, Failure> {
    match (&f.formula, &f.formula_file) {
        (Some(text), _) => Ok(text.clone()),
        (None, Some(path)) => Ok(read_text(path)?.trim().to_string()),
        (None, None) => Err(Failure::usage("a formula is required: pass --formula or --formula-file")),
    }
}

fn modal_formula(f: &FormulaArgs, logic: Logic, mode: Mode) -> Result<ModalFormula, Failure> {
    let text = formula_text(f)?;
    let phi = parse_modal(&text).map_err(Error::from)?;
    let (frag, name) = match (logic, mode) {
        (Logic::Ml, _) => (ModalFragment::Basic, "basic modal logic"),
        (Logic::Gml, _) => (ModalFragment::Graded, "graded modal logic"),
        (Logic::Mlb, Mode::Intended) => (ModalFragment::Bullet, "ML•"),
        (Logic::Mlb, Mode::Quasi) => (ModalFragment::Quasi, "ML• over quasi-models"),
        _ => unreachable!("only modal logics reach here"),
    };
    if !phi.in_fragment(frag) {
        return Err(Failure { code: EXIT_DATA, message: format!("{phi} is not a formula of {name}") });
    }
    Ok(phi)
}

fn cmd_eval(ctx: &mut Ctx, a: EvalArgs) -> CmdResult {
    let (s, doc_points) = load_model(&a.model)?;
    let ids = a.point.clone().map(|p| vec![p]).or(a.points.clone());
    let points = match ids {
        Some(ids) => Some(ids.iter().map(|id| s.node(id)).collect::<Result<Vec<_>, _>>()?),
        None => doc_points,
    };
    match a.logic {
        Logic::Ml | Logic::Gml | Logic::Mlb => {
            let mode = if a.logic == Logic::Mlb { a.mode } else { Mode::Intended };
            let phi = modal_formula(&a.formula, a.logic, mode)?;
            let m = pointed(s, points, "modal evaluation")?;
            let r = eval_modal_detailed(&m, &phi, mode.into(), a.explain)?;
            ctx.line(r.value.to_string())?;
            if let Some(trace) = r.trace {
                for (sub, v) in trace {
                    ctx.line(format!("  {v}\t{sub}"))?;
                }
            }
            if r.vacuous_on_finite {
                ctx.note("note: bullet subformulas are false on every finite structure in intended mode");
            }
        }
        Logic::Ra => {
            let t = parse_ra(&formula_text(&a.formula)?).map_err(Error::from)?;
            if a.relation {
                let pairs: Vec<[String; 2]> = eval_ra_ids(&s, &t).into_iter().map(|(x, y)| [x, y]).collect();
                ctx.line(serde_json::to_string(&pairs).expect("pairs serialize"))?;
            } else {
                let value = match points.as_deref() {
                    Some([x, y]) => eval_ra(&s, &t).contains(&(*x, *y)),
                    Some(_) => return Err(Failure::usage("relation algebra takes exactly two points")),
                    None => ra_equiv_top(&s, &t),
                };
                ctx.line(value.to_string())?;
            }
        }
        Logic::Fo => {
            let f = parse_fo(&formula_text(&a.formula)?).map_err(Error::from)?;
            let points = points.unwrap_or_default();
            if points.len() > 3 {
                return Err(Failure::usage("at most three points can be bound"));
            }
            ctx.line(eval_fo(&s, &Assignment::from_points(&points), &f)?.to_string())?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sat(ctx: &mut Ctx, a: SatArgs) -> CmdResult {
    let result: SatResult = match (a.logic, a.bounded) {
        (Logic::Ml | Logic::Mlb, Some(n)) => {
            let mode = if a.logic == Logic::Mlb { a.mode } else { Mode::Intended };
            let phi = modal_formula(&a.formula, a.logic, mode)?;
            bounded_model_search(&phi, mode.into(), n)?
        }
        (Logic::Ml, None) => sat_basic_modal(&modal_formula(&a.formula, Logic::Ml, Mode::Intended)?)?,
        (Logic::Mlb, None) => sat_bullet(&modal_formula(&a.formula, Logic::Mlb, Mode::Intended)?)?,
        _ => return Err(Failure::usage("sat supports --logic ml and --logic mlb")),
    };
    ctx.line(if result.satisfiable { "sat" } else { "unsat" })?;
    if let (Some(path), Some(w)) = (&a.witness, &result.witness) {
        write_file(path, &w.to_json())?;
    }
    Ok(if result.satisfiable { EXIT_OK } else { EXIT_NEGATIVE })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    fs::write(path, body).map_err(|e| Failure { code: EXIT_IO, message: format!("cannot write {}: {e}", path.display()) })
}

fn cmd_equiv(ctx: &mut Ctx, a: EquivArgs) -> CmdResult {
    let (m, mp) = load_spec(&a.left)?;
    let (n, np) = load_spec(&a.right)?;
    let need_k = || a.k.ok_or_else(|| Failure::usage("this kind needs --k"));
    let result: GameResult = match a.kind {
        Kind::Bisim => bisimilar(&pointed(m.clone(), mp, "bisimulation")?, &pointed(n.clone(), np, "bisimulation")?)?,
        Kind::BisimK => {
            let k = need_k()?;
            bisimilar_depth(&pointed(m.clone(), mp, "bisimulation")?, &pointed(n.clone(), np, "bisimulation")?, k)?
        }
        Kind::Counting => counting_bisimilar(&pointed(m.clone(), mp, "bisimulation")?, &pointed(n.clone(), np, "bisimulation")?)?,
        Kind::Pebble => pebble_equiv(&m, &n, need_k()?)?,
        Kind::Piso => GameResult { equivalent: potential_iso(&m, &n), witness: None, notes: Vec::new() },
        Kind::Gfbin => gf_bin_bisimilar(&pointed(m.clone(), mp, "guarded bisimulation")?, &pointed(n.clone(), np, "guarded bisimulation")?)?,
    };
    ctx.line(if result.equivalent { "equivalent" } else { "distinguishable" })?;
    if a.witness {
        ctx.line(serde_json::to_string(&result.witness_json(&m, &n)).expect("witnesses serialize"))?;
    }
    for note in &result.notes {
        ctx.note(format!("note: {note}"));
    }
    Ok(if result.equivalent { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_transform(ctx: &mut Ctx, a: TransformArgs) -> CmdResult {
    let need_depth = || a.depth.ok_or_else(|| Failure::usage("this operation needs --depth"));
    let need_pred = || a.pred.clone().ok_or_else(|| Failure::usage("this operation needs --pred"));
    let model = || -> Result<(Structure, Option<Vec<usize>>), Failure> {
        load_spec(a.model.as_deref().ok_or_else(|| Failure::usage("this operation needs --model"))?)
    };
    let text = match a.op {
        Op::Unravel | Op::Cut | Op::Gensub | Op::Subtree | Op::GfUnravel | Op::GuardedCut | Op::AddCopies | Op::CharFormula => {
            let (s, points) = model()?;
            let m = pointed(s, points, "this operation")?;
            match a.op {
                Op::Unravel => unravel(&m, need_depth()?)?.to_json(),
                Op::Cut => cut_depth(&m, need_depth()?)?.to_json(),
                Op::Gensub => generated_submodel(&m)?.to_json(),
                Op::Subtree => subtree(&m, &need_pred()?)?.to_json(),
                Op::GfUnravel => gf_unravel_bin(&m, need_depth()?)?.to_json(),
                Op::GuardedCut => cut_guarded(&m, need_depth()?)?.to_json(),
                Op::AddCopies => {
                    let at = a.at.as_deref().ok_or_else(|| Failure::usage("add-copies needs --at"))?;
                    let count = a.count.ok_or_else(|| Failure::usage("add-copies needs --count"))?;
                    let (t, tp) = load_spec(a.tree.as_deref().ok_or_else(|| Failure::usage("add-copies needs --tree"))?)?;
                    add_copies(&m, at, &pointed(t, tp, "the copied tree")?, count)?.to_json()
                }
                _ => {
                    let vocab = a.vocab.clone().ok_or_else(|| Failure::usage("char-formula needs --vocab"))?;
                    gml_char_formula(&m, &Vocabulary::unary(vocab))?.to_string()
                }
            }
        }
        Op::Restrict => {
            let (s, _) = model()?;
            restrict(&s, &need_pred()?)?.to_json()
        }
        Op::RaRelativize => {
            let t = parse_ra(&formula_text(&a.formula)?).map_err(Error::from)?;
            ra_relativize(&t, &a.rel).to_string()
        }
        Op::Ra2fo => {
            let t = parse_ra(&formula_text(&a.formula)?).map_err(Error::from)?;
            ra_to_fo3(&t).to_string()
        }
        Op::RelativizeMl => {
            let phi = parse_modal(&formula_text(&a.formula)?).map_err(Error::from)?;
            phi.relativize(&need_pred()?).to_string()
        }
    };
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => ctx.line(text)?,
    }
    Ok(EXIT_OK)
}

fn load_corpus(dir: &Path) -> Result<Vec<PointedStructure>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure { code: EXIT_NO_INPUT, message: format!("cannot read corpus {}: {e}", dir.display()) })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure { code: EXIT_NO_INPUT, message: format!("corpus {} holds no .json structures", dir.display()) });
    }
    files
        .iter()
        .map(|path| {
            let (s, points) = load_model(path)?;
            Ok(PointedStructure::new(s, points.unwrap_or_else(|| vec![0]))?)
        })
        .collect()
}

fn cmd_check(ctx: &mut Ctx, a: CheckArgs) -> CmdResult {
    let suites: Vec<Suite> = if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse().map_err(Failure::usage)?] };
    let corpus = a.corpus.as_deref().map(load_corpus).transpose()?;
    let opts = CheckOptions { seed: a.seed, cases: a.cases, corpus };
    let mut reports: Vec<CheckReport> = Vec::new();
    for suite in suites {
        let report = run_suite(suite, &opts)?;
        let status = ctx.paint(if report.passed() { "PASS" } else { "FAIL" }, report.passed());
        ctx.note(format!("{status} {}", report.summary()));
        reports.push(report);
    }
    let json = match reports.as_slice() {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    }
    .expect("reports serialize");
    ctx.line(json)?;
    Ok(if reports.iter().all(CheckReport::passed) { EXIT_OK } else { EXIT_NEGATIVE })
}
