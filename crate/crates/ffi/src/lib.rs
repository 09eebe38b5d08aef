//! C ABI over the logicwb library.
//!
//! Structures cross the boundary as opaque `LwbStructure` handles built from
//! the JSON document format. Every entry point returns an `LwbStatus`; results
//! go through out-pointers. On failure the thread's last error message is set
//! and can be read with `lwb_last_error_message`.
//!
//! Strings returned through `char **` are owned by the caller and must be
//! released with `lwb_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use logicwb::decision::{sat_basic_modal, sat_bullet};
use logicwb::equivalence::{bisimilar, bisimilar_depth, counting_bisimilar, gf_bin_bisimilar, pebble_equiv, potential_iso};
use logicwb::semantics::{eval_fo, eval_modal, eval_ra_ids, Assignment, SemanticsMode};
use logicwb::structures::{PointedStructure, Structure};
use logicwb::syntax::{parse_fo, parse_modal, parse_ra, ModalFragment};
use logicwb::Error;

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed structure document or formula text.
    Parse = 3,
    /// The input is well-formed but violates a precondition of the operation.
    Precondition = 4,
    /// A search exceeded its size budget.
    Budget = 5,
    /// An internal self-check failed, or the library panicked.
    Internal = 6,
}

/// Semantics for bullet formulas.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwbMode {
    Intended = 0,
    Quasi = 1,
}

/// Modal languages accepted by `lwb_sat`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwbLogic {
    Ml = 0,
    MlBullet = 1,
}

/// Equivalence notions accepted by `lwb_equiv`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwbEquivKind {
    Bisim = 0,
    BisimDepth = 1,
    Counting = 2,
    Pebble = 3,
    PartialIso = 4,
    GuardedBinary = 5,
}

/// Opaque handle to a finite structure.
pub struct LwbStructure {
    inner: Structure,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LwbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Json(_)
            | Error::Syntax(_)
            | Error::UndeclaredId(_)
            | Error::DuplicateId(_)
            | Error::EmptyId
            | Error::EmptyDomain
            | Error::ArityClash(_) => LwbStatus::Parse,
            Error::Budget(_) => LwbStatus::Budget,
            Error::Internal(_) => LwbStatus::Internal,
            _ => LwbStatus::Precondition,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `body`, translating errors and panics into a status and last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LwbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LwbStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(format!("panic: {message}"));
            LwbStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LwbStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(LwbStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const LwbStructure, what: &str) -> Result<&'a Structure, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| Failure(LwbStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(LwbStatus::NullPointer, format!("{what} is null")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("library output has no nul bytes").into_raw()
}

/// Pointed structure at the node with id `point`.
unsafe fn pointed(s: &Structure, point: *const c_char, what: &str) -> Result<PointedStructure, Failure> {
    let id = text(point, what)?;
    Ok(PointedStructure::new(s.clone(), vec![s.node(id)?])?)
}

/// The message for the last failed call on this thread, or null when none
/// has failed. The pointer stays valid until the next failing call on the
/// same thread.
#[no_mangle]
pub extern "C" fn lwb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Clears the last error of this thread.
#[no_mangle]
pub extern "C" fn lwb_clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lwb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a structure document. Points in the document are ignored.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lwb_structure_from_json(json: *const c_char, out_handle: *mut *mut LwbStructure) -> LwbStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let s = Structure::from_json_str(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(LwbStructure { inner: s }));
        Ok(())
    })
}

/// Releases a structure handle. Null is ignored.
///
/// # Safety
/// `s` must come from `lwb_structure_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lwb_structure_free(s: *mut LwbStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Serializes a structure in the canonical document layout.
///
/// # Safety
/// `s` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lwb_structure_to_json(s: *const LwbStructure, out_json: *mut *mut c_char) -> LwbStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = owned_string(handle(s, "structure")?.to_json());
        Ok(())
    })
}

/// Number of nodes in the domain.
///
/// # Safety
/// `s` must be a live handle; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lwb_structure_len(s: *const LwbStructure, out_len: *mut usize) -> LwbStatus {
    guard(|| {
        let slot = out(out_len, "out_len")?;
        *slot = handle(s, "structure")?.len();
        Ok(())
    })
}

/// Evaluates a modal formula (any operator) at the node `point`.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn lwb_eval_modal(
    s: *const LwbStructure,
    point: *const c_char,
    formula: *const c_char,
    mode: LwbMode,
    out_value: *mut bool,
) -> LwbStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let m = pointed(handle(s, "structure")?, point, "point")?;
        let f = parse_modal(text(formula, "formula")?).map_err(Error::from)?;
        let mode = match mode {
            LwbMode::Intended => SemanticsMode::Intended,
            LwbMode::Quasi => SemanticsMode::Quasi,
        };
        *slot = eval_modal(&m, &f, mode)?;
        Ok(())
    })
}

/// Evaluates a relation-algebra term; the relation is written as a JSON
/// array of id pairs.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn lwb_eval_ra(s: *const LwbStructure, term: *const c_char, out_json: *mut *mut c_char) -> LwbStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let m = handle(s, "structure")?;
        let t = parse_ra(text(term, "term")?).map_err(Error::from)?;
        let pairs = eval_ra_ids(m, &t);
        *slot = owned_string(serde_json::to_string(&pairs).expect("pairs serialize"));
        Ok(())
    })
}

/// Evaluates a first-order formula with `x, y, z` bound to the first
/// `n_points` ids of `points`.
///
/// # Safety
/// `points` must hold `n_points` nul-terminated strings; other pointers
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn lwb_eval_fo(
    s: *const LwbStructure,
    points: *const *const c_char,
    n_points: usize,
    formula: *const c_char,
    out_value: *mut bool,
) -> LwbStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let m = handle(s, "structure")?;
        if n_points > 3 {
            return Err(Failure(LwbStatus::Precondition, "at most three points bind x, y, z".into()));
        }
        if n_points > 0 && points.is_null() {
            return Err(Failure(LwbStatus::NullPointer, "points is null".into()));
        }
        let nodes = (0..n_points)
            .map(|i| Ok(m.node(text(*points.add(i), "point")?)?))
            .collect::<Result<Vec<_>, Failure>>()?;
        let f = parse_fo(text(formula, "formula")?).map_err(Error::from)?;
        *slot = eval_fo(m, &Assignment::from_points(&nodes), &f)?;
        Ok(())
    })
}

/// Decides whether two structures are equivalent under `kind`. The points
/// are ignored by `Pebble` and `PartialIso`; `k` is used by `BisimDepth`
/// and `Pebble` only.
///
/// # Safety
/// Pointers must be valid; point strings nul-terminated where used.
#[no_mangle]
pub unsafe extern "C" fn lwb_equiv(
    kind: LwbEquivKind,
    left: *const LwbStructure,
    left_point: *const c_char,
    right: *const LwbStructure,
    right_point: *const c_char,
    k: usize,
    out_equivalent: *mut bool,
) -> LwbStatus {
    guard(|| {
        let slot = out(out_equivalent, "out_equivalent")?;
        let (m, n) = (handle(left, "left")?, handle(right, "right")?);
        let both = || -> Result<(PointedStructure, PointedStructure), Failure> {
            Ok((pointed(m, left_point, "left_point")?, pointed(n, right_point, "right_point")?))
        };
        *slot = match kind {
            LwbEquivKind::Bisim => {
                let (a, b) = both()?;
                bisimilar(&a, &b)?.equivalent
            }
            LwbEquivKind::BisimDepth => {
                let (a, b) = both()?;
                bisimilar_depth(&a, &b, k)?.equivalent
            }
            LwbEquivKind::Counting => {
                let (a, b) = both()?;
                counting_bisimilar(&a, &b)?.equivalent
            }
            LwbEquivKind::GuardedBinary => {
                let (a, b) = both()?;
                gf_bin_bisimilar(&a, &b)?.equivalent
            }
            LwbEquivKind::Pebble => pebble_equiv(m, n, k)?.equivalent,
            LwbEquivKind::PartialIso => potential_iso(m, n),
        };
        Ok(())
    })
}

/// Decides satisfiability. When `out_witness` is non-null and the formula is
/// satisfiable, a pointed witness document is stored there (or null when
/// the procedure gives none).
///
/// # Safety
/// `formula` must be nul-terminated; `out_sat` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lwb_sat(
    logic: LwbLogic,
    formula: *const c_char,
    out_sat: *mut bool,
    out_witness: *mut *mut c_char,
) -> LwbStatus {
    guard(|| {
        let slot = out(out_sat, "out_sat")?;
        let f = parse_modal(text(formula, "formula")?).map_err(Error::from)?;
        let (frag, name) = match logic {
            LwbLogic::Ml => (ModalFragment::Basic, "basic modal logic"),
            LwbLogic::MlBullet => (ModalFragment::Bullet, "ML with the bullet"),
        };
        if !f.in_fragment(frag) {
            return Err(Failure(LwbStatus::Parse, format!("{f} is not a formula of {name}")));
        }
        let result = match logic {
            LwbLogic::Ml => sat_basic_modal(&f)?,
            LwbLogic::MlBullet => sat_bullet(&f)?,
        };
        *slot = result.satisfiable;
        if let Some(w) = out_witness.as_mut() {
            *w = result.witness.map_or(ptr::null_mut(), |w| owned_string(w.to_json()));
        }
        Ok(())
    })
}
