use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use logicwb_ffi::*;

const CHAIN: &str = r#"{"domain":["w0","w1"],"unary":{"p":["w1"]},"binary":{"R":[["w0","w1"]]}}"#;
const LOOP: &str = r#"{"domain":["a"],"unary":{},"binary":{"R":[["a","a"]]}}"#;
const CYCLE2: &str = r#"{"domain":["x","y"],"unary":{},"binary":{"R":[["x","y"],["y","x"]]}}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

struct Handle(*mut LwbStructure);

impl Handle {
    fn load(json: &str) -> Handle {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { lwb_structure_from_json(c(json).as_ptr(), &mut h) }, LwbStatus::Ok);
        assert!(!h.is_null());
        Handle(h)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { lwb_structure_free(self.0) }
    }
}

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { lwb_string_free(p) };
    s
}

fn last_error() -> String {
    let p = lwb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn structures_round_trip() {
    let h = Handle::load(CHAIN);
    let mut len = 0;
    assert_eq!(unsafe { lwb_structure_len(h.0, &mut len) }, LwbStatus::Ok);
    assert_eq!(len, 2);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lwb_structure_to_json(h.0, &mut json) }, LwbStatus::Ok);
    let back: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    let orig: serde_json::Value = serde_json::from_str(CHAIN).unwrap();
    assert_eq!(back, orig);
}

#[test]
fn bad_documents_set_the_last_error() {
    lwb_clear_last_error();
    assert!(lwb_last_error_message().is_null());
    let mut h = ptr::null_mut();
    let bad = c(r#"{"domain":["a"],"unary":{"p":["b"]},"binary":{}}"#);
    assert_eq!(unsafe { lwb_structure_from_json(bad.as_ptr(), &mut h) }, LwbStatus::Parse);
    assert!(h.is_null());
    assert!(last_error().contains("\"b\""));
    assert_eq!(unsafe { lwb_structure_from_json(ptr::null(), &mut h) }, LwbStatus::NullPointer);
    let not_utf8 = [0xffu8, 0];
    assert_eq!(unsafe { lwb_structure_from_json(not_utf8.as_ptr().cast(), &mut h) }, LwbStatus::InvalidUtf8);
}

#[test]
fn modal_evaluation() {
    let h = Handle::load(CHAIN);
    let mut v = false;
    let status = unsafe { lwb_eval_modal(h.0, c("w0").as_ptr(), c("<>p").as_ptr(), LwbMode::Intended, &mut v) };
    assert_eq!((status, v), (LwbStatus::Ok, true));
    let status = unsafe { lwb_eval_modal(h.0, c("w1").as_ptr(), c("<>p").as_ptr(), LwbMode::Intended, &mut v) };
    assert_eq!((status, v), (LwbStatus::Ok, false));
    let status = unsafe { lwb_eval_modal(h.0, c("zz").as_ptr(), c("p").as_ptr(), LwbMode::Intended, &mut v) };
    assert_eq!(status, LwbStatus::Parse);
    let status = unsafe { lwb_eval_modal(h.0, c("w0").as_ptr(), c("<>(").as_ptr(), LwbMode::Intended, &mut v) };
    assert_eq!(status, LwbStatus::Parse);
}

#[test]
fn quasi_mode_rejects_non_k_frames() {
    let h = Handle::load(r#"{"domain":["a","b"],"unary":{},"binary":{"Rb":[["a","b"]]}}"#);
    let mut v = false;
    let status = unsafe { lwb_eval_modal(h.0, c("a").as_ptr(), c("*true").as_ptr(), LwbMode::Quasi, &mut v) };
    assert_eq!(status, LwbStatus::Precondition);
    assert!(!last_error().is_empty());
}

#[test]
fn relation_and_first_order_evaluation() {
    let h = Handle::load(CHAIN);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lwb_eval_ra(h.0, c("R;R~").as_ptr(), &mut json) }, LwbStatus::Ok);
    assert_eq!(take_string(json), r#"[["w0","w0"]]"#);

    let ids = [c("w0"), c("w1")];
    let ptrs: Vec<*const c_char> = ids.iter().map(|s| s.as_ptr()).collect();
    let mut v = false;
    let status = unsafe { lwb_eval_fo(h.0, ptrs.as_ptr(), 2, c("R(x,y) & p(y)").as_ptr(), &mut v) };
    assert_eq!((status, v), (LwbStatus::Ok, true));
    let status = unsafe { lwb_eval_fo(h.0, ptrs.as_ptr(), 1, c("R(x,y)").as_ptr(), &mut v) };
    assert_eq!(status, LwbStatus::Precondition);
}

#[test]
fn equivalence_kinds() {
    let (l, r) = (Handle::load(LOOP), Handle::load(CYCLE2));
    let mut eq = false;
    let status = unsafe { lwb_equiv(LwbEquivKind::Bisim, l.0, c("a").as_ptr(), r.0, c("x").as_ptr(), 0, &mut eq) };
    assert_eq!((status, eq), (LwbStatus::Ok, true));
    let status = unsafe { lwb_equiv(LwbEquivKind::Pebble, l.0, ptr::null(), r.0, ptr::null(), 1, &mut eq) };
    assert_eq!(status, LwbStatus::Ok);
    let status = unsafe { lwb_equiv(LwbEquivKind::PartialIso, l.0, ptr::null(), r.0, ptr::null(), 0, &mut eq) };
    assert_eq!((status, eq), (LwbStatus::Ok, false));
    let status = unsafe { lwb_equiv(LwbEquivKind::Counting, l.0, ptr::null(), r.0, c("x").as_ptr(), 0, &mut eq) };
    assert_eq!(status, LwbStatus::NullPointer);
}

#[test]
fn satisfiability() {
    let mut sat = false;
    let mut witness = ptr::null_mut();
    assert_eq!(unsafe { lwb_sat(LwbLogic::Ml, c("p & <>~p").as_ptr(), &mut sat, &mut witness) }, LwbStatus::Ok);
    assert!(sat);
    let doc = take_string(witness);
    assert!(doc.contains("\"points\""));

    assert_eq!(unsafe { lwb_sat(LwbLogic::MlBullet, c("*p & ~<>p").as_ptr(), &mut sat, ptr::null_mut()) }, LwbStatus::Ok);
    assert!(!sat);
    assert_eq!(unsafe { lwb_sat(LwbLogic::Ml, c("*p").as_ptr(), &mut sat, ptr::null_mut()) }, LwbStatus::Parse);
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/logicwb.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["lwb_structure_from_json", "lwb_last_error_message", "lwb_sat", "LWB_STATUS_PRECONDITION"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_against_the_static_library() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.join("liblogicwb_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("lwb_smoke");
    let built = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(built.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
