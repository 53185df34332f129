use berry_esseen_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    let p = be_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { be_string_free(p) };
    s
}

fn model(json: &str) -> *mut BeModel {
    let text = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { be_model_new(text.as_ptr(), &mut m) }, BeStatus::Ok);
    m
}

fn bound(m: *const BeModel, tag: &str, z: f64) -> (BeStatus, BeBound) {
    let tag = CString::new(tag).unwrap();
    let mut out = BeBound::default();
    let s = unsafe { be_model_bound(m, tag.as_ptr(), z, 3.0, &mut out) };
    (s, out)
}

#[test]
fn ustat_closed_forms() {
    let m = model(r#"{"kind": "ustat", "kernel": "variance", "distribution": "std_normal", "n": 50}"#);
    let mut id = ptr::null_mut();
    assert_eq!(unsafe { be_model_id(m, &mut id) }, BeStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(id) }.to_str().unwrap(), "ustat:variance:std_normal:m=2:n=50");
    unsafe { be_string_free(id) };

    let (s, b) = bound(m, "eq3.1", 0.0);
    assert_eq!(s, BeStatus::Ok);
    assert_eq!(b.defined, 1);
    assert!(b.known > 0.48775 && b.c_coeff == 0.0);
    let (_, far) = bound(m, "eq3.6", 6.0);
    assert_eq!(far.defined, 0);
    let (s, _) = bound(m, "eq3.7", 0.0);
    assert_eq!(s, BeStatus::UnsupportedModel);
    assert!(last_error().contains("eq3.7"));
    let (s, _) = bound(m, "eq9.9", 0.0);
    assert_eq!(s, BeStatus::Domain);
    unsafe { be_model_free(m) };
}

#[test]
fn model_errors_carry_codes() {
    let bad = CString::new(r#"{"kind": "ustat", "kernel": "kendall", "distribution": "std_normal", "n": 50}"#).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { be_model_new(bad.as_ptr(), &mut m) }, BeStatus::Config);
    assert!(m.is_null());
    assert!(last_error().contains("model.kernel"));
    assert_eq!(unsafe { be_model_new(ptr::null(), &mut m) }, BeStatus::NullPointer);
    let text = CString::new("{}").unwrap();
    assert_eq!(unsafe { be_model_new(text.as_ptr(), ptr::null_mut()) }, BeStatus::NullPointer);
    unsafe { be_model_free(ptr::null_mut()) };
}

#[test]
fn counterexample_and_rademacher() {
    let mut c = BeCounterexample::default();
    assert_eq!(unsafe { be_counterexample(1e-5, &mut c) }, BeStatus::Ok);
    assert!(c.ratio_shorack > 1.0 && c.lhs_exact > c.lhs_floor);
    assert_eq!(unsafe { be_counterexample(1.0 / 32.0, &mut c) }, BeStatus::Domain);
    let mut ks = 0.0;
    assert_eq!(unsafe { be_rademacher_ks(100, &mut ks) }, BeStatus::Ok);
    assert!((ks - 0.079_589_237_387_178_78 / 2.0).abs() < 1e-12);
}

#[test]
fn experiment_round_trip() {
    let cfg = CString::new(
        r#"{"model": {"kind": "linear", "distribution": "rademacher", "n": 100},
            "bounds": ["eq2.5"], "mc": {"seed": 3, "replicates": 2000}}"#,
    )
    .unwrap();
    let run = |threads: u32| -> Vec<u8> {
        let mut e = ptr::null_mut();
        assert_eq!(unsafe { be_experiment_new(cfg.as_ptr(), BeCommand::Verify, &mut e) }, BeStatus::Ok);
        assert_eq!(unsafe { be_experiment_set_threads(e, threads) }, BeStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { be_experiment_run(e, &mut r) }, BeStatus::Ok);
        assert_eq!(unsafe { be_result_exit_code(r) }, 0);
        let (mut data, mut len) = (ptr::null(), 0usize);
        assert_eq!(unsafe { be_result_bytes(r, &mut data, &mut len) }, BeStatus::Ok);
        let bytes = unsafe { std::slice::from_raw_parts(data, len) }.to_vec();
        unsafe {
            be_result_free(r);
            be_experiment_free(e);
        }
        bytes
    };
    let a = run(1);
    assert_eq!(a, run(3));
    assert!(String::from_utf8(a).unwrap().starts_with("equation_tag,model,"));
}

#[test]
fn experiment_config_errors() {
    let cfg = CString::new(r#"{"model": {"kind": "linear", "distribution": "rademacher", "n": 100}, "bounds": ["eq2.5"]}"#).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { be_experiment_new(cfg.as_ptr(), BeCommand::Bound, &mut e) }, BeStatus::Config);
    assert!(last_error().contains("mc.seed"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/berry_esseen.h");
    let src = include_str!("../src/lib.rs");
    let names: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(names.len() >= 15);
    for n in names {
        assert!(header.contains(&format!("{n}(")), "{n} missing from header");
    }
    assert!(header.contains("typedef struct BeModel BeModel;"));
    let version = unsafe { CStr::from_ptr(be_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
