//! C interface to the `berry-esseen` bound library.
//!
//! Every function returns a [`BeStatus`]; on failure a description is
//! available from [`be_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings returned
//! by the library are released with [`be_string_free`].

use berry_esseen::app_bounds::{
    counterexample_report, lstat_310, lstat_311, multisample_37, multisample_38, ustat_nonuniform_33,
    ustat_nonuniform_34, ustat_nonuniform_36, ustat_normal_32, ustat_uniform_31, LStatBoundInputs, MultiBoundInputs,
    UStatBoundInputs,
};
use berry_esseen::bound_core::{linear_baseline, BoundKind, BoundValue};
use berry_esseen::lab::{execute, parse_config_with, parse_model, Command, Outcome, Overrides};
use berry_esseen::mc::{ks_exact_discrete, rademacher_sum_law};
use berry_esseen::models::{CatalogModel, StatisticModel};
use berry_esseen::Error;
use libc::{c_char, c_int};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    UnsupportedModel = 4,
    InvalidModel = 5,
    Domain = 6,
    Capacity = 7,
    Degenerate = 8,
    Numeric = 9,
    Io = 10,
    Panic = 11,
}

/// Experiment commands.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeCommand {
    Bound = 0,
    Verify = 1,
    Example41 = 2,
    Sweep = 3,
}

/// A bound split into its explicit part and the coefficient of the
/// unspecified constant.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BeBound {
    pub known: f64,
    pub c_coeff: f64,
    pub std_error: f64,
    /// 1 when the bound exists at the requested point, 0 when it is not
    /// defined there.
    pub defined: c_int,
}

/// One row of the counterexample table.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BeCounterexample {
    pub epsilon: f64,
    pub n: f64,
    pub lhs_exact: f64,
    pub lhs_floor: f64,
    pub shorack_rhs: f64,
    pub bg_bracket: f64,
    pub ratio_shorack: f64,
    pub ratio_bg: f64,
}

/// A built statistic model.
pub struct BeModel {
    inner: CatalogModel,
}

/// A validated experiment configuration with its command.
pub struct BeExperiment {
    command: Command,
    text: String,
    overrides: Overrides,
}

/// Encoded output of a finished experiment.
pub struct BeResult {
    outcome: Outcome,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn status_of(e: &Error) -> BeStatus {
    match e {
        Error::UnsupportedModel(_) => BeStatus::UnsupportedModel,
        Error::InvalidModel(_) => BeStatus::InvalidModel,
        Error::Domain(_) => BeStatus::Domain,
        Error::Capacity(_) => BeStatus::Capacity,
        Error::Degenerate(_) => BeStatus::Degenerate,
        Error::Numeric(_) => BeStatus::Numeric,
        Error::Config(_) => BeStatus::Config,
        Error::Io(_) => BeStatus::Io,
    }
}

struct Fail(BeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BeStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            BeStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller passes a NUL-terminated string that outlives the call.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Fail(BeStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failure on this thread, or null. Free with
/// [`be_string_free`].
#[no_mangle]
pub extern "C" fn be_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn be_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a model from a JSON descriptor such as
/// `{"kind": "ustat", "kernel": "variance", "distribution": "std_normal", "n": 50}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_model_new(json: *const c_char, out: *mut *mut BeModel) -> BeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: forwarded caller contract.
        let text = unsafe { read_str(json, "json") }?;
        let desc = parse_model(text).map_err(|e| Fail(BeStatus::Config, e.to_string()))?;
        let model = Box::new(BeModel { inner: desc.build()? });
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(model) };
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`be_model_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_model_free(model: *mut BeModel) {
    if !model.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Stable identifier of the model. Free with [`be_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_model_id(model: *const BeModel, out: *mut *mut c_char) -> BeStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let m = unsafe { model.as_ref() }.ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = into_c_string(m.inner.id()) };
        Ok(())
    })
}

fn closed_form(model: &CatalogModel, kind: BoundKind, z: f64, p: f64) -> Result<Option<BoundValue>, Fail> {
    use BoundKind::*;
    let unsupported = || Fail(BeStatus::UnsupportedModel, format!("{kind} has no closed form for {}", model.id()));
    Ok(Some(match (model, kind) {
        (_, LinearBaseline) => linear_baseline(&model.linear_part()?)?,
        (CatalogModel::UStat(m), _) => {
            let inp = UStatBoundInputs::from_spec(&m.spec, p)?;
            match kind {
                UStatUniform => ustat_uniform_31(&inp)?,
                UStatNormal => ustat_normal_32(&inp)?,
                UStatNonUniform => ustat_nonuniform_33(&inp, z)?,
                UStatNonUniformKernelMoment => ustat_nonuniform_34(&inp, z)?,
                UStatNonUniformRecombined => return Ok(ustat_nonuniform_36(&inp, z)?),
                _ => return Err(unsupported()),
            }
        }
        (CatalogModel::Multi(m), MultiUniform) => multisample_37(&MultiBoundInputs::from_spec(&m.spec, p)?)?,
        (CatalogModel::Multi(m), MultiNonUniform) => multisample_38(&MultiBoundInputs::from_spec(&m.spec, p)?, z)?,
        (CatalogModel::LStat(m), LStatUniform) => lstat_310(&LStatBoundInputs::from_model(m, p)?)?,
        (CatalogModel::LStat(m), LStatNonUniform) => lstat_311(&LStatBoundInputs::from_model(m, p)?, z)?,
        _ => return Err(unsupported()),
    }))
}

/// Evaluate a closed-form bound (`eq1.4` and the `eq3.*` family) at `z`
/// with moment order `p`. `out->defined` is 0 where the bound does not
/// apply, e.g. `eq3.6` outside its range.
///
/// # Safety
/// `model` must be a live handle, `tag` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn be_model_bound(
    model: *const BeModel,
    tag: *const c_char,
    z: f64,
    p: f64,
    out: *mut BeBound,
) -> BeStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let m = unsafe { model.as_ref() }.ok_or_else(|| null("model"))?;
        let tag = unsafe { read_str(tag, "tag") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind =
            BoundKind::from_tag(tag).ok_or_else(|| Fail(BeStatus::Domain, format!("unknown bound tag \"{tag}\"")))?;
        let b = match closed_form(&m.inner, kind, z, p)? {
            Some(v) => BeBound { known: v.known, c_coeff: v.c_coeff, std_error: v.std_error, defined: 1 },
            None => BeBound::default(),
        };
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = b };
        Ok(())
    })
}

/// Counterexample quantities at one ε in (0, 1/64), with `n = ε^{-4}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_counterexample(epsilon: f64, out: *mut BeCounterexample) -> BeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = counterexample_report(&[epsilon])?[0];
        let row = BeCounterexample {
            epsilon: r.epsilon,
            n: r.n,
            lhs_exact: r.lhs_exact,
            lhs_floor: r.lhs_floor,
            shorack_rhs: r.shorack_rhs,
            bg_bracket: r.bg_bracket,
            ratio_shorack: r.ratio_shorack,
            ratio_bg: r.ratio_bg,
        };
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = row };
        Ok(())
    })
}

/// Exact Kolmogorov distance between the standardized sum of `n` Rademacher
/// variables and the standard normal law.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_rademacher_ks(n: u64, out: *mut f64) -> BeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(Fail(BeStatus::Domain, "n must be positive".into()));
        }
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = ks_exact_discrete(&rademacher_sum_law(n)) };
        Ok(())
    })
}

/// Validate a JSON experiment configuration for `command`.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_experiment_new(
    config: *const c_char,
    command: BeCommand,
    out: *mut *mut BeExperiment,
) -> BeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: forwarded caller contract.
        let text = unsafe { read_str(config, "config") }?.to_string();
        let command = match command {
            BeCommand::Bound => Command::Bound,
            BeCommand::Verify => Command::Verify,
            BeCommand::Example41 => Command::Example41,
            BeCommand::Sweep => Command::Sweep,
        };
        parse_config_with(&text, command, &Overrides::default()).map_err(|e| Fail(BeStatus::Config, e.to_string()))?;
        let exp = Box::new(BeExperiment { command, text, overrides: Overrides::default() });
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(exp) };
        Ok(())
    })
}

/// Override the worker thread count (0 = all cores).
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_experiment_set_threads(exp: *mut BeExperiment, threads: u32) -> BeStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let e = unsafe { exp.as_mut() }.ok_or_else(|| null("experiment"))?;
        e.overrides.threads = Some(threads as usize);
        Ok(())
    })
}

/// Override the master seed.
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_experiment_set_seed(exp: *mut BeExperiment, seed: u64) -> BeStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let e = unsafe { exp.as_mut() }.ok_or_else(|| null("experiment"))?;
        e.overrides.seed = Some(seed);
        Ok(())
    })
}

/// Run the experiment. Row-level failures do not fail the call; they are
/// reflected in [`be_result_exit_code`].
///
/// # Safety
/// `exp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_experiment_run(exp: *const BeExperiment, out: *mut *mut BeResult) -> BeStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let e = unsafe { exp.as_ref() }.ok_or_else(|| null("experiment"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = parse_config_with(&e.text, e.command, &e.overrides).map_err(|x| Fail(BeStatus::Config, x.to_string()))?;
        let outcome = execute(e.command, &cfg)?;
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(Box::new(BeResult { outcome })) };
        Ok(())
    })
}

/// # Safety
/// `exp` must be null or a handle from [`be_experiment_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_experiment_free(exp: *mut BeExperiment) {
    if !exp.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(exp) });
    }
}

/// Encoded table (CSV or JSON, per the configuration). The bytes stay owned
/// by `result` and are valid until it is freed.
///
/// # Safety
/// `result` must be a live handle; `data` and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_result_bytes(result: *const BeResult, data: *mut *const u8, len: *mut usize) -> BeStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let r = unsafe { result.as_ref() }.ok_or_else(|| null("result"))?;
        if data.is_null() || len.is_null() {
            return Err(null("data/len"));
        }
        // SAFETY: both pointers are non-null and writable.
        unsafe {
            *data = r.outcome.bytes.as_ptr();
            *len = r.outcome.bytes.len();
        }
        Ok(())
    })
}

/// 0 all checks passed, 1 a check failed, 3 some rows could not be computed.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_result_exit_code(result: *const BeResult) -> c_int {
    // SAFETY: forwarded caller contract.
    unsafe { result.as_ref() }.map_or(-1, |r| r.outcome.exit_code())
}

/// # Safety
/// `result` must be null or a handle from [`be_experiment_run`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_result_free(result: *mut BeResult) {
    if !result.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(result) });
    }
}
