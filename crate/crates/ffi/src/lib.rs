//! C ABI over `dqs-core`.
//!
//! Scenarios and runs are opaque heap handles created and freed through this
//! API. Every fallible call returns a [`DqsStatus`]; on failure the message is
//! kept per thread and readable with [`dqs_last_error_message`]. Strings
//! returned to the caller must be released with [`dqs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dqs_core::cli::{run_scenario, run_sweep, write_csv, CliError, RunSummary, ScenarioFile};
use dqs_core::metrics::{bound_report, AttackMode, BoundParams};
use dqs_core::protocol::Variant;
use dqs_core::DqsError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidScenario = 3,
    InvalidArgument = 4,
    IncompatibleAttack = 5,
    InsufficientRounds = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqsAttackMode {
    OneWayGc = 0,
    OneWayIndividual = 1,
    TwoWayGc = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqsVariant {
    Entanglement = 0,
    Mub = 1,
}

/// Evaluated faithfulness bounds at one phase.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqsBounds {
    pub epsilon0: f64,
    /// Negative when the de Finetti term does not apply.
    pub f_value: f64,
    /// `INFINITY` where `sin 2nφ` vanishes.
    pub bias_bound: f64,
    pub variance_bound: f64,
}

/// Parsed scenario file.
pub struct DqsScenario {
    inner: ScenarioFile,
}

/// Result of one protocol run.
pub struct DqsRun {
    summary: RunSummary,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &CliError) -> DqsStatus {
    match e {
        CliError::Schema(_) => DqsStatus::InvalidScenario,
        CliError::Io(_) => DqsStatus::Io,
        CliError::Dqs(DqsError::IncompatibleAttack { .. }) => DqsStatus::IncompatibleAttack,
        CliError::Dqs(DqsError::InsufficientRounds { .. }) => DqsStatus::InsufficientRounds,
        CliError::Dqs(DqsError::InvalidConfig(_)) => DqsStatus::InvalidScenario,
        CliError::Dqs(_) => DqsStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (DqsStatus, String)>) -> DqsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DqsStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DqsStatus::Panic
        }
    }
}

fn cli_err(e: CliError) -> (DqsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (DqsStatus, String) {
    (DqsStatus::NullPointer, format!("`{name}` is null"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library and valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dqs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn dqs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn dqs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a TOML scenario.
///
/// # Safety
/// `toml` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_scenario_from_toml(toml: *const c_char, out: *mut *mut DqsScenario) -> DqsStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| (DqsStatus::InvalidUtf8, e.to_string()))?;
        let inner = ScenarioFile::parse(text).map_err(cli_err)?;
        *out = Box::into_raw(Box::new(DqsScenario { inner }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle from [`dqs_scenario_from_toml`] not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqs_scenario_free(scenario: *mut DqsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqs_scenario_set_seed(scenario: *mut DqsScenario, seed: u64) -> DqsStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        s.inner.protocol.seed = seed;
        Ok(())
    })
}

/// Executes the scenario's protocol once.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_run(scenario: *const DqsScenario, out: *mut *mut DqsRun) -> DqsStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut inner = s.inner.clone();
        inner.output = Default::default();
        let summary = run_scenario(&inner).map_err(cli_err)?;
        *out = Box::into_raw(Box::new(DqsRun { summary }));
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a handle from [`dqs_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqs_run_free(run: *mut DqsRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Check fidelity, phase estimate and its standard error; `passed` is 1 when
/// the check accepted the run. Any output pointer may be null.
///
/// # Safety
/// `run` must be a live handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn dqs_run_results(
    run: *const DqsRun,
    fidelity: *mut f64,
    phi_hat: *mut f64,
    standard_error: *mut f64,
    passed: *mut i32,
) -> DqsStatus {
    guard(|| {
        let r = &run.as_ref().ok_or_else(|| null("run"))?.summary;
        if let Some(p) = fidelity.as_mut() {
            *p = r.fidelity;
        }
        if let Some(p) = phi_hat.as_mut() {
            *p = r.phi_hat;
        }
        if let Some(p) = standard_error.as_mut() {
            *p = r.standard_error;
        }
        if let Some(p) = passed.as_mut() {
            *p = i32::from(r.passed);
        }
        Ok(())
    })
}

/// Full run summary as JSON; free with [`dqs_string_free`].
///
/// # Safety
/// `run` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_run_summary_json(run: *const DqsRun, out: *mut *mut c_char) -> DqsStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = serde_json::to_string(&r.summary).map_err(|e| (DqsStatus::Io, e.to_string()))?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// Runs the scenario's sweep and returns the CSV report; free with
/// [`dqs_string_free`].
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_sweep_csv(scenario: *const DqsScenario, out: *mut *mut c_char) -> DqsStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let rows = run_sweep(&s.inner).map_err(cli_err)?;
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).map_err(cli_err)?;
        *out = into_c_string(String::from_utf8(buf).map_err(|e| (DqsStatus::Io, e.to_string()))?);
        Ok(())
    })
}

/// Faithfulness bounds for one parameter point.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_bounds(
    mode: DqsAttackMode,
    variant: DqsVariant,
    threshold: f64,
    n: usize,
    phi: f64,
    rounds: u64,
    discarded: u64,
    estimation_rounds: u64,
    out: *mut DqsBounds,
) -> DqsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let params = BoundParams {
            mode: match mode {
                DqsAttackMode::OneWayGc => AttackMode::OneWayGc,
                DqsAttackMode::OneWayIndividual => AttackMode::OneWayIndividual,
                DqsAttackMode::TwoWayGc => AttackMode::TwoWayGc,
            },
            variant: match variant {
                DqsVariant::Entanglement => Variant::Entanglement,
                DqsVariant::Mub => Variant::Mub,
            },
            threshold,
            rounds,
            discarded,
            estimation_rounds,
            n,
            phi,
        };
        let r = bound_report(&params).map_err(|e| cli_err(e.into()))?;
        *out = DqsBounds {
            epsilon0: r.epsilon0,
            f_value: r.f_value.unwrap_or(-1.0),
            bias_bound: r.bias_bound,
            variance_bound: r.variance_bound,
        };
        Ok(())
    })
}
