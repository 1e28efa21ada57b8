//! C ABI over `plan-core`.
//!
//! Scenarios and results cross the boundary as opaque handles that the
//! caller frees with the matching `*_free` function. Every fallible call
//! returns a [`PlanStatus`]; the message for the last failure on the
//! calling thread is available from [`plan_last_error_message`].
//!
//! Configurations are passed as `double` arrays of the scenario's
//! dimension. Paths are copied out row-major, one configuration per row.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plan_core::planner::make_preset;
use plan_core::{
    plan, Config, PlanError, PlanResult as CoreResult, PlannerConfig, PlannerKind, Scenario,
    Termination,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    InvalidScenario = 4,
    UnknownName = 5,
    DimensionMismatch = 6,
    IoError = 7,
    BufferTooSmall = 8,
    RuntimeError = 9,
    Panic = 10,
}

/// Opaque scenario handle.
pub struct PlanScenario(Scenario);

/// Opaque planner result handle.
pub struct PlanResult(CoreResult);

/// How a run stops: `value` is seconds for the time kinds and an
/// iteration count for `Iterations`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanTerminationKind {
    Seconds = 0,
    Iterations = 1,
    FirstSolutionThenSeconds = 2,
}

/// Planner parameters. Fill with [`plan_config_default`] or
/// [`plan_config_preset`] and adjust.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanConfigC {
    pub range: f64,
    /// Non-positive means derive the rewiring constant from the bounds.
    pub gamma: f64,
    pub opt_threshold: f64,
    pub scf: f64,
    pub informed_sampling: bool,
    pub sample_rejection: bool,
    pub seed: u64,
}

impl From<&PlannerConfig> for PlanConfigC {
    fn from(c: &PlannerConfig) -> Self {
        PlanConfigC {
            range: c.range,
            gamma: c.gamma_override.unwrap_or(0.0),
            opt_threshold: c.opt_threshold,
            scf: c.scf,
            informed_sampling: c.heuristics.informed_sampling,
            sample_rejection: c.heuristics.sample_rejection,
            seed: c.seed,
        }
    }
}

impl From<&PlanConfigC> for PlannerConfig {
    fn from(c: &PlanConfigC) -> Self {
        let mut out = PlannerConfig {
            range: c.range,
            gamma_override: (c.gamma > 0.0).then_some(c.gamma),
            opt_threshold: c.opt_threshold,
            scf: c.scf,
            seed: c.seed,
            ..PlannerConfig::default()
        };
        out.heuristics.informed_sampling = c.informed_sampling;
        out.heuristics.sample_rejection = c.sample_rejection;
        out
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: PlanStatus, msg: impl Into<String>) -> PlanStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &PlanError) -> PlanStatus {
    match e {
        PlanError::DimensionMismatch { .. } => PlanStatus::DimensionMismatch,
        PlanError::Contract(_) | PlanError::InvalidArgument(_) => PlanStatus::InvalidArgument,
        PlanError::Parse { .. } | PlanError::Csv(_) => PlanStatus::ParseError,
        PlanError::Validation { .. } => PlanStatus::InvalidScenario,
        PlanError::UnknownName { .. } => PlanStatus::UnknownName,
        PlanError::Io { .. } => PlanStatus::IoError,
        PlanError::Runtime(_) => PlanStatus::RuntimeError,
    }
}

fn from_error(e: PlanError) -> PlanStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, turning a panic into [`PlanStatus::Panic`].
fn guard(f: impl FnOnce() -> PlanStatus) -> PlanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(PlanStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, PlanStatus> {
    if p.is_null() {
        return Err(fail(PlanStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(PlanStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn config_arg(s: &Scenario, q: *const f64, what: &str) -> Result<Config, PlanStatus> {
    if q.is_null() {
        return Err(fail(PlanStatus::NullPointer, format!("{what} is null")));
    }
    Ok(Config::new(std::slice::from_raw_parts(q, s.dim()).to_vec()))
}

macro_rules! handle {
    ($p:expr, $what:literal) => {
        match $p.as_ref() {
            Some(h) => h,
            None => return fail(PlanStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

macro_rules! out_ptr {
    ($p:expr, $what:literal) => {
        if $p.is_null() {
            return fail(PlanStatus::NullPointer, concat!($what, " is null"));
        }
    };
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn plan_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a scenario from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plan_scenario_from_json(
    json: *const c_char,
    out: *mut *mut PlanScenario,
) -> PlanStatus {
    guard(|| {
        out_ptr!(out, "out");
        let text = try_ffi!(str_arg(json, "json"));
        match Scenario::from_json(text) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(PlanScenario(s)));
                PlanStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Loads a scenario from a JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plan_scenario_load_file(
    path: *const c_char,
    out: *mut *mut PlanScenario,
) -> PlanStatus {
    guard(|| {
        out_ptr!(out, "out");
        let path = try_ffi!(str_arg(path, "path"));
        match Scenario::load(path) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(PlanScenario(s)));
                PlanStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Frees a scenario. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn plan_scenario_free(s: *mut PlanScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Configuration-space dimension, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn plan_scenario_dimension(s: *const PlanScenario) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// Writes whether configuration `q` (dimension doubles) is collision free.
///
/// # Safety
/// `q` must point to `dimension` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn plan_scenario_is_valid(
    s: *const PlanScenario,
    q: *const f64,
    out: *mut bool,
) -> PlanStatus {
    guard(|| {
        let s = &handle!(s, "scenario").0;
        out_ptr!(out, "out");
        let q = try_ffi!(config_arg(s, q, "q"));
        *out = s.is_valid(&q);
        PlanStatus::Ok
    })
}

/// Writes whether the straight motion from `a` to `b` is collision free.
///
/// # Safety
/// `a` and `b` must each point to `dimension` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn plan_scenario_motion_valid(
    s: *const PlanScenario,
    a: *const f64,
    b: *const f64,
    out: *mut bool,
) -> PlanStatus {
    guard(|| {
        let s = &handle!(s, "scenario").0;
        out_ptr!(out, "out");
        let a = try_ffi!(config_arg(s, a, "a"));
        let b = try_ffi!(config_arg(s, b, "b"));
        *out = s.motion_valid(&a, &b);
        PlanStatus::Ok
    })
}

/// Library defaults.
#[no_mangle]
pub extern "C" fn plan_config_default() -> PlanConfigC {
    PlanConfigC::from(&PlannerConfig::default())
}

/// Parameters of a named preset (`vine`, `cubicle`) for a planner.
///
/// # Safety
/// `preset` and `planner` must be NUL-terminated strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn plan_config_preset(
    preset: *const c_char,
    planner: *const c_char,
    out: *mut PlanConfigC,
) -> PlanStatus {
    guard(|| {
        out_ptr!(out, "out");
        let preset = try_ffi!(str_arg(preset, "preset"));
        let kind = try_ffi!(planner_arg(planner));
        match make_preset(preset, kind) {
            Ok(c) => {
                *out = PlanConfigC::from(&c);
                PlanStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

unsafe fn planner_arg(p: *const c_char) -> Result<PlannerKind, PlanStatus> {
    str_arg(p, "planner")?.parse().map_err(from_error)
}

/// Runs a planner. `planner` takes the names `rrt-connect`,
/// `rrt-connect-s`, `m-rrt-connect-s`, `rrt-connect-star`,
/// `rrt-connect-star-s` (or their display names). A run that finds no
/// path still succeeds; check [`plan_result_has_path`].
///
/// # Safety
/// `scenario` and `config` must be live, `planner` NUL-terminated and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn plan_run(
    scenario: *const PlanScenario,
    planner: *const c_char,
    config: *const PlanConfigC,
    termination: PlanTerminationKind,
    value: f64,
    out: *mut *mut PlanResult,
) -> PlanStatus {
    guard(|| {
        let s = &handle!(scenario, "scenario").0;
        let cfg = PlannerConfig::from(handle!(config, "config"));
        out_ptr!(out, "out");
        let kind = try_ffi!(planner_arg(planner));
        let term = match termination {
            PlanTerminationKind::Seconds => Termination::TimeBudget(value),
            PlanTerminationKind::FirstSolutionThenSeconds => {
                Termination::FirstSolutionThenBudget(value)
            }
            PlanTerminationKind::Iterations => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u64::MAX as f64) {
                    return fail(
                        PlanStatus::InvalidArgument,
                        format!("iteration budget must be a positive integer, got {value}"),
                    );
                }
                Termination::IterationBudget(value as u64)
            }
        };
        match plan(kind, s, &cfg, term) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(PlanResult(r)));
                PlanStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Frees a result. Null is ignored.
///
/// # Safety
/// `r` must come from [`plan_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn plan_result_free(r: *mut PlanResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn plan_result_has_path(r: *const PlanResult) -> bool {
    r.as_ref().is_some_and(|r| r.0.path.is_some())
}

/// Path length, or infinity when there is no path or the handle is null.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn plan_result_length(r: *const PlanResult) -> f64 {
    r.as_ref()
        .and_then(|r| r.0.length())
        .unwrap_or(f64::INFINITY)
}

/// Number of configurations in the path, 0 without one.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn plan_result_vertex_count(r: *const PlanResult) -> usize {
    r.as_ref()
        .and_then(|r| r.0.path.as_ref())
        .map_or(0, |p| p.len())
}

/// Copies the path into `buf` as `vertex_count * dimension` doubles.
/// `capacity` counts doubles; a short buffer gives `BufferTooSmall`.
///
/// # Safety
/// `buf` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn plan_result_copy_path(
    r: *const PlanResult,
    buf: *mut f64,
    capacity: usize,
) -> PlanStatus {
    guard(|| {
        let r = &handle!(r, "result").0;
        out_ptr!(buf, "buf");
        let Some(p) = r.path.as_ref() else {
            return fail(PlanStatus::InvalidArgument, "result has no path");
        };
        let needed: usize = p.configs().iter().map(Config::dim).sum();
        if capacity < needed {
            return fail(
                PlanStatus::BufferTooSmall,
                format!("path needs {needed} doubles, buffer holds {capacity}"),
            );
        }
        let out = std::slice::from_raw_parts_mut(buf, needed);
        for (chunk, q) in out.chunks_mut(p.first().dim()).zip(p.configs()) {
            chunk.copy_from_slice(q.as_slice());
        }
        PlanStatus::Ok
    })
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn plan_result_local_opt_count(r: *const PlanResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.local_opt_count)
}

/// Seconds to the first solution, or a negative value if none was found.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn plan_result_first_solution_time(r: *const PlanResult) -> f64 {
    r.as_ref()
        .and_then(|r| r.0.first_solution_time)
        .unwrap_or(-1.0)
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn plan_result_iterations(r: *const PlanResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.iterations)
}
