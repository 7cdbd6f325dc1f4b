//! C ABI for the freetime solver.
//!
//! Problems and reports are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns an
//! [`FtStatus`]; on failure [`ft_last_error`] describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use freetime::forward::{evaluate_objective, forward_solve};
use freetime::io::RunConfig;
use freetime::optimizer::{solve, SolveStatus, SolverReport};
use freetime::{ControlGrid, Error, ProblemSpec, ReducedPoint, SGrid, TauParameter};

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// A built model together with its solver settings.
pub struct FtProblem {
    config: RunConfig,
    problem: ProblemSpec,
}

/// Outcome of [`ft_solve`].
pub struct FtReport {
    report: SolverReport,
}

/// Scalar results of a solve. `lambda_max` is NaN when no second-order check
/// was run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FtSummary {
    pub tau_star: f64,
    pub j_star: f64,
    pub grad_norm: f64,
    pub grad_tau: f64,
    pub lambda_max: f64,
    pub converged: bool,
    pub bb_exhausted: bool,
    pub bb_iterations: usize,
    pub newton_iterations: usize,
    pub n_steps: usize,
    pub control_dim: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: FtStatus, msg: impl Into<String>) -> FtStatus {
    set_error(msg.into());
    status
}

fn from_error(err: Error) -> FtStatus {
    let status = match err {
        Error::Config(_) | Error::Domain(_) | Error::Dimension { .. } => FtStatus::Config,
        Error::Io(_) => FtStatus::Io,
        _ => FtStatus::Numerical,
    };
    fail(status, err.to_string())
}

/// Runs `f`, turning a panic into [`FtStatus::Panic`].
fn guard(f: impl FnOnce() -> FtStatus) -> FtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(FtStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, FtStatus> {
    if s.is_null() {
        return Err(fail(FtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(FtStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn build(config: RunConfig, out: *mut *mut FtProblem) -> FtStatus {
    if let Err(e) = config.validate() {
        return from_error(e);
    }
    match config.model.build() {
        Ok(problem) => {
            // SAFETY: checked non-null by the callers.
            unsafe { *out = Box::into_raw(Box::new(FtProblem { config, problem })) };
            FtStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a model with its reference settings, e.g. `"lotka-volterra"`.
///
/// # Safety
/// `model_id` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_new(model_id: *const c_char, out: *mut *mut FtProblem) -> FtStatus {
    guard(|| {
        if out.is_null() {
            return fail(FtStatus::NullPointer, "out is null");
        }
        let id = match read_str(model_id, "model_id") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match RunConfig::for_model(id) {
            Ok(config) => build(config, out),
            Err(e) => from_error(e),
        }
    })
}

/// Builds a problem from a run configuration in TOML.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_from_toml(toml: *const c_char, out: *mut *mut FtProblem) -> FtStatus {
    guard(|| {
        if out.is_null() {
            return fail(FtStatus::NullPointer, "out is null");
        }
        let text = match read_str(toml, "toml") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match RunConfig::from_toml_str(text) {
            Ok(config) => build(config, out),
            Err(e) => from_error(e),
        }
    })
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// `problem` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_free(problem: *mut FtProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// State and control dimensions, horizon and current number of steps.
///
/// # Safety
/// `problem` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_dims(
    problem: *const FtProblem,
    state_dim: *mut usize,
    control_dim: *mut usize,
    horizon: *mut f64,
    n_steps: *mut usize,
) -> FtStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return fail(FtStatus::NullPointer, "problem is null");
        };
        if !state_dim.is_null() {
            *state_dim = p.problem.state_dim();
        }
        if !control_dim.is_null() {
            *control_dim = p.problem.control_dim();
        }
        if !horizon.is_null() {
            *horizon = p.problem.horizon();
        }
        if !n_steps.is_null() {
            *n_steps = p.config.solver.n_steps;
        }
        FtStatus::Ok
    })
}

/// Sets the number of time steps (even, at least 2).
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_set_n_steps(problem: *mut FtProblem, n_steps: usize) -> FtStatus {
    guard(|| {
        let Some(p) = problem.as_mut() else {
            return fail(FtStatus::NullPointer, "problem is null");
        };
        let old = p.config.solver.n_steps;
        p.config.solver.n_steps = n_steps;
        match p.config.validate() {
            Ok(()) => FtStatus::Ok,
            Err(e) => {
                p.config.solver.n_steps = old;
                from_error(e)
            }
        }
    })
}

/// Sets the initial free time; NaN restores the model default.
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_set_tau0(problem: *mut FtProblem, tau0: f64) -> FtStatus {
    guard(|| {
        let Some(p) = problem.as_mut() else {
            return fail(FtStatus::NullPointer, "problem is null");
        };
        let old = p.config.solver.tau0;
        p.config.solver.tau0 = if tau0.is_nan() { None } else { Some(tau0) };
        match p.config.validate() {
            Ok(()) => FtStatus::Ok,
            Err(e) => {
                p.config.solver.tau0 = old;
                from_error(e)
            }
        }
    })
}

/// Control of `(n_steps + 1) * control_dim` node values, row-major.
unsafe fn read_control(p: &FtProblem, u: *const f64, u_len: usize) -> Result<ControlGrid, FtStatus> {
    if u.is_null() {
        return Err(fail(FtStatus::NullPointer, "u is null"));
    }
    let grid = SGrid::new(p.config.solver.n_steps).map_err(from_error)?;
    let values = std::slice::from_raw_parts(u, u_len).to_vec();
    ControlGrid::from_vec(grid, p.problem.control_dim(), values).map_err(from_error)
}

/// Objective `J(u, tau)` on the problem's grid. `u` holds
/// `(n_steps + 1) * control_dim` values.
///
/// # Safety
/// `problem` must be a live handle, `u` readable for `u_len` values and
/// `objective` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_evaluate(
    problem: *const FtProblem,
    u: *const f64,
    u_len: usize,
    tau: f64,
    objective: *mut f64,
) -> FtStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return fail(FtStatus::NullPointer, "problem is null");
        };
        if objective.is_null() {
            return fail(FtStatus::NullPointer, "objective is null");
        }
        let u = match read_control(p, u, u_len) {
            Ok(u) => u,
            Err(s) => return s,
        };
        let result = TauParameter::new(tau, p.problem.horizon()).and_then(|tp| {
            let y = forward_solve(&p.problem, &u, tp)?;
            Ok(evaluate_objective(&p.problem, &u, tp, &y))
        });
        match result {
            Ok(j) => {
                *objective = j;
                FtStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Reduced gradient: `grad_u` receives `u_len` Riesz-mapped values and
/// `grad_tau` the free-time component. `objective` may be null.
///
/// # Safety
/// As for [`ft_problem_evaluate`]; `grad_u` must be writable for `u_len`
/// values and `grad_tau` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_problem_gradient(
    problem: *const FtProblem,
    u: *const f64,
    u_len: usize,
    tau: f64,
    grad_u: *mut f64,
    grad_tau: *mut f64,
    objective: *mut f64,
) -> FtStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return fail(FtStatus::NullPointer, "problem is null");
        };
        if grad_u.is_null() || grad_tau.is_null() {
            return fail(FtStatus::NullPointer, "gradient output is null");
        }
        let u = match read_control(p, u, u_len) {
            Ok(u) => u,
            Err(s) => return s,
        };
        let result =
            TauParameter::new(tau, p.problem.horizon()).and_then(|tp| ReducedPoint::evaluate(&p.problem, u, tp));
        match result {
            Ok(pt) => {
                std::slice::from_raw_parts_mut(grad_u, u_len).copy_from_slice(pt.gradient.u.as_slice());
                *grad_tau = pt.gradient.tau;
                if !objective.is_null() {
                    *objective = pt.objective;
                }
                FtStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs the optimiser from zero control. Reaching the iteration limit is not
/// an error; check `converged` in the summary.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_solve(problem: *const FtProblem, out: *mut *mut FtReport) -> FtStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return fail(FtStatus::NullPointer, "problem is null");
        };
        if out.is_null() {
            return fail(FtStatus::NullPointer, "out is null");
        }
        match solve(&p.problem, &p.config.solver) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(FtReport { report }));
                FtStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Scalar results of a solve.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_report_summary(report: *const FtReport, out: *mut FtSummary) -> FtStatus {
    guard(|| {
        let Some(r) = report.as_ref().map(|r| &r.report) else {
            return fail(FtStatus::NullPointer, "report is null");
        };
        if out.is_null() {
            return fail(FtStatus::NullPointer, "out is null");
        }
        *out = FtSummary {
            tau_star: r.tau_star,
            j_star: r.j_star,
            grad_norm: r.grad_norm,
            grad_tau: r.grad_tau,
            lambda_max: r.second_order.as_ref().map_or(f64::NAN, |c| c.lambda_max),
            converged: r.status == SolveStatus::Converged,
            bb_exhausted: r.bb_exhausted,
            bb_iterations: r.bb_iterations,
            newton_iterations: r.newton_iterations,
            n_steps: r.u_star.grid().n_steps(),
            control_dim: r.u_star.dim(),
        };
        FtStatus::Ok
    })
}

/// Copies the optimal control into `buf`. `needed` receives the full length
/// `(n_steps + 1) * control_dim`; a short buffer gives
/// [`FtStatus::InvalidArgument`] and leaves `buf` untouched.
///
/// # Safety
/// `report` must be a live handle, `buf` writable for `len` values (or null
/// with `len == 0`) and `needed` writable or null.
#[no_mangle]
pub unsafe extern "C" fn ft_report_control(
    report: *const FtReport,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> FtStatus {
    guard(|| {
        let Some(r) = report.as_ref().map(|r| &r.report) else {
            return fail(FtStatus::NullPointer, "report is null");
        };
        let values = r.u_star.as_slice();
        if !needed.is_null() {
            *needed = values.len();
        }
        if len < values.len() || buf.is_null() {
            return fail(
                FtStatus::InvalidArgument,
                format!("buffer holds {len} values, {} needed", values.len()),
            );
        }
        std::slice::from_raw_parts_mut(buf, values.len()).copy_from_slice(values);
        FtStatus::Ok
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_report_free(report: *mut FtReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
