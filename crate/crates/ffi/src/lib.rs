//! C ABI for the specter planner.
//!
//! Models and plans are opaque heap handles released with
//! [`specter_model_free`] and [`specter_plan_free`]. Every fallible call
//! returns a [`SpecterStatus`]; on failure a message is available from
//! [`specter_last_error`] on the same thread until the next call. Strings
//! handed out by the library are released with [`specter_string_free`].
//! Panics never cross the boundary; they surface as
//! `SPECTER_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Instant;

use specter::model::{inject_failure, FailureEvent};
use specter::planner::{PlanError, Planner, Solver, TaskSpecification};
use specter::scenario::model_file::{parse_model, serialize_model, ModelArtifact};
use specter::scenario::plan::{serialize_plan, PlanDocument, Timing};
use specter::scenario::{build_model, BuildError};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecterStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The scenario or model document is malformed or invalid.
    InvalidDocument = 3,
    /// Composition of a valid scenario failed.
    CompositionFailed = 4,
    /// An agent, state, task or solver argument was rejected.
    InvalidArgument = 5,
    /// No goal state is reachable (complete solver).
    TaskInfeasible = 6,
    /// The heuristic solver found no plan.
    HeuristicFailed = 7,
    /// An internal panic was caught.
    Panic = 8,
}

/// Solver selector values accepted by [`specter_plan`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecterSolver {
    Complete = 0,
    Heuristic = 1,
}

/// Opaque composed environment model.
pub struct SpecterModel {
    artifact: ModelArtifact,
}

/// Opaque plan document.
pub struct SpecterPlan {
    doc: PlanDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (SpecterStatus, String);

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpecterStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpecterStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SpecterStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    (SpecterStatus::NullArgument, format!("{name} is null"))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn required_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (SpecterStatus::InvalidUtf8, format!("{name}: {e}")))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn optional_str<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        required_str(p, name).map(Some)
    }
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text)
        .expect("serialized JSON contains no NUL bytes")
        .into_raw()
}

/// # Safety
/// `out` is null or valid for a pointer write.
unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn specter_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn specter_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a model from scenario JSON text.
///
/// # Safety
/// `scenario_json` is a valid NUL-terminated string; `out_model` is valid
/// for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn specter_model_build(
    scenario_json: *const c_char,
    out_model: *mut *mut SpecterModel,
) -> SpecterStatus {
    guard(|| {
        let text = required_str(scenario_json, "scenario_json")?;
        if out_model.is_null() {
            return Err(null("out_model"));
        }
        let (model, defaults) = build_model(text.as_bytes()).map_err(|e| match e {
            BuildError::Invalid(_) => (SpecterStatus::InvalidDocument, e.to_string()),
            BuildError::Composition(_) => (SpecterStatus::CompositionFailed, e.to_string()),
        })?;
        let handle = Box::new(SpecterModel {
            artifact: ModelArtifact {
                model,
                defaults: Some(defaults),
            },
        });
        write_out(out_model, Box::into_raw(handle), "out_model")
    })
}

/// Loads a model artifact previously produced by `specter build` or
/// [`specter_model_serialize`].
///
/// # Safety
/// `model_json` is a valid NUL-terminated string; `out_model` is valid for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn specter_model_load(
    model_json: *const c_char,
    out_model: *mut *mut SpecterModel,
) -> SpecterStatus {
    guard(|| {
        let text = required_str(model_json, "model_json")?;
        if out_model.is_null() {
            return Err(null("out_model"));
        }
        let artifact = parse_model(text).map_err(|d| (SpecterStatus::InvalidDocument, d.to_string()))?;
        write_out(
            out_model,
            Box::into_raw(Box::new(SpecterModel { artifact })),
            "out_model",
        )
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn specter_model_free(model: *mut SpecterModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of composite states in the model.
///
/// # Safety
/// `model` is a live handle; `out_count` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn specter_model_state_count(model: *const SpecterModel, out_count: *mut usize) -> SpecterStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        write_out(out_count, model.artifact.model.state_count(), "out_count")
    })
}

/// Number of transitions in the model.
///
/// # Safety
/// `model` is a live handle; `out_count` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn specter_model_transition_count(
    model: *const SpecterModel,
    out_count: *mut usize,
) -> SpecterStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        write_out(
            out_count,
            model.artifact.model.automaton().transition_count(),
            "out_count",
        )
    })
}

/// Serializes the model artifact; release the string with
/// [`specter_string_free`].
///
/// # Safety
/// `model` is a live handle; `out_json` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn specter_model_serialize(
    model: *const SpecterModel,
    out_json: *mut *mut c_char,
) -> SpecterStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let text = serialize_model(&model.artifact.model, model.artifact.defaults.as_ref());
        write_out(out_json, into_c_string(text), "out_json")
    })
}

/// Removes an agent's failed transition `from → to` in place. `event` may be
/// null to match every event of the agent; it is required for the `inter`
/// pseudo-agent. `out_removed` may be null.
///
/// # Safety
/// `model` is a live handle; string arguments are null or valid
/// NUL-terminated strings; `out_removed` is null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn specter_model_inject(
    model: *mut SpecterModel,
    agent: *const c_char,
    from: *const c_char,
    to: *const c_char,
    event: *const c_char,
    out_removed: *mut usize,
) -> SpecterStatus {
    guard(|| {
        let model = model.as_mut().ok_or_else(|| null("model"))?;
        let failure = FailureEvent {
            agent_id: required_str(agent, "agent")?.to_string(),
            from: required_str(from, "from")?.to_string(),
            to: required_str(to, "to")?.to_string(),
            event: optional_str(event, "event")?.map(str::to_string),
        };
        let injected = inject_failure(&model.artifact.model, &failure)
            .map_err(|e| (SpecterStatus::InvalidArgument, e.to_string()))?;
        model.artifact.model = injected.model;
        if !out_removed.is_null() {
            out_removed.write(injected.removed);
        }
        Ok(())
    })
}

/// Plans on a model. `initial` (`a|b|c` or `AGENT=state,...`) and `task`
/// (`AGENT=state,...`) may be null to use the defaults stored with the
/// model. `solver` is a [`SpecterSolver`] value.
///
/// # Safety
/// `model` is a live handle; string arguments are null or valid
/// NUL-terminated strings; `out_plan` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn specter_plan(
    model: *const SpecterModel,
    initial: *const c_char,
    task: *const c_char,
    solver: i32,
    out_plan: *mut *mut SpecterPlan,
) -> SpecterStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out_plan.is_null() {
            return Err(null("out_plan"));
        }
        let invalid = |m: String| (SpecterStatus::InvalidArgument, m);
        let solver = match solver {
            s if s == SpecterSolver::Complete as i32 => Solver::Complete,
            s if s == SpecterSolver::Heuristic as i32 => Solver::Heuristic,
            other => return Err(invalid(format!("unknown solver {other}"))),
        };
        let env = &model.artifact.model;
        let defaults = model.artifact.defaults.as_ref();
        let x0 = match (optional_str(initial, "initial")?, defaults) {
            (Some(text), d) => env
                .parse_state(text, d.map(|d| &d.initial))
                .map_err(|e| invalid(format!("initial: {e}")))?,
            (None, Some(d)) => d.initial.clone(),
            (None, None) => return Err(invalid("no initial state given and the model has no default".into())),
        };
        let task: TaskSpecification = match (optional_str(task, "task")?, defaults) {
            (Some(text), _) => {
                TaskSpecification::parse_assignments(env, text).map_err(|e| invalid(format!("task: {e}")))?
            }
            (None, Some(d)) => d.task_spec().map_err(|e| invalid(format!("task: {e}")))?,
            (None, None) => return Err(invalid("no task given and the model has no default".into())),
        };
        let started = Instant::now();
        let planner = Planner::new(env);
        let preprocess_s = started.elapsed().as_secs_f64();
        let started = Instant::now();
        let result = planner.plan(&x0, &task, solver).map_err(|e| {
            let status = match &e {
                PlanError::TaskInfeasible(_) | PlanError::NoGoalStates => SpecterStatus::TaskInfeasible,
                e if e.is_heuristic_failure() => SpecterStatus::HeuristicFailed,
                _ => SpecterStatus::InvalidArgument,
            };
            (status, e.to_string())
        })?;
        let solve_s = started.elapsed().as_secs_f64();
        let doc = PlanDocument::new(&result, env.agent_ids(), Timing { preprocess_s, solve_s });
        write_out(out_plan, Box::into_raw(Box::new(SpecterPlan { doc })), "out_plan")
    })
}

/// Releases a plan. Null is ignored.
///
/// # Safety
/// `plan` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn specter_plan_free(plan: *mut SpecterPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Total cost of the plan.
///
/// # Safety
/// `plan` is a live handle; `out_cost` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn specter_plan_cost(plan: *const SpecterPlan, out_cost: *mut f64) -> SpecterStatus {
    guard(|| {
        let plan = plan.as_ref().ok_or_else(|| null("plan"))?;
        write_out(out_cost, plan.doc.total_cost, "out_cost")
    })
}

/// Number of modules in the plan, excluding the inverted task module.
///
/// # Safety
/// `plan` is a live handle; `out_count` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn specter_plan_module_count(plan: *const SpecterPlan, out_count: *mut usize) -> SpecterStatus {
    guard(|| {
        let plan = plan.as_ref().ok_or_else(|| null("plan"))?;
        write_out(out_count, plan.doc.modules.len(), "out_count")
    })
}

/// Serializes the plan document; release the string with
/// [`specter_string_free`].
///
/// # Safety
/// `plan` is a live handle; `out_json` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn specter_plan_serialize(plan: *const SpecterPlan, out_json: *mut *mut c_char) -> SpecterStatus {
    guard(|| {
        let plan = plan.as_ref().ok_or_else(|| null("plan"))?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        write_out(out_json, into_c_string(serialize_plan(&plan.doc)), "out_json")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn specter_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
