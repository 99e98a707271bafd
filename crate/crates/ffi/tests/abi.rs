use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use specter_ffi::*;

fn scenario_text() -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/case_study_1.json");
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    let p = specter_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn build() -> *mut SpecterModel {
    let mut model = ptr::null_mut();
    let status = unsafe { specter_model_build(scenario_text().as_ptr(), &mut model) };
    assert_eq!(status, SpecterStatus::Ok);
    assert!(!model.is_null());
    model
}

fn plan(model: *const SpecterModel, solver: SpecterSolver) -> *mut SpecterPlan {
    let mut plan = ptr::null_mut();
    let status = unsafe { specter_plan(model, ptr::null(), ptr::null(), solver as i32, &mut plan) };
    assert_eq!(status, SpecterStatus::Ok, "{}", last_error());
    plan
}

fn cost(plan: *const SpecterPlan) -> f64 {
    let mut cost = 0.0;
    assert_eq!(unsafe { specter_plan_cost(plan, &mut cost) }, SpecterStatus::Ok);
    cost
}

#[test]
fn build_inject_and_plan_case_study() {
    let model = build();
    let mut states = 0;
    assert_eq!(
        unsafe { specter_model_state_count(model, &mut states) },
        SpecterStatus::Ok
    );
    assert_eq!(states, 560);

    let before = plan(model, SpecterSolver::Complete);
    assert_eq!(cost(before), 50.0);

    let mut removed = 0;
    let status = unsafe {
        specter_model_inject(
            model,
            c("R2").as_ptr(),
            c("Ψ").as_ptr(),
            c("A").as_ptr(),
            ptr::null(),
            &mut removed,
        )
    };
    assert_eq!(status, SpecterStatus::Ok);
    assert_eq!(removed, 4 * 5 * 7);

    for solver in [SpecterSolver::Complete, SpecterSolver::Heuristic] {
        let after = plan(model, solver);
        assert_eq!(cost(after), 55.0);
        let mut modules = 0;
        assert_eq!(
            unsafe { specter_plan_module_count(after, &mut modules) },
            SpecterStatus::Ok
        );
        assert_eq!(modules, 6);
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { specter_plan_serialize(after, &mut json) }, SpecterStatus::Ok);
        let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
        assert!(text.contains("\"specter-plan\""));
        assert!(!text.contains("\"R2."));
        unsafe {
            specter_string_free(json);
            specter_plan_free(after);
        }
    }
    unsafe {
        specter_plan_free(before);
        specter_model_free(model);
    }
}

#[test]
fn serialized_model_reloads() {
    let model = build();
    let mut json: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { specter_model_serialize(model, &mut json) }, SpecterStatus::Ok);
    let mut reloaded = ptr::null_mut();
    assert_eq!(unsafe { specter_model_load(json, &mut reloaded) }, SpecterStatus::Ok);
    let mut a = 0;
    let mut b = 0;
    unsafe {
        specter_model_transition_count(model, &mut a);
        specter_model_transition_count(reloaded, &mut b);
    }
    assert_eq!(a, b);
    unsafe {
        specter_string_free(json);
        specter_model_free(model);
        specter_model_free(reloaded);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { specter_model_build(ptr::null(), &mut model) },
        SpecterStatus::NullArgument
    );
    assert!(last_error().contains("scenario_json"));
    assert_eq!(
        unsafe { specter_model_build(c("{").as_ptr(), &mut model) },
        SpecterStatus::InvalidDocument
    );
    assert_eq!(
        unsafe { specter_model_load(c("{}").as_ptr(), &mut model) },
        SpecterStatus::InvalidDocument
    );
    let bad_utf8 = [0xffu8, 0];
    assert_eq!(
        unsafe { specter_model_build(bad_utf8.as_ptr().cast(), &mut model) },
        SpecterStatus::InvalidUtf8
    );
    assert!(model.is_null());

    let model = build();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { specter_plan(model, ptr::null(), ptr::null(), 7, &mut p) },
        SpecterStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { specter_plan(model, ptr::null(), c("I1=Z").as_ptr(), 0, &mut p) },
        SpecterStatus::InvalidArgument
    );
    assert_eq!(
        unsafe {
            specter_model_inject(
                model,
                c("R9").as_ptr(),
                c("A").as_ptr(),
                c("B").as_ptr(),
                ptr::null(),
                ptr::null_mut(),
            )
        },
        SpecterStatus::InvalidArgument
    );
    // A successful call clears the previous message.
    let ok = plan(model, SpecterSolver::Heuristic);
    assert!(specter_last_error().is_null());
    unsafe {
        specter_plan_free(ok);
        specter_model_free(model);
        specter_model_free(ptr::null_mut());
        specter_plan_free(ptr::null_mut());
        specter_string_free(ptr::null_mut());
    }
}

#[test]
fn satisfied_initial_state_gives_empty_plan() {
    let model = build();
    let mut p = ptr::null_mut();
    let status = unsafe { specter_plan(model, c("I1=B").as_ptr(), ptr::null(), 0, &mut p) };
    assert_eq!(status, SpecterStatus::Ok);
    let mut modules = usize::MAX;
    unsafe { specter_plan_module_count(p, &mut modules) };
    assert_eq!(modules, 0);
    assert_eq!(cost(p), 0.0);
    unsafe {
        specter_plan_free(p);
        specter_model_free(model);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(specter_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c_and_cxx() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/specter.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "specter_model_build",
        "specter_model_load",
        "specter_model_inject",
        "specter_plan",
        "specter_plan_free",
        "specter_string_free",
        "specter_last_error",
        "typedef struct SpecterModel SpecterModel;",
        "SPECTER_SOLVER_HEURISTIC = 1",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping the syntax check");
        return;
    };
    for lang in ["c", "c++"] {
        let status = Command::new(&cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap();
        assert!(status.success(), "{cc} rejects the header as {lang}");
    }
}

fn which_cc() -> Result<String, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| {
            Command::new(cc)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .map(str::to_string)
        .ok_or(())
}
