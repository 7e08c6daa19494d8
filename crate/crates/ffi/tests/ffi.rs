use std::ffi::{CStr, CString};
use std::ptr;

use golog_synth_ffi::*;

fn fixture(name: &str) -> CString {
    let path = format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn problem(name: &str) -> *mut GsProblem {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { gs_problem_from_source(fixture(name).as_ptr(), &mut p) }, GsStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gs_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(gs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn camera_is_controllable_with_json_controller() {
    let p = problem("camera_persistent.tgs");
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(gs_synthesize(p, ptr::null(), &mut r), GsStatus::Ok);
        assert_eq!(gs_result_verdict(r), GsVerdict::Controllable);
        let json = gs_result_controller_json(r);
        assert!(!json.is_null());
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["verdict"], "CONTROLLABLE");
        gs_string_free(json);
        let mut stats = GsStats::default();
        assert_eq!(gs_result_stats(r, &mut stats), GsStatus::Ok);
        assert!(stats.nodes_expanded > 0);
        gs_result_free(r);
        gs_problem_free(p);
    }
}

#[test]
fn grasp_only_has_witness_and_no_controller() {
    let p = problem("grasp_only.tgs");
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(gs_synthesize(p, ptr::null(), &mut r), GsStatus::Ok);
        assert_eq!(gs_result_verdict(r), GsVerdict::Uncontrollable);
        assert!(gs_result_controller_json(r).is_null());
        let w = gs_result_witness(r);
        assert_eq!(CStr::from_ptr(w).to_str().unwrap(), "start_grasp(o1,l1)\nend_grasp(o1,l1)\nviolation\n");
        gs_string_free(w);
        gs_result_free(r);
        gs_problem_free(p);
    }
}

#[test]
fn options_select_order_and_budget() {
    let p = problem("suite/s16_hoare_counterexample.tgs");
    let mut r = ptr::null_mut();
    unsafe {
        let mut o = gs_options_default();
        o.order = GsOrder::Hoare;
        assert_eq!(gs_synthesize(p, &o, &mut r), GsStatus::Ok);
        assert_eq!(gs_result_verdict(r), GsVerdict::Controllable);
        gs_result_free(r);
        let o = GsOptions { max_nodes: 2, ..gs_options_default() };
        assert_eq!(gs_synthesize(p, &o, &mut r), GsStatus::ResourceLimit);
        assert!(r.is_null());
        assert!(last_error().contains("resource limit"));
        gs_problem_free(p);
    }
}

#[test]
fn parse_errors_report_positions() {
    let src = CString::new("fluents { p; }\nprogram { q }\n").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { gs_problem_from_source(src.as_ptr(), &mut p) }, GsStatus::InvalidInput);
    assert!(p.is_null());
    let e = last_error();
    let mut parts = e.splitn(3, ':');
    assert!(parts.next().unwrap().parse::<u32>().is_ok() && parts.next().unwrap().parse::<u32>().is_ok(), "{e}");
}

#[test]
fn null_arguments_are_rejected() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(gs_problem_from_source(ptr::null(), &mut p), GsStatus::NullArgument);
        assert_eq!(gs_problem_from_source(fixture("grasp_only.tgs").as_ptr(), ptr::null_mut()), GsStatus::NullArgument);
        let mut r = ptr::null_mut();
        assert_eq!(gs_synthesize(ptr::null(), ptr::null(), &mut r), GsStatus::NullArgument);
        gs_problem_free(ptr::null_mut());
        gs_result_free(ptr::null_mut());
        gs_string_free(ptr::null_mut());
    }
}

#[test]
fn check_trace_evaluates_the_bad_formula() {
    let p = problem("robot_camera.tgs");
    let mut bad = -1;
    unsafe {
        let t = CString::new("0.5: start_grasp(o1,l1)\n").unwrap();
        assert_eq!(gs_check_trace(p, t.as_ptr(), &mut bad), GsStatus::Ok);
        assert_eq!(bad, 1);
        let t = CString::new("").unwrap();
        assert_eq!(gs_check_trace(p, t.as_ptr(), &mut bad), GsStatus::Ok);
        assert_eq!(bad, 0);
        let t = CString::new("1: start_cam\n0: end_cam\n").unwrap();
        assert_eq!(gs_check_trace(p, t.as_ptr(), &mut bad), GsStatus::InvalidInput);
        let t = CString::new("0: fly\n").unwrap();
        assert_eq!(gs_check_trace(p, t.as_ptr(), &mut bad), GsStatus::InvalidInput);
        assert!(last_error().contains("fly"));
        gs_problem_free(p);
    }
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(format!("{}/include/golog_synth.h", env!("CARGO_MANIFEST_DIR"))).unwrap();
    for f in [
        "gs_version",
        "gs_last_error_message",
        "gs_problem_from_source",
        "gs_problem_free",
        "gs_synthesize",
        "gs_options_default",
        "gs_result_verdict",
        "gs_result_controller_json",
        "gs_result_witness",
        "gs_result_stats",
        "gs_result_free",
        "gs_check_trace",
        "gs_string_free",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct GsProblem GsProblem;"));
}
