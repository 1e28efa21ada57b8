use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use plan_ffi::*;

fn suite_file(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/suite")
        .join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = plan_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(name: &str) -> *mut PlanScenario {
    let mut s = ptr::null_mut();
    let st = unsafe { plan_scenario_load_file(suite_file(name).as_ptr(), &mut s) };
    assert_eq!(st, PlanStatus::Ok);
    s
}

#[test]
fn plans_through_the_c_interface() {
    let s = load("narrow-gap2d.json");
    assert_eq!(unsafe { plan_scenario_dimension(s) }, 2);
    let mut cfg = plan_config_default();
    cfg.seed = 3;
    let planner = CString::new("rrt-connect-star-s").unwrap();
    let mut r = ptr::null_mut();
    let st = unsafe {
        plan_run(
            s,
            planner.as_ptr(),
            &cfg,
            PlanTerminationKind::Iterations,
            2000.0,
            &mut r,
        )
    };
    assert_eq!(st, PlanStatus::Ok);
    unsafe {
        assert!(plan_result_has_path(r));
        assert!(plan_result_local_opt_count(r) >= 1);
        assert!(plan_result_first_solution_time(r) >= 0.0);
        assert_eq!(plan_result_iterations(r), 2000);
        let n = plan_result_vertex_count(r);
        let mut buf = vec![0.0; 2 * n];
        assert_eq!(
            plan_result_copy_path(r, buf.as_mut_ptr(), 1),
            PlanStatus::BufferTooSmall
        );
        assert_eq!(
            plan_result_copy_path(r, buf.as_mut_ptr(), buf.len()),
            PlanStatus::Ok
        );
        assert_eq!(&buf[..2], &[2.0, 8.0]);
        assert_eq!(&buf[2 * n - 2..], &[8.0, 8.0]);
        let len: f64 = buf
            .chunks(2)
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .sum();
        assert!((len - plan_result_length(r)).abs() < 1e-9);
        for w in buf.chunks(2).collect::<Vec<_>>().windows(2) {
            let mut ok = false;
            assert_eq!(
                plan_scenario_motion_valid(s, w[0].as_ptr(), w[1].as_ptr(), &mut ok),
                PlanStatus::Ok
            );
            assert!(ok);
        }
        plan_result_free(r);
        plan_scenario_free(s);
    }
}

#[test]
fn validity_queries() {
    let s = load("narrow-gap2d.json");
    let mut ok = true;
    unsafe {
        assert_eq!(
            plan_scenario_is_valid(s, [5.0, 2.0].as_ptr(), &mut ok),
            PlanStatus::Ok
        );
        assert!(!ok);
        assert_eq!(
            plan_scenario_is_valid(s, [2.0, 2.0].as_ptr(), &mut ok),
            PlanStatus::Ok
        );
        assert!(ok);
        assert_eq!(
            plan_scenario_motion_valid(s, [2.0, 2.0].as_ptr(), [8.0, 2.0].as_ptr(), &mut ok),
            PlanStatus::Ok
        );
        assert!(!ok);
        plan_scenario_free(s);
    }
}

#[test]
fn presets_cross_the_boundary() {
    let mut c = plan_config_default();
    let (p, k) = (
        CString::new("cubicle").unwrap(),
        CString::new("RRTConnect*+S").unwrap(),
    );
    assert_eq!(
        unsafe { plan_config_preset(p.as_ptr(), k.as_ptr(), &mut c) },
        PlanStatus::Ok
    );
    assert_eq!((c.range, c.scf, c.opt_threshold), (3.0, 3.0, 0.11));
    let bad = CString::new("office").unwrap();
    assert_eq!(
        unsafe { plan_config_preset(bad.as_ptr(), k.as_ptr(), &mut c) },
        PlanStatus::UnknownName
    );
    assert!(last_error().contains("office"));
}

#[test]
fn errors_map_to_status_codes() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            plan_scenario_from_json(ptr::null(), &mut s),
            PlanStatus::NullPointer
        );
        let junk = CString::new("{ nope").unwrap();
        assert_eq!(
            plan_scenario_from_json(junk.as_ptr(), &mut s),
            PlanStatus::ParseError
        );
        assert!(s.is_null());
        let missing = CString::new("/nonexistent/x.json").unwrap();
        assert_eq!(
            plan_scenario_load_file(missing.as_ptr(), &mut s),
            PlanStatus::IoError
        );
        assert!(last_error().contains("/nonexistent/x.json"));
        let outside = CString::new(
            r#"{"name":"x","kind":"point2d","bounds":{"lower":[0,0],"upper":[1,1]},
                "resolution":0.01,"obstacles":[],"start":[2,0.5],"goals":[[0.5,0.5]]}"#,
        )
        .unwrap();
        assert_eq!(
            plan_scenario_from_json(outside.as_ptr(), &mut s),
            PlanStatus::InvalidScenario
        );

        let s = load("empty2d.json");
        let cfg = plan_config_default();
        let mut r = ptr::null_mut();
        let bogus = CString::new("prm").unwrap();
        assert_eq!(
            plan_run(
                s,
                bogus.as_ptr(),
                &cfg,
                PlanTerminationKind::Iterations,
                10.0,
                &mut r
            ),
            PlanStatus::UnknownName
        );
        let name = CString::new("rrt-connect").unwrap();
        assert_eq!(
            plan_run(
                s,
                name.as_ptr(),
                &cfg,
                PlanTerminationKind::Iterations,
                2.5,
                &mut r
            ),
            PlanStatus::InvalidArgument
        );
        let mut neg = cfg;
        neg.range = -1.0;
        assert_eq!(
            plan_run(
                s,
                name.as_ptr(),
                &neg,
                PlanTerminationKind::Seconds,
                0.1,
                &mut r
            ),
            PlanStatus::InvalidArgument
        );
        assert!(last_error().contains("range"));
        assert!(r.is_null());
        assert!(!plan_result_has_path(ptr::null()));
        assert_eq!(plan_result_length(ptr::null()), f64::INFINITY);
        plan_scenario_free(s);
        plan_scenario_free(ptr::null_mut());
    }
}
