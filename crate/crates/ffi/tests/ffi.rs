use std::ffi::{CStr, CString};
use std::ptr;

use satarch_core::scenario::baseline_chemical;
use satarch_core::surrogate::{fit, Kernel, TrainingSet};
use satarch_core::DesignPoint;
use satarch_ffi::*;

fn builtin(name: &str) -> *mut SatarchScenario {
    let name = CString::new(name).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { satarch_scenario_builtin(name.as_ptr(), &mut h) },
        SatarchStatus::Ok
    );
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(satarch_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn sizes_the_reference_design() {
    let h = builtin("chemical");
    let mut b = SatarchBreakdown::default();
    assert_eq!(
        unsafe { satarch_design_vehicle(h, 15.0, 3500.0, &mut b) },
        SatarchStatus::Ok
    );
    assert!((b.m_dry - 1930.0).abs() < 19.3);
    assert_eq!(b.m_p_des, 3500.0);
    assert!((b.m_wet - b.m_dry - b.m_p_des).abs() < 1e-9);
    unsafe { satarch_scenario_free(h) };
}

#[test]
fn unknown_scenario_sets_error() {
    let name = CString::new("nuclear").unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { satarch_scenario_builtin(name.as_ptr(), &mut h) };
    assert_eq!(st, SatarchStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("nuclear"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut b = SatarchBreakdown::default();
    assert_eq!(
        unsafe { satarch_design_vehicle(ptr::null(), 15.0, 3500.0, &mut b) },
        SatarchStatus::NullPointer
    );
    let h = builtin("electric");
    assert_eq!(
        unsafe { satarch_design_vehicle(h, 15.0, 30.0, ptr::null_mut()) },
        SatarchStatus::NullPointer
    );
    unsafe {
        satarch_scenario_free(h);
        satarch_scenario_free(ptr::null_mut());
    }
}

#[test]
fn scenario_json_errors_map_to_parse() {
    let bad = CString::new("{\"a_prop\": 1.0}").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { satarch_scenario_from_json(bad.as_ptr(), &mut h) },
        SatarchStatus::Parse
    );
    assert!(!last_error().is_empty());

    let good = CString::new(baseline_chemical().to_json_string()).unwrap();
    assert_eq!(
        unsafe { satarch_scenario_from_json(good.as_ptr(), &mut h) },
        SatarchStatus::Ok
    );
    let mut buf = [0 as std::ffi::c_char; 65];
    assert_eq!(
        unsafe { satarch_scenario_hash(h, buf.as_mut_ptr(), buf.len()) },
        SatarchStatus::Ok
    );
    let hash = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string();
    assert_eq!(hash, baseline_chemical().hash());
    let mut small = [0 as std::ffi::c_char; 10];
    assert_eq!(
        unsafe { satarch_scenario_hash(h, small.as_mut_ptr(), small.len()) },
        SatarchStatus::BufferTooSmall
    );
    unsafe { satarch_scenario_free(h) };
}

#[test]
fn monte_carlo_is_reproducible_and_validates_n() {
    let h = builtin("chemical");
    let (mut m1, mut s1, mut m2, mut s2) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            satarch_mc_estimate(h, 12.0, 3000.0, 16, 3, 0, &mut m1, &mut s1),
            SatarchStatus::Ok
        );
        assert_eq!(
            satarch_mc_estimate(h, 12.0, 3000.0, 16, 3, 0, &mut m2, &mut s2),
            SatarchStatus::Ok
        );
        assert_eq!(
            satarch_mc_estimate(h, 12.0, 3000.0, 1, 3, 0, &mut m2, &mut s2),
            SatarchStatus::InvalidArgument
        );
        satarch_scenario_free(h);
    }
    assert_eq!((m1.to_bits(), s1.to_bits()), (m2.to_bits(), s2.to_bits()));
    assert!(s1 > 0.0);
}

#[test]
fn model_round_trip_through_file() {
    let pts: Vec<DesignPoint> = (0..25)
        .map(|i| DesignPoint::new(5.0 + (i % 5) as f64 * 2.5, 1500.0 + (i / 5) as f64 * 500.0))
        .collect();
    let ys = pts.iter().map(|x| x.t_life_yr + x.m_p_des / 1000.0).collect();
    let model = fit(&TrainingSet::new(pts, ys).unwrap(), Kernel::Matern52).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    model.save(&path).unwrap();

    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { satarch_model_load(cpath.as_ptr(), &mut h) }, SatarchStatus::Ok);
    let (mut mean, mut var) = (0.0, 0.0);
    assert_eq!(
        unsafe { satarch_model_predict(h, 10.0, 2500.0, &mut mean, &mut var) },
        SatarchStatus::Ok
    );
    let (m, v) = model.predict(&DesignPoint::new(10.0, 2500.0));
    assert_eq!(mean, m);
    assert_eq!(var, v);
    assert_eq!(
        unsafe { satarch_model_predict(h, f64::NAN, 2500.0, &mut mean, ptr::null_mut()) },
        SatarchStatus::InvalidArgument
    );
    unsafe { satarch_model_free(h) };

    let missing = CString::new(dir.path().join("nope.json").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { satarch_model_load(missing.as_ptr(), &mut h) },
        SatarchStatus::Io
    );
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(satarch_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/satarch.h")).unwrap();
    for name in [
        "satarch_last_error",
        "satarch_scenario_builtin",
        "satarch_scenario_load",
        "satarch_scenario_free",
        "satarch_design_vehicle",
        "satarch_mc_estimate",
        "satarch_model_load",
        "satarch_model_predict",
        "SATARCH_STATUS_OK",
        "typedef struct SatarchScenario SatarchScenario",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
