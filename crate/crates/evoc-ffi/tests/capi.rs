//! Exercises the C ABI the way a foreign caller would: through the exported
//! functions and raw pointers only.

use evoc_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn params_from(json: &str) -> *mut EvocParams {
    let json = CString::new(json).unwrap();
    let mut params = ptr::null_mut();
    let status = unsafe { evoc_params_from_json(json.as_ptr(), &mut params) };
    assert_eq!(status, EvocStatus::Ok);
    assert!(!params.is_null());
    params
}

#[test]
fn version_is_a_readable_string() {
    let version = unsafe { CStr::from_ptr(evoc_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn params_round_trip_through_json() {
    let params = params_from(r#"{"grid_width": 8, "grid_height": 4, "seed": 7}"#);
    let json = unsafe { evoc_params_to_json(params) };
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { evoc_string_free(json) };
    unsafe { evoc_params_free(params) };
    assert!(text.contains("\"grid_width\":8"));
    assert!(text.contains("\"seed\":7"));
}

#[test]
fn invalid_parameters_report_an_error_message() {
    let json = CString::new(r#"{"p_change": 0.0}"#).unwrap();
    let mut params = ptr::null_mut();
    let status = unsafe { evoc_params_from_json(json.as_ptr(), &mut params) };
    assert_eq!(status, EvocStatus::InvalidConfig);
    let message = unsafe { CStr::from_ptr(evoc_last_error_message()) };
    assert!(message.to_str().unwrap().contains("p_change"));

    let garbage = CString::new("not json").unwrap();
    assert_eq!(
        unsafe { evoc_params_from_json(garbage.as_ptr(), &mut params) },
        EvocStatus::InvalidConfig
    );
    assert_eq!(
        unsafe { evoc_params_from_json(ptr::null(), &mut params) },
        EvocStatus::NullArgument
    );
}

#[test]
fn run_is_deterministic_and_readable_through_accessors() {
    let json = r#"{"grid_width": 8, "grid_height": 8, "iterations": 10, "seed": 11}"#;
    let params = params_from(json);

    let mut series_a = ptr::null_mut();
    let mut series_b = ptr::null_mut();
    assert_eq!(unsafe { evoc_run(params, &mut series_a) }, EvocStatus::Ok);
    assert_eq!(unsafe { evoc_run(params, &mut series_b) }, EvocStatus::Ok);
    unsafe { evoc_params_free(params) };

    unsafe {
        assert_eq!(evoc_series_record_count(series_a), 11);
        assert_eq!(evoc_series_agent_count(series_a), 64);

        // record 0 is the immobile initial society
        let mut value = 0.0;
        assert_eq!(
            evoc_series_mean_fitness(series_a, 0, &mut value),
            EvocStatus::Ok
        );
        assert_eq!(value, 2.0);
        assert_eq!(
            evoc_series_diversity(series_a, 0, &mut value),
            EvocStatus::Ok
        );
        assert_eq!(value, 1.0);
        assert_eq!(
            evoc_series_mean_p_create(series_a, 0, &mut value),
            EvocStatus::Ok
        );
        assert_eq!(value, 0.5);
        assert_eq!(
            evoc_series_frac_imitators(series_a, 0, &mut value),
            EvocStatus::Ok
        );
        assert_eq!(value, 0.0);
        assert_eq!(
            evoc_series_frac_creators(series_a, 0, &mut value),
            EvocStatus::Ok
        );
        assert_eq!(value, 0.0);

        assert_eq!(
            evoc_series_mean_fitness(series_a, 11, &mut value),
            EvocStatus::IndexOutOfRange
        );

        // identical seeds produce identical series, field by field
        for index in 0..11 {
            let (mut a, mut b) = (0.0, 0.0);
            assert_eq!(
                evoc_series_mean_fitness(series_a, index, &mut a),
                EvocStatus::Ok
            );
            assert_eq!(
                evoc_series_mean_fitness(series_b, index, &mut b),
                EvocStatus::Ok
            );
            assert_eq!(a, b);
        }

        let mut finals = vec![0.0f64; 64];
        assert_eq!(
            evoc_series_final_p_create(series_a, finals.as_mut_ptr(), finals.len()),
            EvocStatus::Ok
        );
        assert!(finals.iter().all(|p| (0.0..=1.0).contains(p)));
        let mut too_small = vec![0.0f64; 8];
        assert_eq!(
            evoc_series_final_p_create(series_a, too_small.as_mut_ptr(), too_small.len()),
            EvocStatus::BufferTooSmall
        );

        let json = evoc_series_to_json(series_a);
        let text = CStr::from_ptr(json).to_str().unwrap();
        assert!(text.contains("\"records\""));
        assert!(text.contains("\"final_p_create\""));
        evoc_string_free(json);

        evoc_series_free(series_a);
        evoc_series_free(series_b);
    }
}

#[test]
fn oracle_reports_both_rules() {
    let (mut max, mut count) = (0.0f64, 0usize);
    assert_eq!(
        unsafe { evoc_oracle(EvocHeadRule::Prose, &mut max, &mut count) },
        EvocStatus::Ok
    );
    assert_eq!((max, count), (10.0, 8));
    assert_eq!(
        unsafe { evoc_oracle(EvocHeadRule::Literal, &mut max, &mut count) },
        EvocStatus::Ok
    );
    assert_eq!(max, 11.0);
    assert_eq!(
        unsafe { evoc_oracle(EvocHeadRule::Prose, ptr::null_mut(), &mut count) },
        EvocStatus::NullArgument
    );
}

#[test]
fn null_handles_are_rejected_not_dereferenced() {
    unsafe {
        assert_eq!(evoc_series_record_count(ptr::null()), 0);
        assert_eq!(evoc_series_agent_count(ptr::null()), 0);
        let mut value = 0.0;
        assert_eq!(
            evoc_series_mean_fitness(ptr::null(), 0, &mut value),
            EvocStatus::NullArgument
        );
        assert!(evoc_params_to_json(ptr::null()).is_null());
        assert!(evoc_series_to_json(ptr::null()).is_null());
        let mut out = ptr::null_mut();
        assert_eq!(evoc_run(ptr::null(), &mut out), EvocStatus::NullArgument);
        // frees tolerate null
        evoc_params_free(ptr::null_mut());
        evoc_series_free(ptr::null_mut());
        evoc_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_covers_the_exported_surface() {
    let header_path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/evoc.h");
    let header = std::fs::read_to_string(header_path).expect("generated header exists");
    for symbol in [
        "evoc_version",
        "evoc_last_error_message",
        "evoc_params_new",
        "evoc_params_from_json",
        "evoc_params_to_json",
        "evoc_params_free",
        "evoc_run",
        "evoc_series_record_count",
        "evoc_series_agent_count",
        "evoc_series_mean_fitness",
        "evoc_series_diversity",
        "evoc_series_mean_p_create",
        "evoc_series_frac_imitators",
        "evoc_series_frac_creators",
        "evoc_series_final_p_create",
        "evoc_series_to_json",
        "evoc_series_free",
        "evoc_oracle",
        "evoc_string_free",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
    // opaque handles and the status enum are declared
    assert!(header.contains("EvocParams"));
    assert!(header.contains("EvocSeries"));
    assert!(header.contains("EVOC_STATUS_OK"));
}
