use std::ffi::{CStr, CString};
use std::ptr;

use yamabe_ffi::*;

fn last_error() -> String {
    let p = yamabe_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn sphere_profile_through_handles() {
    unsafe {
        let mut pr: *mut YamabeProfile = ptr::null_mut();
        let st = yamabe_profile_integrate(3, 1.0, 6.0, 0.0, 2.0, 1e-3, &mut pr);
        assert_eq!(st, YamabeStatus::Ok);
        let mut len = 0usize;
        assert_eq!(yamabe_profile_len(pr, &mut len), YamabeStatus::Ok);
        assert!(len > 1000);
        let (mut kind, mut r) = (-1, 0.0);
        assert_eq!(
            yamabe_profile_status(pr, &mut kind, &mut r),
            YamabeStatus::Ok
        );
        assert_eq!(kind, YAMABE_PROFILE_COMPLETE);
        let mut row = [0.0; YAMABE_PROFILE_COLUMNS];
        assert_eq!(
            yamabe_profile_node(pr, 500, row.as_mut_ptr()),
            YamabeStatus::Ok
        );
        assert!((row[1] - row[0].sin()).abs() < 1e-9);
        assert!((row[7] - 6.0).abs() < 1e-9);
        assert_eq!(
            yamabe_profile_node(pr, len, row.as_mut_ptr()),
            YamabeStatus::InvalidArgument
        );

        let mut inst: *mut YamabeInstance = ptr::null_mut();
        assert_eq!(
            yamabe_instance_from_profile(pr, &mut inst),
            YamabeStatus::Ok
        );
        let mut dim = 0usize;
        assert_eq!(yamabe_instance_dim(inst, &mut dim), YamabeStatus::Ok);
        assert_eq!(dim, 3);
        let p = [1.0, 1.2, 0.4];
        let mut s = 0.0;
        assert_eq!(
            yamabe_instance_scalar_curvature(inst, p.as_ptr(), 3, &mut s),
            YamabeStatus::Ok
        );
        assert!((s - 6.0).abs() < 1e-7, "{s}");
        let mut res = 1.0;
        assert_eq!(
            yamabe_instance_soliton_residual(inst, p.as_ptr(), 3, &mut res),
            YamabeStatus::Ok
        );
        assert!(res < 1e-8);
        let mut chain = 1.0;
        assert_eq!(
            yamabe_profile_chain_residual(pr, &mut chain),
            YamabeStatus::Ok
        );
        assert!(chain < 1e-9);
        yamabe_instance_free(inst);
        yamabe_profile_free(pr);
    }
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("w.csv").to_str().unwrap()).unwrap();
    unsafe {
        let mut pr: *mut YamabeProfile = ptr::null_mut();
        assert_eq!(
            yamabe_profile_integrate(4, 2.0, 1.0, 0.5, 1.0, 1e-3, &mut pr),
            YamabeStatus::Ok
        );
        assert_eq!(
            yamabe_profile_write_csv(pr, path.as_ptr()),
            YamabeStatus::Ok
        );
        let mut back: *mut YamabeProfile = ptr::null_mut();
        assert_eq!(
            yamabe_profile_read_csv(path.as_ptr(), 4, 2.0, 1.0, &mut back),
            YamabeStatus::Ok
        );
        let (mut a, mut b) = (0usize, 0usize);
        yamabe_profile_len(pr, &mut a);
        yamabe_profile_len(back, &mut b);
        assert_eq!(a, b);
        // wrong ρ does not reproduce the stored curvature column
        let mut bad: *mut YamabeProfile = ptr::null_mut();
        let st = yamabe_profile_read_csv(path.as_ptr(), 4, 2.0, 3.0, &mut bad);
        assert_eq!(st, YamabeStatus::InvalidArgument);
        assert!(bad.is_null());
        assert!(last_error().contains("inconsistent"));
        yamabe_profile_free(back);
        yamabe_profile_free(pr);
    }
}

#[test]
fn infinite_m_and_bad_arguments() {
    unsafe {
        let mut pr: *mut YamabeProfile = ptr::null_mut();
        assert_eq!(
            yamabe_profile_integrate(3, f64::INFINITY, 0.0, 0.5, 1.0, 1e-3, &mut pr),
            YamabeStatus::Ok
        );
        yamabe_profile_free(pr);
        pr = ptr::null_mut();
        assert_eq!(
            yamabe_profile_integrate(2, 1.0, 1.0, 0.5, 1.0, 1e-3, &mut pr),
            YamabeStatus::InvalidArgument
        );
        assert!(pr.is_null());
        assert!(last_error().contains("dimension"));
        assert_eq!(
            yamabe_profile_integrate(3, 0.0, 1.0, 0.5, 1.0, 1e-3, &mut pr),
            YamabeStatus::InvalidArgument
        );
        assert_eq!(
            yamabe_profile_integrate(3, 1.0, 1.0, 0.5, 1.0, 1e-3, ptr::null_mut()),
            YamabeStatus::NullPointer
        );
        let mut len = 0;
        assert_eq!(
            yamabe_profile_len(ptr::null(), &mut len),
            YamabeStatus::NullPointer
        );
        yamabe_profile_free(ptr::null_mut());
        yamabe_instance_free(ptr::null_mut());
        yamabe_string_free(ptr::null_mut());
    }
}

#[test]
fn catalog_instance_and_errors() {
    unsafe {
        let name = CString::new("HALF_STEADY").unwrap();
        let mut inst: *mut YamabeInstance = ptr::null_mut();
        assert_eq!(
            yamabe_instance_catalog(name.as_ptr(), 0, &mut inst),
            YamabeStatus::Ok
        );
        let p = [0.2, 0.1, -0.3];
        let mut res = 1.0;
        assert_eq!(
            yamabe_instance_soliton_residual(inst, p.as_ptr(), 3, &mut res),
            YamabeStatus::Ok
        );
        assert!(res < 1e-12);
        let far = [5.0, 0.0, 0.0];
        assert_eq!(
            yamabe_instance_soliton_residual(inst, far.as_ptr(), 3, &mut res),
            YamabeStatus::OutOfDomain
        );
        assert_eq!(
            yamabe_instance_soliton_residual(inst, p.as_ptr(), 2, &mut res),
            YamabeStatus::WrongDimension
        );

        let mut json = ptr::null_mut();
        let mut pass = -1;
        let st =
            yamabe_instance_verify_json(inst, YAMABE_SUITE_SOLITON, 5, 1, &mut json, &mut pass);
        assert_eq!(st, YamabeStatus::Ok);
        assert_eq!(pass, 1);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        yamabe_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["summary"]["pass"], true);
        assert_eq!(
            yamabe_instance_verify_json(inst, 0, 5, 1, &mut json, &mut pass),
            YamabeStatus::InvalidArgument
        );
        yamabe_instance_free(inst);

        let unknown = CString::new("NOPE").unwrap();
        assert_eq!(
            yamabe_instance_catalog(unknown.as_ptr(), 0, &mut inst),
            YamabeStatus::InvalidArgument
        );
        assert!(last_error().contains("NOPE"));
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(yamabe_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// The generated header is valid C and C++ and declares every entry point.
#[test]
fn header_compiles() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/yamabe.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "yamabe_profile_integrate",
        "yamabe_profile_read_csv",
        "yamabe_instance_catalog",
        "yamabe_instance_verify_json",
        "yamabe_last_error_message",
        "yamabe_string_free",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"yamabe.h\"\nint main(void) { YamabeProfile *p = 0; \
         return yamabe_profile_integrate(3, 1.0, 6.0, 0.0, 1.0, 1e-3, &p) == YAMABE_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    for compiler in ["cc", "c++"] {
        let lang = if compiler == "cc" { "c" } else { "c++" };
        match std::process::Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(header.parent().unwrap())
            .arg(&src)
            .output()
        {
            Ok(out) => assert!(
                out.status.success(),
                "{compiler}: {}",
                String::from_utf8_lossy(&out.stderr)
            ),
            Err(_) => eprintln!("{compiler} not available; skipped"),
        }
    }
}
