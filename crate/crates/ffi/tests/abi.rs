use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use swk_ffi::*;

fn build(spec: &str) -> *mut SwkOperators {
    let spec = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { swk_operators_from_spec(spec.as_ptr(), &mut out) },
        SwkStatus::Ok
    );
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = swk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn cycle_dimensions_and_discriminant() {
    let ops = build("cycle:5");
    let (mut h, mut k) = (0, 0);
    assert_eq!(unsafe { swk_operators_dims(ops, &mut h, &mut k) }, SwkStatus::Ok);
    assert_eq!((h, k), (10, 5));

    let mut values = vec![0.0; 5];
    assert_eq!(
        unsafe { swk_discriminant_spectrum(ops, values.as_mut_ptr(), 5) },
        SwkStatus::Ok
    );
    let mut expected: Vec<f64> = (0..5).map(|j| (std::f64::consts::TAU * j as f64 / 5.0).cos()).collect();
    expected.sort_by(f64::total_cmp);
    for (a, b) in values.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
    unsafe { swk_operators_free(ops) };
}

#[test]
fn copied_evolution_is_unitary() {
    let ops = build("random:v=6,p=0.7,seed=4,complex,theta");
    let (mut rows, mut cols) = (0, 0);
    assert_eq!(
        unsafe {
            swk_operators_copy(
                ops,
                SwkOperator::Evolution,
                ptr::null_mut(),
                ptr::null_mut(),
                0,
                &mut rows,
                &mut cols,
            )
        },
        SwkStatus::BufferTooSmall
    );
    let n = rows;
    assert_eq!(rows, cols);
    let (mut re, mut im) = (vec![0.0; n * n], vec![0.0; n * n]);
    let status = unsafe {
        swk_operators_copy(
            ops,
            SwkOperator::Evolution,
            re.as_mut_ptr(),
            im.as_mut_ptr(),
            n * n,
            &mut rows,
            &mut cols,
        )
    };
    assert_eq!(status, SwkStatus::Ok);
    for i in 0..n {
        for j in 0..n {
            let (mut sr, mut si) = (0.0, 0.0);
            for k in 0..n {
                let (ar, ai) = (re[k * n + i], -im[k * n + i]);
                let (br, bi) = (re[k * n + j], im[k * n + j]);
                sr += ar * br - ai * bi;
                si += ar * bi + ai * br;
            }
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((sr - target).abs() < 1e-12 && si.abs() < 1e-12);
        }
    }

    let (mut ure, mut uim) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(
        unsafe { swk_evolution_spectrum(ops, ure.as_mut_ptr(), uim.as_mut_ptr(), n) },
        SwkStatus::Ok
    );
    assert!(ure
        .iter()
        .zip(&uim)
        .all(|(r, i)| ((r * r + i * i).sqrt() - 1.0).abs() < 1e-10));
    unsafe { swk_operators_free(ops) };
}

#[test]
fn verify_passes_on_torus() {
    let ops = build("torus:d=2,side=3");
    let mut pass = false;
    assert_eq!(unsafe { swk_verify(ops, 0.0, &mut pass) }, SwkStatus::Ok);
    assert!(pass);
    unsafe { swk_operators_free(ops) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut out = ptr::null_mut();
    let bad = CString::new("cycle:x").unwrap();
    assert_eq!(
        unsafe { swk_operators_from_spec(bad.as_ptr(), &mut out) },
        SwkStatus::InvalidArgument
    );
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(
        unsafe { swk_operators_from_spec(ptr::null(), &mut out) },
        SwkStatus::NullPointer
    );
    let (mut h, mut k) = (0, 0);
    assert_eq!(
        unsafe { swk_operators_dims(ptr::null(), &mut h, &mut k) },
        SwkStatus::NullPointer
    );
    unsafe { swk_operators_free(ptr::null_mut()) };

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.graph");
    std::fs::write(&path, "not a graph\n").unwrap();
    let p = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { swk_operators_load(p.as_ptr(), &mut out) }, SwkStatus::Parse);
    assert!(last_error().contains("line 1"));
}

#[test]
fn save_and_load_round_trip() {
    let ops = build("complete:4");
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("k4.graph").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { swk_operators_save_graph(ops, path.as_ptr()) }, SwkStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { swk_operators_load(path.as_ptr(), &mut back) }, SwkStatus::Ok);
    let (mut h, mut k) = (0, 0);
    assert_eq!(unsafe { swk_operators_dims(back, &mut h, &mut k) }, SwkStatus::Ok);
    assert_eq!((h, k), (12, 4));
    unsafe {
        swk_operators_free(ops);
        swk_operators_free(back);
    }

    let abstract_model = build("partition-of-unity:n=4,profile=quarter-cosine");
    assert_eq!(
        unsafe { swk_operators_save_graph(abstract_model, path.as_ptr()) },
        SwkStatus::InvalidArgument
    );
    unsafe { swk_operators_free(abstract_model) };
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(swk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/swk.h");
    assert!(header.exists());
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "swk_operators_from_spec",
        "swk_operators_free",
        "swk_verify",
        "swk_last_error",
        "typedef struct SwkOperators SwkOperators",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .output()
        else {
            eprintln!("{compiler} not available; skipping");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
