use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use toric_kahler_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let n = unsafe { tk_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn potential(make: unsafe extern "C" fn(*mut *mut TkTPotential) -> TkStatus) -> *mut TkTPotential {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { make(&mut p) }, TkStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn fubini_study_jet_and_curvature() {
    let fs = potential(tk_potential_fubini_study);
    let mut c = [0.0; 3];
    assert_eq!(unsafe { tk_potential_f2_jet(fs, 0.5, 2, c.as_mut_ptr(), 3) }, TkStatus::Ok);
    // 1/(1 - t) at 1/2: value 2, then F''' = 4 and F'''' = 16 give c₁ = 4, c₂ = 8.
    assert!((c[0] - 2.0).abs() < 1e-14 && (c[1] - 4.0).abs() < 1e-13 && (c[2] - 8.0).abs() < 1e-12);
    assert_eq!(
        unsafe { tk_potential_f2_jet(fs, 0.5, 4, c.as_mut_ptr(), 3) },
        TkStatus::BufferTooSmall
    );
    let mut s = 0.0;
    for n in 1..=5usize {
        assert_eq!(unsafe { tk_scalar_curvature_reduced(fs, n, 0.3, &mut s) }, TkStatus::Ok);
        assert!((s - (n * (n + 1)) as f64).abs() < 1e-9);
    }
    assert_eq!(unsafe { tk_scalar_curvature_reduced(fs, 2, 1.5, &mut s) }, TkStatus::Domain);
    assert!(!last_error().is_empty());
    unsafe { tk_potential_free(fs) };
}

#[test]
fn hessian_of_flat_potential() {
    let flat = potential(tk_potential_flat);
    let x = [1.0, 2.0];
    let mut g = [0.0; 4];
    let mut g_inv = [0.0; 4];
    let mut det = 0.0;
    let status = unsafe { tk_hessian_t_family(flat, x.as_ptr(), 2, g.as_mut_ptr(), g_inv.as_mut_ptr(), &mut det) };
    assert_eq!(status, TkStatus::Ok);
    assert_eq!(g, [0.5, 0.0, 0.0, 0.25]);
    assert_eq!(g_inv, [2.0, 0.0, 0.0, 4.0]);
    assert!((det - 8.0).abs() < 1e-12);
    let bad = [1.0, 0.0];
    let status = unsafe { tk_hessian_t_family(flat, bad.as_ptr(), 2, ptr::null_mut(), ptr::null_mut(), &mut det) };
    assert_eq!(status, TkStatus::Domain);
    unsafe { tk_potential_free(flat) };
}

#[test]
fn non_admissible_and_out_of_domain_hessians() {
    // A = 10, B = 0, n = 2 at t = 1: F'' = 10/(1 - 10), so 1 + tF'' < 0.
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tk_potential_scalar_flat_family(2, 10.0, 0.0, &mut p) }, TkStatus::Ok);
    let x = [0.5, 0.5];
    let mut det = 0.0;
    let status = unsafe { tk_hessian_t_family(p, x.as_ptr(), 2, ptr::null_mut(), ptr::null_mut(), &mut det) };
    assert_eq!(status, TkStatus::NonAdmissible);
    unsafe { tk_potential_free(p) };

    let mut bs = ptr::null_mut();
    assert_eq!(unsafe { tk_potential_burns_simanca(3, &mut bs) }, TkStatus::Ok);
    // t = 0.75 lies below the blow-up facet.
    let x = [0.25, 0.25, 0.25];
    let status = unsafe { tk_hessian_t_family(bs, x.as_ptr(), 3, ptr::null_mut(), ptr::null_mut(), &mut det) };
    assert_eq!(status, TkStatus::Domain);
    unsafe { tk_potential_free(bs) };
}

#[test]
fn boundary_match_and_delta() {
    let (mut a, mut b, mut written) = (0.0, 0.0, 0usize);
    let mut q = [0.0; 4];
    let status = unsafe { tk_boundary_match(4, &mut a, &mut b, q.as_mut_ptr(), q.len(), &mut written) };
    assert_eq!(status, TkStatus::Ok);
    assert_eq!((a, b, written), (3.0, -2.0, 4));
    assert_eq!(q, [-2.0, 1.0, 1.0, 1.0]);

    let status = unsafe { tk_boundary_match(4, &mut a, &mut b, q.as_mut_ptr(), 2, &mut written) };
    assert_eq!(status, TkStatus::BufferTooSmall);
    assert_eq!(written, 4);
    assert_eq!(unsafe { tk_boundary_match(1, &mut a, &mut b, ptr::null_mut(), 0, ptr::null_mut()) }, TkStatus::InvalidArgument);

    let mut delta = 0.0;
    assert_eq!(unsafe { tk_boundary_delta(3, 1.0, &mut delta) }, TkStatus::Ok);
    assert_eq!(delta, 8.0);
    assert_eq!(unsafe { tk_boundary_delta(3, 0.5, &mut delta) }, TkStatus::Domain);
}

#[test]
fn decay_slope() {
    let mut slope = 0.0;
    assert_eq!(unsafe { tk_decay_slope(3, 1e2, 1e6, 32, &mut slope) }, TkStatus::Ok);
    assert!((slope + 2.0).abs() < 0.1);
    assert_eq!(unsafe { tk_decay_slope(3, 0.5, 1e6, 32, &mut slope) }, TkStatus::Domain);
}

#[test]
fn null_pointers_are_rejected() {
    assert_eq!(unsafe { tk_potential_flat(ptr::null_mut()) }, TkStatus::NullPointer);
    let mut s = 0.0;
    assert_eq!(unsafe { tk_scalar_curvature_reduced(ptr::null(), 2, 0.5, &mut s) }, TkStatus::NullPointer);
    unsafe { tk_potential_free(ptr::null_mut()) };
    let msg = unsafe { CStr::from_ptr(tk_status_message(TkStatus::NullPointer)) };
    assert_eq!(msg.to_str().unwrap(), "null pointer argument");
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/toric_kahler.h")).unwrap();
    for name in [
        "tk_status_message",
        "tk_last_error_message",
        "tk_potential_flat",
        "tk_potential_fubini_study",
        "tk_potential_generalized_burns",
        "tk_potential_burns_simanca",
        "tk_potential_scalar_flat_family",
        "tk_potential_free",
        "tk_potential_f2_jet",
        "tk_scalar_curvature_reduced",
        "tk_hessian_t_family",
        "tk_boundary_match",
        "tk_boundary_delta",
        "tk_decay_slope",
    ] {
        let declared = header.contains(&format!(" {name}(")) || header.contains(&format!("*{name}("));
        assert!(declared, "{name} missing from header");
    }
    assert!(header.contains("typedef struct TkTPotential TkTPotential;"));
}

/// Directory holding `libtoric_kahler_ffi.a`: the parent of `deps/`.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = artifact_dir().join("libtoric_kahler_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out_dir = tempfile_dir();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok: ok");
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toric-kahler-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
