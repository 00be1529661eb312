use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use plse_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(plse_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { plse_string_free(p) };
    s
}

#[test]
fn parse_solve_and_verify() {
    let text = CString::new("2\n1 0\n0 0\n").unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { plse_instance_parse(text.as_ptr(), &mut inst) }, PlseStatus::Ok);
    assert_eq!(unsafe { plse_instance_order(inst) }, 2);
    assert_eq!(unsafe { plse_instance_given(inst) }, 1);

    let alg = CString::new("tr-ils").unwrap();
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { plse_solve(inst, alg.as_ptr(), 0.5, 1, &mut sol) }, PlseStatus::Ok);
    assert_eq!(unsafe { plse_solution_size(sol) }, 3);
    assert!(unsafe { plse_solution_is_optimal(sol) });
    let mut grid = [0u16; 4];
    assert_eq!(unsafe { plse_solution_grid(sol, grid.as_mut_ptr(), 4) }, PlseStatus::Ok);
    assert_eq!(grid, [1, 2, 2, 1]);
    assert_eq!(
        unsafe { plse_solution_grid(sol, grid.as_mut_ptr(), 3) },
        PlseStatus::BufferTooSmall
    );

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { plse_solution_to_text(sol, &mut out) }, PlseStatus::Ok);
    let solved = CString::new(take_string(out)).unwrap();
    assert_eq!(unsafe { plse_verify(text.as_ptr(), solved.as_ptr()) }, PlseStatus::Ok);
    assert_eq!(last_error(), "");

    unsafe {
        plse_solution_free(sol);
        plse_instance_free(inst);
    }
}

#[test]
fn errors_carry_messages() {
    let mut inst = ptr::null_mut();
    let bad = CString::new("2\n1 1\n0 0\n").unwrap();
    assert_eq!(unsafe { plse_instance_parse(bad.as_ptr(), &mut inst) }, PlseStatus::ParseError);
    assert!(inst.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { plse_instance_parse(ptr::null(), &mut inst) }, PlseStatus::NullPointer);

    let scheme = CString::new("sudoku").unwrap();
    assert_eq!(
        unsafe { plse_instance_generate(scheme.as_ptr(), 5, 0.5, 0, &mut inst) },
        PlseStatus::InvalidArgument
    );

    let text = CString::new("2\n1 0\n0 0\n").unwrap();
    let clash = CString::new("2\n1 1\n0 0\n").unwrap();
    assert_eq!(unsafe { plse_verify(text.as_ptr(), clash.as_ptr()) }, PlseStatus::InvalidSolution);
    assert!(last_error().starts_with("row 1"), "{}", last_error());
    let missing = CString::new("2\n0 1\n0 0\n").unwrap();
    assert_eq!(unsafe { plse_verify(text.as_ptr(), missing.as_ptr()) }, PlseStatus::InvalidSolution);

    let mut sol = ptr::null_mut();
    let alg = CString::new("ls9").unwrap();
    assert_eq!(unsafe { plse_solve(ptr::null(), alg.as_ptr(), 1.0, 0, &mut sol) }, PlseStatus::NullPointer);
    assert_eq!(unsafe { plse_solution_size(ptr::null()) }, 0);
    unsafe {
        plse_instance_free(ptr::null_mut());
        plse_solution_free(ptr::null_mut());
        plse_string_free(ptr::null_mut());
    }
}

#[test]
fn generate_round_trips_through_text() {
    let scheme = CString::new("qwh").unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { plse_instance_generate(scheme.as_ptr(), 10, 0.5, 3, &mut inst) },
        PlseStatus::Ok
    );
    assert_eq!(unsafe { plse_instance_given(inst) }, 50);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { plse_instance_to_text(inst, &mut out) }, PlseStatus::Ok);
    let text = CString::new(take_string(out)).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { plse_instance_parse(text.as_ptr(), &mut again) }, PlseStatus::Ok);
    assert_eq!(unsafe { plse_instance_given(again) }, 50);

    let alg = CString::new("ls2").unwrap();
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { plse_solve(inst, alg.as_ptr(), 0.0, 0, &mut sol) }, PlseStatus::InvalidArgument);
    unsafe {
        plse_instance_free(inst);
        plse_instance_free(again);
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(plse_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "plse.h"

int main(void) {
    PlseInstance *inst = NULL;
    if (plse_instance_generate("qwh", 6, 0.5, 1, &inst) != PLSE_STATUS_OK) return 1;
    PlseSolution *sol = NULL;
    if (plse_solve(inst, "tr-ils", 2.0, 1, &sol) != PLSE_STATUS_OK) return 2;
    uint16_t grid[36];
    if (plse_solution_grid(sol, grid, 36) != PLSE_STATUS_OK) return 3;
    if (plse_instance_parse("x", &inst) != PLSE_STATUS_PARSE_ERROR) return 4;
    printf("%zu %d\n", plse_solution_size(sol), plse_solution_is_optimal(sol));
    plse_solution_free(sol);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler found; skipping");
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libplse_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    // A QWH instance always completes.
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "18 1");
}
