use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/polya_cert.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let h = header();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(h.contains(&format!(" {name}(")), "{name} missing from header");
    }
    for ty in ["typedef struct PcPolygon PcPolygon;", "typedef struct PcSpectrum PcSpectrum;", "PC_STATUS_CERTIFICATE = 9"] {
        assert!(h.contains(ty), "{ty} missing from header");
    }
}

#[cfg(target_os = "linux")]
/// Directory holding the cdylib built alongside this test.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().to_path_buf()
}

#[cfg(target_os = "linux")]
#[test]
fn c_program_links_and_runs() {
    let dir = lib_dir();
    assert!(dir.join("libpolya_cert_ffi.so").exists(), "no shared library in {}", dir.display());
    let tmp = tempfile::tempdir().unwrap();
    let c = tmp.path().join("main.c");
    std::fs::write(
        &c,
        r#"
#include <math.h>
#include <stdio.h>
#include "polya_cert.h"

int main(void) {
    double xy[] = {0, 0, 1, 0, 1, 1, 0, 1};
    PcPolygon *p = NULL;
    PcSpectrum *s = NULL;
    PcBoundReport r;
    if (pc_polygon_new(xy, 4, &p) != PC_STATUS_OK) return 10;
    if (pc_spectrum_rectangle(1, 1, 200, &s) != PC_STATUS_OK) return 11;
    if (pc_verify(p, 100, s, &r) != PC_STATUS_OK) return 12;
    if (r.n_n != 13 || !r.pass) return 13;
    if (fabs(pc_j0_zero() - 2.404825557695773) > 1e-12) return 14;
    double z;
    if (pc_bessel_zero(-1, &z) != PC_STATUS_DOMAIN) return 15;
    char msg[256];
    if (pc_last_error_message(msg, sizeof msg) == 0) return 16;
    pc_spectrum_free(s);
    pc_polygon_free(p);
    printf("n_N=%zu convex=%.4f\n", r.n_n, r.bound_convex);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("main");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&c)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(&dir)
        .arg(format!("-Wl,-rpath,{}", dir.display()))
        .args(["-lpolya_cert_ffi", "-lm", "-o"])
        .arg(&exe)
        .status();
    let Ok(status) = status else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "n_N=13 convex=4.9916");
}
