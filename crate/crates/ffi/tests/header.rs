use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn header() -> String {
    std::fs::read_to_string(manifest_dir().join("include/kahler_qm.h")).expect("generated header")
}

#[test]
fn header_declares_handles_codes_and_functions() {
    let h = header();
    for needle in [
        "typedef struct KqmSpace KqmSpace;",
        "typedef struct KqmState KqmState;",
        "typedef struct KqmOperator KqmOperator;",
        "KQM_STATUS_OK = 0",
        "KQM_STATUS_SINGULAR_SEED = 11",
        "KQM_STATUS_PANIC = 14",
        "#define KQM_PICTURE_AFFINE 2",
        "KqmStatus kqm_space_new(size_t modes, size_t cutoff, double hbar, struct KqmSpace **out);",
        "void kqm_string_free(char *s);",
        "KqmStatus kqm_verify(",
    ] {
        assert!(h.contains(needle), "header lacks `{needle}`");
    }
}

/// Directory holding the library artifacts next to this test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = artifact_dir().join("libkahler_qm_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let out_dir = std::env::temp_dir().join(format!("kqm-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(manifest_dir().join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_dir_all(&out_dir);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
