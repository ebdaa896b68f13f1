//! Criterion 7: byte-identical output for identical flags, including across
//! different --threads values; plus exit-code contract checks.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sievelab")
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let status = Command::new(bin())
        .args(args)
        .arg("--out")
        .arg(&out)
        .status()
        .expect("spawn sievelab");
    assert!(status.success(), "sievelab {args:?} failed: {status}");
    std::fs::read(&out).expect("read output file")
}

#[test]
fn criterion_7_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&str, &[&str])] = &[
        (
            "bv-square",
            &["bv-square", "--x", "20000", "--qmax", "9", "--format", "csv"],
        ),
        (
            "weighted-sum",
            &["weighted-sum", "--x", "20000", "--y", "9", "--format", "json"],
        ),
        (
            "ls-sparse",
            &[
                "ls-sparse", "--Q", "100", "--t", "2", "--N", "60", "--seq", "random-unit",
                "--seed", "11", "--format", "json",
            ],
        ),
        (
            "well-dist",
            &["well-dist", "--rlist", "100,400", "--tlist", "1,2", "--format", "csv"],
        ),
        (
            "census-am2",
            &["census-am2", "--x", "20000", "--format", "json"],
        ),
    ];
    for (name, args) in cases {
        let base = run_to_file(dir.path(), &format!("{name}-a"), args);
        let repeat = run_to_file(dir.path(), &format!("{name}-b"), args);
        assert_eq!(base, repeat, "{name}: repeat run differs");
        for threads in ["1", "3"] {
            let mut with_threads = args.to_vec();
            with_threads.extend_from_slice(&["--threads", threads]);
            let got = run_to_file(dir.path(), &format!("{name}-t{threads}"), &with_threads);
            assert_eq!(base, got, "{name}: --threads {threads} changed the bytes");
        }
    }
    println!("PASS criterion 7: {} subcommands byte-identical across reruns and --threads 1/3", cases.len());
}

#[test]
fn exit_codes() {
    // bad flag value -> 2 (clap)
    let s = Command::new(bin())
        .args(["sparsity", "--x", "10", "--theta", "not-a-number"])
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(2));

    // domain error -> 2 with a one-line diagnostic
    let s = Command::new(bin())
        .args(["sparsity", "--x", "10", "--theta", "1.5"])
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(2));
    let err = String::from_utf8_lossy(&s.stderr);
    assert_eq!(err.trim().lines().count(), 1, "diagnostic not one line: {err}");

    // success -> 0 with output on stdout
    let s = Command::new(bin())
        .args(["sparsity", "--x", "100", "--theta", "1", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&s.stdout).contains("100"));
}

#[test]
fn json_metadata_fields() {
    let s = Command::new(bin())
        .args(["phi-sum", "--y", "50", "--format", "json"])
        .output()
        .unwrap();
    assert!(s.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&s.stdout).unwrap();
    for key in ["paper_anchor", "params", "seed"] {
        assert!(doc.get(key).is_some(), "missing {key} in JSON payload");
    }
}
