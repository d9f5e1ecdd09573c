//! Golden-file tests for every subcommand. Set `QSYMKIT_BLESS=1` to rewrite
//! the expected outputs after an intended change.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

const CASES: &[(&str, &[&str], i32)] = &[
    ("laplacian_two_points", &["laplacian", "--metric", "two-points.json"], 0),
    ("laplacian_square_json", &["laplacian", "--metric", "square.json", "--format", "json"], 0),
    ("aut_square", &["aut", "--metric", "square.json"], 0),
    ("aut_path3", &["aut", "--graph", "path3.json"], 0),
    ("aut_binary2", &["aut", "--tree", "binary2.json"], 0),
    ("present_square_commutation", &["present", "--metric", "square.json", "--scheme", "commutation"], 0),
    ("present_two_points_qiso", &["present", "--metric", "two-points.json", "--scheme", "qiso"], 0),
    ("present_path3_edge", &["present", "--graph", "path3.json"], 0),
    ("present_binary2_tree", &["present", "--tree", "binary2.json", "--level", "2"], 0),
    ("present_magic2_json", &["present", "--scheme", "magic", "--n", "2", "--format", "json"], 0),
    ("abelianize_magic2", &["abelianize", "--scheme", "magic", "--n", "2"], 0),
    ("solve01_scalene", &["solve01", "--metric", "scalene.json"], 0),
    ("solve01_cantor2", &["solve01", "--scheme", "cantor-reduced", "--n", "2"], 0),
    (
        "verify_witness",
        &["verify-model", "--scheme", "cantor-reduced", "--n", "2", "--model", "witness-model.json"],
        0,
    ),
    ("verify_bad", &["verify-model", "--scheme", "magic", "--n", "2", "--model", "bad-model.json"], 1),
    ("witness_cantor2", &["witness", "--scheme", "cantor-reduced", "--n", "2"], 0),
    ("witness_magic2", &["witness", "--scheme", "magic", "--n", "2"], 0),
    ("witness_scalene", &["witness", "--metric", "scalene.json"], 0),
    ("cantor_level2_reduced", &["cantor", "--level", "2"], 0),
    ("cantor_level2_raw", &["cantor", "--level", "2", "--form", "raw"], 0),
    ("cantor_limit1", &["cantor", "--limit", "1"], 0),
    ("cantor_witness", &["cantor", "--witness"], 0),
    ("continuum_interval5", &["continuum", "--space", "interval", "--degree", "5"], 0),
    ("continuum_circle3", &["continuum", "--space", "circle", "--degree", "3"], 0),
    ("check_square", &["check", "--metric", "square.json"], 0),
    ("check_scalene", &["check", "--metric", "scalene.json"], 0),
    ("check_path3", &["check", "--graph", "path3.json"], 0),
    ("check_binary2", &["check", "--tree", "binary2.json"], 0),
];

fn tests_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run(args: &[&str], threads: &str) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_qsymkit"))
        .args(args)
        .current_dir(tests_dir().join("data"))
        .env("QSYMKIT_THREADS", threads)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn golden_outputs() {
    let bless = std::env::var_os("QSYMKIT_BLESS").is_some();
    let mut mismatches = Vec::new();
    for (name, args, code) in CASES {
        let (stdout, stderr, status) = run(args, "2");
        assert_eq!(status, *code, "{name}: exit status, stderr: {stderr}");
        let path = tests_dir().join("golden").join(format!("{name}.txt"));
        if bless {
            fs::write(&path, &stdout).unwrap();
            continue;
        }
        let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        if expected != stdout {
            mismatches.push(format!("--- {name}\nexpected:\n{expected}\nactual:\n{stdout}"));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for args in [&["aut", "--metric", "square.json"][..], &["check", "--tree", "binary2.json"][..]] {
        let one = run(args, "1");
        let many = run(args, "4");
        assert_eq!(one, many);
    }
}

#[test]
fn exit_codes() {
    let (_, err, code) = run(&["aut", "--metric", "missing.json"], "1");
    assert_eq!(code, 2, "{err}");
    let (_, err, code) = run(&["laplacian", "--metric", "path3.json"], "1");
    assert_eq!(code, 2, "{err}");
    let (_, _, code) = run(&["present", "--unknown-flag"], "1");
    assert_eq!(code, 2);
    let (_, err, code) = run(&["present", "--scheme", "magic", "--n", "0"], "1");
    assert_eq!(code, 1);
    assert!(err.contains("n >= 1"), "{err}");
    let (_, _, code) = run(&["aut", "--metric", "square.json", "--size-cap", "3"], "1");
    assert_eq!(code, 1);
}
