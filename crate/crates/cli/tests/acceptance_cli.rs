//! CLI acceptance: reports are byte-identical across runs for a fixed seed,
//! and exit codes follow the pass/fail/input-error convention.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_11_deterministic_reports() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify", "--builtin", "c0", "--field", "Fp:5"],
        vec!["verify", "--builtin", "star:6", "--field", "Q", "--seed", "7"],
        vec!["verify", "--builtin", "onefold:4", "--field", "Q", "--json"],
        vec!["grading", "classify", "--builtin", "cd", "--json"],
        vec!["grading", "finelist", "--n", "4"],
        vec!["spin", "orbits", "--field", "Fp:3", "--target", "isotropic"],
        vec!["spin", "triple", "--vectors", "w1,w2", "--json"],
        vec!["spin", "lie", "--n", "4", "--field", "Fp:7"],
    ];
    for args in &commands {
        let a = run(args);
        let b = run(args);
        assert!(
            a.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.status.code(), b.status.code(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?} must be byte-identical");
    }
    println!("criterion 11: PASS ({} commands byte-identical across runs)", commands.len());
}

#[test]
fn exit_codes() {
    // 0 on pass
    let ok = run(&["verify", "--builtin", "quat", "--field", "Q"]);
    assert_eq!(ok.status.code(), Some(0));
    // 2 on malformed input
    let dir = std::env::temp_dir().join("crossalg-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let parse = run(&["verify", "--input", bad.to_str().unwrap()]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("parse"));
    // 2 on unknown builtin
    let unknown = run(&["verify", "--builtin", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}
