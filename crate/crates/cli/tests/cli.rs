use std::process::{Command, Output};

fn ltob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltob")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("ltob-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn example_outputs() {
    let fib = ltob(&["classify", "--ring", "fib"]);
    assert!(fib.status.success());
    assert!(stdout(&fib).starts_with("III_lambda lambda=0.6180339887"));
    assert_eq!(stdout(&ltob(&["classify", "--ring", "hilb_z2"])), "II_1 exact=true\n");
    assert_eq!(stdout(&ltob(&["toric", "boundary-dim", "--sites", "3"])), "dim=32 blocks=M4+M4\n");
    let rep = stdout(&ltob(&["k0", "infinitesimal", "--ring", "rep_s3"]));
    assert!(rep.starts_with("witness [-1, -1, 1]"), "{rep}");
}

#[test]
fn every_subcommand_answers() {
    let cases: [&[&str]; 9] = [
        &["ring", "dims", "--ring", "ising"],
        &["ring", "triples", "--ring", "rep_s3"],
        &["classify"],
        &["state", "kms-check", "--ring", "fib", "--level", "2"],
        &["state", "trace-check", "--ring", "hilb_s3", "--level", "2"],
        &["state", "canonical", "--ring", "fib", "--level", "1"],
        &["toric", "iso-verify", "--sites", "2", "--kind", "smooth"],
        &["toric", "reduce", "--window", "rect 0 0 6 6", "--lambda", "rect 2 2 4 4", "I"],
        &["k0", "uhf", "--ring", "hilb_s3", "--two-sided"],
    ];
    for args in cases {
        let out = ltob(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn exit_codes_follow_the_error_class() {
    let bad_json = write_temp("bad.json", "{\"simples\":");
    let no_unit = write_temp("v.json", r#"{"simples":["1","a"],"dual":[0,1],"N":[[0,0,0,1],[0,1,1,1],[1,0,1,1],[1,1,1,1]]}"#);
    let cases: [(&[&str], i32); 7] = [
        (&["no-such-command"], 2),
        (&["ring", "--file", bad_json.to_str().unwrap()], 2),
        (&["classify", "--ring", "fib", "--precision", "1"], 3),
        (&["ring", "--file", no_unit.to_str().unwrap()], 3),
        (&["k0", "infinitesimal", "--ring", "ising", "--bound", "0"], 3),
        (&["state", "canonical", "--ring", "fib", "--level", "99"], 4),
        (&["k0", "infinitesimal", "--ring", "fib"], 5),
    ];
    for (args, code) in cases {
        let out = ltob(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn json_reports_are_deterministic() {
    for args in [
        &["classify", "--json"][..],
        &["k0", "report", "--ring", "rep_s3", "--json"],
        &["toric", "boundary-dim", "--sites", "4", "--kind", "smooth", "--json"],
        &["state", "trace-check", "--ring", "fib", "--json", "--seed", "7"],
    ] {
        let (a, b) = (ltob(args), ltob(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert!(v["result"].is_object() || v["result"].is_array());
        assert_eq!(v["config"]["precision"], 50);
    }
}
