use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mlcif(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlcif"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn identical_invocations_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["enumerate", "--k", "3"][..],
        &[
            "verify",
            "--suite",
            "theorem2",
            "--k",
            "2",
            "--n",
            "144",
            "--samples",
            "20",
            "--seed",
            "7",
        ],
        &[
            "young",
            "--m",
            "4",
            "--n",
            "4",
            "--probe",
            "--samples",
            "10",
            "--seed",
            "3",
        ],
        &["bounds", "--kmax", "8"],
    ] {
        let (a, b) = (mlcif(dir.path(), args), mlcif(dir.path(), args));
        assert!(
            a.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_prints_claims_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = mlcif(dir.path(), &["verify", "--suite", "boundary", "--k", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert!(
        text.contains("[PASS] single-boundary-iff-canonical:"),
        "{text}"
    );
    assert!(text.ends_with("suite boundary: PASS\n"));

    assert_eq!(
        mlcif(dir.path(), &["verify", "--suite", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mlcif(
            dir.path(),
            &["verify", "--suite", "theorem2", "--k", "2", "--n", "144"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        mlcif(
            dir.path(),
            &["verify", "--suite", "theorem2", "--k", "2", "--n", "100", "--seed", "1"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(mlcif(dir.path(), &["enumerate"]).status.code(), Some(2));
}

#[test]
fn suite_json_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = mlcif(
        dir.path(),
        &[
            "verify",
            "--suite",
            "young",
            "--json",
            json.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = mlcif::suite::SuiteResult::from_json(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r.suite, mlcif::suite::SuiteName::Young);
    assert!(r.passed());
}

#[test]
fn tampered_cache_exits_one_naming_the_line() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        mlcif(dir.path(), &["enumerate", "--k", "3", "--count-only"])
            .status
            .success()
    );
    let path = dir.path().join("mk/3.jsonl");
    let body = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = body.lines().collect();
    let changed = lines[3].replace(']', " ]");
    lines[3] = &changed;
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = mlcif(dir.path(), &["enumerate", "--k", "3", "--count-only"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn weigh_and_optimize_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let omega = dir.path().join("w.json");
    fs::write(&omega, r#"{"n": 6, "steps": [{"from": 1, "value": 1}]}"#).unwrap();
    let family = dir.path().join("f.jsonl");
    fs::write(&family, "{\"k\":2,\"n\":4,\"boundary\":[[2,3]]}\n").unwrap();
    let o = mlcif(
        dir.path(),
        &[
            "weigh",
            "--k",
            "2",
            "--n",
            "6",
            "--omega",
            omega.to_str().unwrap(),
            "--family",
            family.to_str().unwrap(),
        ],
    );
    assert_eq!(
        stdout(&o),
        "{\"boundary\":[[2,3]],\"k\":2,\"n\":6,\"weight\":3.0}\n"
    );
    let o = mlcif(
        dir.path(),
        &[
            "optimize",
            "--k",
            "2",
            "--n",
            "6",
            "--omega",
            omega.to_str().unwrap(),
        ],
    );
    assert!(
        stdout(&o).contains("optimum: canonical <1>"),
        "{}",
        stdout(&o)
    );
}
