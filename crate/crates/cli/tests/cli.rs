use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/basic.arl.json")
}

fn arl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arl"))
        .args(args)
        .env_remove("ARL_DEFAULT_BOUND")
        .output()
        .expect("binary runs")
}

fn on_tower(cmd: &str, tower: &str, extra: &[&str]) -> Output {
    let f = fixture();
    let mut args = vec![cmd, "--file", f.to_str().unwrap(), "--tower", tower];
    args.extend_from_slice(extra);
    arl(&args)
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn limits() {
    for (tower, expected) in [
        ("zl", "Zl^1"),
        ("mixed", "Z/l^2 + Zl^1"),
        ("trivial", "0"),
        ("zl_plus_zero", "Zl^1"),
    ] {
        let v = json(&on_tower("limit", tower, &[]));
        assert_eq!(v["limit"]["module"], expected, "{tower}");
    }
    assert_eq!(code(&on_tower("limit", "growing", &[])), 3);
}

#[test]
fn normalize_reports_shift_and_levels() {
    let v = json(&on_tower("normalize", "zl", &["--levels", "3"]));
    assert_eq!(v["shift"], 0);
    assert_eq!(v["levels"], serde_json::json!(["Z/3", "Z/9", "Z/27"]));

    let v = json(&on_tower("normalize", "zl_plus_zero", &["--levels", "3"]));
    assert_eq!(v["shift"], 3);
    assert_eq!(v["certificates"]["ar_iso"]["kernel"]["radius"], 3);
    assert_eq!(v["levels"], serde_json::json!(["Z/3", "Z/9", "Z/27"]));

    assert_eq!(code(&on_tower("normalize", "growing", &[])), 3);
    assert_eq!(code(&on_tower("normalize", "missing", &[])), 2);
}

#[test]
fn malformed_matrix_is_a_parse_error() {
    let text = std::fs::read_to_string(fixture())
        .unwrap()
        .replace(r#""source": "C","#, r#""source": "E2","#);
    let dir = std::env::temp_dir().join(format!("arl-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.arl.json");
    std::fs::write(&path, text).unwrap();
    let out = arl(&["limit", "--file", path.to_str().unwrap(), "--tower", "zl"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row") && err.contains("entries"), "{err}");
}

#[test]
fn upsilon_and_psi() {
    let v = json(&on_tower("upsilon", "zl", &["--h", "h", "--levels", "3"]));
    assert_eq!(v["index"], "h-1");
    assert_eq!(v["base"], serde_json::json!(["Z/3", "Z/9", "Z/27"]));

    assert_eq!(code(&on_tower("upsilon", "zl", &["--h", "5"])), 4);
    assert_eq!(code(&on_tower("upsilon", "zl", &["--h", "h+"])), 2);

    let plain = json(&on_tower("upsilon", "zl", &["--h", "h"]));
    let marked = json(&on_tower("upsilon", "zl", &["--h", "h+d1"]));
    assert_eq!(plain["normal_form"], marked["normal_form"]);
    assert_eq!(plain["base"], marked["base"]);

    let v = json(&on_tower(
        "psi",
        "zl_plus_zero",
        &["--h", "h", "--levels", "3"],
    ));
    assert_eq!(v["levels"], serde_json::json!(["Z/3", "Z/9", "Z/27"]));
}

#[test]
fn verify_exit_codes_and_replay() {
    let out = arl(&["verify", "--suite", "phi", "--seed", "7", "--cases", "100"]);
    let v = json(&out);
    assert_eq!(v["report"]["passed"], 100);

    assert_eq!(
        code(&arl(&["verify", "--suite", "lemma-kernel", "--cases", "0"])),
        2
    );
    assert_eq!(code(&arl(&["verify", "--suite", "nope"])), 2);

    let out = arl(&[
        "verify",
        "--suite",
        "comparison",
        "--seed",
        "1",
        "--cases",
        "50",
    ]);
    assert_eq!(json(&out)["report"]["passed"], 50);

    let dir = std::env::temp_dir().join(format!("arl-replay-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let again = arl(&["verify", "--replay", path.to_str().unwrap()]);
    assert_eq!(json(&again)["mismatched"], serde_json::json!([]));

    // a tampered certificate is caught
    let mut tampered: Value = serde_json::from_slice(&out.stdout).unwrap();
    tampered["report"]["cases"][0]["certificate"] = serde_json::json!({ "forged": true });
    std::fs::write(&path, serde_json::to_vec(&tampered).unwrap()).unwrap();
    assert_eq!(
        code(&arl(&["verify", "--replay", path.to_str().unwrap()])),
        1
    );
}

#[test]
fn bound_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_arl"))
        .args(["verify", "--suite", "ml", "--cases", "2"])
        .env("ARL_DEFAULT_BOUND", "5")
        .output()
        .unwrap();
    assert_eq!(json(&out)["report"]["bound"], 5);
}
