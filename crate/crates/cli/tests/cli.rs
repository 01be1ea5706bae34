//! Runs the `leakdpt` binary and checks outputs and exit codes.

use std::process::{Command, Output};

fn leakdpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leakdpt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn classical_magic_square_value() {
    let o = leakdpt(&["game", "value", "--builtin", "magic_square", "--method", "classical"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"value\": 0.888888888888889"), "{}", stdout(&o));
    assert_eq!(json(&o)["kind"], "exact");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(leakdpt(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(leakdpt(&["game", "value"]).status.code(), Some(1));
    assert_eq!(
        leakdpt(&["game", "value", "--builtin", "no_such_game"]).status.code(),
        Some(1)
    );
    let o = leakdpt(&["diqkd", "rate", "--delta", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn help_exits_with_zero() {
    assert_eq!(leakdpt(&["--help"]).status.code(), Some(0));
}

#[test]
fn computation_errors_exit_with_two() {
    // The strategy budget is far below the 4^9 · 4^9 deterministic pairs needed.
    let o = leakdpt(&["game", "value", "--builtin", "magic_square", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_defaults_to_csv() {
    let o = leakdpt(&["diqkd", "sweep", "--c", "0,0.01"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "n,alpha,gamma,delta,c,nu,beta,PrE_est,abort_freq,qber,rate_bits,rate_per_copy,eps_smooth,seed"
    );
}

#[test]
fn probe_finds_perfect_play_with_two_bits() {
    let o = leakdpt(&[
        "dpt",
        "probe",
        "--builtin",
        "magic_square",
        "--comm-bits",
        "2",
        "--mode",
        "exhaustive",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["kind"], "exhaustive");
}

#[test]
fn bound_case_ii_requires_eff() {
    assert_eq!(leakdpt(&["dpt", "bound", "case-ii", "--c", "1"]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("leakdpt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rate.json");
    let o = leakdpt(&["diqkd", "rate", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["rate_per_copy"].is_number());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cheating_boxes_pass_with_leaked_inputs() {
    let dir = std::env::temp_dir().join(format!("leakdpt-adv-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let script = dir.join("adv.json");
    std::fs::write(
        &script,
        r#"{"rounds":[{"from":"alice_box","to":"bob_box","bits":400,"function_id":"inputs"}]}"#,
    )
    .unwrap();
    let o = leakdpt(&[
        "diqkd",
        "run",
        "--n",
        "200",
        "--c",
        "2",
        "--delta",
        "0",
        "--boxes",
        "cheating",
        "--adversary",
        script.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["aborted"], false);
    assert_eq!(v["leaked_bits"], 400);
    // The same script over a smaller budget is rejected.
    let o = leakdpt(&[
        "diqkd",
        "run",
        "--n",
        "200",
        "--c",
        "1",
        "--boxes",
        "cheating",
        "--adversary",
        script.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
