use std::process::{Command, Output};

fn cliquekr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliquekr"))
        .args(args)
        .env_remove("CLIQUEKR_FORMAT")
        .env_remove("CLIQUEKR_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn empty_cap_search_finds_ten_at_4_2_3() {
    let o = cliquekr(&["search", "empty-cap", "4", "2", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rec = &v["records"][0];
    assert_eq!(rec["computed"], "10");
    assert_eq!(rec["status"], "match");
}

#[test]
fn construct_prints_header_and_sets() {
    let o = cliquekr(&["construct", "hm", "5", "2", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("gamma 5 2 4"));
    assert_eq!(lines.count(), 29);
}

#[test]
fn canon_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    let img = dir.path().join("img.txt");
    let f = fam.to_str().unwrap();
    let i = img.to_str().unwrap();
    assert!(cliquekr(&["construct", "triangle", "4", "3", "3", "--out", f]).status.success());
    assert!(cliquekr(&["canon", f, "--emit-family", "--out", i]).status.success());
    let form_a = stdout(&cliquekr(&["canon", f]));
    let form_b = stdout(&cliquekr(&["canon", i]));
    assert_eq!(form_a, form_b);
    let again = stdout(&cliquekr(&["canon", i, "--emit-family"]));
    assert_eq!(again, std::fs::read_to_string(&img).unwrap());
}

#[test]
fn canon_reads_named_and_rejects_junk() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.txt");
    let ps = p.to_str().unwrap();
    assert!(cliquekr(&["construct", "ekr", "3", "2", "2", "--named", "--out", ps]).status.success());
    let named = stdout(&cliquekr(&["canon", ps]));
    assert!(named.starts_with("3,2,2:"));
    std::fs::write(&p, "hello\n").unwrap();
    assert_eq!(cliquekr(&["canon", ps]).status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_2() {
    assert_eq!(cliquekr(&["verify", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn bad_params_exit_2() {
    assert_eq!(cliquekr(&["construct", "hm", "3", "2", "7"]).status.code(), Some(2));
    assert_eq!(cliquekr(&["search", "claw", "5", "2", "3"]).status.code(), Some(2));
}

#[test]
fn missing_file_exits_4() {
    assert_eq!(cliquekr(&["canon", "/nonexistent/family.txt"]).status.code(), Some(4));
}

#[test]
fn exhausted_budget_exits_3() {
    let o = cliquekr(&["search", "max-direct", "6", "3", "4", "--node-cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("skipped-budget"));
}

#[test]
fn thm_main_small_range_passes() {
    let o = cliquekr(&["verify", "thm-main", "--n", "4..5", "--k", "2", "--r", "3..n"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn bounded_l_n_l_passes_with_seed() {
    let o = cliquekr(&["verify", "bounded-l-n-l", "--n", "8", "--trials", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn mismatch_exits_1() {
    // Compressions at distinct cliques do not commute in general.
    let o = cliquekr(&["verify", "compression", "--n", "2..3", "--k", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("compression-commute"));
}

#[test]
fn json_runs_are_byte_identical() {
    let args = ["verify", "ekr", "--n", "3..4", "--format", "json", "--seed", "3"];
    assert_eq!(stdout(&cliquekr(&args)), stdout(&cliquekr(&args)));
}

#[test]
fn env_supplies_defaults() {
    let o = Command::new(env!("CARGO_BIN_EXE_cliquekr"))
        .args(["search", "max", "4", "2", "3"])
        .env("CLIQUEKR_FORMAT", "csv")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("suite,seed,"));
}

#[test]
fn claw_all_lists_classes() {
    let o = cliquekr(&["search", "claw-all", "5", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"][0]["forms"].as_array().unwrap().len(), 1);
}
