//! End-to-end behaviour of the verification suite and the command-line tool.

use std::path::Path;
use std::process::Command;

use hurwitz_toda::config::{Exact, RunConfig};
use hurwitz_toda::poly::rat;
use hurwitz_toda::report::{CheckReport, Report, Verdict};
use hurwitz_toda::suite::run_suite;

fn small_config() -> RunConfig {
    RunConfig {
        dmax: 6,
        precision: 40,
        s_points: vec![Exact(rat(1, 3))],
        t_points: vec![vec![Exact(rat(1, 10))]],
        checks: vec!["exact".into(), "toda-field".into(), "reduction-numeric".into()],
        reproducible: true,
        workers: 2,
        ..RunConfig::default()
    }
}

fn checks_json(report: &Report) -> String {
    serde_json::to_string(&report.checks).unwrap()
}

#[test]
fn reproducible_runs_are_byte_identical() {
    let config = small_config();
    let a = run_suite(&config).unwrap().report;
    let b = run_suite(&config).unwrap().report;
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.exit_code(), 0, "{}", a.to_json());
}

#[test]
fn cache_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let plain = run_suite(&small_config()).unwrap();
    assert!(plain.cache.is_none());
    let config = RunConfig { cache_dir: Some(dir.path().to_path_buf()), ..small_config() };
    let cold = run_suite(&config).unwrap();
    let warm = run_suite(&config).unwrap();
    let (cold_stats, warm_stats) = (cold.cache.unwrap(), warm.cache.unwrap());
    assert!(cold_stats.writes > 0);
    assert_eq!(warm_stats.writes, 0);
    assert!(warm_stats.hits > 0);
    assert_eq!(checks_json(&plain.report), checks_json(&cold.report));
    assert_eq!(checks_json(&cold.report), checks_json(&warm.report));
}

#[test]
fn exit_code_reflects_the_worst_verdict() {
    let mk = |v: Verdict| {
        let mut c = CheckReport::new(format!("{v:?}"), "x");
        c.verdict = v;
        c
    };
    let code = |vs: &[Verdict]| Report::new(serde_json::Value::Null, vs.iter().map(|v| mk(*v)).collect(), None).exit_code();
    assert_eq!(code(&[Verdict::Pass, Verdict::Pass]), 0);
    assert_eq!(code(&[Verdict::Pass, Verdict::Inconclusive]), 2);
    assert_eq!(code(&[Verdict::Inconclusive, Verdict::Fail]), 1);
    assert_eq!(code(&[]), 0);
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hurwitz-toda")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn cli_rejects_bad_configuration() {
    assert_eq!(cli(&["verify", "--Dmax", "eight"]).0, 3);
    assert_eq!(cli(&["verify", "--no-such-flag"]).0, 3);
    assert_eq!(cli(&["verify", "--Q", "-1", "--checks", "exact"]).0, 3);
    assert_eq!(cli(&["verify", "--checks", "bogus"]).0, 3);
    assert_eq!(cli(&["hurwitz", "--max-degree", "9"]).0, 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    write(&path, "{\n  \"beta\": \"1/5\",\n  \"dmax\": 0\n}\n");
    let (code, _, err) = cli(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");

    write(&path, "{\n  \"beta\": \"1/5\",\n  \"colour\": 1\n}\n");
    let (code, _, err) = cli(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn cli_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = dir.path().join("report.json");
    write(&path, r#"{ "dmax": 0, "checks": ["hurwitz-oracle"], "hurwitz_dmax": 3 }"#);
    let (code, _, err) = cli(&[
        "verify",
        "--config",
        path.to_str().unwrap(),
        "--Dmax",
        "4",
        "--checks",
        "exact",
        "--reproducible",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["dmax"], 4);
    assert_eq!(report["summary"]["failed"], 0);
    assert!(report["checks"].as_array().unwrap().len() >= 6);
}

#[test]
fn cli_reports_divergent_tail_as_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    write(&path, r#"{ "s_points": ["1/3"], "t_points": [[]], "dmax": 4, "checks": ["linear-s-tbar1"] }"#);
    let (code, _, err) = cli(&["verify", "--config", path.to_str().unwrap(), "--tbar1", "10"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("inconclusive"), "{err}");
}

#[test]
fn cli_subcommands_run() {
    let (code, stdout, _) = cli(&["hurwitz", "--max-degree", "3", "--rmax", "2"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["all_match"], true);

    let (code, stdout, _) = cli(&["--Dmax", "4", "tau-eval", "--s", "1/3", "--t", "1/10", "--deriv", "t1=1", "--kind", "ztilde"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(doc["tail_bound"].is_string() || doc["tail_bound"].is_number(), "{doc}");

    let (code, _, err) = cli(&["--reproducible", "opcheck", "canonical-commutation"]);
    assert_eq!(code, 0, "{err}");
}
