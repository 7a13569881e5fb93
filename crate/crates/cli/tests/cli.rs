use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_certideld"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn reports(path: &Path) -> Vec<serde_json::Value> {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn demo_secret_sharing_accepts() {
    let o = run(&["demo", "--scheme", "secret-sharing", "--lambda", "4", "--b", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verify: accept"));
}

#[test]
fn demo_blind_delegation_and_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let ckt = dir.path().join("and.ckt");
    std::fs::write(&ckt, "o0 = AND i0 i1\n").unwrap();
    let o = run(&["demo", "--scheme", "blind-delegation", "--input", "10", "--circuit", ckt.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("y=0"));
    assert!(out.contains("verdict accept"));
}

#[test]
fn demo_commitment_paths() {
    let o = run(&["demo", "--scheme", "commitment", "--path", "delete"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("committer accepts"));
    for b in ["0", "1"] {
        let o = run(&["demo", "--scheme", "commitment", "--path", "reveal", "--b", b]);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).contains(&format!("receiver outputs {b}")));
    }
}

#[test]
fn demo_every_scheme_is_green() {
    for s in ["secret-sharing", "otp", "pke", "fhe", "blind-delegation", "commitment"] {
        for b in ["0", "1"] {
            let o = run(&["demo", "--scheme", s, "--b", b, "--lambda", "3"]);
            assert_eq!(code(&o), 0, "{s} b={b}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["demo", "--scheme", "nope"])), 2);
    assert_eq!(code(&run(&["demo", "--scheme", "otp", "--b", "2"])), 2);
    assert_eq!(code(&run(&["harness", "--op", "td", "--adversary", "nobody"])), 2);
    assert_eq!(code(&run(&["harness", "--op", "pi", "--mode", "real-backend"])), 2);
    assert_eq!(code(&run(&["harness", "--op", "td", "--lambda", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let o = bin().args(["harness", "--op", "td", "--lambda", "2"]).env("CERTIDELD_THREADS", "zero").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn oversized_lambda_exits_3() {
    let o = run(&["harness", "--op", "td", "--lambda", "2,9"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    assert_eq!(code(&run(&["harness", "--op", "hybrids", "--lambda", "7"])), 3);
}

#[test]
fn comp_cheater_td_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["harness", "--op", "td", "--adversary", "comp-cheater", "--lambda", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = &reports(&out)[0];
    assert!(r["td"].as_f64().unwrap() <= 0.75f64.powi(4) + 1e-10);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["mode"], "idealized-hiding");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert!(r["runtime_ms"].is_null());
}

#[test]
fn hybrids_halving_holds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    let o = run(&["harness", "--op", "hybrids", "--lambda", "4", "--adversary", "honest", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let h = &reports(&out)[0]["hybrids"];
    let (a0, a1) = (h["advt0"].as_f64().unwrap(), h["advt1"].as_f64().unwrap());
    assert!((a1 - a0 / 2.0).abs() < 1e-10);
}

#[test]
fn honest_td_is_the_all_hadamard_leak_and_fails_the_zero_bound() {
    // With θ = 1^λ the released (θ, b′) carries b′ = b, so the honest run
    // separates b = 0 from b = 1 with probability 2^{-λ}.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    let o = run(&["harness", "--op", "td", "--scheme", "otp", "--adversary", "honest", "--lambda", "2,4,6", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    for r in reports(&out) {
        let lambda = r["lambda"].as_u64().unwrap() as i32;
        assert!((r["td"].as_f64().unwrap() - 0.5f64.powi(lambda)).abs() < 1e-12);
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["harness", "--op", "td", "--scheme", "cd-fhe", "--adversary", "no-measure", "--lambda", "2,3,4"];
    let a = run(&args);
    let b = run(&args);
    let c = bin().args(args).arg("--sequential").output().unwrap();
    let d = bin().args(args).env("CERTIDELD_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    for o in [&b, &c, &d] {
        assert_eq!(o.stdout, a.stdout);
    }
}

#[test]
fn csv_output_has_one_row_per_lambda() {
    let o = run(&["harness", "--op", "pi", "--lambda", "1,2,3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("op,scheme,adversary,lambda,mode,td"));
}

#[test]
fn report_merges_and_dedups() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    for (name, lambda, seed) in [("a.json", "2", "1"), ("b.json", "3", "1"), ("c.json", "4", "1"), ("d.json", "3", "99")] {
        let o = run(&["harness", "--op", "pi", "--lambda", lambda, "--seed", seed, "--out", &p(name)]);
        assert_eq!(code(&o), 0);
    }
    let o = run(&["report", &p("a.json"), &p("b.json"), &p("c.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 4);

    let o = run(&["report", &p("a.json"), &p("b.json"), &p("c.json"), &p("d.json"), "--out", &p("m.csv")]);
    assert_eq!(code(&o), 0);
    let mut r = csv::Reader::from_path(p("m.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let seed_col = r.headers().unwrap().iter().position(|h| h == "seed").unwrap();
    let lambda_col = r.headers().unwrap().iter().position(|h| h == "lambda").unwrap();
    let three = rows.iter().find(|row| &row[lambda_col] == "3").unwrap();
    assert_eq!(&three[seed_col], "99");
}

#[test]
fn report_of_nothing_is_header_only() {
    let o = run(&["report"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 1);
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("e.json");
    std::fs::write(&empty, "[]").unwrap();
    let o = run(&["report", empty.to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn malformed_reports_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(code(&run(&["report", bad.to_str().unwrap()])), 4);
    std::fs::write(&bad, r#"{"op": "td"}"#).unwrap();
    assert_eq!(code(&run(&["report", bad.to_str().unwrap()])), 4);
    assert_eq!(code(&run(&["report", dir.path().join("missing.json").to_str().unwrap()])), 4);
    let ckt = dir.path().join("bad.ckt");
    std::fs::write(&ckt, "o0 = NAND i0 i1\n").unwrap();
    assert_eq!(code(&run(&["demo", "--scheme", "fhe", "--circuit", ckt.to_str().unwrap()])), 4);
}
