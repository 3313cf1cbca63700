use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cayley-cutoff"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn entropic_times_argmax_is_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["entropic-times", "--group", "abelian:2,2,2,2", "--k", "8"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("cutoff_times.json"));
    assert_eq!(v["cutoff_times"]["argmax"], 2);
    assert_eq!(v["provenance"]["seed"], 1);
    assert!(v["provenance"]["library_version"].is_string());
    assert!(dir.path().join("law.csv").exists());
}

#[test]
fn mix_curve_first_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mix-curve", "--group", "abelian:101", "--k", "6", "--seed", "7"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,tv,l2,sep"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    assert!((row[1] - (1.0 - 1.0 / 101.0)).abs() < 1e-12);
    assert!((row[2] - 10.0).abs() < 1e-9);
    assert_eq!(row[3], 1.0);
    let index = std::fs::read_to_string(dir.path().join("plots/index.csv")).unwrap();
    assert_eq!(index, "name,file,kind\ncurve,curve.csv,curve\n");
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["gcd-bound", "--group", "abelian:1000", "--k", "8", "--trials", "5000", "--seed", "3"];
    assert!(run(&args, a.path()).status.success());
    assert!(run(&args, b.path()).status.success());
    let manifest = json(&a.path().join("manifest.json"));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(outputs.len() >= 3);
    for f in outputs {
        let f = f.as_str().unwrap();
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn empty_scan_writes_empty_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cutoff-scan", "--group", "abelian:50", "--k", "4", "--seeds", "0"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(dir.path().join("plots/index.csv")).unwrap(), "name,file,kind\n");
}

#[test]
fn scan_writes_one_curve_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cutoff-scan", "--group", "abelian:2,50", "--k", "5", "--seeds", "3", "--grid", "auto:10"], dir.path());
    assert!(o.status.success());
    let index = std::fs::read_to_string(dir.path().join("plots/index.csv")).unwrap();
    assert_eq!(index.lines().count(), 1 + 3 + 1);
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn verify_suite_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "gcd-uniformity"], dir.path());
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("verify.json"))["passed"], true);
    let o = run(&["verify", "--suite", "bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mix-curve", "--group", "cyclic:5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown kind"));
    let o = run(&["mix-curve", "--group", "abelian:3000000"], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap 1048576"));
    let o = run(&["entropic-times", "--group", "heisenberg:m=3,d=3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threshold_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let th = dir.path().join("th.conf");
    std::fs::write(&th, "gap_band = 3.5\n").unwrap();
    let out = dir.path().join("o");
    let o = Command::new(env!("CARGO_BIN_EXE_cayley-cutoff"))
        .args(["expander", "--group", "abelian:10", "--k", "3", "--seeds", "4", "--threshold-file"])
        .arg(&th)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success());
    let v = json(&out.join("expander.json"));
    assert_eq!(v["gap_band"], 3.5);
    assert_eq!(v["provenance"]["thresholds"]["gap_band"], 3.5);
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"k": 2, "thresholds": {"gap_band": 7}}"#).unwrap();
    let out2 = dir.path().join("o2");
    let o = Command::new(env!("CARGO_BIN_EXE_cayley-cutoff"))
        .args(["expander", "--group", "abelian:10", "--seeds", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out2)
        .output()
        .unwrap();
    assert!(o.status.success());
    let v = json(&out2.join("expander.json"));
    assert_eq!((v["k"].as_u64(), v["gap_band"].as_f64()), (Some(2), Some(7.0)));
}

#[test]
fn compare_and_wilson_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compare-nilpotent", "--group", "heisenberg:m=2,d=3", "--k", "4", "--seeds", "4"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(dir.path().join("ratios.csv")).unwrap().lines().count(), 5);
    let o = run(&["wilson-scan", "--d", "3", "--k", "6"], dir.path());
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("wilson.json"))["dominance"], true);
    let o = run(&["sep-curve", "--group", "heisenberg:m=2,d=3", "--k", "2", "--grid", "lin:0:5:11"], dir.path());
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("sep_curve.json"))["sep_dominates_tv"], true);
}
