use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twin-billiard"))
}

fn run(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn sweep_csv_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let common = ["sweep", "--k-list", "10,20", "--nb-list", "16,24", "--trials", "6", "--seed", "4"];
    run(&[&common[..], &["--workers", "1", "--out", a.to_str().unwrap()]].concat());
    run(&[&common[..], &["--workers", "3", "--out", b.to_str().unwrap()]].concat());
    assert_eq!(read(&a), read(&b));
    assert!(read(&a).contains("# seed = 4"));
}

#[test]
fn sweep_reads_config_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "seed = 3\ntrials = 2\n[sweep]\nepsilon_exps = [12]\nn_balls = [16]\n").unwrap();
    let out = dir.path().join("s.csv");
    run(&["sweep", "--config", cfg.to_str().unwrap(), "--trials", "4", "--out", out.to_str().unwrap()]);
    let text = read(&out);
    assert!(text.contains("# config = trials = 4"));
    assert!(text.contains("# seed = 3"));
}

#[test]
fn bad_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "trials = 0\n").unwrap();
    let status = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--out", "/dev/null"])
        .status()
        .unwrap();
    assert!(!status.success());
}

#[test]
fn demon_subcommand() {
    assert!(run(&["demon", "--pi", "40", "--pc", "10", "--nc", "8"]).contains("verdict = borderline"));
    assert!(run(&["demon", "--pi", "40", "--pc", "10", "--nc", "6"]).contains("verdict = paradox"));
    assert!(run(&["demon", "--pi", "40", "--pc", "10"]).contains("nc_threshold = 8"));
}

#[test]
fn fig7_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["fig7", "--pi", "40", "--pc", "10", "--nb-list", "200,500,1000,2000,5000", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.contains("1000,8,80,80,borderline"));
    assert!(dir.path().join("fig7.svg").exists());
}

#[test]
fn dispersion_then_two_ball_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("h.csv");
    run(&["dispersion", "--nb", "32", "--samples", "3000", "--out", hist.to_str().unwrap()]);
    let sur = dir.path().join("t.csv");
    let text = run(&["two-ball", "--histogram", hist.to_str().unwrap(), "--k-list", "10,20", "--trials", "500", "--out", sur.to_str().unwrap()]);
    assert!(text.contains("k = 10"));
    let sweep = dir.path().join("s.csv");
    run(&["sweep", "--k-list", "10,15,20", "--nb-list", "16,32", "--trials", "8", "--out", sweep.to_str().unwrap()]);
    let report = dir.path().join("fit.txt");
    let fit = run(&["fit", "--sweep", sweep.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert!(fit.contains("B = "));
    let frontier = run(&["demon", "--pi", "40", "--pc", "10", "--fit", report.to_str().unwrap()]);
    assert!(frontier.contains("nc_threshold = 8"));
    assert!(frontier.contains("n_balls = ") || frontier.contains("no crossing"));
}
