use std::path::Path;
use std::process::{Command, Output};

fn avolterra(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_avolterra"));
    cmd.current_dir(dir).args(args).env_remove("VOLTERRA_OUT").env_remove("VOLTERRA_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn passing_run_exits_zero_and_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    let o = avolterra(tmp.path(), &["riccati", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS riccati"));
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(report.lines().next(), Some("case,metric,value,reference,abs_error,std_error,pass"));
    let psi = std::fs::read_to_string(out.join("psi.csv")).unwrap();
    assert_eq!(psi.lines().next(), Some("t,re_psi,im_psi"));
}

#[test]
fn failed_check_exits_one() {
    // Approximants listed coarsest last cannot show decreasing errors.
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"experiment": {"n_sequence": [64, 16, 4]}}"#);
    let o = avolterra(tmp.path(), &["stability", "--config", &cfg, "--out", "o"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL fractional_h=0.1 errors_decreasing"));
    assert!(tmp.path().join("o/stability.csv").exists());
}

#[test]
fn unknown_config_key_is_rejected_with_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", "{\n  \"grid\": {\"horizon\": 1.0, \"n_steps\": 10},\n  \"grdi\": 3\n}\n");
    let o = avolterra(tmp.path(), &["riccati", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("unknown field `grdi`"), "{err}");
    assert!(err.contains("line 3"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn config_for_another_command_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"command": "cf"}"#);
    let o = avolterra(tmp.path(), &["riccati", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_directory_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"out_dir": "from_config"}"#);

    avolterra(tmp.path(), &["riccati", "--config", &cfg], &[]);
    assert!(tmp.path().join("from_config/report.csv").exists());

    avolterra(tmp.path(), &["riccati", "--config", &cfg], &[("VOLTERRA_OUT", "from_env")]);
    assert!(tmp.path().join("from_env/report.csv").exists());

    avolterra(tmp.path(), &["riccati", "--config", &cfg, "--out", "from_flag"], &[("VOLTERRA_OUT", "from_env2")]);
    assert!(tmp.path().join("from_flag/report.csv").exists());
    assert!(!tmp.path().join("from_env2").exists());

    avolterra(tmp.path(), &["riccati"], &[]);
    assert!(tmp.path().join("out/riccati/report.csv").exists());
}

#[test]
fn thread_count_from_env_is_validated() {
    let tmp = tempfile::tempdir().unwrap();
    let o = avolterra(tmp.path(), &["riccati"], &[("VOLTERRA_THREADS", "many")]);
    assert_eq!(o.status.code(), Some(2));
    let o = avolterra(tmp.path(), &["riccati", "--threads", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = avolterra(tmp.path(), &["riccati", "--threads", "1"], &[("VOLTERRA_THREADS", "many")]);
    assert_eq!(o.status.code(), Some(0));
}

fn small_hawkes(dir: &Path) -> String {
    write(dir, "h.json", r#"{"simulation": {"n_paths": 2000}, "experiment": {"scaling": {"enabled": false}}}"#)
}

fn read_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "txt"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn same_seed_gives_identical_files_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_hawkes(tmp.path());
    avolterra(tmp.path(), &["hawkes-validate", "--config", &cfg, "--seed", "7", "--out", "a", "--threads", "1"], &[]);
    avolterra(tmp.path(), &["hawkes-validate", "--config", &cfg, "--seed", "7", "--out", "b", "--threads", "3"], &[]);
    let (a, b) = (read_outputs(&tmp.path().join("a")), read_outputs(&tmp.path().join("b")));
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(std::fs::read(tmp.path().join("a/report.json")).unwrap(), std::fs::read(tmp.path().join("b/report.json")).unwrap());
}

#[test]
fn seed_flag_changes_monte_carlo_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_hawkes(tmp.path());
    avolterra(tmp.path(), &["hawkes-validate", "--config", &cfg, "--seed", "1", "--out", "a"], &[]);
    avolterra(tmp.path(), &["hawkes-validate", "--config", &cfg, "--seed", "2", "--out", "b"], &[]);
    assert_ne!(read_outputs(&tmp.path().join("a")), read_outputs(&tmp.path().join("b")));
}
