use std::process::{Command, Output};

fn attinit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attinit")).args(args).output().unwrap()
}

#[test]
fn list_names_every_case() {
    let out = attinit(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["case1", "case2", "case3", "case4", "bias_sweep", "smoke"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn smoke_run_writes_files_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (d, threads) in [(&a, "1"), (&b, "3")] {
        let out = attinit(&["run", "smoke", "--out", d.to_str().unwrap(), "--threads", threads]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["curves.csv", "summary.csv", "spec.toml", "mean_error.svg"] {
        assert!(a.join(f).exists(), "{f}");
    }
    for f in ["curves.csv", "summary.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn written_spec_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let out = attinit(&["run", "smoke", "--out", a.to_str().unwrap(), "--seed", "7"]);
    assert!(out.status.success());
    let spec = a.join("spec.toml");
    let text = std::fs::read_to_string(&spec).unwrap();
    assert!(text.contains("seed = 7"), "{text}");
    let b = dir.path().join("b");
    let out = attinit(&["run", spec.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(a.join("curves.csv")).unwrap(), std::fs::read(b.join("curves.csv")).unwrap());
}

#[test]
fn unknown_case_exits_with_config_error() {
    let out = attinit(&["run", "no_such_case"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_case"));
}

#[test]
fn bad_method_and_bias_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = attinit(&["run", "smoke", "--out", d, "--methods", "Optimal,Bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let out = attinit(&["sweep", "--biases", "1,-2", "--out", d, "--mc-runs", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_spec_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "name = \"x\"\nmethods = [\"Optimal\"]\noutputs = \"o\"\n[scenario]\ndt_s = -1.0\n").unwrap();
    let out = attinit(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt_s"));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain_file");
    std::fs::write(&file, "x").unwrap();
    let out = attinit(&["run", "smoke", "--out", file.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn short_sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = attinit(&["sweep", "--biases", "0.1,10", "--mc-runs", "2", "--out", d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bias_degph,t_s,mean_err_deg,std_err_deg,runs"));
    assert_eq!(lines.count(), 2);
}
