use std::path::Path;
use std::process::{Command, Output};

fn mpoxnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpoxnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

#[test]
fn run_writes_replicate_files() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mpoxnet(&[
        "run", "--preset", "targeted", "--population", "1000", "--horizon", "40", "--seed", "5", "-o", &out_arg(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("targeted");
    for f in ["config.toml", "manifest.toml", "final_size.csv", "cumulative.csv", "rt_summary.csv", "replicates/infections_0005.csv", "replicates/daily_0005.csv"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
    let daily = std::fs::read_to_string(dir.join("replicates/daily_0005.csv")).unwrap();
    assert_eq!(daily.lines().count(), 1 + 41);
}

#[test]
fn dumped_preset_loads_back() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mpoxnet(&["presets", "partial_isolation"]);
    assert!(o.status.success());
    let path = tmp.path().join("scenario.toml");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = mpoxnet(&[
        "ensemble", "--config", &out_arg(&path), "--replicates", "2", "--population", "500", "--horizon", "20", "-o", &out_arg(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let finals = std::fs::read_to_string(tmp.path().join("partial_isolation/final_size.csv")).unwrap();
    assert_eq!(finals.lines().count(), 3);
}

#[test]
fn bad_config_exits_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    std::fs::write(&path, "[epidemic]\nbeta = 3.0\n").unwrap();
    let o = mpoxnet(&["run", "--config", &out_arg(&path), "-o", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta"));

    let o = mpoxnet(&["run", "--preset", "no_such_thing", "-o", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));

    let missing = tmp.path().join("absent.toml");
    let o = mpoxnet(&["run", "--config", &out_arg(&missing)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn presets_lists_every_name() {
    let o = mpoxnet(&["presets"]);
    assert!(o.status.success());
    let names = String::from_utf8(o.stdout).unwrap();
    assert!(names.lines().any(|l| l == "baseline"));
    assert!(names.lines().any(|l| l == "early_vaccination"));
}
