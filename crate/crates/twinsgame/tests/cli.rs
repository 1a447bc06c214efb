use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn twinsgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinsgame")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn staged_pipeline_fills_a_bundle() {
    let dir = tempdir().unwrap();
    let b = dir.path().join("b");
    let b = path(&b);
    let gen = twinsgame(&["gen-game", "--family", "vendor", "--agents", "20", "--seed", "3", "--out", b]);
    assert_eq!(code(&gen), 0, "{gen:?}");
    assert_eq!(code(&twinsgame(&["simulate", "--bundle", b, "--observations", "15", "--seed", "3"])), 0);
    let learn = twinsgame(&["learn", "--bundle", b, "--k", "2", "--seed", "3"]);
    assert_eq!(code(&learn), 0, "{learn:?}");
    assert!(stdout(&learn).contains("sse="));
    let solve = twinsgame(&["solve", "--bundle", b]);
    assert_eq!(code(&solve), 0, "{solve:?}");
    assert!(stdout(&solve).contains("twins-TSNE"));
    let eval = twinsgame(&["evaluate", "--bundle", b, "--iterations", "10"]);
    assert_eq!(code(&eval), 0, "{eval:?}");
    assert_eq!(stdout(&eval).lines().filter(|l| l.contains("regret")).count(), 4);

    let manifest = fs::read_to_string(dir.path().join("b/manifest.json")).unwrap();
    assert!(manifest.contains("\"model\"") && manifest.contains("\"evaluations\""));
}

#[test]
fn oracle_prints_one_row_per_capacity() {
    let out = twinsgame(&["oracle-msne", "--agents", "10", "--capacity", "0.4,0.5,0.6"]);
    assert_eq!(code(&out), 0);
    let rows: Vec<f64> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0] < rows[1] && rows[1] < rows[2]);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempdir().unwrap();
    let missing_obs = dir.path().join("g");
    twinsgame(&["gen-game", "--family", "santafe", "--agents", "10", "--out", path(&missing_obs)]);
    assert_eq!(code(&twinsgame(&["learn", "--bundle", path(&missing_obs), "--k", "1"])), 2);
    assert_eq!(code(&twinsgame(&["oracle-msne", "--agents", "10", "--capacity", "1.5"])), 2);

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "k = 2\nbogus = 1\n").unwrap();
    let out = twinsgame(&["experiment", "--config", path(&cfg), "--out", path(&dir.path().join("o"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn missing_files_exit_with_one() {
    let dir = tempdir().unwrap();
    let nowhere = dir.path().join("nope");
    assert_eq!(code(&twinsgame(&["solve", "--bundle", path(&nowhere)])), 1);
    assert_eq!(code(&twinsgame(&["experiment", "--config", path(&nowhere), "--out", path(&nowhere)])), 1);
}

#[test]
fn failed_trials_exit_with_three() {
    // The hierarchical baseline needs a symmetric game, so on the vendor game every trial fails.
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "k = 2\nobservations = 6\ntrials = 1\nrestarts = 2\niterations = 5\nmethods = [\"ALL\", \"WEL-2\"]\n\
         [game]\nfamily = \"vendor\"\nn_agents = 8\nn_types = 2\nn_locations = 2\nsigma2 = 1.0\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = twinsgame(&["experiment", "--config", path(&cfg), "--out", path(&out_dir), "--quiet"]);
    assert_eq!(code(&out), 3, "{out:?}");
    let results = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(results.lines().any(|l| l.contains("WEL-2") && l.contains("failed")));
}

#[test]
fn experiment_overrides_apply() {
    let dir = tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/santafe.toml");
    let out_dir = dir.path().join("sf");
    let out = twinsgame(&[
        "experiment",
        "--config",
        path(&config),
        "--set",
        "trials=1",
        "--set",
        "game.capacities=[0.5]",
        "--set",
        "methods=[\"ALL\",\"twins-TSNE\"]",
        "--out",
        path(&out_dir),
        "--quiet",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let plot = fs::read_to_string(out_dir.join("plot.tsv")).unwrap();
    assert_eq!(plot.lines().count(), 3);
}
