use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mlheat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlheat"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("mlheat runs")
}

fn sample_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/two_layer.toml")
}

/// CSV rows with the `wall_s` column dropped.
fn without_wall_time(csv_text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let wall = headers.iter().position(|h| h == "wall_s").unwrap();
    reader
        .records()
        .map(|r| {
            r.unwrap()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != wall)
                .map(|(_, v)| v.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn verify_counts_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = mlheat(&["verify-counts", "--out", "counts.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("counts.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], serde_json::Value::Bool(true));
}

#[test]
fn bench_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = mlheat(&["bench", "--n", "1000,2000", "--reps", "1", "--seed", "9", "--out", name], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a.lines().next().unwrap(), "N,solver,wall_s,op_count,err_inf");
    let rows = without_wall_time(&a);
    assert_eq!(rows.len(), 10);
    assert_eq!(rows, without_wall_time(&b));
    assert!(dir.path().join("a.json").exists());
}

#[test]
fn simulate_sample_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = sample_config();
    let out = mlheat(&["simulate", "--config", config.to_str().unwrap(), "--out", "traj.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("traj.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["time", "node", "r", "u"]);
    let rows: Vec<(f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[3].parse().unwrap())
        })
        .collect();
    // 61 nodes, initial field plus 10 snapshots.
    assert_eq!(rows.len(), 61 * 11);
    let (t_end, _) = rows.last().unwrap();
    assert_eq!(*t_end, 600.0);
    // Heat only flows between the layers: values stay inside the initial range.
    assert!(rows.iter().all(|&(_, u)| (300.0..=420.0).contains(&u)));
}

#[test]
fn bad_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["bench", "--n", "ten"],
        vec!["bench", "--solvers", "GAUSS"],
        vec!["bench", "--n", "100000000"],
        vec!["simulate"],
        vec!["simulate", "--config", "missing.toml"],
        vec!["frobnicate"],
    ] {
        let out = mlheat(&args, dir.path());
        assert!(!out.status.success(), "{args:?} should fail");
    }
}

#[test]
fn converge_reports_every_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = mlheat(&["converge", "--case", "single-layer,two-layer", "--out", "orders.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("orders.csv")).unwrap();
    assert!(text.starts_with("case,factor,N,h_max,tau,steps,err_inf"));
    assert_eq!(text.lines().count(), 1 + 2 * 4);
}
