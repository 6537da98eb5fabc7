use std::fs;
use std::process::{Command, Output};

fn diffclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffclust"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn run_is_deterministic_and_writes_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = diffclust(&[
            "run",
            "--preset",
            "reference",
            "--seed",
            "9",
            "--mc",
            "3",
            "--rounds",
            "450",
            "--decimate",
            "5",
            "--svg",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for f in [
        "trace.csv",
        "report.json",
        "msd.svg",
        "clustering_errors.svg",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let csv = fs::read_to_string(a.path().join("trace.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "round,msd_psi_db,msd_w_db,v1_bar,v2_bar"
    );
    assert_eq!(csv.lines().count(), 1 + 90);
}

#[test]
fn stdout_tables_are_deterministic() {
    let args = [
        "compare",
        "--preset",
        "easy",
        "--mc",
        "2",
        "--rounds",
        "150",
        "--schemes",
        "oracle,clustering",
    ];
    let x = diffclust(&args);
    let y = diffclust(&args);
    assert!(x.status.success(), "{}", String::from_utf8_lossy(&x.stderr));
    assert_eq!(x.stdout, y.stdout);
    let text = String::from_utf8(x.stdout).unwrap();
    assert!(text.starts_with("scheme,baseline,n,"));
    assert!(text.contains("clustering,oracle,2,"));
}

#[test]
fn sweep_and_bounds() {
    let out = diffclust(&[
        "sweep", "--preset", "easy", "--mc", "2", "--rounds", "100", "--param", "mu", "--values",
        "0.1,0.05",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);

    let out = diffclust(&[
        "bounds",
        "--preset",
        "standalone",
        "--p-d",
        "0.9",
        "--p-f",
        "0.1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"predicted_msd\""));
    assert!(text.contains("\"p1_bound\""));
}

#[test]
fn gen_scenario_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = diffclust(&[
        "gen-scenario",
        "--preset",
        "bridge",
        "--freeze",
        "--seed",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = dir.path().join("scenario.toml");
    let out = diffclust(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--mc",
        "1",
        "--rounds",
        "50",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[topology]\nmodel = \"ring\"\n").unwrap();
    assert_eq!(
        diffclust(&["run", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        diffclust(&["run", "--preset", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        diffclust(&["run", "--preset", "easy", "--mc", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        diffclust(&["sweep", "--preset", "easy", "--param", "nu", "--values", "0.9,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(diffclust(&["run"]).status.code(), Some(2));

    let doc = r#"
[topology]
model = "explicit"
n_agents = 2
edges = [[0, 1]]

[clusters]
n_clusters = 1
dim = 2
models = [[0.5, -0.5]]

[data_profiles]
noise_variance = [0.01]
regressor_diag = [[4.0, 4.0]]

[hyperparams]
step_size = 0.45
alpha = 0.01
nu = 0.98
gamma = 0.5

[schedule]
rounds = 3000
"#;
    let div = dir.path().join("diverge.toml");
    fs::write(&div, doc).unwrap();
    let out = diffclust(&[
        "run",
        "--config",
        div.to_str().unwrap(),
        "--scheme",
        "non_cooperative",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}
