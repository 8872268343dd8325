use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fracdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracdyn"))
        .args(args)
        .env_remove("FRACDYN_OUT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SYSTEM: &str = r#"
schema_version = 1
[run]
horizon = 20.0
step = 0.02
grid = 20
[system]
orders = [0.7]
a = [[-1.0, 0.0], [0.0, -1.0]]
x0 = [0.5, -0.5]
[system.q]
kind = "scaled"
base = [[1.0, 0.0], [0.0, 1.0]]
waveform = { kind = "sin", amp = 0.3, omega = 1.0 }
[system.nu]
kind = "waveforms"
rows = 2
cols = 1
entries = [{ kind = "exp", amp = 1.0, rate = -1.0 }, { kind = "exp", amp = 1.0, rate = -1.0 }]
"#;

fn scenario(model: &str, extra: &str) -> String {
    format!(
        "schema_version = 1\n[scenario]\nmodel = \"{model}\"\norders = [0.8]\nphi0 = [1.0]\nhorizon = 20.0\nstep = 0.02\n{extra}\n\
         w = {{ kind = \"waveforms\", rows = 1, cols = 1, entries = [{{ kind = \"sin\", amp = 1.0, omega = 1.0 }}] }}\n"
    )
}

#[test]
fn ml_scalar_and_matrix() {
    let o = fracdyn(&["ml", "--alpha", "1", "--z", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((v - std::f64::consts::E).abs() < 1e-14);

    let o = fracdyn(&["ml", "--alpha", "0.5", "--beta", "1", "--z", "0,1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout)
            .unwrap()
            .split_whitespace()
            .count(),
        2
    );

    let tmp = TempDir::new().unwrap();
    let m = write(tmp.path(), "n.txt", "# nilpotent\n0 1\n0, 0\n");
    let o = fracdyn(&["ml", "--alpha", "0.5", "--matrix-file", &m, "--t", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let vals: Vec<f64> = String::from_utf8(o.stdout)
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    let inv_gamma_1_5 = 1.0 / (0.5 * std::f64::consts::PI.sqrt());
    assert_eq!(vals.len(), 4);
    assert!(
        (vals[0] - 1.0).abs() < 1e-12 && vals[2].abs() < 1e-12 && (vals[3] - 1.0).abs() < 1e-12
    );
    assert!((vals[1] - inv_gamma_1_5).abs() < 1e-12);

    let o = fracdyn(&["ml", "--alpha", "0.5", "--z", "-1,0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    assert_eq!(code(&fracdyn(&["ml", "--alpha", "-1", "--z", "1"])), 3);
    assert_eq!(code(&fracdyn(&["ml", "--alpha", "0.5"])), 2);
}

#[test]
fn certify_is_deterministic_and_round_trips() {
    let tmp = TempDir::new().unwrap();
    let sys = write(tmp.path(), "s.toml", SYSTEM);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = fracdyn(&["certify", "--system", &sys, "--out", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for f in ["report.json", "summary.txt", "config.toml"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let r = json(&a.join("report.json"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "certify");
    assert_eq!(r["certified"], true);
    assert!(r["report"]["q"]["q"].as_f64().unwrap() < 1.0);

    // The emitted canonical configuration reproduces the same report.
    let c = tmp.path().join("c");
    let o = fracdyn(&[
        "certify",
        "--system",
        a.join("config.toml").to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(a.join("report.json")).unwrap(),
        fs::read(c.join("report.json")).unwrap()
    );
}

#[test]
fn certify_unstable_reports_sector_only() {
    let tmp = TempDir::new().unwrap();
    let sys = write(
        tmp.path(),
        "u.toml",
        "schema_version = 1\n[system]\norders = [0.5]\na = [[1.0]]\nx0 = [1.0]\n",
    );
    let out = tmp.path().join("o");
    let o = fracdyn(&[
        "certify",
        "--system",
        &sys,
        "--out",
        out.to_str().unwrap(),
        "--horizon",
        "10",
        "--grid",
        "5",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out.join("report.json"));
    assert_eq!(r["certified"], false);
    assert_eq!(r["report"]["sector"]["overall"], "unstable");
}

#[test]
fn simulate_writes_trajectory_and_lp_check() {
    let tmp = TempDir::new().unwrap();
    let sys = write(tmp.path(), "s.toml", SYSTEM);
    let out = tmp.path().join("sim");
    let o = fracdyn(&[
        "simulate",
        "--system",
        &sys,
        "--t-end",
        "10",
        "--step",
        "0.02",
        "--oracle",
        "lp",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(out.join("trajectory.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["t", "x1", "x2"]
    );
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 501);
    assert_eq!(rows[0], vec![0.0, 0.5, -0.5]);
    assert!((rows[500][0] - 10.0).abs() < 1e-12);
    let meta = json(&out.join("meta.json"));
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["points"], 501);
    assert!(meta["lp"]["sup_difference"].as_f64().unwrap() < 5e-3);
    assert!(meta["lp"]["mu"].as_f64().unwrap() < 1.0);
    assert!(out.join("lp_trajectory.csv").exists() && out.join("summary.txt").exists());
}

#[test]
fn simulate_reads_sampled_signal_relative_to_config() {
    let tmp = TempDir::new().unwrap();
    let mut csv = String::from("t,nu\n");
    for k in 0..=100 {
        let t = 0.1 * k as f64;
        csv.push_str(&format!("{t},{}\n", (-t).exp()));
    }
    write(tmp.path(), "nu.csv", &csv);
    let sys = write(
        tmp.path(),
        "s.toml",
        "schema_version = 1\n[system]\norders = [0.9]\na = [[-1.0]]\nx0 = [0.0]\n\
         [system.nu]\nkind = \"sampled\"\nrows = 1\ncols = 1\ncsv = \"nu.csv\"\n",
    );
    let out = tmp.path().join("o");
    let o = fracdyn(&[
        "simulate",
        "--system",
        &sys,
        "--t-end",
        "10",
        "--step",
        "0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cfg = fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(
        cfg.contains(tmp.path().join("nu.csv").to_str().unwrap()),
        "{cfg}"
    );
}

#[test]
fn adapt_batch_writes_per_scenario_artifacts() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("batch");
    fs::create_dir(&dir).unwrap();
    write(&dir, "one.toml", &scenario("type_i", ""));
    write(
        &dir,
        "two.toml",
        &scenario("type_i", "normalize = true\ngamma = 2.0"),
    );
    write(
        &dir,
        "three.toml",
        &scenario("type_ii", "a = 1.0\ne_order = 0.9\ne0 = 1.0"),
    );
    write(&dir, "notes.txt", "ignored");
    let (o1, o3) = (tmp.path().join("t1"), tmp.path().join("t3"));
    for (out, threads) in [(&o1, "1"), (&o3, "3")] {
        let o = fracdyn(&[
            "adapt",
            "--batch",
            dir.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let index = json(&o1.join("index.json"));
    let names: Vec<&str> = index["scenarios"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["one", "three", "two"]);
    for name in names {
        for f in [
            "trajectory.csv",
            "plot.csv",
            "report.json",
            "summary.txt",
            "config.toml",
        ] {
            let a = fs::read(o1.join(name).join(f)).unwrap();
            assert_eq!(a, fs::read(o3.join(name).join(f)).unwrap(), "{name}/{f}");
        }
    }
    let plot = fs::read_to_string(o1.join("one/plot.csv")).unwrap();
    assert!(plot.starts_with("t,phi_norm,abs_e\n"));
    let traj = fs::read_to_string(o1.join("three/trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,e,phi1\n"));
    let r = json(&o1.join("three/report.json"));
    assert_eq!(r["model"], "type_ii");
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();

    let bad_key = write(tmp.path(), "k.toml", &format!("{SYSTEM}\ncolour = 1\n"));
    let o = fracdyn(&["certify", "--system", &bad_key, "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("colour"));

    let bad_order = write(
        tmp.path(),
        "o.toml",
        &SYSTEM.replace("orders = [0.7]", "orders = [2.5]"),
    );
    let o = fracdyn(&["simulate", "--system", &bad_order, "--out", out]);
    assert_eq!(code(&o), 3);
    assert!(
        stderr(&o).contains("system.orders") && stderr(&o).contains("(0, 2)"),
        "{}",
        stderr(&o)
    );

    let unbounded = write(
        tmp.path(),
        "w.toml",
        &scenario("type_i", "").replace(
            "\"sin\", amp = 1.0, omega = 1.0",
            "\"exp\", amp = 1.0, rate = 0.1",
        ),
    );
    let o = fracdyn(&["adapt", "--scenario", &unbounded, "--out", out]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));

    let missing = tmp.path().join("nope.toml");
    assert_eq!(
        code(&fracdyn(&[
            "certify",
            "--system",
            missing.to_str().unwrap(),
            "--out",
            out
        ])),
        4
    );

    let blocker = write(tmp.path(), "file", "x");
    let sys = write(tmp.path(), "s.toml", SYSTEM);
    assert_eq!(
        code(&fracdyn(&[
            "certify",
            "--system",
            &sys,
            "--out",
            &format!("{blocker}/sub")
        ])),
        4
    );

    let o = fracdyn(&["ml", "--alpha", "0.5", "--z", "1e4"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn output_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let sys = write(tmp.path(), "s.toml", SYSTEM);
    let out = tmp.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_fracdyn"))
        .args(["certify", "--system", &sys, "--grid", "5"])
        .env("FRACDYN_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("report.json").exists() && out.join("summary.txt").exists());
}
