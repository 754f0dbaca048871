use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use thermolyap::fields::write_snapshot;
use thermolyap::simulator::init_perturbed;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermolyap"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn small_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(
        &path,
        format!("grid.n_cells = 32\nsim.t_end = 2.0\nsim.output_every = 10\n{extra}"),
    )
    .unwrap();
    path
}

#[test]
fn version() {
    let out = run(&["version"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        format!("thermolyap {}", env!("CARGO_PKG_VERSION"))
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--config", "x.conf"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "grid.n_cells = 10\nsim.viscosity = 1\n").unwrap();
    let out = run(&["multipliers", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown key `sim.viscosity`"), "{err}");

    let out = run(&["multipliers", "--config", dir.path().join("missing.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_shipped_configs() {
    for name in ["ideal.conf", "covolume.conf"] {
        let out = run(&["verify", "--config", shipped(name).to_str().unwrap()]);
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}\n{text}");
        assert!(text.contains("PASS") && !text.contains("FAIL"));
    }
}

#[test]
fn multipliers_agree() {
    let v = json(&run(&["multipliers", "--config", shipped("covolume.conf").to_str().unwrap()]));
    for key in ["lambda1", "lambda2"] {
        let a = v["closed_form"][key].as_f64().unwrap();
        let b = v["numeric"][key].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-6 * a.abs(), "{key}: {a} vs {b}");
    }
}

#[test]
fn eval_at_rest_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "ref.theta = 1.3\nref.rho = 0.7\n");
    let snap = dir.path().join("rest.csv");
    let grid = thermolyap::Grid1D::new(1.0, 32).unwrap();
    write_snapshot(&snap, &grid, &thermolyap::StateFields::uniform_rest(32, 0.7, 1.3)).unwrap();
    let v = json(&run(&[
        "eval",
        "--config",
        cfg.to_str().unwrap(),
        "--snapshot",
        snap.to_str().unwrap(),
    ]));
    for key in ["v_meq", "v_neq"] {
        assert!(v[key]["total"].as_f64().unwrap().abs() < 1e-14, "{v}");
    }
    assert!(v["feireisl"].as_f64().unwrap().abs() < 1e-14);
}

#[test]
fn eval_rejects_mismatched_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let snap = dir.path().join("w.csv");
    let grid = thermolyap::Grid1D::new(1.0, 16).unwrap();
    write_snapshot(&snap, &grid, &thermolyap::StateFields::uniform_rest(16, 1.0, 1.0)).unwrap();
    let out = run(&["eval", "--config", cfg.to_str().unwrap(), "--snapshot", snap.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_then_eval_decreases_v_meq() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "init.a_theta = 0.05\n");
    let ts = dir.path().join("ts.csv");
    let last = dir.path().join("last.csv");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        ts.to_str().unwrap(),
        "--snapshot",
        last.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let series = std::fs::read_to_string(&ts).unwrap();
    assert!(series.starts_with("t,mass,energy,entropy,v_meq,xi_integral,decay_residual\n"));

    let c = initial_config();
    let first = dir.path().join("first.csv");
    write_snapshot(&first, &c.grid, &init_perturbed(&c).unwrap()).unwrap();
    let eval = |snap: &Path| {
        json(&run(&["eval", "--config", cfg.to_str().unwrap(), "--snapshot", snap.to_str().unwrap()]))
            ["v_meq"]["total"]
            .as_f64()
            .unwrap()
    };
    let (v0, v1) = (eval(&first), eval(&last));
    assert!(v0 > 0.0 && v1 < v0, "{v0} -> {v1}");
}

/// What the CLI builds from `small_config(.., "init.a_theta = 0.05\n")`.
fn initial_config() -> thermolyap::simulator::SimConfig {
    thermolyap::simulator::SimConfig {
        grid: thermolyap::Grid1D::new(1.0, 32).unwrap(),
        eos: thermolyap::EosSpec::ideal_gas(1.0, 1.4, 1.0, 1.0).unwrap(),
        reference: thermolyap::functionals::HomogeneousReference::new(1.0, 1.0).unwrap(),
        mu: 1e-2,
        kappa: 1e-2,
        cfl: 0.9,
        t_end: 2.0,
        output_every: 10,
        init: thermolyap::simulator::Perturbation {
            k: 1,
            a_rho: 0.01,
            a_v: 0.01,
            a_theta: 0.05,
        },
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let mut series = Vec::new();
    for k in 0..2 {
        let ts = dir.path().join(format!("ts{k}.csv"));
        let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", ts.to_str().unwrap()]);
        assert!(out.status.success());
        series.push(std::fs::read(&ts).unwrap());
    }
    assert_eq!(series[0], series[1]);
    let a = run(&["verify", "--config", cfg.to_str().unwrap()]).stdout;
    let b = run(&["verify", "--config", cfg.to_str().unwrap()]).stdout;
    assert_eq!(a, b);
}
