use std::path::Path;
use std::process::{Command, Output};

fn euqoe(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euqoe"))
        .args(args)
        .env("EUQOE_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().to_string())
        .collect()
}

#[test]
fn efficiency_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = euqoe(&["efficiency", "--set", "engine.alpha_aH=0.6"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(column(&out, "eta_e"), ["0.625"]);
    assert_eq!(column(&out, "valid"), ["true"]);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn inertial_partner_row() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "efficiency",
        "--set",
        "engine.omega1=0.9",
        "--set",
        "engine.omega2=1.0",
        "--set",
        "engine.alpha_aH=0",
    ];
    let o = euqoe(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let eta: f64 = column(&stdout(&o), "eta_e")[0].parse().unwrap();
    assert!((eta - 0.2).abs() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[engine]\nomega1 = 1.0\nomega2 = = 2\n").unwrap();
    let o = euqoe(
        &["efficiency", "--config", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.toml:3"), "{}", stderr(&o));

    std::fs::write(
        &path,
        "[engine]\nomega1 = 1.0\n\n[state]\nparty = \"symmetric\"\n",
    )
    .unwrap();
    let o = euqoe(
        &["efficiency", "--config", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("bad.toml:5") && stderr(&o).contains("state.party"),
        "{}",
        stderr(&o)
    );

    let o = euqoe(&["efficiency", "--set", "engine.omega2=0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("engine.omega2"));

    let o = euqoe(&["efficiency", "--dimension", "2p1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "[engine]\nomega1 = 1.0\nomega2 = 2.0\nalpha_aH = 0.9\n\n[state]\nparity = \"antisymmetric\"\n").unwrap();
    let o = euqoe(
        &["efficiency", "--config", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(column(&out, "parity"), ["antisymmetric"]);
    let eta: f64 = column(&out, "eta_e")[0].parse().unwrap();
    assert!((eta - 1.0 / 1.9).abs() < 1e-12);
}

#[test]
fn infeasible_protocol_exits_4_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = euqoe(&["protocol", "--set", "engine.alpha_aH=0.4"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let out = stdout(&o);
    assert!(out.contains("alpha_aH = 0.4"));
    assert!(out.contains("constraint_chain = \"fail\""));
    assert!(stderr(&o).contains("infeasible"));
}

#[test]
fn feasible_protocol_passes_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = euqoe(&["protocol", "--set", "engine.tau_a=0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("= \"pass\"").count(), 6, "{out}");
    assert!(out.contains("alpha_aC = 0.6"));
    assert!(out.contains("parity = \"symmetric\"") || out.contains("parity = \"antisymmetric\""));
    let record: toml::Value = toml::from_str(&out).unwrap();
    assert_eq!(record["valid"].as_bool(), Some(true));
}

#[test]
fn sweep_without_axes_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(euqoe(&["sweep"], dir.path()).status.code(), Some(2));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = euqoe(
        &[
            "sweep",
            "--set",
            "sweep.axis=tau_a",
            "--set",
            "sweep.lo=0.5",
            "--set",
            "sweep.hi=2",
            "--set",
            "sweep.count=0",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("omega1,"));
}

#[test]
fn sweep_rows_and_gnuplot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eta.csv");
    let args = [
        "sweep",
        "--set",
        "sweep.axis=alpha_aH",
        "--set",
        "sweep.lo=0.6",
        "--set",
        "sweep.hi=0.9",
        "--set",
        "sweep.count=4",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = euqoe(&args, &dir.path().join("cache"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(!csv.contains('\r'));
    let eta: Vec<f64> = column(&csv, "eta_e")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(eta.len(), 4);
    assert!(eta.windows(2).all(|w| w[1] < w[0]), "{eta:?}");
    let gp = std::fs::read_to_string(dir.path().join("eta.csv.gp")).unwrap();
    assert!(gp.contains("eta_e_closed_form") && gp.contains("alpha_aH"));
}

#[test]
fn output_path_does_not_affect_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = [
            "sweep",
            "--set",
            "sweep.axis=tau_a",
            "--set",
            "sweep.lo=0.5",
            "--set",
            "sweep.hi=2",
            "--set",
            "sweep.count=3",
            "--out",
            out.to_str().unwrap(),
        ];
        let o = euqoe(&args, &cache);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (std::fs::read(out).unwrap(), stderr(&o))
    };
    let (a, log_a) = run("a.csv");
    let (b, log_b) = run("b.csv");
    assert!(log_a.contains("3 computed"), "{log_a}");
    assert!(log_b.contains("0 computed, 3 from cache"), "{log_b}");
    assert_eq!(a, b);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 3);
}

#[test]
fn cache_dir_from_config_is_overridden_by_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_cache = dir.path().join("env");
    let args = [
        "sweep",
        "--set",
        "sweep.axis=tau_a",
        "--set",
        "sweep.lo=0.5",
        "--set",
        "sweep.hi=2",
        "--set",
        "sweep.count=2",
        "--set",
        "cache.dir=/nonexistent/never",
    ];
    let o = euqoe(&args, &env_cache);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_dir(&env_cache).unwrap().count(), 2);
}

#[test]
fn zero_workers_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = euqoe(
        &["sweep", "--set", "sweep.axis=tau_a", "--workers", "0"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn loosened_oracle_grid_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = euqoe(&["verify", "--set", "oracle.grid=0.02"], dir.path());
    assert_eq!(o.status.code(), Some(5), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("suite oracle: FAIL"), "{out}");
    assert!(out.contains("suite wightman: pass") && out.contains("suite conservation: pass"));
    assert!(stderr(&o).contains("verification failed: oracle"));
}
