use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BASE: &str = r#"{
  "model": {
    "epsilon": 0.3,
    "eps_list": [0.4, 0.35, 0.3],
    "v0": 1.0,
    "oscillators": [[0.0, 0.0, 2.0], [2.5, 0.0, 0.0]],
    "t_final": 3.0,
    "n_max": 1
  },
  "study": {
    "x_grid": {"radius": 4.0, "n_radial": 2, "n_azimuth": 3, "z_min": -2.0, "z_max": 4.0, "n_long": 4}
  }
}
"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn mott(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mott"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_prints_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", BASE);
    let o = mott(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("j,a_x,a_y,a_z,tau,dir_x,dir_y,dir_z\n"));
    assert!(text.contains("theta0=7.85398163397448e-1"));
}

#[test]
fn missing_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &BASE.replace("\"v0\": 1.0,", ""));
    let o = mott(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`v0`") && stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn same_ray_names_assumption() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &BASE.replace("[2.5, 0.0, 0.0]", "[0.0, 0.0, 3.0]"));
    let o = mott(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("assumption (B)"), "{}", stderr(&o));
}

#[test]
fn unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &BASE.replace("\"n_max\": 1", "\"n_max\": 1, \"nmax\": 2"));
    assert_eq!(mott(&["validate"], &cfg).status.code(), Some(2));
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = mott(&["validate"], &dir.path().join("absent.json"));
    assert_eq!(o.status.code(), Some(3));
    let cfg = write(dir.path(), "c.json", BASE);
    let o = Command::new(env!("CARGO_BIN_EXE_mott"))
        .args(["tracks", "--out"])
        .arg(dir.path().join("no/such/dir/t.csv"))
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tracks_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", BASE);
    let out = dir.path().join("t.csv");
    let run = || {
        let o = Command::new(env!("CARGO_BIN_EXE_mott"))
            .args(["tracks", "--out"])
            .arg(&out)
            .arg("--config")
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read_to_string(&out).unwrap()
    };
    let text = run();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,n1,n2,n3,abs_n,dir_x,dir_y,dir_z,momentum,z_shift,weight"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    let weights: Vec<f64> = rows.iter().map(|r| r[10].parse().unwrap()).collect();
    assert!(weights.windows(2).all(|w| w[0] >= w[1]));
    for r in rows.iter().filter(|r| r[4] == "0") {
        assert_eq!(r[8].parse::<f64>().unwrap(), 1.0);
    }
    assert!(!text.contains('\r'));
    assert_eq!(run(), text);
}

#[test]
fn oracle_at_time_zero_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", BASE);
    let o = mott(&["oracle", "--x", "0.5,-0.2,1.0", "--t", "0"], &cfg);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[9], "0.00000000000000e0");
    assert_eq!(row[10], "0.00000000000000e0");
}

#[test]
fn packet_rejects_bad_index() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", BASE);
    let o = mott(&["packet", "--r", "0,0,1", "--j", "3"], &cfg);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identities_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", BASE);
    let o = mott(&["identities"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn scaling_summary_and_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", BASE);
    let o = mott(&["scaling"], &cfg);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("slope_abs=") && last.contains(" r2="), "{last}");

    let shuffled = write(dir.path(), "s.json", &BASE.replace("[0.4, 0.35, 0.3]", "[0.3, 0.4, 0.35]"));
    assert_eq!(stdout(&mott(&["scaling"], &shuffled)), text);
}

#[test]
fn json_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("\n  }\n}", "\n  },\n  \"output\": {\"format\": \"json\"}\n}");
    let cfg = write(dir.path(), "c.json", &text);
    let o = mott(&["tracks"], &cfg);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    assert_eq!(v["rows"][0]["abs_n"], 0);
}

#[test]
fn tolerance_override_checked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", BASE);
    let o = Command::new(env!("CARGO_BIN_EXE_mott"))
        .args(["validate", "--tol", "2"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
