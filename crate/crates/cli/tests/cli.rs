use std::fs;
use std::process::{Command, Output};

fn diamond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diamond"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = diamond(&[
        "sweep",
        "--j0",
        "0",
        "--t-max",
        "6.283185307179586",
        "--steps",
        "9",
        "--measures",
        "c_ab,eof_12",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t_scaled,c_ab,eof_12");
    assert_eq!(lines.len(), 10);
    for line in &lines[1..] {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[1] - (f[0] / 2.0).sin().abs()).abs() < 1e-10);
        assert!(f[2].abs() < 1e-10);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("s.csv");
    fs::write(
        &cfg,
        format!(
            r#"{{"ratio": 0.5, "steps": 5, "t_max": 1.0, "measures": ["e_a"], "output_path": "{}"}}"#,
            out.display()
        ),
    )
    .unwrap();
    let o = diamond(&["sweep", "--config", cfg.to_str().unwrap(), "--steps", "7", "--compare-closed-form"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("e_a: max |pipeline - closed form|"));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 8);
}

#[test]
fn config_errors_exit_two() {
    let o = diamond(&["sweep", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("steps"));

    let o = diamond(&["sweep", "--j0", "1", "--ratio", "2"]);
    assert_eq!(o.status.code(), Some(2));

    let o = diamond(&["sweep", "--measures", "c_xy"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"stepz": 3}"#).unwrap();
    let o = diamond(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(diamond(&["figure", "9z"]).status.code(), Some(2));
    assert_eq!(diamond(&["bogus"]).status.code(), Some(2));
}

#[test]
fn verify_default_passes_and_is_deterministic() {
    let a = diamond(&["verify", "--seed", "11", "--samples", "20"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).ends_with("result: PASS (10/10 checks)\n"));

    let one = diamond(&["verify", "--seed", "5", "--samples", "1"]);
    let again = diamond(&["verify", "--seed", "5", "--samples", "1"]);
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn verify_negative_control() {
    let o = diamond(&["verify", "--samples", "3", "--corrupt-energy", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL eigen_residual"));
    assert_eq!(diamond(&["verify", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn figure_outputs_are_reproducible() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let o = diamond(&["figure", "5", "--out-dir", d.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    for name in ["fig5.csv", "fig5.svg"] {
        let a = fs::read(d1.path().join(name)).unwrap();
        let b = fs::read(d2.path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between runs");
    }
    let csv = fs::read_to_string(d1.path().join("fig5.csv")).unwrap();
    assert!(csv.starts_with("t_scaled,e_ab_12\n"));
}
