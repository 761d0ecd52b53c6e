use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_theta-morse");

/// Fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("theta-morse-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, file: &str, text: &str) -> PathBuf {
    let p = dir.join(file);
    std::fs::write(&p, text).unwrap();
    p
}

fn curve_json(points: &[(f64, f64)]) -> String {
    let pts: Vec<String> = points.iter().map(|(a, b)| format!("[{a:?}, {b:?}]")).collect();
    format!("{{\"branch_points\": [{}]}}", pts.join(", "))
}

fn z6_json() -> String {
    let pts: Vec<(f64, f64)> = (0..6)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / 3.0;
            (t.cos(), t.sin())
        })
        .collect();
    curve_json(&pts)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn periods_text_and_json() {
    let dir = scratch("periods");
    let input = write(&dir, "z6.json", &z6_json());
    let text = run(&["periods", "--input", s(&input)]);
    assert_eq!(code(&text), 0);
    let out = stdout(&text);
    assert!(out.contains("B matrix") && out.contains("Riemann relations: pass"));

    let json = run(&["periods", "--input", s(&input), "--format", "json"]);
    assert_eq!(code(&json), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["genus"], 2);
    assert!(v["validation"]["passed"].as_bool().unwrap());
    assert!(v["validation"]["symmetry"].as_f64().unwrap() < 1e-9);
    let b = &v["b_matrix"];
    let b11 = b[0][0][0].as_f64().unwrap();
    let b12 = (b[0][1][0].as_f64().unwrap()).hypot(b[0][1][1].as_f64().unwrap());
    assert!(b12 < 1e-8 * b11);
    // Every float carries 17 significant digits.
    let raw = stdout(&json);
    let z_start = raw.find("\"z\"").unwrap();
    let first = raw[z_start..]
        .split(|ch: char| ch == '[' || ch == ',' || ch == ']' || ch.is_whitespace())
        .find(|t| t.contains('e'))
        .unwrap();
    assert_eq!(
        first.split('e').next().unwrap().trim_start_matches('-').len(),
        18,
        "{first}"
    );
}

#[test]
fn output_is_deterministic() {
    let dir = scratch("determinism");
    let input = write(&dir, "z6.json", &z6_json());
    for args in [
        vec!["periods", "--format", "json"],
        vec!["periods"],
        vec!["grid", "--grid-size", "21"],
        vec!["critical", "--seed-density", "30"],
    ] {
        let mut full = args.clone();
        full.extend(["--input", s(&input)]);
        let a = run(&full);
        let b = run(&full);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn grid_csv_to_file() {
    let dir = scratch("grid");
    let input = write(&dir, "z6.json", &z6_json());
    let out = dir.join("grid.csv");
    let o = run(&[
        "grid",
        "--input",
        s(&input),
        "--grid-size",
        "3",
        "--window=-1,1,-1,1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "re,im,chart,K,rho2");
    assert_eq!(lines.len(), 10);
    assert!(!csv.to_lowercase().contains("nan"));
    // The node z = 1 is a branch point: K is continued by zero, rho2 is infinite.
    let at_one = lines[6].split(',').collect::<Vec<_>>();
    assert_eq!(at_one[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(at_one[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(at_one[3].parse::<f64>().unwrap(), 0.0);
    assert_eq!(at_one[4], "inf");
    for line in &lines[1..] {
        assert!(line.split(',').nth(3).unwrap().parse::<f64>().unwrap() <= 0.0);
    }
}

#[test]
fn grid_default_window_has_minimum_near_origin() {
    let dir = scratch("grid-default");
    let input = write(&dir, "z6.json", &z6_json());
    let o = run(&["grid", "--input", s(&input), "--grid-size", "41", "--chart", "infinity"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<(f64, f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[2], "infinity");
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 41 * 41);
    assert_eq!((rows[0].0, rows[0].1), (-2.0, -2.0));
    let min = rows.iter().min_by(|a, b| a.2.partial_cmp(&b.2).unwrap()).unwrap();
    assert!(min.0.hypot(min.1) < 1e-9, "{min:?}");
}

#[test]
fn critical_census() {
    let dir = scratch("critical");
    let input = write(&dir, "z6.json", &z6_json());
    let o = run(&["critical", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        (v["I0"].as_u64(), v["I1"].as_u64(), v["I2"].as_u64()),
        (Some(4), Some(12), Some(6))
    );
    assert_eq!(v["euler_check"]["lhs"], -2);
    assert_eq!(v["euler_check"]["rhs"], -2);
    assert_eq!(v["is_morse_function"], true);
    let gb = &v["gauss_bonnet"];
    let (i, e) = (gb["integral"].as_f64().unwrap(), gb["expected"].as_f64().unwrap());
    assert!((i - e).abs() < 1e-2 * e.abs());
    assert_eq!(v["critical_points"].as_array().unwrap().len(), 14);

    let text = run(&["critical", "--input", s(&input), "--format", "text"]);
    assert_eq!(code(&text), 0);
    assert!(stdout(&text).contains("Morse function: yes"));
}

#[test]
fn random_genus_two_passes_critical_and_verify() {
    let dir = scratch("random");
    let pts = [
        (0.1, 0.2),
        (-0.6, 0.3),
        (0.7, -0.4),
        (-0.2, -0.8),
        (0.5, 0.6),
        (-0.8, -0.3),
    ];
    let input = write(&dir, "g2.json", &curve_json(&pts));
    let o = run(&["critical", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["euler_check"]["lhs"], -2);
    let o = run(&["verify", "--input", s(&input)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("skipped"));
}

#[test]
fn verify_z6() {
    let dir = scratch("verify");
    let input = write(&dir, "z6.json", &z6_json());
    let o = run(&["verify", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(!out.contains("FAIL") && !out.contains(" fail "));
    assert!(out.contains("Morse census"));
}

#[test]
fn flat_curve_is_a_validation_failure() {
    let dir = scratch("flat");
    let input = write(
        &dir,
        "g1.json",
        &curve_json(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]),
    );
    let o = run(&["critical", "--input", s(&input)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FlatMetric"));
    // Periods and grids still work in genus 1.
    assert_eq!(code(&run(&["periods", "--input", s(&input)])), 0);
    assert_eq!(code(&run(&["grid", "--input", s(&input), "--grid-size", "5"])), 0);
}

#[test]
fn input_errors_exit_one() {
    let dir = scratch("input-errors");
    let z6 = write(&dir, "z6.json", &z6_json());
    let five = write(
        &dir,
        "five.json",
        &curve_json(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]),
    );
    let dup = write(
        &dir,
        "dup.json",
        &curve_json(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]),
    );
    let junk = write(&dir, "junk.json", "not json");
    let missing = dir.join("missing.json");
    for args in [
        vec!["periods", "--input", s(&five)],
        vec!["verify", "--input", s(&dup)],
        vec!["periods", "--input", s(&junk)],
        vec!["periods", "--input", s(&missing)],
        vec!["periods"],
        vec!["periods", "--input", s(&z6), "--bogus"],
        vec!["periods", "--input", s(&z6), "--quad-tol", "-1"],
        vec!["grid", "--input", s(&z6), "--format", "json"],
        vec!["grid", "--input", s(&z6), "--window", "1,0,0,1"],
        vec!["grid", "--input", s(&z6), "--grid-size", "0"],
        vec!["critical", "--input", s(&z6), "--seed-density", "0"],
        vec!["frobnicate", "--input", s(&z6)],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn manual_cycles() {
    let dir = scratch("cycles");
    let input = write(&dir, "z6.json", &z6_json());
    let s3 = 3f64.sqrt() / 2.0;
    let rect = |x0: f64, x1: f64, y0: f64, y1: f64| {
        format!("[[{x0:?}, {y0:?}], [{x1:?}, {y0:?}], [{x1:?}, {y1:?}], [{x0:?}, {y1:?}]]")
    };
    let cycles = format!(
        r#"{{"cycles": [
            {{"kind": "A", "index": 1, "waypoints": {}}},
            {{"kind": "A", "index": 2, "waypoints": {}}},
            {{"kind": "B", "index": 1, "waypoints": {}}},
            {{"kind": "B", "index": 2, "waypoints": {}}}
        ]}}"#,
        rect(-1.2, -0.3, -1.1, 0.2),
        rect(-0.7, 0.7, s3 - 0.2, s3 + 0.2),
        rect(-0.8, 0.7, -1.1, 1.1),
        rect(0.3, 0.7, -1.1, 1.1)
    );
    let file = write(&dir, "cycles.json", &cycles);
    let manual = run(&[
        "periods",
        "--input",
        s(&input),
        "--cycles",
        s(&file),
        "--format",
        "json",
    ]);
    assert_eq!(code(&manual), 0, "{}", String::from_utf8_lossy(&manual.stderr));
    let auto = run(&["periods", "--input", s(&input), "--format", "json"]);
    let m: serde_json::Value = serde_json::from_str(&stdout(&manual)).unwrap();
    let a: serde_json::Value = serde_json::from_str(&stdout(&auto)).unwrap();
    let b11 = |v: &serde_json::Value| v["b_matrix"][0][0][0].as_f64().unwrap();
    assert!((b11(&m) - b11(&a)).abs() < 1e-10 * b11(&a));

    let odd = write(
        &dir,
        "odd.json",
        &format!(
            r#"{{"cycles": [{{"kind": "A", "index": 1, "waypoints": {}}}]}}"#,
            rect(0.8, 1.2, -0.2, 0.2)
        ),
    );
    assert_eq!(code(&run(&["periods", "--input", s(&input), "--cycles", s(&odd)])), 1);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}
