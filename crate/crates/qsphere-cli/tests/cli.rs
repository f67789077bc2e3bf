use std::process::{Command, Output};

fn qsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsphere")).args(args).output().expect("spawn qsphere")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn parse_prints_normal_form() {
    let o = qsphere(&["parse", "a*c - q*c*a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
    let o = qsphere(&["parse", "b0"]);
    assert_eq!(stdout(&o), "-q*c*c*\n");
}

#[test]
fn parse_error_has_caret_and_exit_1() {
    let o = qsphere(&["parse", "a + e"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines[0], "a + e");
    assert_eq!(lines[1], "    ^");
    assert!(stdout(&o).is_empty());
}

#[test]
fn algebra_exit_codes() {
    // two printed relations are known errata
    assert_eq!(qsphere(&["verify", "algebra"]).status.code(), Some(1));
    assert_eq!(qsphere(&["verify", "algebra", "--allow-known-errata"]).status.code(), Some(0));
    assert_eq!(qsphere(&["verify", "symmetries", "--deg", "2"]).status.code(), Some(0));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["spectrum", "--q", "1.5"][..],
        &["spectrum", "--q", "0"],
        &["spectrum", "--q", "-0.5"],
        &["spectrum", "--jmax", "3"],
        &["spectrum", "--jmax", "3.25"],
        &["spectrum", "--q", "0.3", "--q", "0.5"],
        &["spectrum", "--tol", "0"],
        &["decay", "--op", "nonsense"],
        &["decay", "--op", "commutant", "--i", "2"],
        &["verify", "spectral", "--jmax", "0.5"],
    ] {
        let o = qsphere(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("error"), "{args:?}");
    }
}

#[test]
fn spectrum_csv_schema() {
    let o = qsphere(&["spectrum", "--q", "0.5", "--jmax", "4.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["j", "mu_j_closed_form", "mu_j_numeric", "multiplicity"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for (k, row) in rows.iter().enumerate() {
        let closed: f64 = row[1].parse().unwrap();
        let numeric: f64 = row[2].parse().unwrap();
        assert!((closed - numeric).abs() <= 1e-9 * closed);
        assert_eq!(row[3].parse::<usize>().unwrap(), 2 * k + 2);
    }
    let mu: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(mu.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn decay_csv_schema() {
    let o = qsphere(&["decay", "--op", "w-lemma", "--q", "0.5", "--jmax", "10.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["j", "block_norm", "fitted_slope", "target_slope"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    let target: f64 = rows[0][3].parse().unwrap();
    assert!((target - 0.5f64.ln()).abs() < 1e-12);
    let slope: f64 = rows[0][2].parse().unwrap();
    assert!((slope - target).abs() <= 0.1 * target.abs());
}

fn without_timing(s: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
    v.as_object_mut().unwrap().remove("elapsed_ms").expect("elapsed_ms present");
    v
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let args = ["verify", "spectral", "--q", "0.5", "--jmax", "6.5", "--format", "json"];
    let a = stdout(&qsphere(&args));
    let b = stdout(&qsphere(&args));
    assert_eq!(without_timing(&a), without_timing(&b));
}

#[test]
fn verify_csv_includes_negative_control() {
    let o = qsphere(&["verify", "spectral", "--q", "0.5", "--jmax", "6.5", "--format", "csv"]);
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["id", "status", "residual", "witness", "erratum"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let find = |id: &str| rows.iter().find(|r| &r[0] == id).unwrap_or_else(|| panic!("{id}"));
    assert_eq!(&find("q=0.5.pi.negative-control")[1], "pass");
    assert_eq!(&find("q=0.5.pi.stated-alpha00")[1], "fail");
    assert!(!find("q=0.5.pi.stated-alpha00")[4].is_empty());
}

#[test]
fn out_writes_file() {
    let path = std::env::temp_dir().join(format!("qsphere-cli-test-{}.json", std::process::id()));
    let o = qsphere(&["verify", "algebra", "--deg", "2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["checks"].as_array().unwrap().len() > 10);
    std::fs::remove_file(&path).unwrap();
}
