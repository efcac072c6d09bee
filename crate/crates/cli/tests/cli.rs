use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use onebit_core::chest::{mse_blm_closed, mse_sls_mol, mse_sls_opt};
use onebit_core::db_to_linear;
use onebit_core::pilots::dft_pilots;

fn onebit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = onebit(&[
            "mse-vs-rho",
            "--k",
            "2",
            "--tau",
            "8",
            "--rho-db",
            "-10:10:10",
            "--trials",
            "2000",
            "--seed",
            "5",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn closed_form_columns_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mse.csv");
    let o = onebit(&[
        "mse-vs-rho",
        "--k",
        "4",
        "--tau",
        "32",
        "--pilot",
        "dft",
        "--rho-db",
        "-10:2:30",
        "--trials",
        "0",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(rows.len(), 21);
    assert!(!header.iter().any(|h| h.ends_with("_empirical")));
    let p = dft_pilots(32, 4).unwrap();
    let dbs = column(&header, &rows, "rho_db");
    let blm = column(&header, &rows, "mse_blm_full_closed");
    let sls = column(&header, &rows, "mse_sls_mol_closed");
    let opt = column(&header, &rows, "mse_sls_opt_closed");
    for i in 0..rows.len() {
        let rho = db_to_linear(dbs[i]);
        assert_eq!(blm[i], mse_blm_closed(&p, rho).unwrap());
        assert_eq!(sls[i], mse_sls_mol(&p, rho).unwrap());
        assert_eq!(opt[i], mse_sls_opt(&p, rho).unwrap());
    }
}

#[test]
fn empirical_columns_carry_std_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mse.csv");
    let o = onebit(&[
        "mse-vs-tau",
        "--k",
        "1",
        "--tau",
        "4,8",
        "--estimators",
        "sls-opt,blm",
        "--trials",
        "500",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    for (i, h) in header.iter().enumerate() {
        if h.ends_with("_empirical") {
            assert!(
                header[i + 1].ends_with("_se"),
                "{h} not followed by a std-error column"
            );
        }
    }
    for row in &rows {
        for cell in row {
            assert!(cell.parse::<f64>().map(f64::is_finite).unwrap_or(true));
        }
    }
}

#[test]
fn rho_star_column_is_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rs.csv");
    let o = onebit(&[
        "rho-star",
        "--tau",
        "4:4:1024",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&out);
    let r = column(&header, &rows, "rho_star");
    assert_eq!(r.len(), 256);
    assert!(r.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# pilot study\ntau = 32\nrho_db = -10:5:20\ntrials = 0\n",
    )
    .unwrap();
    let out = dir.path().join("o.csv");
    let o = onebit(&[
        "mse-vs-rho",
        "--config",
        cfg.to_str().unwrap(),
        "--tau",
        "64",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert!(column(&header, &rows, "tau").iter().all(|&t| t == 64.0));
    assert_eq!(
        column(&header, &rows, "rho_db"),
        vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
    );
}

#[test]
fn usage_errors_exit_with_one() {
    let o = onebit(&["ser-vs-rho", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("single user"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "tau = 8\nwidth = 3\n").unwrap();
    let o = onebit(&["mse-vs-rho", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(onebit(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        onebit(&["mse-vs-rho", "--rho-db", "5:1:1"]).status.code(),
        Some(1)
    );
}

#[test]
fn detection_sweeps_write_long_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = onebit(&[
        "var-vs-rho",
        "--m",
        "16",
        "--tau",
        "8",
        "--pilot",
        "pstar",
        "--rho-db",
        "0,10",
        "--trials",
        "200",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(rows.len(), 32);
    assert!(header.contains(&"normvar_bound_ones".to_string()));

    let out = dir.path().join("s.csv");
    let o = onebit(&[
        "ser-vs-rho",
        "--m",
        "16",
        "--tau",
        "8",
        "--rho-db",
        "0,40",
        "--trials",
        "300",
        "--constellation",
        "qpsk",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(column(&header, &rows, "trials"), vec![300.0, 300.0]);

    let out = dir.path().join("d.csv");
    let o = onebit(&[
        "detect-scatter",
        "--m",
        "8",
        "--tau",
        "4",
        "--trials",
        "5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(read_csv(&out).1.len(), 80);
}

#[test]
fn validate_writes_one_row_per_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("val.csv");
    let o = onebit(&[
        "validate",
        "--trials",
        "3000",
        "--seed",
        "7",
        "--output",
        out.to_str().unwrap(),
    ]);
    let code = o.status.code().unwrap();
    assert!(code == 0 || code == 2);
    let (header, rows) = read_csv(&out);
    let pass = header.iter().position(|h| h == "pass").unwrap();
    let all_pass = rows.iter().all(|r| r[pass] == "true");
    assert_eq!(code == 0, all_pass);
    assert!(rows.len() > 40);
}
