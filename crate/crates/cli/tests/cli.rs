use std::f64::consts::{PI, SQRT_2};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn spinorbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinorbit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = spinorbit(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = spinorbit(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn value(report: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    report
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{report}"))
        .parse()
        .unwrap()
}

#[test]
fn bell_defaults_reach_tsirelson() {
    let r = ok(&["bell"]);
    assert!((value(&r, "s") - 2.0 * SQRT_2).abs() < 1e-9);
    assert!(r.contains("s = 2.828427124746\n"));
    assert!(r.contains("violation = true"));
}

#[test]
fn bell_at_phi_half_turn_is_zero() {
    let r = ok(&["bell", "--phi", "180deg"]);
    assert!(value(&r, "s").abs() < 1e-12);
    let r = ok(&["bell", "--phi", "pi rad", "--chi", "0"]);
    assert!(value(&r, "s").abs() < 1e-12);
}

#[test]
fn bell_separable_stays_bounded() {
    let r = ok(&["bell", "--mode", "separable", "--b", "1,0,1,0"]);
    assert!(value(&r, "s").abs() <= 2.0);
    assert!(value(&r, "deviation") < 1e-12);
    assert!(r.contains("violation = false"));
}

#[test]
fn bell_from_bench_program_matches_mns() {
    let bench = fixture("fig1.bench");
    let r = ok(&[
        "bell",
        "--bench-file",
        bench.to_str().unwrap(),
        "--phi",
        "60",
        "--chi",
        "30",
    ]);
    let want = SQRT_2 * (PI / 6.0).cos() * (1.0 + (PI / 3.0).cos());
    assert!((value(&r, "s") - want).abs() < 1e-9);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "phi = \"180deg\"\nsettings = \"canonical\"\n").unwrap();
    let cfg = path.to_str().unwrap();
    assert!(value(&ok(&["bell", "--config", cfg]), "s").abs() < 1e-12);
    let r = ok(&["bell", "--config", cfg, "--phi", "0"]);
    assert!((value(&r, "s") - 2.0 * SQRT_2).abs() < 1e-12);

    std::fs::write(&path, "colour = \"blue\"\n").unwrap();
    assert!(fails(&["bell", "--config", cfg]).contains("unknown key `colour`"));
}

#[test]
fn conflicting_mode_selectors_fail() {
    let bench = fixture("fig1.bench");
    let e = fails(&[
        "bell",
        "--b",
        "1,0,1,0",
        "--bench-file",
        bench.to_str().unwrap(),
    ]);
    assert!(e.contains("exactly one mode"), "{e}");
    assert!(fails(&["bell", "--mode", "separable"]).contains("B-spec"));
    assert!(fails(&["bell", "--b", "0,0,1,1"]).contains("degenerate"));
    assert!(fails(&["bell", "--phi", "ninety"]).contains("invalid angle"));
}

#[test]
fn chi_sweep_peaks_at_full_turns() {
    let csv = ok(&[
        "sweep",
        "--param",
        "chi",
        "--from",
        "0",
        "--to",
        "4pi",
        "--samples",
        "512",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("chi,i1,i2,i3,i4,m,s,peak"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 512);
    let step = 4.0 * PI / 511.0;
    let peaks: Vec<f64> = rows.iter().filter(|r| r[7] == 1.0).map(|r| r[0]).collect();
    assert_eq!(peaks.len(), 3, "{peaks:?}");
    for (k, chi) in peaks.iter().enumerate() {
        assert!((chi - 2.0 * PI * k as f64).abs() <= step, "{chi}");
    }
    // even port follows the closed form at s11, to print precision
    for r in &rows {
        let a = (PI / 4.0).cos();
        let want_even = 0.5 * (1.0 + r[0].cos() * a);
        assert!((r[3] + r[4] - want_even).abs() < 1e-10);
        assert!((r[5] - r[0].cos() * a).abs() < 1e-10);
    }
}

#[test]
fn phi_sweep_s_column_follows_closed_form() {
    let csv = ok(&[
        "sweep",
        "--param",
        "phi",
        "--from",
        "0",
        "--to",
        "360",
        "--samples",
        "37",
    ]);
    for line in csv.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let want = SQRT_2 * (1.0 + cells[0].cos());
        assert!((cells[6] - want).abs() < 1e-9, "{line}");
    }
}

#[test]
fn sweep_rejects_degenerate_ranges() {
    let e = fails(&[
        "sweep",
        "--param",
        "chi",
        "--from",
        "0",
        "--to",
        "90",
        "--samples",
        "1",
    ]);
    assert!(e.contains("at least 2 samples"), "{e}");
    let e = fails(&["sweep", "--param", "chi", "--from", "10", "--to", "10"]);
    assert!(e.contains("empty sweep range"), "{e}");
    assert!(fails(&["sweep", "--param", "gamma", "--from", "0", "--to", "1"]).contains("gamma"));
    assert!(fails(&["sweep", "--from", "0", "--to", "1"]).contains("--param"));
}

#[test]
fn sweep_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        ok(&[
            "sweep",
            "--param",
            "beta",
            "--from",
            "0",
            "--to",
            "180",
            "--samples",
            "64",
            "--b",
            "random",
            "--seed",
            "11",
            "--out",
            p.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(std::fs::read_to_string(&a)
        .unwrap()
        .starts_with("beta,i1,i2,i3,i4,m\n"));
}

#[test]
fn ingest_table2_violates() {
    let r = ok(&["ingest", fixture("table2.csv").to_str().unwrap()]);
    assert!((value(&r, "s") - 2.17).abs() < 0.005);
    assert!(r.contains("verdict = violates separable bound"));
    let comma = ok(&["ingest", fixture("table2_comma.csv").to_str().unwrap()]);
    assert_eq!(value(&comma, "s"), value(&r, "s"));
}

#[test]
fn ingest_separable_means_do_not_violate() {
    let r = ok(&["ingest", fixture("table1_separable.csv").to_str().unwrap()]);
    assert!((value(&r, "s") - 1.03).abs() < 0.005);
    assert!(r.contains("verdict = within separable bound"));
}

#[test]
fn ingest_names_the_bad_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "basis,i1,i2,i3,i4\na1b1,1,2,3,4\n\na1b2,1,two,3,4\n").unwrap();
    let e = fails(&["ingest", path.to_str().unwrap()]);
    assert!(e.contains("line 4"), "{e}");
    std::fs::write(&path, "basis,i1,i2,i3,i4\na1b1,1,2,3,4\n").unwrap();
    assert!(fails(&["ingest", path.to_str().unwrap()]).contains("a1b2"));
    assert!(fails(&["ingest", "/nonexistent/table.csv"]).contains("reading"));
}

#[test]
fn quantum_report() {
    let r = ok(&["quantum", "--amp", "1"]);
    assert!((value(&r, "single_photon_probability") - (-1.0f64).exp()).abs() < 1e-12);
    assert!((value(&r, "concurrence") - 1.0).abs() < 1e-12);
    assert!((value(&r, "s") - 2.0 * SQRT_2).abs() < 1e-12);
    let r = ok(&["quantum", "--amp", "2", "--cutoff", "30"]);
    assert!(value(&r, "factorization_deviation") < 1e-12);
    assert!(ok(&["quantum", "--amp", "0"]).contains("concurrence = n/a"));
}

#[test]
fn quantum_post_select_on_vacuum_fails() {
    let out = spinorbit(&["quantum", "--amp", "0", "--post-select"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    assert!(fails(&["quantum", "--cutoff", "0"]).contains("cutoff"));
}

#[test]
fn quantum_writes_fock_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fock.csv");
    ok(&[
        "quantum",
        "--amp",
        "1+1i",
        "--cutoff",
        "4",
        "--fock-out",
        path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("n_vv,n_hh,re,im,prob"));
    assert_eq!(text.lines().count(), 1 + 15);
}

#[test]
fn render_writes_csv_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("field.csv");
    let pgm = dir.path().join("field.pgm");
    let r = ok(&[
        "render",
        "--size",
        "32",
        "--out",
        csv.to_str().unwrap(),
        "--pgm",
        pgm.to_str().unwrap(),
    ]);
    assert_eq!(value(&r, "pixels"), 1024.0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 1024);
    let image = std::fs::read(&pgm).unwrap();
    assert!(image.starts_with(b"P5\n32 32\n255\n"));
    assert_eq!(image.len(), b"P5\n32 32\n255\n".len() + 1024);
    assert!(fails(&["render", "--size", "1", "--out", csv.to_str().unwrap()]).contains("grid"));
}

#[test]
fn bench_runs_fixture() {
    let path = fixture("fig1.bench");
    let r = ok(&[
        "bench",
        path.to_str().unwrap(),
        "--set",
        "alpha=pi/16",
        "--set",
        "beta=0",
        "--set",
        "phi=0",
        "--set",
        "chi=0",
    ]);
    assert!((value(&r, "m") - (PI / 4.0).cos()).abs() < 1e-12);
    let e = fails(&["bench", path.to_str().unwrap(), "--set", "alpha=0"]);
    assert!(e.contains("unbound parameter"), "{e}");
}

#[test]
fn bench_reports_parse_positions() {
    let e = fails(&[
        "bench",
        fixture("malformed/unclosed_paren.bench").to_str().unwrap(),
    ]);
    assert!(e.contains("1:19:"), "{e}");
    let e = fails(&[
        "bench",
        fixture("malformed/unknown_element.bench").to_str().unwrap(),
    ]);
    assert!(e.contains("2:1:"), "{e}");
}
