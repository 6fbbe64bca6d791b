//! End-to-end checks of the `vdw` binary: scans, suites, table tools, exit
//! codes, and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn vdw(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdw"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const GG_CONFIG: &str = r#"
temperature = 0.0

[atoms.a]
position = [0.0, 0.0, 0.0]
omega = 2.5e15
dipole = [1.0, 0.0, 0.0]
state = "ground"

[atoms.b]
position = [0.0, 0.0, 1.0e-9]
omega = 2.5e15
dipole = [1.0, 0.0, 0.0]
state = "ground"

[medium]
model = "vacuum"

[scan]
quantity = "gg"
r_min = 1.0e-9
r_max = 4.0e-9
points = 3
spacing = "log"
"#;

#[test]
fn gg_scan_is_monotone_negative_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "gg.toml", GG_CONFIG);

    let out = vdw(
        &["scan", "--config", config.to_str().unwrap(), "--output", "one.csv", "--workers", "1"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let table = vdw_cli::table::Table::read(&dir.path().join("one.csv")).unwrap();
    let shift = table.column("shift").unwrap();
    assert_eq!(shift.len(), 3);
    assert!(shift.iter().all(|s| *s < 0.0), "potential must be attractive: {shift:?}");
    assert!(shift[0] < shift[1] && shift[1] < shift[2], "must weaken with distance: {shift:?}");
    let width = table.column("width").unwrap();
    assert!(width.iter().all(|w| *w == 0.0));

    // Byte-identical output regardless of the worker count.
    let out = vdw(
        &["scan", "--config", config.to_str().unwrap(), "--output", "four.csv", "--workers", "4"],
        dir.path(),
    );
    assert!(out.status.success());
    let one = std::fs::read(dir.path().join("one.csv")).unwrap();
    let four = std::fs::read(dir.path().join("four.csv")).unwrap();
    assert_eq!(one, four);
}

#[test]
fn scan_rejects_invalid_config_with_field_name() {
    let dir = tempfile::tempdir().unwrap();
    let bad = GG_CONFIG.replace("r_max = 4.0e-9", "r_max = 1.0e-10");
    let config = write(dir.path(), "bad.toml", &bad);
    let out = vdw(&["scan", "--config", config.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("scan.r_max"), "stderr: {stderr}");
}

#[test]
fn ge_scan_reports_both_orderings() {
    let dir = tempfile::tempdir().unwrap();
    let config_text = GG_CONFIG
        .replace(
            "[atoms.a]\nposition = [0.0, 0.0, 0.0]\nomega = 2.5e15\ndipole = [1.0, 0.0, 0.0]\nstate = \"ground\"",
            "[atoms.a]\nposition = [0.0, 0.0, 0.0]\nomega = 2.5e15\ndipole = [1.0, 0.0, 0.0]\nstate = \"excited\"",
        )
        .replace("omega = 2.5e15\ndipole = [1.0, 0.0, 0.0]\nstate = \"ground\"\n\n[medium]",
                 "omega = 2.9e15\ndipole = [1.0, 0.0, 0.0]\nstate = \"ground\"\n\n[medium]")
        .replace("quantity = \"gg\"", "quantity = \"ge_keldysh\"");
    let config = write(dir.path(), "ge.toml", &config_text);
    let out = vdw(
        &["scan", "--config", config.to_str().unwrap(), "--output", "ge.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let table = vdw_cli::table::Table::read(&dir.path().join("ge.csv")).unwrap();
    // Keldysh column plus the time-ordered variant side by side.
    let shift = table.column("shift").unwrap();
    let alt = table.column("alt_shift").unwrap();
    assert!(shift.iter().all(|v| v.is_finite()));
    assert!(alt.iter().all(|v| v.is_finite()));
    // Near zone: the two orderings nearly coincide.
    let rel = ((shift[0] - alt[0]) / shift[0]).abs();
    assert!(rel < 1e-4, "orderings differ by {rel} in the near zone");
    // The resonant part never oscillates: same sign everywhere.
    let res = table.column("resonant_re").unwrap();
    assert!(res.windows(2).all(|w| w[0].signum() == w[1].signum()));
}

#[test]
fn wrong_states_for_quantity_fail_fast() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "gg.toml", GG_CONFIG);
    let out = vdw(
        &["scan", "--config", config.to_str().unwrap(), "--quantity", "ge_keldysh"],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("excited"), "stderr: {stderr}");
}

#[test]
fn fit_recovers_exact_power_laws_and_refuses_oscillations() {
    let dir = tempfile::tempdir().unwrap();
    let mut six = String::from("# synthetic\nr_m,value,wavy,error\n");
    for i in 0..24 {
        let r = 1e-9 * (100.0f64).powf(i as f64 / 23.0);
        let v = -3.2e-37 / r.powi(6);
        let w = (2.0e9 * r).cos();
        six.push_str(&format!("{r},{v},{w},\n"));
    }
    let path = write(dir.path(), "six.csv", &six);

    let out = vdw(&["fit", "--input", path.to_str().unwrap(), "--column", "value"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("slope = -6.000000"), "stdout: {stdout}");

    let out = vdw(&["fit", "--input", path.to_str().unwrap(), "--column", "wavy"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("changes sign"), "stderr: {stderr}");

    // window selection uses meters
    let out = vdw(
        &[
            "fit",
            "--input",
            path.to_str().unwrap(),
            "--column",
            "value",
            "--window",
            "1e-9:1e-8",
        ],
        dir.path(),
    );
    assert!(out.status.success());
}

#[test]
fn oscillations_measure_cosine_spacing() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("r_m,value,flat,error\n");
    for i in 0..6000 {
        let r = 1.0 + 30.0 * i as f64 / 5999.0;
        csv.push_str(&format!("{r},{},{},\n", (2.0 * r).cos() / (r * r), -1.0 / r));
    }
    let path = write(dir.path(), "osc.csv", &csv);

    let out =
        vdw(&["oscillations", "--input", path.to_str().unwrap(), "--column", "value"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    // spacing π/2 ≈ 1.5708e0
    assert!(stdout.contains("mean spacing 1.570"), "stdout: {stdout}");

    let out =
        vdw(&["oscillations", "--input", path.to_str().unwrap(), "--column", "flat"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("no oscillation detected"));
}

#[test]
fn identity_suite_passes_with_zero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(&["identities", "--seed", "3", "--samples", "60"], dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("identities suite: PASS"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn oracle_suite_passes_with_zero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(&["oracle", "--models", "6", "--seed", "11"], dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("oracle suite (6 models, seed 11): PASS"), "stdout: {stdout}");
}

#[test]
fn rates_subcommand_reports_physical_rates() {
    let dir = tempfile::tempdir().unwrap();
    let text = GG_CONFIG
        .replace("state = \"ground\"\n\n[atoms.b]", "state = \"excited\"\n\n[atoms.b]")
        .replace("omega = 2.5e15\ndipole = [1.0, 0.0, 0.0]\nstate = \"ground\"\n\n[medium]",
                 "omega = 2.5e15\ndipole = [1.0, 0.0, 0.0]\nstate = \"ground\"\nlinewidth = 1.0e9\n\n[medium]")
        .replace("temperature = 0.0", "temperature = 300.0");
    let config = write(dir.path(), "rates.toml", &text);
    let out = vdw(
        &["rates", "--config", config.to_str().unwrap(), "--output", "rates.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let table = vdw_cli::table::Table::read(&dir.path().join("rates.csv")).unwrap();
    let g0 = table.column("gamma0_a").unwrap()[0];
    assert!(g0 > 0.0 && g0.is_finite());
    // ħω/kT ≈ 63 at 300 K for 2.5e15 rad/s: absorption is Boltzmann-dead.
    let gabs = table.column("gamma_abs_b").unwrap()[0];
    assert!(gabs >= 0.0 && gabs < 1e-20 * g0);
    let fret = table.column("fret").unwrap()[0];
    assert!(fret > 0.0);
}

#[test]
fn scan_output_reparses_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "gg.toml", GG_CONFIG);
    let out = vdw(
        &["scan", "--config", config.to_str().unwrap(), "--output", "t.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let t1 = vdw_cli::table::Table::read(&dir.path().join("t.csv")).unwrap();
    t1.write(&dir.path().join("t2.csv"), &["x".into()]).unwrap();
    let t2 = vdw_cli::table::Table::read(&dir.path().join("t2.csv")).unwrap();
    for (r1, r2) in t1.rows.iter().zip(&t2.rows) {
        for (a, b) in r1.values.iter().zip(&r2.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
