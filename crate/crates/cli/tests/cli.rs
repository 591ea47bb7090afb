use std::path::Path;
use std::process::{Command, Output};

fn cmsqueeze(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmsqueeze"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const SMALL: &str = "
sweep.name = small
sweep.target = magnon_variances
sweep.axis1 = squeeze.r 0 1 3
system.cavity_freq_over_2pi_hz = 10e9
system.magnon_freq_over_2pi_hz = 10e9
system.kappa_a_over_2pi_hz = 5e6
system.kappa_m_over_2pi_hz = 1e6
system.g_ma_over_2pi_hz = 20e6
system.temperature_k = 0.02
";

#[test]
fn preset_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = cmsqueeze(&["preset", "fig2a", "--out", "a.csv", "--quiet"], dir.path());
    let b = cmsqueeze(&["preset", "fig2a", "--out", "b.csv", "--jobs", "3", "--quiet"], dir.path());
    assert!(a.status.success() && b.status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 41 * 41);
    assert!(text.starts_with("Delta_m_over_2pi_Hz,Delta_a_over_2pi_Hz,var_X,var_X_dB,"));
}

#[test]
fn sweep_writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    let out = cmsqueeze(&["sweep", "small.cfg", "--quiet"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].ends_with(",stable,status"));
    assert!(lines[1].starts_with("0,"));
    assert!(lines[3].starts_with("1,"));
}

#[test]
fn json_output_carries_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    let out = cmsqueeze(&["sweep", "small.cfg", "--format", "json", "--out", "small.json", "-q"], dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("small.json")).unwrap();
    let (meta, table) = cmsqueeze::sweep::read_json(&text).unwrap();
    assert_eq!(meta["name"], "small");
    assert_eq!(meta["config"]["system.g_ma_over_2pi_hz"], "20000000");
    assert_eq!(table.rows.len(), 3);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmsqueeze(&["preset", "fig9"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig4b"));

    assert_eq!(cmsqueeze(&["sweep", "missing.cfg"], dir.path()).status.code(), Some(1));
    assert_eq!(cmsqueeze(&["frobnicate"], dir.path()).status.code(), Some(1));

    std::fs::write(dir.path().join("bad.cfg"), SMALL.replace("system.temperature_k = 0.02\n", "")).unwrap();
    assert_eq!(cmsqueeze(&["sweep", "bad.cfg"], dir.path()).status.code(), Some(1));

    std::fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    let out = cmsqueeze(&["spectrum", "small.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = cmsqueeze(&["sweep", "small.cfg", "--format", "xml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failing_run_exits_with_two() {
    // A squeezed drive off the mechanical sideband has no stationary
    // interaction-picture variance, so every point fails.
    let cfg = "
sweep.name = hopeless
sweep.target = mechanical_variance
sweep.axis1 = squeeze.r [0.5, 1]
system.cavity_freq_over_2pi_hz = 10e9
system.magnon_freq_over_2pi_hz = 10e9
system.mech_freq_over_2pi_hz = 10e6
system.kappa_a_over_2pi_hz = 3e6
system.kappa_m_over_2pi_hz = 0.6e6
system.gamma_b_over_2pi_hz = 100
system.g_ma_over_2pi_hz = 4.2e6
system.g_mb_over_2pi_hz = 0.1
system.temperature_k = 0.01
squeeze.detuning_over_2pi_hz = 7e6
detuning.cavity_over_2pi_hz = 11e6
detuning.magnon_over_2pi_hz = 10e6
magnon_drive.coupling_over_2pi_hz = 1.5e6
";
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("h.cfg"), cfg).unwrap();
    let out = cmsqueeze(&["sweep", "h.cfg", "-q"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains("error")));
}

#[test]
fn spectrum_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{}\nsweep.target = output_spectrum\nsweep.axis1 = system.g_ma_over_2pi_hz [20e6]\nsqueeze.r = 1\n\
         spectrum.min_over_2pi_hz = -40e6\nspectrum.max_over_2pi_hz = 40e6\nspectrum.steps = 81\nspectrum.phi_rad = 1.5707963267948966\n",
        SMALL
            .lines()
            .filter(|l| !l.starts_with("sweep.target") && !l.starts_with("sweep.axis1") && !l.starts_with("system.g_ma"))
            .collect::<Vec<_>>()
            .join("\n")
    );
    std::fs::write(dir.path().join("s.cfg"), cfg).unwrap();
    let out = cmsqueeze(&["spectrum", "s.cfg", "-q"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 82);

    let out = cmsqueeze(&["validate", "s.cfg"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("target: output_spectrum"));
    assert!(text.contains("stable: true"));
}
