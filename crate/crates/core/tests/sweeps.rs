use cmsqueeze::sweep::{emit, figure_preset, read_json, run_sweep, Cell, OutputFormat, SweepConfig, SweepOptions};

fn with_grid(preset: &str, replace: &[(&str, &str)]) -> SweepConfig {
    let mut text = figure_preset(preset).unwrap().to_text();
    for (from, to) in replace {
        assert!(text.contains(from), "{from}");
        text = text.replace(from, to);
    }
    SweepConfig::parse(&text).unwrap()
}

#[test]
fn fig4a_grid_has_one_row_per_point() {
    // The validity target visits the same grid without the spectral integral.
    let c = with_grid(
        "fig4a",
        &[("sweep.target = mechanical_variance", "sweep.target = validity"), ("mechanical.method = frequency\n", "")],
    );
    let t = run_sweep(&c, &SweepOptions::default(), None).unwrap();
    assert_eq!(t.rows.len(), 10_201);
    let csv = t.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 10_202);
}

#[test]
fn json_file_roundtrip_is_bit_exact() {
    let c = figure_preset("fig3d").unwrap();
    let t = run_sweep(&c, &SweepOptions::default(), None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3d.json");
    emit(&t, &c, OutputFormat::Json, &path).unwrap();
    let (meta, back) = read_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(meta["config_sha256"], c.hash());
    assert_eq!(back.columns, t.columns);
    assert_eq!(back.rows.len(), t.rows.len());
    for (a, b) in t.rows.iter().zip(&back.rows) {
        for (x, y) in a.iter().zip(b) {
            match (x, y) {
                (Cell::Float(x), Cell::Float(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                _ => assert_eq!(x, y),
            }
        }
    }
}

#[test]
fn mechanical_grid_agrees_between_methods() {
    let base = [
        ("sweep.axis1 = system.temperature_k [0.01, 0.1, 0.2]", "sweep.axis1 = magnon_drive.coupling_over_2pi_hz [0.5e6, 1e6, 1.5e6]\nsystem.temperature_k = 0.01"),
        ("sweep.axis2 = squeeze.r 0 1.5 31", "sweep.axis2 = squeeze.r [0.25, 0.5, 1]"),
        ("magnon_drive.coupling_over_2pi_hz = 1500000\n", ""),
    ];
    let freq = with_grid("fig4c", &base);
    let mut time_replace = base.to_vec();
    time_replace.push(("mechanical.method = frequency", "mechanical.method = time"));
    let time = with_grid("fig4c", &time_replace);
    let a = run_sweep(&freq, &SweepOptions::default(), None).unwrap();
    let b = run_sweep(&time, &SweepOptions::default(), None).unwrap();
    assert_eq!(a.rows.len(), 9);
    for col in ["var_q", "var_p"] {
        for (x, y) in a.column(col).unwrap().iter().zip(b.column(col).unwrap()) {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x / y - 1.0).abs() < 1e-3, "{col}: {x} vs {y}");
        }
    }
    assert_ne!(freq.hash(), time.hash());
}

#[test]
fn fig4c_crossings_move_up_with_temperature() {
    let c = figure_preset("fig4c").unwrap();
    let t = run_sweep(&c, &SweepOptions::default(), None).unwrap();
    let (temp, r, q) = (
        t.column_index("T_K").unwrap(),
        t.column_index("r").unwrap(),
        t.column_index("var_q").unwrap(),
    );
    let crossing = |temperature: f64| {
        t.rows
            .iter()
            .filter(|row| row[temp].as_f64() == Some(temperature))
            .find(|row| row[q].as_f64().unwrap() < 0.5)
            .and_then(|row| row[r].as_f64())
            .unwrap()
    };
    let (a, b, c) = (crossing(0.01), crossing(0.1), crossing(0.2));
    assert!(a < b && b < c, "{a} {b} {c}");
}
