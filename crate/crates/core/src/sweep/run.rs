use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{Cell, DriveSpec, MagnonMode, MechanicalMethod, ResultTable, SweepConfig, Target};
use crate::constants::{angular, ordinary};
use crate::error::{Error, Result};
use crate::gauss::{build_three_mode, build_two_mode, stability};
use crate::output::output_spectrum;
use crate::params::{
    rabi_for_coupling, rabi_frequency, spin_count, validity_report, working_point, MagnonDetuning,
    SqueezedDrive, SystemParams, WorkingPoint,
};
use crate::threemode::{
    interaction_picture_variance, limit_cycle_variance_oracle, LimitCycleOptions, SpectralOptions,
};
use crate::twomode::{detuned_variances, squeezing_db};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
}

/// Completion notice for one grid point.
#[derive(Debug, Clone, Copy)]
pub struct RowReport<'a> {
    /// Position of the point in row-major order.
    pub index: usize,
    /// Points finished so far, including this one.
    pub done: usize,
    pub total: usize,
    /// "ok" or the failure message.
    pub status: &'a str,
}

/// Physical inputs of one grid point.
struct Point {
    params: SystemParams,
    r: f64,
    theta: f64,
    detuning_s: f64,
    detuning_a: f64,
    detuning_m: f64,
    magnon: MagnonDetuning,
    drive: Option<(DriveSpec, f64)>,
}

fn point(config: &SweepConfig, swept: &[f64]) -> Point {
    let get = |key: &str| -> Option<f64> {
        match config.axes.iter().position(|a| a.key == key) {
            Some(i) => Some(swept[i]),
            None => config.value(key),
        }
    };
    // Required keys are enforced when the config is parsed.
    let need = |key: &str| get(key).expect("required key checked at parse time");
    let hz = |key: &str| angular(need(key));
    let detuning_a = hz("detuning.cavity_over_2pi_hz");
    let detuning_m = hz("detuning.magnon_over_2pi_hz");
    let detuning_s = hz("squeeze.detuning_over_2pi_hz");
    let cavity_freq = hz("system.cavity_freq_over_2pi_hz");
    // Reference frequencies implied by the detunings: the two-mode frame
    // rotates at ω_s, the driven frame at ω_0 with ω_s = ω_0 + Δ_s.
    let (drive_freq, squeeze_freq) = if config.target.is_three_mode() {
        (cavity_freq - detuning_a, cavity_freq - detuning_a + detuning_s)
    } else {
        (cavity_freq - detuning_a, cavity_freq - detuning_a)
    };
    let params = SystemParams {
        cavity_freq,
        magnon_freq: hz("system.magnon_freq_over_2pi_hz"),
        mech_freq: hz("system.mech_freq_over_2pi_hz"),
        kappa_a: hz("system.kappa_a_over_2pi_hz"),
        kappa_m: hz("system.kappa_m_over_2pi_hz"),
        gamma_b: hz("system.gamma_b_over_2pi_hz"),
        g_ma: hz("system.g_ma_over_2pi_hz"),
        g_mb: hz("system.g_mb_over_2pi_hz"),
        rabi: 0.0,
        temperature: need("system.temperature_k"),
        sphere_diameter: need("system.sphere_diameter_m"),
        drive_freq,
        squeeze_freq,
    };
    let magnon = match config.magnon_mode {
        MagnonMode::Effective => MagnonDetuning::Effective(detuning_m),
        MagnonMode::Bare => MagnonDetuning::Bare(detuning_m),
    };
    let drive = config
        .drive_spec()
        .map(|d| (d, get(d.key()).expect("drive key is set or swept")));
    Point {
        params,
        r: need("squeeze.r"),
        theta: need("squeeze.theta_rad"),
        detuning_s,
        detuning_a,
        detuning_m,
        magnon,
        drive,
    }
}

impl Point {
    fn working_point(&self) -> Result<WorkingPoint> {
        let (spec, value) = self
            .drive
            .ok_or_else(|| Error::Usage("the driven model needs a magnon drive".into()))?;
        let rabi = match spec {
            DriveSpec::Rabi => value,
            DriveSpec::Field => rabi_frequency(value, spin_count(self.params.sphere_diameter)),
            DriveSpec::Coupling => rabi_for_coupling(&self.params, self.detuning_a, self.magnon, angular(value))?,
        };
        working_point(&self.params, self.detuning_a, self.magnon, rabi)
    }

    fn driven_params(&self, wp: &WorkingPoint) -> SystemParams {
        SystemParams {
            rabi: wp.rabi,
            ..self.params
        }
    }
}

fn target_columns(target: Target) -> Vec<&'static str> {
    match target {
        Target::MagnonVariances => vec![
            "var_X", "var_X_dB", "var_Y", "var_Y_dB", "var_x", "var_x_dB", "var_y", "var_y_dB",
        ],
        Target::MechanicalVariance => vec![
            "var_q", "var_q_dB", "var_p", "var_p_dB", "G_mb_eff_over_2pi_Hz", "Omega_rad_per_s",
        ],
        Target::Validity => vec![
            "G_mb_eff_over_2pi_Hz",
            "G_mb_phase_rad",
            "Omega_rad_per_s",
            "mean_magnon_abs",
            "magnon_number",
            "spin_bound",
            "kerr_coeff_rad_per_s",
            "kerr_drive_rad_per_s",
            "low_lying_ratio",
            "kerr_ratio",
            "low_lying_ok",
            "kerr_ok",
            "low_lying_ok_relaxed",
            "kerr_ok_relaxed",
        ],
        Target::OutputSpectrum => vec!["omega_over_2pi_Hz", "S"],
    }
}

fn variance_cells(v: f64) -> Result<[Cell; 2]> {
    Ok([Cell::Float(v), Cell::Float(squeezing_db(v)?)])
}

/// Target cells for one point, possibly several rows, and the stability flag.
fn evaluate(config: &SweepConfig, p: &Point) -> Result<(Vec<Vec<Cell>>, bool)> {
    match config.target {
        Target::MagnonVariances => {
            let drive = SqueezedDrive::new(p.r, p.theta, 0.0);
            let v = detuned_variances(&p.params, &drive, p.detuning_a, p.detuning_m)?;
            let mut row = Vec::new();
            for x in [v.cavity_x, v.cavity_y, v.magnon_x, v.magnon_y] {
                row.extend(variance_cells(x)?);
            }
            Ok((vec![row], true))
        }
        Target::MechanicalVariance => {
            let wp = p.working_point()?;
            let params = p.driven_params(&wp);
            let drive = SqueezedDrive::new(p.r, p.theta, p.detuning_s);
            let (model, diffusion) = build_three_mode(&params, &drive, &wp)?;
            let (q, v) = match config.method {
                MechanicalMethod::Frequency => {
                    let v = interaction_picture_variance(&model, &SpectralOptions::default())?;
                    (v.q, v.p)
                }
                MechanicalMethod::Time => {
                    let v = limit_cycle_variance_oracle(&model, &diffusion, &LimitCycleOptions::default())?;
                    (v.q, v.p)
                }
            };
            let mut row = Vec::new();
            row.extend(variance_cells(q)?);
            row.extend(variance_cells(v)?);
            row.push(Cell::Float(ordinary(wp.coupling())));
            row.push(Cell::Float(wp.rabi));
            Ok((vec![row], true))
        }
        Target::Validity => {
            let wp = p.working_point()?;
            let params = p.driven_params(&wp);
            let rep = validity_report(&params, &wp);
            let drive = SqueezedDrive::new(p.r, p.theta, p.detuning_s);
            let (model, _) = build_three_mode(&params, &drive, &wp)?;
            let stable = stability(&model).is_stable;
            let row = vec![
                Cell::Float(ordinary(wp.coupling())),
                Cell::Float(wp.coupling_phase()),
                Cell::Float(wp.rabi),
                Cell::Float(wp.mean_magnon.norm()),
                Cell::Float(rep.magnon_number),
                Cell::Float(rep.spin_bound),
                Cell::Float(rep.kerr_coeff),
                Cell::Float(rep.kerr_drive),
                Cell::Float(rep.low_lying_ratio),
                Cell::Float(rep.kerr_ratio),
                Cell::Bool(rep.low_lying_ok),
                Cell::Bool(rep.kerr_ok),
                Cell::Bool(rep.low_lying_ok_relaxed),
                Cell::Bool(rep.kerr_ok_relaxed),
            ];
            Ok((vec![row], stable))
        }
        Target::OutputSpectrum => {
            let grid = config
                .spectrum
                .as_ref()
                .ok_or_else(|| Error::Usage("output_spectrum needs the spectrum.* keys".into()))?;
            let hz = grid.points_hz();
            let omega: Vec<f64> = hz.iter().map(|v| angular(*v)).collect();
            let drive = SqueezedDrive::new(p.r, p.theta, 0.0);
            let trace = output_spectrum(&p.params, &drive, p.detuning_a, p.detuning_m, &omega, grid.phi)?;
            let rows = hz
                .iter()
                .zip(&trace.values)
                .map(|(w, s)| vec![Cell::Float(*w), Cell::Float(*s)])
                .collect();
            Ok((rows, true))
        }
    }
}

fn point_rows(config: &SweepConfig, swept: &[f64]) -> (Vec<Vec<Cell>>, String) {
    let axis_cells: Vec<Cell> = swept.iter().map(|v| Cell::Float(*v)).collect();
    let width = target_columns(config.target).len();
    let p = point(config, swept);
    match evaluate(config, &p) {
        Ok((rows, stable)) => {
            let status = if stable { "ok" } else { "unstable" };
            let rows = rows
                .into_iter()
                .map(|cells| {
                    let mut row = axis_cells.clone();
                    row.extend(cells);
                    row.push(Cell::Bool(stable));
                    row.push(Cell::Text(status.into()));
                    row
                })
                .collect();
            (rows, status.to_string())
        }
        Err(e) => {
            let stable = match e {
                Error::Unstable { .. } => Cell::Bool(false),
                _ => Cell::Empty,
            };
            let status = match e {
                Error::Unstable { .. } => "unstable".to_string(),
                _ => format!("error: {e}"),
            };
            let mut row = axis_cells;
            row.extend(std::iter::repeat(Cell::Empty).take(width));
            row.push(stable);
            row.push(Cell::Text(status.clone()));
            (vec![row], status)
        }
    }
}

/// Evaluates every grid point of `config` in parallel. Rows come out in
/// row-major order over the axes whatever the completion order. A point
/// that fails keeps its row, with empty results and the reason in the
/// `status` column; unstable points have `stable = false`.
pub fn run_sweep(
    config: &SweepConfig,
    options: &SweepOptions,
    progress: Option<&(dyn Fn(RowReport<'_>) + Sync)>,
) -> Result<ResultTable> {
    config.check()?;
    let mut columns: Vec<String> = config.axes.iter().map(|a| a.parameter().column.to_string()).collect();
    columns.extend(target_columns(config.target).into_iter().map(String::from));
    columns.push("stable".into());
    columns.push("status".into());

    let grid = config.grid();
    let total = grid.len();
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {} worker threads: {e}", options.jobs)))?;
    let results: Vec<Vec<Vec<Cell>>> = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(index, swept)| {
                let (rows, status) = point_rows(config, swept);
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(report) = progress {
                    report(RowReport {
                        index,
                        done: finished,
                        total,
                        status: &status,
                    });
                }
                rows
            })
            .collect()
    });
    let mut table = ResultTable::new(columns);
    table.rows = results.into_iter().flatten().collect();
    Ok(table)
}

/// Human-readable summary of the configuration and of its first grid point:
/// stability, and for the driven model the working point and validity
/// checks.
pub fn describe_base_point(config: &SweepConfig) -> Result<String> {
    config.check()?;
    let mut s = String::new();
    let _ = writeln!(s, "name: {}", config.name);
    let _ = writeln!(s, "target: {}", config.target.name());
    let _ = writeln!(s, "grid points: {}", config.grid_len());
    let _ = writeln!(s, "config sha256: {}", config.hash());
    let first: Vec<f64> = config.axes.iter().map(|a| a.points()[0]).collect();
    for (axis, v) in config.axes.iter().zip(&first) {
        let _ = writeln!(s, "first point: {} = {v}", axis.key);
    }
    let p = point(config, &first);
    let model = if config.target.is_three_mode() {
        let wp = p.working_point()?;
        let params = p.driven_params(&wp);
        let rep = validity_report(&params, &wp);
        let _ = writeln!(s, "rabi frequency: {:.6e} rad/s", wp.rabi);
        let _ = writeln!(s, "|<m>|: {:.6e}", wp.mean_magnon.norm());
        let _ = writeln!(s, "<q>: {:.6e}", wp.mean_position);
        let _ = writeln!(s, "effective magnon detuning / 2pi: {:.6e} Hz", ordinary(wp.eff_detuning_m));
        let _ = writeln!(s, "|G_mb| / 2pi: {:.6e} Hz (phase {:.3e} rad)", ordinary(wp.coupling()), wp.coupling_phase());
        let _ = writeln!(
            s,
            "low-lying excitations: {:.3e} vs 5N = {:.3e} (ratio {:.3e}; strict {}, relaxed {})",
            rep.magnon_number, rep.spin_bound, rep.low_lying_ratio, rep.low_lying_ok, rep.low_lying_ok_relaxed
        );
        let _ = writeln!(
            s,
            "Kerr term: {:.3e} rad/s vs rabi {:.3e} rad/s (ratio {:.3e}; strict {}, relaxed {})",
            rep.kerr_drive, rep.rabi, rep.kerr_ratio, rep.kerr_ok, rep.kerr_ok_relaxed
        );
        build_three_mode(&params, &SqueezedDrive::new(p.r, p.theta, p.detuning_s), &wp)?.0
    } else {
        build_two_mode(&p.params, &SqueezedDrive::new(p.r, p.theta, 0.0), p.detuning_a, p.detuning_m)?.0
    };
    let st = stability(&model);
    let _ = writeln!(s, "stable: {} (max Re eigenvalue {:.6e} rad/s)", st.is_stable, st.max_real());
    Ok(s)
}
