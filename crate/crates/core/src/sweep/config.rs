//! Flat `key = value` sweep configuration.
//!
//! Frequencies are entered as ν = ω/2π in Hz, temperatures in K, the drive
//! field in T and the sphere diameter in m. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::format_float;
use crate::error::{Error, Result};

/// A numeric parameter that may be set or swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameter {
    pub key: &'static str,
    /// CSV column name.
    pub column: &'static str,
    pub default: Option<f64>,
}

const fn param(key: &'static str, column: &'static str, default: Option<f64>) -> Parameter {
    Parameter { key, column, default }
}

pub const PARAMETERS: &[Parameter] = &[
    param("system.cavity_freq_over_2pi_hz", "omega_a_over_2pi_Hz", None),
    param("system.magnon_freq_over_2pi_hz", "omega_m_over_2pi_Hz", None),
    param("system.mech_freq_over_2pi_hz", "omega_b_over_2pi_Hz", Some(0.0)),
    param("system.kappa_a_over_2pi_hz", "kappa_a_over_2pi_Hz", None),
    param("system.kappa_m_over_2pi_hz", "kappa_m_over_2pi_Hz", None),
    param("system.gamma_b_over_2pi_hz", "gamma_b_over_2pi_Hz", Some(0.0)),
    param("system.g_ma_over_2pi_hz", "g_ma_over_2pi_Hz", None),
    param("system.g_mb_over_2pi_hz", "g_mb_over_2pi_Hz", Some(0.0)),
    param("system.temperature_k", "T_K", None),
    param("system.sphere_diameter_m", "diameter_m", Some(250e-6)),
    param("squeeze.r", "r", Some(0.0)),
    param("squeeze.theta_rad", "theta_rad", Some(0.0)),
    param("squeeze.detuning_over_2pi_hz", "Delta_s_over_2pi_Hz", Some(0.0)),
    param("detuning.cavity_over_2pi_hz", "Delta_a_over_2pi_Hz", Some(0.0)),
    param("detuning.magnon_over_2pi_hz", "Delta_m_over_2pi_Hz", Some(0.0)),
    param(DRIVE_RABI, "Omega_rad_per_s", None),
    param(DRIVE_FIELD, "B0_T", None),
    param(DRIVE_COUPLING, "G_mb_over_2pi_Hz", None),
];

const DRIVE_RABI: &str = "magnon_drive.rabi_rad_per_s";
const DRIVE_FIELD: &str = "magnon_drive.b0_t";
const DRIVE_COUPLING: &str = "magnon_drive.coupling_over_2pi_hz";

pub fn parameter(key: &str) -> Option<&'static Parameter> {
    PARAMETERS.iter().find(|p| p.key == key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    MagnonVariances,
    MechanicalVariance,
    OutputSpectrum,
    Validity,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::MagnonVariances => "magnon_variances",
            Target::MechanicalVariance => "mechanical_variance",
            Target::OutputSpectrum => "output_spectrum",
            Target::Validity => "validity",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "magnon_variances" => Target::MagnonVariances,
            "mechanical_variance" => Target::MechanicalVariance,
            "output_spectrum" => Target::OutputSpectrum,
            "validity" => Target::Validity,
            _ => {
                return Err(Error::Usage(format!(
                    "unknown sweep.target '{s}' (expected magnon_variances, mechanical_variance, output_spectrum or validity)"
                )))
            }
        })
    }

    /// Whether the target uses the driven three-mode model.
    pub fn is_three_mode(self) -> bool {
        matches!(self, Target::MechanicalVariance | Target::Validity)
    }
}

/// How `detuning.magnon_over_2pi_hz` is read for the driven model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnonMode {
    Effective,
    Bare,
}

/// How the magnon drive strength is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveSpec {
    Rabi,
    Field,
    Coupling,
}

impl DriveSpec {
    pub fn key(self) -> &'static str {
        match self {
            DriveSpec::Rabi => DRIVE_RABI,
            DriveSpec::Field => DRIVE_FIELD,
            DriveSpec::Coupling => DRIVE_COUPLING,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanicalMethod {
    /// Frequency-domain integral.
    Frequency,
    /// Time-domain propagation to the limit cycle.
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Usage(format!("unknown output format '{s}' (expected csv or json)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    /// `steps` evenly spaced values from `min` to `max` inclusive.
    Range { min: f64, max: f64, steps: usize },
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: AxisValues,
}

impl Axis {
    pub fn parameter(&self) -> &'static Parameter {
        parameter(&self.key).expect("axis keys are validated on construction")
    }

    pub fn points(&self) -> Vec<f64> {
        match &self.values {
            AxisValues::Range { min, max, steps } => {
                let last = (*steps - 1) as f64;
                (0..*steps)
                    .map(|k| if k + 1 == *steps { *max } else { min + (max - min) * k as f64 / last })
                    .collect()
            }
            AxisValues::List(v) => v.clone(),
        }
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (key, rest) = text
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Usage(format!("axis '{text}' needs a parameter name and values")))?;
        let rest = rest.trim();
        let values = if let Some(inner) = rest.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::Usage(format!("axis list '{rest}' is missing ']'")))?;
            let list = inner
                .split(',')
                .map(|s| parse_number(s.trim(), key))
                .collect::<Result<Vec<_>>>()?;
            AxisValues::List(list)
        } else {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Usage(format!(
                    "axis '{text}' must be '<name> <min> <max> <steps>' or '<name> [v1, v2, ...]'"
                )));
            }
            let steps: usize = parts[2]
                .parse()
                .map_err(|_| Error::Usage(format!("axis steps '{}' is not a whole number", parts[2])))?;
            AxisValues::Range {
                min: parse_number(parts[0], key)?,
                max: parse_number(parts[1], key)?,
                steps,
            }
        };
        let axis = Axis {
            key: key.to_string(),
            values,
        };
        axis.check()?;
        Ok(axis)
    }

    fn check(&self) -> Result<()> {
        if parameter(&self.key).is_none() {
            return Err(Error::Usage(format!("cannot sweep unknown parameter '{}'", self.key)));
        }
        match &self.values {
            AxisValues::Range { min, max, steps } => {
                if *steps < 2 {
                    return Err(Error::Usage(format!("axis {} needs at least 2 steps", self.key)));
                }
                if !(min < max) {
                    return Err(Error::Usage(format!("axis {} needs min < max", self.key)));
                }
            }
            AxisValues::List(v) => {
                if v.is_empty() {
                    return Err(Error::Usage(format!("axis {} has an empty list", self.key)));
                }
            }
        }
        Ok(())
    }

    fn to_text(&self) -> String {
        match &self.values {
            AxisValues::Range { min, max, steps } => {
                format!("{} {} {} {}", self.key, format_float(*min), format_float(*max), steps)
            }
            AxisValues::List(v) => {
                let items: Vec<String> = v.iter().map(|x| format_float(*x)).collect();
                format!("{} [{}]", self.key, items.join(", "))
            }
        }
    }
}

/// Frequency grid of an output spectrum, in config units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumGrid {
    pub min_hz: f64,
    pub max_hz: f64,
    pub steps: usize,
    pub phi: f64,
}

impl SpectrumGrid {
    pub fn points_hz(&self) -> Vec<f64> {
        let axis = Axis {
            key: String::new(),
            values: AxisValues::Range {
                min: self.min_hz,
                max: self.max_hz,
                steps: self.steps,
            },
        };
        axis.points()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub name: String,
    pub target: Target,
    /// Explicitly set numeric parameters, in config units.
    pub values: BTreeMap<String, f64>,
    pub magnon_mode: MagnonMode,
    pub method: MechanicalMethod,
    /// Outer axis first; rows are emitted in row-major order.
    pub axes: Vec<Axis>,
    pub spectrum: Option<SpectrumGrid>,
    pub format: OutputFormat,
    pub path: Option<PathBuf>,
}

fn parse_number(s: &str, key: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Usage(format!("value '{s}' for {key} is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Usage(format!("value for {key} must be finite")));
    }
    Ok(v)
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split_once('#').map_or(line, |(l, _)| l).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("line {}: expected 'key = value'", n + 1)))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if raw.insert(key.clone(), value).is_some() {
                return Err(Error::Usage(format!("line {}: duplicate key '{key}'", n + 1)));
            }
        }
        Self::from_entries(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    fn from_entries(mut raw: BTreeMap<String, String>) -> Result<Self> {
        let mut take = |key: &str| raw.remove(key);
        let name = take("sweep.name").unwrap_or_else(|| "custom".into());
        let target = Target::parse(
            &take("sweep.target").ok_or_else(|| Error::Usage("sweep.target is required".into()))?,
        )?;
        let magnon_mode = match take("detuning.magnon_mode").as_deref() {
            None | Some("effective") => MagnonMode::Effective,
            Some("bare") => MagnonMode::Bare,
            Some(other) => {
                return Err(Error::Usage(format!(
                    "detuning.magnon_mode must be 'effective' or 'bare', got '{other}'"
                )))
            }
        };
        let method = match take("mechanical.method").as_deref() {
            None | Some("frequency") => MechanicalMethod::Frequency,
            Some("time") => MechanicalMethod::Time,
            Some(other) => {
                return Err(Error::Usage(format!(
                    "mechanical.method must be 'frequency' or 'time', got '{other}'"
                )))
            }
        };
        let axis1 = take("sweep.axis1");
        let axis2 = take("sweep.axis2");
        if axis1.is_none() && axis2.is_some() {
            return Err(Error::Usage("sweep.axis2 needs sweep.axis1".into()));
        }
        let axes = axis1
            .iter()
            .chain(axis2.iter())
            .map(|t| Axis::parse(t))
            .collect::<Result<Vec<_>>>()?;
        let spectrum_keys = ["spectrum.min_over_2pi_hz", "spectrum.max_over_2pi_hz", "spectrum.steps", "spectrum.phi_rad"];
        let spectrum = if spectrum_keys.iter().any(|k| raw.contains_key(*k)) {
            let mut get = |k: &str| {
                raw.remove(k)
                    .ok_or_else(|| Error::Usage(format!("{k} is required when any spectrum.* key is set")))
            };
            let min_hz = parse_number(&get("spectrum.min_over_2pi_hz")?, "spectrum.min_over_2pi_hz")?;
            let max_hz = parse_number(&get("spectrum.max_over_2pi_hz")?, "spectrum.max_over_2pi_hz")?;
            let steps_text = get("spectrum.steps")?;
            let steps: usize = steps_text
                .parse()
                .map_err(|_| Error::Usage(format!("spectrum.steps '{steps_text}' is not a whole number")))?;
            let phi = parse_number(&get("spectrum.phi_rad")?, "spectrum.phi_rad")?;
            Some(SpectrumGrid { min_hz, max_hz, steps, phi })
        } else {
            None
        };
        let format = match raw.remove("output.format") {
            Some(f) => OutputFormat::parse(&f)?,
            None => OutputFormat::Csv,
        };
        let path = raw.remove("output.path").map(PathBuf::from);

        let mut values = BTreeMap::new();
        for (key, value) in raw {
            if parameter(&key).is_none() {
                return Err(Error::Usage(format!("unknown configuration key '{key}'")));
            }
            let v = parse_number(&value, &key)?;
            values.insert(key, v);
        }
        let config = SweepConfig {
            name,
            target,
            values,
            magnon_mode,
            method,
            axes,
            spectrum,
            format,
            path,
        };
        config.check()?;
        Ok(config)
    }

    /// Checks the configuration for consistency; called by the parser.
    pub fn check(&self) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(Error::Usage("at most two sweep axes are supported".into()));
        }
        for axis in &self.axes {
            axis.check()?;
            if self.values.contains_key(&axis.key) {
                return Err(Error::Usage(format!("{} is both set and swept", axis.key)));
            }
        }
        if self.axes.len() == 2 && self.axes[0].key == self.axes[1].key {
            return Err(Error::Usage("the two sweep axes must differ".into()));
        }
        let drives: Vec<&str> = [DRIVE_RABI, DRIVE_FIELD, DRIVE_COUPLING]
            .into_iter()
            .filter(|k| self.is_set_or_swept(k))
            .collect();
        if drives.len() > 1 {
            return Err(Error::Usage(format!(
                "give the magnon drive one way only, found {}",
                drives.join(" and ")
            )));
        }
        for p in PARAMETERS {
            if p.default.is_none()
                && !self.is_set_or_swept(p.key)
                && ![DRIVE_RABI, DRIVE_FIELD, DRIVE_COUPLING].contains(&p.key)
            {
                return Err(Error::Usage(format!("{} is required", p.key)));
            }
        }
        let nonnegative = |key: &str, v: f64| {
            let signed = key.starts_with("detuning.") || key == "squeeze.detuning_over_2pi_hz" || key == "squeeze.theta_rad";
            if !signed && v < 0.0 {
                return Err(Error::Usage(format!("{key} must be >= 0, got {v}")));
            }
            Ok(())
        };
        for (k, v) in &self.values {
            nonnegative(k, *v)?;
        }
        for axis in &self.axes {
            for v in axis.points() {
                nonnegative(&axis.key, v)?;
            }
        }
        match (self.target, &self.spectrum) {
            (Target::OutputSpectrum, None) => {
                return Err(Error::Usage("output_spectrum needs the spectrum.* keys".into()))
            }
            (Target::OutputSpectrum, Some(s)) => {
                if s.steps < 2 || !(s.min_hz < s.max_hz) {
                    return Err(Error::Usage("spectrum needs min < max and at least 2 steps".into()));
                }
            }
            (_, Some(_)) => {
                return Err(Error::Usage(format!(
                    "spectrum.* keys only apply to output_spectrum, not {}",
                    self.target.name()
                )))
            }
            _ => {}
        }
        if self.target.is_three_mode() && drives.is_empty() {
            return Err(Error::Usage(format!(
                "{} needs a magnon drive: one of {DRIVE_RABI}, {DRIVE_FIELD}, {DRIVE_COUPLING}",
                self.target.name()
            )));
        }
        Ok(())
    }

    fn is_set_or_swept(&self, key: &str) -> bool {
        self.values.contains_key(key) || self.axes.iter().any(|a| a.key == key)
    }

    pub fn drive_spec(&self) -> Option<DriveSpec> {
        [DriveSpec::Rabi, DriveSpec::Field, DriveSpec::Coupling]
            .into_iter()
            .find(|d| self.is_set_or_swept(d.key()))
    }

    /// Value of a numeric parameter at the base point (default if unset).
    pub fn value(&self, key: &str) -> Option<f64> {
        self.values
            .get(key)
            .copied()
            .or_else(|| parameter(key).and_then(|p| p.default))
    }

    /// Grid points in row-major order, as values of the swept keys.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut grid = vec![Vec::new()];
        for axis in &self.axes {
            let pts = axis.points();
            grid = grid
                .into_iter()
                .flat_map(|prefix| {
                    pts.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        grid
    }

    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.points().len()).product()
    }

    /// The fully resolved configuration as sorted key–value pairs,
    /// including defaults.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        out.insert("sweep.name".into(), self.name.clone());
        out.insert("sweep.target".into(), self.target.name().into());
        for (i, axis) in self.axes.iter().enumerate() {
            out.insert(format!("sweep.axis{}", i + 1), axis.to_text());
        }
        for p in PARAMETERS {
            if self.axes.iter().any(|a| a.key == p.key) {
                continue;
            }
            if let Some(v) = self.value(p.key) {
                out.insert(p.key.into(), format_float(v));
            }
        }
        if self.target.is_three_mode() {
            let mode = match self.magnon_mode {
                MagnonMode::Effective => "effective",
                MagnonMode::Bare => "bare",
            };
            out.insert("detuning.magnon_mode".into(), mode.into());
        }
        if self.target == Target::MechanicalVariance {
            let method = match self.method {
                MechanicalMethod::Frequency => "frequency",
                MechanicalMethod::Time => "time",
            };
            out.insert("mechanical.method".into(), method.into());
        }
        if let Some(s) = &self.spectrum {
            out.insert("spectrum.min_over_2pi_hz".into(), format_float(s.min_hz));
            out.insert("spectrum.max_over_2pi_hz".into(), format_float(s.max_hz));
            out.insert("spectrum.steps".into(), s.steps.to_string());
            out.insert("spectrum.phi_rad".into(), format_float(s.phi));
        }
        out.insert("output.format".into(), self.format.name().into());
        if let Some(p) = &self.path {
            out.insert("output.path".into(), p.display().to_string());
        }
        out
    }

    /// Canonical text form; parsing it gives back an equivalent config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.resolved() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of the canonical text, excluding the output destination.
    pub fn hash(&self) -> String {
        let mut copy = self.clone();
        copy.path = None;
        copy.format = OutputFormat::Csv;
        hex::encode(Sha256::digest(copy.to_text().as_bytes()))
    }
}
