//! Scenario configuration files.
//!
//! A configuration is a sectioned key-value document (TOML syntax). Every
//! physical quantity carries its unit in the key name: energies and rates in
//! μeV (`_ueV`), times in ps (`_ps`). Unknown keys are rejected.
//!
//! ```toml
//! mode = "pulsed"            # pulsed | two_time | spectrum
//! name = "fig2"
//!
//! [params]
//! g_ueV = 100.0
//! delta_ueV = 4000.0
//! gamma_c_ueV = 70.0
//! # ...
//! fock_cutoff = 5
//!
//! [[drives]]
//! target = "qd_control"      # or "cavity_input"
//! shape = "gaussian"         # or "cw" with amplitude_ueV
//! area_pi = 0.012
//! fwhm_ps = 5.0
//! t_center_ps = 10.0
//!
//! [time_grid]
//! start_ps = 0.0
//! stop_ps = 150.0
//! step_ps = 0.05
//! ```

use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialState, PropagationOptions, Scenario};
use crate::error::{Error, Result};
use crate::model::{DriveEnvelope, DriveTarget, FrameOptions, SystemParams};
use crate::operators::Level;

/// Largest number of points accepted on any time grid, two-time grid or
/// detuning axis.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Pulsed,
    TwoTime,
    Spectrum,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Pulsed => "pulsed",
            Mode::TwoTime => "two_time",
            Mode::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(rename = "g_ueV")]
    pub g_uev: f64,
    #[serde(rename = "delta_ueV")]
    pub delta_uev: f64,
    #[serde(rename = "omega_x_ueV", default)]
    pub omega_x_uev: f64,
    #[serde(rename = "gamma_c_ueV")]
    pub gamma_c_uev: f64,
    /// Defaults to `gamma_c_ueV` (all cavity loss through the output port).
    #[serde(
        rename = "gamma_c_out_ueV",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub gamma_c_out_uev: Option<f64>,
    #[serde(rename = "gamma_xx_x_ueV")]
    pub gamma_xx_x_uev: f64,
    #[serde(rename = "gamma_x_g_ueV")]
    pub gamma_x_g_uev: f64,
    #[serde(rename = "gamma_d1_ueV", default)]
    pub gamma_d1_uev: f64,
    #[serde(rename = "gamma_d2_ueV", default)]
    pub gamma_d2_uev: f64,
    pub fock_cutoff: usize,
}

impl From<SystemParams> for ParamsSection {
    fn from(p: SystemParams) -> Self {
        Self {
            g_uev: p.g,
            delta_uev: p.delta,
            omega_x_uev: p.omega_x,
            gamma_c_uev: p.gamma_c,
            gamma_c_out_uev: Some(p.gamma_c_out),
            gamma_xx_x_uev: p.gamma_xx_x,
            gamma_x_g_uev: p.gamma_x_g,
            gamma_d1_uev: p.gamma_d1,
            gamma_d2_uev: p.gamma_d2,
            fock_cutoff: p.fock_cutoff,
        }
    }
}

impl ParamsSection {
    pub fn to_params(&self) -> SystemParams {
        SystemParams {
            g: self.g_uev,
            delta: self.delta_uev,
            omega_x: self.omega_x_uev,
            gamma_c: self.gamma_c_uev,
            gamma_c_out: self.gamma_c_out_uev.unwrap_or(self.gamma_c_uev),
            gamma_xx_x: self.gamma_xx_x_uev,
            gamma_x_g: self.gamma_x_g_uev,
            gamma_d1: self.gamma_d1_uev,
            gamma_d2: self.gamma_d2_uev,
            fock_cutoff: self.fock_cutoff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Gaussian,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub target: DriveTarget,
    pub shape: ShapeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fwhm_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_center_ps: Option<f64>,
    #[serde(
        rename = "amplitude_ueV",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub amplitude_uev: Option<f64>,
    #[serde(rename = "detuning_ueV", default)]
    pub detuning_uev: f64,
}

impl DriveSection {
    pub fn gaussian(target: DriveTarget, area_pi: f64, fwhm_ps: f64, t_center_ps: f64) -> Self {
        Self {
            target,
            shape: ShapeKind::Gaussian,
            area_pi: Some(area_pi),
            fwhm_ps: Some(fwhm_ps),
            t_center_ps: Some(t_center_ps),
            amplitude_uev: None,
            detuning_uev: 0.0,
        }
    }

    pub fn cw(target: DriveTarget, amplitude_uev: f64) -> Self {
        Self {
            target,
            shape: ShapeKind::Cw,
            area_pi: None,
            fwhm_ps: None,
            t_center_ps: None,
            amplitude_uev: Some(amplitude_uev),
            detuning_uev: 0.0,
        }
    }

    fn to_envelope(self, index: usize) -> Result<DriveEnvelope> {
        let key = |k: &str| format!("drives[{index}].{k}");
        let need = |v: Option<f64>, k: &str| {
            v.ok_or_else(|| Error::Validation {
                key: key(k),
                constraint: format!("required for shape \"{}\"", self.shape_name()),
            })
        };
        let forbid = |v: Option<f64>, k: &str| match v {
            Some(_) => Err(Error::Validation {
                key: key(k),
                constraint: format!("not allowed for shape \"{}\"", self.shape_name()),
            }),
            None => Ok(()),
        };
        let env = match self.shape {
            ShapeKind::Gaussian => {
                forbid(self.amplitude_uev, "amplitude_ueV")?;
                DriveEnvelope::gaussian(
                    self.target,
                    need(self.area_pi, "area_pi")?,
                    need(self.fwhm_ps, "fwhm_ps")?,
                    need(self.t_center_ps, "t_center_ps")?,
                )
            }
            ShapeKind::Cw => {
                forbid(self.area_pi, "area_pi")?;
                forbid(self.fwhm_ps, "fwhm_ps")?;
                forbid(self.t_center_ps, "t_center_ps")?;
                DriveEnvelope::cw(self.target, need(self.amplitude_uev, "amplitude_ueV")?)
            }
        }
        .with_detuning(self.detuning_uev);
        env.validate().map_err(|e| match e {
            Error::Validation { key: k, constraint } => Error::Validation {
                key: key(&k),
                constraint,
            },
            other => other,
        })?;
        Ok(env)
    }

    fn shape_name(&self) -> &'static str {
        match self.shape {
            ShapeKind::Gaussian => "gaussian",
            ShapeKind::Cw => "cw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `"G"`, `"X"` or `"XX"`.
    pub level: LevelName,
    #[serde(default)]
    pub photons: usize,
}

/// Level name as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelName {
    G,
    X,
    XX,
}

impl From<LevelName> for Level {
    fn from(s: LevelName) -> Level {
        match s {
            LevelName::G => Level::G,
            LevelName::X => Level::X,
            LevelName::XX => Level::XX,
        }
    }
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            level: LevelName::G,
            photons: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSection {
    pub start_ps: f64,
    pub stop_ps: f64,
    pub step_ps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoTimeSection {
    pub t1_start_ps: f64,
    pub t1_stop_ps: f64,
    pub t1_points: usize,
    pub t2_start_ps: f64,
    pub t2_stop_ps: f64,
    pub t2_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(rename = "e_in_ueV")]
    pub e_in_uev: f64,
    #[serde(rename = "e_c_ueV")]
    pub e_c_uev: f64,
    #[serde(rename = "detuning_min_ueV")]
    pub detuning_min_uev: f64,
    #[serde(rename = "detuning_max_ueV")]
    pub detuning_max_uev: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    #[serde(default = "default_rtol")]
    pub relative: f64,
    #[serde(default = "default_atol")]
    pub absolute: f64,
}

fn default_rtol() -> f64 {
    PropagationOptions::default().tolerance
}

fn default_atol() -> f64 {
    PropagationOptions::default().abs_tolerance
}

impl Default for TolerancesSection {
    fn default() -> Self {
        Self {
            relative: default_rtol(),
            absolute: default_atol(),
        }
    }
}

fn yes() -> bool {
    true
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "yes")]
    pub dephasing_enabled: bool,
    /// Keep the Δ-oscillating terms of the pulsed frame.
    #[serde(default = "yes")]
    pub residual_terms: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_cutoff_override: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub tolerances: TolerancesSection,
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub initial: InitialSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drives: Vec<DriveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_time: Option<TwoTimeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    if !table.contains_key("mode") {
        return Err(Error::Config("missing mode".into()));
    }
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let span = stop - start;
    (0..points)
        .map(|k| start + span * (k as f64) / ((points - 1) as f64))
        .collect()
}

fn too_large(points: f64) -> Error {
    Error::Config(format!(
        "grid too large: {points:.0} points exceeds the limit of {MAX_GRID_POINTS}"
    ))
}

fn check_range(key: &str, start: f64, stop: f64) -> Result<()> {
    if !start.is_finite() || !stop.is_finite() || stop <= start {
        return Err(Error::Validation {
            key: key.into(),
            constraint: format!("range must be finite with stop > start, got [{start}, {stop}]"),
        });
    }
    Ok(())
}

impl ScenarioConfig {
    /// Writes the configuration back in the same grammar.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(self.mode.name())
    }

    /// Mode-specific structure, parameter ranges and grid sizes.
    pub fn validate(&self) -> Result<()> {
        self.system_params().validate().map_err(|e| match e {
            // Every validated physical field is an energy with a `_ueV` key.
            Error::Validation { key, constraint } => Error::Validation {
                key: format!("params.{key}_ueV"),
                constraint,
            },
            other => other,
        })?;
        for (i, d) in self.drives.iter().enumerate() {
            d.to_envelope(i)?;
        }
        for (key, v) in [
            ("tolerances.relative", self.tolerances.relative),
            ("tolerances.absolute", self.tolerances.absolute),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Validation {
                    key: key.into(),
                    constraint: format!("must lie in (0, 1), got {v}"),
                });
            }
        }
        let missing = |section: &str| {
            Err(Error::Validation {
                key: section.into(),
                constraint: format!("section required for mode \"{}\"", self.mode.name()),
            })
        };
        let unexpected = |section: &str| {
            Err(Error::Validation {
                key: section.into(),
                constraint: format!("section not used by mode \"{}\"", self.mode.name()),
            })
        };
        match self.mode {
            Mode::Pulsed => {
                if self.time_grid.is_none() {
                    return missing("time_grid");
                }
                if self.two_time.is_some() {
                    return unexpected("two_time");
                }
                if self.spectrum.is_some() {
                    return unexpected("spectrum");
                }
                self.time_axis()?;
            }
            Mode::TwoTime => {
                if self.two_time.is_none() {
                    return missing("two_time");
                }
                if self.spectrum.is_some() {
                    return unexpected("spectrum");
                }
                self.two_time_axes()?;
            }
            Mode::Spectrum => {
                let Some(s) = self.spectrum else {
                    return missing("spectrum");
                };
                if self.time_grid.is_some() {
                    return unexpected("time_grid");
                }
                if self.two_time.is_some() {
                    return unexpected("two_time");
                }
                if !self.drives.is_empty() {
                    return Err(Error::Validation {
                        key: "drives".into(),
                        constraint: "spectrum mode takes its CW amplitudes from [spectrum]".into(),
                    });
                }
                for (key, v) in [
                    ("spectrum.e_in_ueV", s.e_in_uev),
                    ("spectrum.e_c_ueV", s.e_c_uev),
                ] {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::Validation {
                            key: key.into(),
                            constraint: format!("must be > 0, got {v}"),
                        });
                    }
                }
                self.detuning_axis()?;
            }
        }
        Ok(())
    }

    /// Parameters after applying the cutoff override and the dephasing switch.
    pub fn system_params(&self) -> SystemParams {
        let mut p = self.params.to_params();
        if let Some(n) = self.fock_cutoff_override {
            p.fock_cutoff = n;
        }
        if !self.dephasing_enabled {
            p = p.without_dephasing();
        }
        p
    }

    pub fn drives(&self) -> Result<Vec<DriveEnvelope>> {
        self.drives
            .iter()
            .enumerate()
            .map(|(i, d)| d.to_envelope(i))
            .collect()
    }

    pub fn propagation_options(&self) -> PropagationOptions {
        PropagationOptions {
            tolerance: self.tolerances.relative,
            abs_tolerance: self.tolerances.absolute,
            frame: FrameOptions {
                residual_terms: self.residual_terms,
            },
            ..Default::default()
        }
    }

    /// Uniform output grid of a pulsed run.
    pub fn time_axis(&self) -> Result<Vec<f64>> {
        let g = self.time_grid.ok_or_else(|| Error::Validation {
            key: "time_grid".into(),
            constraint: "missing".into(),
        })?;
        check_range("time_grid", g.start_ps, g.stop_ps)?;
        if !(g.step_ps > 0.0 && g.step_ps.is_finite()) {
            return Err(Error::Validation {
                key: "time_grid.step_ps".into(),
                constraint: format!("must be > 0, got {}", g.step_ps),
            });
        }
        let intervals = ((g.stop_ps - g.start_ps) / g.step_ps * (1.0 + 1e-12)).floor();
        if intervals + 1.0 > MAX_GRID_POINTS as f64 {
            return Err(too_large(intervals + 1.0));
        }
        let n = intervals as usize + 1;
        Ok((0..n).map(|k| g.start_ps + g.step_ps * k as f64).collect())
    }

    pub fn two_time_axes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let s = self.two_time.ok_or_else(|| Error::Validation {
            key: "two_time".into(),
            constraint: "missing".into(),
        })?;
        check_range("two_time.t1", s.t1_start_ps, s.t1_stop_ps)?;
        check_range("two_time.t2", s.t2_start_ps, s.t2_stop_ps)?;
        for (key, n) in [
            ("two_time.t1_points", s.t1_points),
            ("two_time.t2_points", s.t2_points),
        ] {
            if n < 2 {
                return Err(Error::Validation {
                    key: key.into(),
                    constraint: format!("need at least 2 points, got {n}"),
                });
            }
        }
        let total = s.t1_points as f64 * s.t2_points as f64;
        if total > MAX_GRID_POINTS as f64 {
            return Err(too_large(total));
        }
        let start = self.window_start();
        if s.t1_start_ps.min(s.t2_start_ps) < start {
            return Err(Error::OutsideWindow {
                time: s.t1_start_ps.min(s.t2_start_ps),
                start,
            });
        }
        Ok((
            linspace(s.t1_start_ps, s.t1_stop_ps, s.t1_points),
            linspace(s.t2_start_ps, s.t2_stop_ps, s.t2_points),
        ))
    }

    /// Initial time of the propagation window.
    pub fn window_start(&self) -> f64 {
        self.time_grid.map(|g| g.start_ps).unwrap_or(0.0)
    }

    pub fn detuning_axis(&self) -> Result<Vec<f64>> {
        let s = self.spectrum.ok_or_else(|| Error::Validation {
            key: "spectrum".into(),
            constraint: "missing".into(),
        })?;
        check_range("spectrum.detuning", s.detuning_min_uev, s.detuning_max_uev)?;
        if s.points < 2 {
            return Err(Error::Validation {
                key: "spectrum.points".into(),
                constraint: format!("need at least 2 points, got {}", s.points),
            });
        }
        if s.points > MAX_GRID_POINTS {
            return Err(too_large(s.points as f64));
        }
        Ok(linspace(s.detuning_min_uev, s.detuning_max_uev, s.points))
    }

    pub fn initial_state(&self) -> InitialState {
        InitialState::Basis {
            level: self.initial.level.into(),
            photons: self.initial.photons,
        }
    }

    /// Propagation scenario for pulsed and two-time modes.
    pub fn scenario(&self) -> Result<Scenario> {
        let t_grid = match self.mode {
            Mode::Pulsed => self.time_axis()?,
            _ => vec![self.window_start()],
        };
        let p = self.system_params();
        if self.initial.photons > p.fock_cutoff {
            return Err(Error::Validation {
                key: "initial.photons".into(),
                constraint: format!("exceeds the Fock cutoff {}", p.fock_cutoff),
            });
        }
        Ok(Scenario {
            params: p,
            drives: self.drives()?,
            initial: self.initial_state(),
            t_grid,
            options: self.propagation_options(),
        })
    }
}
