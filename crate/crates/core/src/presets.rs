//! Built-in scenarios for the figure reproductions.

use crate::config::{
    DriveSection, InitialSection, Mode, ParamsSection, ScenarioConfig, SpectrumSection,
    TimeGridSection, TolerancesSection, TwoTimeSection,
};
use crate::error::{Error, Result};
use crate::model::{DriveTarget, SystemParams};

pub const PRESET_NAMES: [&str; 4] = ["fig2", "fig2_dephasing", "fig3a", "fig3c"];

/// Control pulse on G–X, then a weak cavity probe 3 ps later; both 5 ps FWHM.
pub const CONTROL_AREA_PI: f64 = 0.012;
pub const PROBE_AREA_PI: f64 = 0.02;
pub const PULSE_FWHM_PS: f64 = 5.0;
pub const CONTROL_CENTER_PS: f64 = 10.0;
pub const PROBE_CENTER_PS: f64 = 13.0;

fn base(mode: Mode, name: &str, p: SystemParams) -> ScenarioConfig {
    ScenarioConfig {
        mode,
        name: Some(name.into()),
        dephasing_enabled: true,
        residual_terms: true,
        fock_cutoff_override: None,
        output_path: None,
        tolerances: TolerancesSection::default(),
        params: ParamsSection::from(p),
        initial: InitialSection::default(),
        drives: Vec::new(),
        time_grid: None,
        two_time: None,
        spectrum: None,
    }
}

fn pulse_pair() -> Vec<DriveSection> {
    vec![
        DriveSection::gaussian(
            DriveTarget::QdControl,
            CONTROL_AREA_PI,
            PULSE_FWHM_PS,
            CONTROL_CENTER_PS,
        ),
        DriveSection::gaussian(
            DriveTarget::CavityInput,
            PROBE_AREA_PI,
            PULSE_FWHM_PS,
            PROBE_CENTER_PS,
        ),
    ]
}

fn fig2() -> ScenarioConfig {
    let mut cfg = base(Mode::Pulsed, "fig2", SystemParams::pulsed_reference());
    cfg.drives = pulse_pair();
    cfg.time_grid = Some(TimeGridSection {
        start_ps: 0.0,
        stop_ps: 150.0,
        step_ps: 0.05,
    });
    cfg
}

fn fig2_dephasing() -> ScenarioConfig {
    let mut cfg = fig2();
    cfg.name = Some("fig2_dephasing".into());
    cfg.params.gamma_d1_uev = 15.0;
    cfg.params.gamma_d2_uev = 20.0;
    cfg
}

fn fig3a() -> ScenarioConfig {
    let mut cfg = base(Mode::TwoTime, "fig3a", SystemParams::pulsed_reference());
    cfg.drives = pulse_pair();
    cfg.two_time = Some(TwoTimeSection {
        t1_start_ps: 0.0,
        t1_stop_ps: 99.0,
        t1_points: 100,
        t2_start_ps: 0.0,
        t2_stop_ps: 99.0,
        t2_points: 100,
    });
    cfg
}

fn fig3c() -> ScenarioConfig {
    let mut p = SystemParams::pulsed_reference().with_cutoff(4);
    p.g = 50.0;
    let mut cfg = base(Mode::Spectrum, "fig3c", p);
    cfg.spectrum = Some(SpectrumSection {
        e_in_uev: 3.0,
        e_c_uev: 1.0,
        detuning_min_uev: -300.0,
        detuning_max_uev: 300.0,
        points: 601,
    });
    cfg
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    match name {
        "fig2" => Ok(fig2()),
        "fig2_dephasing" => Ok(fig2_dephasing()),
        "fig3a" => Ok(fig3a()),
        "fig3c" => Ok(fig3c()),
        other => Err(Error::Config(format!(
            "unknown preset \"{other}\" (available: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}
