//! Executes a validated configuration and writes its data files together
//! with a metadata sidecar.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{Mode, ParamsSection, ScenarioConfig};
use crate::correlations::{normalized_joint, two_time_icx_with_trajectory};
use crate::error::Result;
use crate::output::{emit_plotdata, OutputFormat, RunResult};
use crate::steadystate::spectrum_sweep;

#[derive(Debug, Clone)]
pub struct RunReport {
    pub result: RunResult,
    pub data_files: Vec<PathBuf>,
    pub sidecar: PathBuf,
    pub wall_time_s: f64,
}

/// Computes the result of `cfg` without touching the file system.
pub fn execute(cfg: &ScenarioConfig) -> Result<RunResult> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Pulsed => Ok(RunResult::Pulsed(cfg.scenario()?.run()?)),
        Mode::TwoTime => {
            let (t1, t2) = cfg.two_time_axes()?;
            let (mut grid, trajectory) = two_time_icx_with_trajectory(&cfg.scenario()?, &t1, &t2)?;
            let normalized = normalized_joint(&grid, &trajectory);
            grid.normalized_values = Some(normalized.clone());
            Ok(RunResult::TwoTime {
                grid,
                normalized,
                trajectory,
            })
        }
        Mode::Spectrum => {
            let s = cfg.spectrum.expect("validated");
            let axis = cfg.detuning_axis()?;
            Ok(RunResult::Spectrum(spectrum_sweep(
                &cfg.system_params(),
                s.e_in_uev,
                s.e_c_uev,
                &axis,
            )?))
        }
    }
}

/// Human-readable list of the approximations active for `cfg`.
pub fn approximations(cfg: &ScenarioConfig) -> Vec<String> {
    let p = cfg.system_params();
    let mut out = vec![
        "rotating-wave approximation on all couplings and drives".to_string(),
        "Markovian Lindblad dissipation".to_string(),
        format!("Fock space truncated at {} photons", p.fock_cutoff),
    ];
    match cfg.mode {
        Mode::Pulsed | Mode::TwoTime => {
            out.push("frame rotating at omega_x (G-X) and omega_c (cavity)".into());
            out.push(if cfg.residual_terms {
                "biexciton-binding-energy oscillating terms kept".into()
            } else {
                "secular: biexciton-binding-energy oscillating terms dropped".into()
            });
        }
        Mode::Spectrum => {
            out.push("frame rotating at the two CW drive frequencies".into());
            out.push("secular: biexciton-binding-energy oscillating terms dropped".into());
        }
    }
    if cfg.mode == Mode::TwoTime {
        out.push("quantum regression theorem for two-time correlations".into());
    }
    out.push(if p.gamma_d1 > 0.0 || p.gamma_d2 > 0.0 {
        "pure dephasing included".into()
    } else {
        "no pure dephasing".into()
    });
    out
}

/// Configuration with every override folded into the parameter section.
pub fn resolved_config(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut r = cfg.clone();
    r.params = ParamsSection::from(cfg.system_params());
    r.fock_cutoff_override = None;
    r
}

fn sidecar_text(
    cfg: &ScenarioConfig,
    result: &RunResult,
    files: &[PathBuf],
    format: OutputFormat,
    wall: f64,
) -> String {
    let mut run = toml::Table::new();
    run.insert("label".into(), cfg.label().into());
    run.insert("mode".into(), cfg.mode.name().into());
    run.insert("output_format".into(), format.name().into());
    run.insert("wall_time_s".into(), wall.into());
    run.insert(
        "threads".into(),
        (rayon::current_num_threads() as i64).into(),
    );
    run.insert(
        "fock_cutoff".into(),
        (cfg.system_params().fock_cutoff as i64).into(),
    );
    run.insert("tolerance_relative".into(), cfg.tolerances.relative.into());
    run.insert("tolerance_absolute".into(), cfg.tolerances.absolute.into());
    run.insert(
        "files".into(),
        toml::Value::Array(
            files
                .iter()
                .map(|f| {
                    f.file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default()
                        .into()
                })
                .collect(),
        ),
    );
    run.insert(
        "approximations".into(),
        toml::Value::Array(approximations(cfg).into_iter().map(Into::into).collect()),
    );
    let stats = match result {
        RunResult::Pulsed(t) => Some(t.stats),
        RunResult::TwoTime { trajectory, .. } => Some(trajectory.stats),
        RunResult::Spectrum(_) => None,
    };
    if let Some(s) = stats {
        let mut t = toml::Table::new();
        t.insert("accepted_steps".into(), (s.accepted as i64).into());
        t.insert("rejected_steps".into(), (s.rejected as i64).into());
        t.insert("rhs_evaluations".into(), (s.rhs_evals as i64).into());
        t.insert("max_step_ps".into(), s.max_step.into());
        run.insert("integration".into(), t.into());
    }
    let mut doc = toml::Table::new();
    doc.insert("run".into(), run.into());
    doc.insert(
        "config".into(),
        toml::Value::try_from(resolved_config(cfg)).expect("configuration serialises"),
    );
    toml::to_string(&doc).expect("metadata serialises")
}

/// Runs `cfg` and writes its outputs into `out_dir`.
pub fn run(cfg: &ScenarioConfig, out_dir: &Path, format: OutputFormat) -> Result<RunReport> {
    let start = Instant::now();
    let result = execute(cfg)?;
    let data_files = emit_plotdata(&result, out_dir, cfg.label(), format)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let sidecar = out_dir.join(format!("{}.meta.toml", cfg.label()));
    std::fs::write(
        &sidecar,
        sidecar_text(cfg, &result, &data_files, format, wall_time_s),
    )?;
    Ok(RunReport {
        result,
        data_files,
        sidecar,
        wall_time_s,
    })
}
