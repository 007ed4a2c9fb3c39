//! CSV and SVG serialisation of run results.
//!
//! Numbers are written with 17 significant digits so that every value
//! round-trips exactly and repeated runs produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::correlations::TwoTimeGrid;
use crate::dynamics::{Observable, Trajectory};
use crate::error::Result;
use crate::steadystate::Spectrum;

/// Token written in place of an undefined value.
pub const NA: &str = "NA";

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_optional(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_else(|| NA.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    CsvSvg,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<OutputFormat> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "csv+svg" => Some(OutputFormat::CsvSvg),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::CsvSvg => "csv+svg",
        }
    }
}

/// Computed data of one run, ready for serialisation.
#[derive(Debug, Clone)]
pub enum RunResult {
    Pulsed(Trajectory),
    TwoTime {
        grid: TwoTimeGrid,
        normalized: Vec<Vec<Option<f64>>>,
        trajectory: Trajectory,
    },
    Spectrum(Spectrum),
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t_ps");
    for obs in Observable::ALL {
        out.push(',');
        out.push_str(obs.name());
    }
    out.push('\n');
    for (k, t) in traj.times.iter().enumerate() {
        out.push_str(&format_value(*t));
        for obs in Observable::ALL {
            out.push(',');
            out.push_str(&format_value(traj.series(obs)[k]));
        }
        out.push('\n');
    }
    out
}

/// Long format `t1_ps,t2_ps,<value_name>,defined`, `t1` outermost.
pub fn grid_csv<F>(t1: &[f64], t2: &[f64], value_name: &str, value: F) -> String
where
    F: Fn(usize, usize) -> Option<f64>,
{
    let mut out = format!("t1_ps,t2_ps,{value_name},defined\n");
    for (i, a) in t1.iter().enumerate() {
        for (j, b) in t2.iter().enumerate() {
            let v = value(i, j);
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_value(*a),
                format_value(*b),
                format_optional(v),
                u8::from(v.is_some())
            );
        }
    }
    out
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("detuning_ueV,cavity_photon_number,joint_intensity_Ixc\n");
    for k in 0..s.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_value(s.detuning_axis[k]),
            format_value(s.cavity_photon_number[k]),
            format_value(s.joint_intensity_ixc[k])
        );
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(v), h.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Line plot with each series scaled to its own maximum.
pub fn line_plot_svg(title: &str, x_label: &str, x: &[f64], series: &[(&str, &[f64])]) -> String {
    let (x0, x1) = bounds(x.iter().copied());
    let px = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |v: f64| H - MARGIN - v * (H - 2.0 * MARGIN);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n\
         <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>\n\
         <text x=\"{MARGIN}\" y=\"{}\" font-size=\"10\">{x0:.3}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"10\">{x1:.3}</text>\n",
        W / 2.0,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN,
        W / 2.0,
        H - 12.0,
        H - MARGIN + 14.0,
        W - MARGIN,
        H - MARGIN + 14.0,
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let peak = ys
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
        let points: Vec<String> = x
            .iter()
            .zip(ys.iter())
            .filter(|(_, y)| y.is_finite())
            .map(|(a, y)| format!("{:.2},{:.2}", px(*a), py(y * scale)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>",
            points.join(" ")
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{name} (max {peak:.3e})</text>",
            MARGIN + 8.0,
            MARGIN + 16.0 + 14.0 * k as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Heat map of a rectangular grid; undefined cells are drawn grey.
pub fn heatmap_svg(
    title: &str,
    t1: &[f64],
    t2: &[f64],
    value: impl Fn(usize, usize) -> Option<f64>,
) -> String {
    let mut defined = Vec::with_capacity(t1.len() * t2.len());
    for i in 0..t1.len() {
        defined.extend((0..t2.len()).filter_map(|j| value(i, j)));
    }
    let (lo, hi) = bounds(defined.into_iter());
    let cw = (W - 2.0 * MARGIN) / t1.len().max(1) as f64;
    let ch = (H - 2.0 * MARGIN) / t2.len().max(1) as f64;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n",
        W / 2.0
    );
    for i in 0..t1.len() {
        for j in 0..t2.len() {
            let fill = match value(i, j) {
                Some(v) => {
                    let s = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
                    let r = (255.0 * s).round() as u8;
                    let b = (255.0 * (1.0 - s)).round() as u8;
                    format!("#{r:02x}40{b:02x}")
                }
                None => "#bbbbbb".into(),
            };
            let _ = writeln!(
                svg,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
                MARGIN + i as f64 * cw,
                H - MARGIN - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">t1 (ps) horizontal, t2 (ps) vertical, range [{lo:.3e}, {hi:.3e}]</text>",
        W / 2.0,
        H - 14.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes the CSV files (and SVG plots if requested) for `result` into
/// `dir`, named after `label`. Returns the written paths in order.
pub fn emit_plotdata(
    result: &RunResult,
    dir: &Path,
    label: &str,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<(String, String)> = Vec::new();
    let svg = format == OutputFormat::CsvSvg;
    let traj_plot = |traj: &Trajectory| {
        line_plot_svg(
            label,
            "t (ps)",
            &traj.times,
            &[
                (
                    "cavity_photon_number",
                    traj.series(Observable::CavityPhotonNumber),
                ),
                (
                    "joint_intensity_Ixc",
                    traj.series(Observable::JointIntensityIxc),
                ),
                (
                    "exciton_population",
                    traj.series(Observable::ExcitonPopulation),
                ),
            ],
        )
    };
    match result {
        RunResult::Pulsed(traj) => {
            files.push((format!("{label}_trajectory.csv"), trajectory_csv(traj)));
            if svg {
                files.push((format!("{label}_trajectory.svg"), traj_plot(traj)));
            }
        }
        RunResult::TwoTime {
            grid,
            normalized,
            trajectory,
        } => {
            let raw = |i: usize, j: usize| Some(grid.values[i][j]);
            let norm = |i: usize, j: usize| normalized[i][j];
            files.push((
                format!("{label}_icx.csv"),
                grid_csv(&grid.t1_axis, &grid.t2_axis, "I_cx", raw),
            ));
            files.push((
                format!("{label}_pn12.csv"),
                grid_csv(&grid.t1_axis, &grid.t2_axis, "P_N12", norm),
            ));
            files.push((
                format!("{label}_trajectory.csv"),
                trajectory_csv(trajectory),
            ));
            if svg {
                files.push((
                    format!("{label}_icx.svg"),
                    heatmap_svg("I_cx(t1, t2)", &grid.t1_axis, &grid.t2_axis, raw),
                ));
                files.push((
                    format!("{label}_pn12.svg"),
                    heatmap_svg("P_N12(t1, t2)", &grid.t1_axis, &grid.t2_axis, norm),
                ));
            }
        }
        RunResult::Spectrum(s) => {
            files.push((format!("{label}_spectrum.csv"), spectrum_csv(s)));
            if svg {
                files.push((
                    format!("{label}_spectrum.svg"),
                    line_plot_svg(
                        label,
                        "cavity-drive detuning (ueV)",
                        &s.detuning_axis,
                        &[
                            ("cavity_photon_number", &s.cavity_photon_number),
                            ("joint_intensity_Ixc", &s.joint_intensity_ixc),
                        ],
                    ),
                ));
            }
        }
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
