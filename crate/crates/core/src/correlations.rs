//! Two-time joint detection probability `I_cx(t₁,t₂)` by the quantum
//! regression theorem, its normalised form, and equal-time second-order
//! correlations with the Cauchy–Schwarz test.
//!
//! `I_cx(t₁,t₂) = ⟨𝒯 a†(t₁) σ_x,x(t₂) a(t₁)⟩`. For `t₁ ≤ t₂` the cavity photon
//! is detected first: `ρ → aρa†` at `t₁`, then `σ_x,x` is read at `t₂`. For
//! `t₁ > t₂` the exciton photon comes first: `ρ → σ_g,x ρ σ_x,g` at `t₂`, then
//! `a†a` is read at `t₁`. Conditional matrices keep their trace.

use rayon::prelude::*;

use crate::dynamics::{
    cavity_photon_number, joint_intensity_ixc, population, Observable, Scenario, Trajectory,
};
use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, Level};

/// Denominators below this are treated as zero and the ratio is undefined.
pub const EPS_FLOOR: f64 = 1e-12;

/// `values[i][j] = I_cx(t1_axis[i], t2_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeGrid {
    pub t1_axis: Vec<f64>,
    pub t2_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub normalized_values: Option<Vec<Vec<Option<f64>>>>,
}

impl TwoTimeGrid {
    /// Cut `C(t) = I_cx(t, t2_axis[j])` along the first time.
    pub fn cut_at_t2(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    /// Cut `X(t) = I_cx(t1_axis[i], t)` along the second time.
    pub fn cut_at_t1(&self, i: usize) -> Vec<f64> {
        self.values[i].clone()
    }
}

fn check_axis(name: &str, axis: &[f64], start: f64) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidAxis(format!("{name} is empty")));
    }
    if axis.iter().any(|t| !t.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidAxis(format!(
            "{name} must be finite and strictly increasing"
        )));
    }
    if axis[0] < start {
        return Err(Error::OutsideWindow {
            time: axis[0],
            start,
        });
    }
    Ok(())
}

/// Grid of `I_cx` values; see [`two_time_icx_with_trajectory`].
pub fn two_time_icx(scenario: &Scenario, t1_axis: &[f64], t2_axis: &[f64]) -> Result<TwoTimeGrid> {
    two_time_icx_with_trajectory(scenario, t1_axis, t2_axis).map(|(g, _)| g)
}

/// Computes the `I_cx` grid and returns it with the unconditional trajectory
/// sampled on the union of both axes.
///
/// The unconditional state is propagated once; each conditional matrix is
/// then propagated independently (in parallel) from its collapse time.
pub fn two_time_icx_with_trajectory(
    scenario: &Scenario,
    t1_axis: &[f64],
    t2_axis: &[f64],
) -> Result<(TwoTimeGrid, Trajectory)> {
    let start = scenario.t_grid.first().copied().unwrap_or(0.0);
    check_axis("t1 axis", t1_axis, start)?;
    check_axis("t2 axis", t2_axis, start)?;

    let mut union: Vec<f64> = t1_axis.iter().chain(t2_axis).copied().collect();
    union.push(start);
    union.sort_by(|a, b| a.partial_cmp(b).unwrap());
    union.dedup();

    let propagator = scenario.propagator()?;
    let rho0 = scenario.initial_state()?;
    let trajectory = propagator.trajectory(&rho0, &union, &union)?;
    let state = |t: f64| -> &ComplexMatrix {
        trajectory
            .state_at(t)
            .expect("snapshot stored for every union time")
            .matrix()
    };

    let space = propagator.space();
    let a = space.annihilation();
    let a_dag = space.creation();
    let lower = space.transition(Level::G, Level::X);
    let raise = space.transition(Level::X, Level::G);

    // Cavity photon first (t1 <= t2).
    let cavity_first: Vec<Result<Vec<(usize, f64)>>> = t1_axis
        .par_iter()
        .map(|&t1| {
            let cond = &(&a * state(t1)) * &a_dag;
            let later: Vec<(usize, f64)> = t2_axis
                .iter()
                .enumerate()
                .filter(|(_, t2)| **t2 >= t1)
                .map(|(j, t2)| (j, *t2))
                .collect();
            let times: Vec<f64> = later.iter().map(|(_, t)| *t).collect();
            let mut out = Vec::with_capacity(times.len());
            propagator.evolve(t1, &cond, &times, |k, _, m| {
                out.push((later[k].0, population(m, Level::X)));
                Ok(())
            })?;
            Ok(out)
        })
        .collect();

    // Exciton photon first (t1 > t2).
    let exciton_first: Vec<Result<Vec<(usize, f64)>>> = t2_axis
        .par_iter()
        .map(|&t2| {
            let cond = &(&lower * state(t2)) * &raise;
            let later: Vec<(usize, f64)> = t1_axis
                .iter()
                .enumerate()
                .filter(|(_, t1)| **t1 > t2)
                .map(|(i, t1)| (i, *t1))
                .collect();
            let times: Vec<f64> = later.iter().map(|(_, t)| *t).collect();
            let mut out = Vec::with_capacity(times.len());
            propagator.evolve(t2, &cond, &times, |k, _, m| {
                out.push((later[k].0, cavity_photon_number(m)));
                Ok(())
            })?;
            Ok(out)
        })
        .collect();

    let mut values = vec![vec![0.0; t2_axis.len()]; t1_axis.len()];
    for (i, row) in cavity_first.into_iter().enumerate() {
        for (j, v) in row? {
            values[i][j] = v;
        }
    }
    for (j, col) in exciton_first.into_iter().enumerate() {
        for (i, v) in col? {
            values[i][j] = v;
        }
    }

    Ok((
        TwoTimeGrid {
            t1_axis: t1_axis.to_vec(),
            t2_axis: t2_axis.to_vec(),
            values,
            normalized_values: None,
        },
        trajectory,
    ))
}

/// `P^N₁₂ = I_cx(t₁,t₂) / (⟨a†a⟩(t₁)·⟨σ_x,x⟩(t₂))`; `None` where either
/// factor is below [`EPS_FLOOR`] or not covered by the trajectory.
pub fn normalized_joint(grid: &TwoTimeGrid, trajectory: &Trajectory) -> Vec<Vec<Option<f64>>> {
    let photons: Vec<Option<f64>> = grid
        .t1_axis
        .iter()
        .map(|&t| trajectory.sample(Observable::CavityPhotonNumber, t))
        .collect();
    let exciton: Vec<Option<f64>> = grid
        .t2_axis
        .iter()
        .map(|&t| trajectory.sample(Observable::ExcitonPopulation, t))
        .collect();
    grid.values
        .iter()
        .zip(&photons)
        .map(|(row, n)| {
            row.iter()
                .zip(&exciton)
                .map(|(v, x)| match (n, x) {
                    (Some(n), Some(x)) if *n >= EPS_FLOOR && *x >= EPS_FLOOR => Some(v / (n * x)),
                    _ => None,
                })
                .collect()
        })
        .collect()
}

fn ratio(num: f64, factors: &[f64]) -> Option<f64> {
    if factors.iter().any(|f| *f < EPS_FLOOR) {
        return None;
    }
    Some(num / factors.iter().product::<f64>())
}

/// Zero-delay cross correlation `I_xc / (⟨a†a⟩⟨σ_x,x⟩)`.
pub fn g2_cross_equal_time(rho: &ComplexMatrix) -> Option<f64> {
    ratio(
        joint_intensity_ixc(rho),
        &[cavity_photon_number(rho), population(rho, Level::X)],
    )
}

/// `⟨a†a†aa⟩ / ⟨a†a⟩²`.
pub fn g2_cavity_equal_time(rho: &ComplexMatrix) -> Option<f64> {
    let space = crate::dynamics::space_of_matrix(rho);
    let n = cavity_photon_number(rho);
    let mut num = 0.0;
    for level in Level::ALL {
        for k in 2..space.fock_dim() {
            let idx = space.index(level, k);
            num += (k * (k - 1)) as f64 * rho[(idx, idx)].re;
        }
    }
    ratio(num, &[n, n])
}

/// Normal-ordered exciton numerator `⟨σ_x,g σ_x,g σ_g,x σ_g,x⟩`, evaluated
/// from the operator product (it vanishes on the three-level ladder).
pub fn exciton_g2_numerator(rho: &ComplexMatrix) -> f64 {
    let space = crate::dynamics::space_of_matrix(rho);
    let up = space.transition(Level::X, Level::G);
    let down = space.transition(Level::G, Level::X);
    let op = &(&(&up * &up) * &down) * &down;
    (&op * rho).trace().re
}

/// `⟨σ_x,g σ_x,g σ_g,x σ_g,x⟩ / ⟨σ_x,x⟩²`.
pub fn g2_exciton_equal_time(rho: &ComplexMatrix) -> Option<f64> {
    let x = population(rho, Level::X);
    ratio(exciton_g2_numerator(rho), &[x, x])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySchwarz {
    pub g2_cross: f64,
    pub g2_cavity: f64,
    pub g2_exciton: f64,
    /// `[g²_cx]²`
    pub lhs: f64,
    /// `g²_c·g²_x`
    pub rhs: f64,
    pub violated: bool,
}

impl CauchySchwarz {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Classical bound `[g²_cx]² ≤ g²_c·g²_x`; `None` if any correlator is undefined.
pub fn cauchy_schwarz_violation(rho: &ComplexMatrix) -> Option<CauchySchwarz> {
    let g2_cross = g2_cross_equal_time(rho)?;
    let g2_cavity = g2_cavity_equal_time(rho)?;
    let g2_exciton = g2_exciton_equal_time(rho)?;
    let lhs = g2_cross * g2_cross;
    let rhs = g2_cavity * g2_exciton;
    Some(CauchySchwarz {
        g2_cross,
        g2_cavity,
        g2_exciton,
        lhs,
        rhs,
        violated: lhs > rhs + 1e-12,
    })
}
