//! Physical parameters, drive envelopes, Hamiltonian assembly and the
//! collapse-operator set.
//!
//! The pulsed Hamiltonian lives in the frame rotating at the two resonant
//! carriers: the G–X transition at ω_x and the cavity at ω_c = ω_xx − ω_x.
//! In that frame the resonant X–XX coupling and the two resonant drives are
//! static, while the cavity coupling to G–X and the control coupling to X–XX
//! keep explicit `e^{iΔt/ħ}` phases. The CW frame rotates at the two drive
//! frequencies instead and drops those Δ-residual terms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, HilbertSpace, Level, C64, HBAR_UEV_PS, ZERO};

/// All energies and rates in μeV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity coupling; the single-photon Rabi frequency is 2g.
    pub g: f64,
    /// Biexciton binding energy Δ = ω_xx − 2ω_x.
    pub delta: f64,
    /// Exciton energy; only a reference since every frame removes it.
    pub omega_x: f64,
    pub gamma_c: f64,
    /// Output-port share of the cavity loss (γ′_c ≤ γ_c).
    pub gamma_c_out: f64,
    pub gamma_xx_x: f64,
    pub gamma_x_g: f64,
    pub gamma_d1: f64,
    pub gamma_d2: f64,
    pub fock_cutoff: usize,
}

impl SystemParams {
    /// Parameter set used for the pulsed simulations: 2g = 200 μeV,
    /// Δ = 4 meV, γ_c = 70, γ_XX→X = 30 and γ_X→G = 20 μeV, no dephasing.
    pub fn pulsed_reference() -> Self {
        Self {
            g: 100.0,
            delta: 4000.0,
            omega_x: 0.0,
            gamma_c: 70.0,
            gamma_c_out: 70.0,
            gamma_xx_x: 30.0,
            gamma_x_g: 20.0,
            gamma_d1: 0.0,
            gamma_d2: 0.0,
            fock_cutoff: 5,
        }
    }

    /// Lossless, undriven, uncoupled system at the given cutoff.
    pub fn zero(fock_cutoff: usize) -> Self {
        Self {
            g: 0.0,
            delta: 0.0,
            omega_x: 0.0,
            gamma_c: 0.0,
            gamma_c_out: 0.0,
            gamma_xx_x: 0.0,
            gamma_x_g: 0.0,
            gamma_d1: 0.0,
            gamma_d2: 0.0,
            fock_cutoff,
        }
    }

    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new(self.fock_cutoff)
    }

    pub fn omega_xx(&self) -> f64 {
        2.0 * self.omega_x + self.delta
    }

    /// Cavity mode energy, resonant with the X–XX transition.
    pub fn omega_c(&self) -> f64 {
        self.omega_xx() - self.omega_x
    }

    pub fn with_cutoff(mut self, fock_cutoff: usize) -> Self {
        self.fock_cutoff = fock_cutoff;
        self
    }

    pub fn without_dephasing(mut self) -> Self {
        self.gamma_d1 = 0.0;
        self.gamma_d2 = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g", self.g),
            ("gamma_c", self.gamma_c),
            ("gamma_c_out", self.gamma_c_out),
            ("gamma_xx_x", self.gamma_xx_x),
            ("gamma_x_g", self.gamma_x_g),
            ("gamma_d1", self.gamma_d1),
            ("gamma_d2", self.gamma_d2),
        ];
        for (key, value) in fields {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::Validation {
                    key: key.into(),
                    constraint: format!("must be finite and >= 0, got {value}"),
                });
            }
        }
        for (key, value) in [("delta", self.delta), ("omega_x", self.omega_x)] {
            if !value.is_finite() {
                return Err(Error::Validation {
                    key: key.into(),
                    constraint: "must be finite".into(),
                });
            }
        }
        if self.gamma_c_out > self.gamma_c {
            return Err(Error::Validation {
                key: "gamma_c_out".into(),
                constraint: format!(
                    "output-port loss {} exceeds total cavity loss {}",
                    self.gamma_c_out, self.gamma_c
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveTarget {
    /// Feeds the cavity mode; detuning is measured from ω_c.
    CavityInput,
    /// Drives the dot; detuning is measured from ω_x.
    QdControl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveShape {
    GaussianPulse {
        /// Pulse area θ in units of π, θ = 2∫E dt/ħ.
        area_pi: f64,
        fwhm_ps: f64,
        t_center_ps: f64,
    },
    Cw {
        amplitude_uev: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveEnvelope {
    pub shape: DriveShape,
    pub target: DriveTarget,
    /// Carrier minus reference transition, μeV.
    pub detuning: f64,
}

impl DriveEnvelope {
    pub fn gaussian(target: DriveTarget, area_pi: f64, fwhm_ps: f64, t_center_ps: f64) -> Self {
        Self {
            shape: DriveShape::GaussianPulse {
                area_pi,
                fwhm_ps,
                t_center_ps,
            },
            target,
            detuning: 0.0,
        }
    }

    pub fn cw(target: DriveTarget, amplitude_uev: f64) -> Self {
        Self {
            shape: DriveShape::Cw { amplitude_uev },
            target,
            detuning: 0.0,
        }
    }

    pub fn with_detuning(mut self, detuning_uev: f64) -> Self {
        self.detuning = detuning_uev;
        self
    }

    /// Real field envelope in μeV at time `t` (ps).
    pub fn amplitude(&self, t: f64) -> f64 {
        match self.shape {
            DriveShape::GaussianPulse { .. } => gaussian_envelope(self, t),
            DriveShape::Cw { amplitude_uev } => amplitude_uev,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.detuning.is_finite() {
            return Err(Error::Validation {
                key: "detuning_ueV".into(),
                constraint: "must be finite".into(),
            });
        }
        match self.shape {
            DriveShape::GaussianPulse {
                area_pi,
                fwhm_ps,
                t_center_ps,
            } => {
                if !(fwhm_ps > 0.0 && fwhm_ps.is_finite()) {
                    return Err(Error::Validation {
                        key: "fwhm_ps".into(),
                        constraint: format!("must be > 0, got {fwhm_ps}"),
                    });
                }
                if !area_pi.is_finite() || !t_center_ps.is_finite() {
                    return Err(Error::Validation {
                        key: "area_pi".into(),
                        constraint: "pulse area and centre must be finite".into(),
                    });
                }
            }
            DriveShape::Cw { amplitude_uev } => {
                if !(amplitude_uev >= 0.0 && amplitude_uev.is_finite()) {
                    return Err(Error::Validation {
                        key: "amplitude_ueV".into(),
                        constraint: format!("must be >= 0, got {amplitude_uev}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Gaussian pulse field `E(t) = (θħ/2)·G(t − t_c)` with `G` a unit-area
/// Gaussian of the given FWHM. Returns 0 for CW envelopes.
pub fn gaussian_envelope(d: &DriveEnvelope, t: f64) -> f64 {
    match d.shape {
        DriveShape::GaussianPulse {
            area_pi,
            fwhm_ps,
            t_center_ps,
        } => {
            let sigma = fwhm_ps / (2.0 * (2.0 * 2f64.ln()).sqrt());
            let x = (t - t_center_ps) / sigma;
            let unit = (-0.5 * x * x).exp() / (sigma * (2.0 * PI).sqrt());
            0.5 * area_pi * PI * HBAR_UEV_PS * unit
        }
        DriveShape::Cw { .. } => 0.0,
    }
}

/// Which terms of the pulsed-frame Hamiltonian are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOptions {
    /// Keep the Δ-oscillating cross couplings.
    pub residual_terms: bool,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            residual_terms: true,
        }
    }
}

/// Time-dependent scalar multiplying a Hamiltonian term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    /// `amplitude · e^{i·phase_rate·t}`, phase_rate in rad/ps.
    Rotating { amplitude: C64, phase_rate: f64 },
    /// `E(t) · e^{i·phase_rate·t}`.
    Drive {
        envelope: DriveEnvelope,
        phase_rate: f64,
    },
}

impl Coefficient {
    pub fn at(&self, t: f64) -> C64 {
        match self {
            Coefficient::Rotating {
                amplitude,
                phase_rate,
            } => amplitude * C64::from_polar(1.0, phase_rate * t),
            Coefficient::Drive {
                envelope,
                phase_rate,
            } => C64::from_polar(envelope.amplitude(t), phase_rate * t),
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Coefficient::Rotating { phase_rate, .. } => *phase_rate == 0.0,
            Coefficient::Drive {
                envelope,
                phase_rate,
            } => *phase_rate == 0.0 && matches!(envelope.shape, DriveShape::Cw { .. }),
        }
    }
}

/// Contributes `c(t)·op + conj(c(t))·op†`.
#[derive(Debug, Clone)]
pub struct HamiltonianTerm {
    pub op: ComplexMatrix,
    pub coefficient: Coefficient,
    /// Set on the Δ-oscillating cross couplings.
    pub residual: bool,
}

/// Hamiltonian as a static part plus Hermitian-paired driven terms.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub space: HilbertSpace,
    pub static_part: ComplexMatrix,
    pub terms: Vec<HamiltonianTerm>,
}

impl Hamiltonian {
    /// Pulsed-frame Hamiltonian for the given drives.
    pub fn pulsed(p: &SystemParams, drives: &[DriveEnvelope], frame: FrameOptions) -> Self {
        let space = p.space();
        let a_dag = space.creation();
        let delta_rate = p.delta / HBAR_UEV_PS;

        let x_xx = &a_dag * &space.transition(Level::X, Level::XX);
        let static_part = (&x_xx + &x_xx.dagger()).scale_real(p.g);

        let mut terms = Vec::new();
        if frame.residual_terms && p.g != 0.0 {
            terms.push(HamiltonianTerm {
                op: &a_dag * &space.transition(Level::G, Level::X),
                coefficient: Coefficient::Rotating {
                    amplitude: C64::new(p.g, 0.0),
                    phase_rate: delta_rate,
                },
                residual: true,
            });
        }
        for d in drives {
            let detuning_rate = -d.detuning / HBAR_UEV_PS;
            match d.target {
                DriveTarget::CavityInput => terms.push(HamiltonianTerm {
                    op: a_dag.clone(),
                    coefficient: Coefficient::Drive {
                        envelope: *d,
                        phase_rate: detuning_rate,
                    },
                    residual: false,
                }),
                DriveTarget::QdControl => {
                    terms.push(HamiltonianTerm {
                        op: space.transition(Level::X, Level::G),
                        coefficient: Coefficient::Drive {
                            envelope: *d,
                            phase_rate: detuning_rate,
                        },
                        residual: false,
                    });
                    if frame.residual_terms {
                        // The same carrier at ω_x sits Δ below the X–XX line.
                        terms.push(HamiltonianTerm {
                            op: space.transition(Level::XX, Level::X),
                            coefficient: Coefficient::Drive {
                                envelope: *d,
                                phase_rate: detuning_rate + delta_rate,
                            },
                            residual: true,
                        });
                    }
                }
            }
        }
        Self {
            space,
            static_part,
            terms,
        }
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        let mut h = self.static_part.clone();
        for term in &self.terms {
            let c = term.coefficient.at(t);
            if c == ZERO {
                continue;
            }
            let n = h.dim();
            for col in 0..n {
                for row in 0..n {
                    let v = term.op[(row, col)];
                    if v != ZERO {
                        h[(row, col)] += c * v;
                        h[(col, row)] += (c * v).conj();
                    }
                }
            }
        }
        h
    }

    pub fn is_time_independent(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient.is_constant())
    }

    /// True when a Δ-oscillating term with a nonzero rate is present.
    pub fn has_active_residual(&self) -> bool {
        self.terms.iter().any(|t| {
            t.residual
                && match t.coefficient {
                    Coefficient::Rotating { phase_rate, .. }
                    | Coefficient::Drive { phase_rate, .. } => phase_rate != 0.0,
                }
        })
    }
}

/// Pulsed-frame Hamiltonian at time `t`, Δ-residual terms included.
pub fn build_hamiltonian(p: &SystemParams, drives: &[DriveEnvelope], t: f64) -> ComplexMatrix {
    Hamiltonian::pulsed(p, drives, FrameOptions::default()).at(t)
}

/// Time-independent Hamiltonian in the frame co-rotating with a CW cavity
/// drive and a CW control drive. Δ-oscillating terms are dropped.
pub fn build_static_rwa_hamiltonian(
    p: &SystemParams,
    cavity_drive_detuning: f64,
    control_drive_detuning: f64,
    e_in: f64,
    e_c: f64,
) -> ComplexMatrix {
    let space = p.space();
    let a = space.annihilation();
    let a_dag = space.creation();

    let mut h = (&space.number().scale_real(-cavity_drive_detuning)
        + &space
            .projector(Level::X)
            .scale_real(-control_drive_detuning))
        .add(
            &space
                .projector(Level::XX)
                .scale_real(-control_drive_detuning - cavity_drive_detuning),
        )
        .expect("same space");

    let x_xx = &a_dag * &space.transition(Level::X, Level::XX);
    h = &h + &(&x_xx + &x_xx.dagger()).scale_real(p.g);

    let up = space.transition(Level::X, Level::G);
    h = &h + &(&up + &up.dagger()).scale_real(e_c);
    h = &h + &(&a_dag + &a).scale_real(e_in);
    h
}

/// `[√γ_c·a, √γ_XX→X·σ_x,xx, √γ_X→G·σ_g,x]`, always three entries.
pub fn collapse_operators(p: &SystemParams) -> Vec<ComplexMatrix> {
    let space = p.space();
    vec![
        space.annihilation().scale_real(p.gamma_c.sqrt()),
        space
            .transition(Level::X, Level::XX)
            .scale_real(p.gamma_xx_x.sqrt()),
        space
            .transition(Level::G, Level::X)
            .scale_real(p.gamma_x_g.sqrt()),
    ]
}
