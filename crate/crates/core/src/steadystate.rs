//! Superoperator form of the master equation and its steady state under
//! continuous-wave driving.
//!
//! Density matrices are vectorised by stacking columns, so
//! `vec(AρB) = (Bᵀ ⊗ A)·vec(ρ)`.

use rayon::prelude::*;

use crate::dynamics::{cavity_photon_number, dephasing_term, joint_intensity_ixc, DensityMatrix};
use crate::error::{Error, Result};
use crate::model::{build_static_rwa_hamiltonian, collapse_operators, SystemParams};
use crate::operators::{kron, solve_linear, ComplexMatrix, C64, HBAR_UEV_PS, I, ONE, ZERO};

/// Maximum `‖L·vec(ρ)‖∞` accepted for a steady state, per ps.
pub const STEADY_STATE_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Liouvillian {
    /// Hilbert dimension `d`; the matrix is `d² × d²`.
    pub hilbert_dim: usize,
    pub matrix: ComplexMatrix,
    pub params: SystemParams,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `L·vec(ρ)` reshaped back to a matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let v = self.matrix.apply(rho.as_slice())?;
        ComplexMatrix::from_column_stacked(self.hilbert_dim, &v)
    }
}

/// Builds `L` with `L·vec(ρ) = vec(i[ρ,H]/ħ − Σ D[L_k]ρ/ħ + ℒ_d ρ/ħ)`.
pub fn build_liouvillian(
    h: &ComplexMatrix,
    ls: &[ComplexMatrix],
    p: &SystemParams,
) -> Result<Liouvillian> {
    let d = h.dim();
    if ls.iter().any(|l| l.dim() != d) || p.space().dim() != d {
        return Err(Error::DimensionMismatch(
            "Hamiltonian, collapse operators and parameters must share one space".into(),
        ));
    }
    let id = ComplexMatrix::identity(d);

    // i(ρH − Hρ)
    let mut super_op = (&kron(&h.transpose(), &id) - &kron(&id, h)).scale(I);

    for l in ls {
        let ldl = &l.dagger() * l;
        let jump = kron(&l.conj(), l);
        let anti = &kron(&id, &ldl) + &kron(&ldl.transpose(), &id);
        super_op = &(&super_op + &jump) - &anti.scale_real(0.5);
    }

    // Pure dephasing is a diagonal superoperator; probing it on each basis
    // element keeps a single definition of the term.
    if p.gamma_d1 != 0.0 || p.gamma_d2 != 0.0 {
        let mut unit = ComplexMatrix::zeros(d);
        for col in 0..d {
            for row in 0..d {
                unit[(row, col)] = ONE;
                let k = col * d + row;
                let out = dephasing_term(&unit, p);
                super_op[(k, k)] += out[(row, col)];
                unit[(row, col)] = ZERO;
            }
        }
    }

    Ok(Liouvillian {
        hilbert_dim: d,
        matrix: super_op.scale_real(1.0 / HBAR_UEV_PS),
        params: *p,
    })
}

/// Solves `L·vec(ρ) = 0` with `Tr ρ = 1` imposed on row 0.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.hilbert_dim;
    let n = l.dim();
    let mut m = l.matrix.clone();
    for k in 0..n {
        m[(0, k)] = ZERO;
    }
    for i in 0..d {
        m[(0, i * d + i)] = ONE;
    }
    let mut rhs = vec![ZERO; n];
    rhs[0] = ONE;

    let x = solve_linear(&m, &rhs).map_err(|e| match e {
        Error::Singular { column, pivot } => Error::NonUniqueSteadyState(format!(
            "Liouvillian null space is larger than one (pivot {pivot:.3e} at column {column})"
        )),
        other => other,
    })?;
    let rho = ComplexMatrix::from_column_stacked(d, &x)?.hermitian_part();

    let residual = l
        .matrix
        .apply(rho.as_slice())?
        .iter()
        .skip(1)
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual.is_nan() || residual > STEADY_STATE_RESIDUAL {
        return Err(Error::SteadyStateResidual(residual));
    }
    DensityMatrix::new(l.params.space(), rho)
}

/// Steady state of the static rotating-frame model with CW cavity and
/// control drives.
pub fn cw_steady_state(
    p: &SystemParams,
    cavity_drive_detuning: f64,
    control_drive_detuning: f64,
    e_in: f64,
    e_c: f64,
) -> Result<DensityMatrix> {
    let h =
        build_static_rwa_hamiltonian(p, cavity_drive_detuning, control_drive_detuning, e_in, e_c);
    let l = build_liouvillian(&h, &collapse_operators(p), p)?;
    steady_state(&l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Cavity-drive frequency minus `ω_c`, μeV.
    pub detuning_axis: Vec<f64>,
    pub cavity_photon_number: Vec<f64>,
    pub joint_intensity_ixc: Vec<f64>,
    pub approximations: Vec<String>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.detuning_axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detuning_axis.is_empty()
    }
}

/// Steady-state `⟨a†a⟩` and `I_xc` against cavity-drive detuning, with the
/// control drive resonant on G–X. Points are solved in parallel.
pub fn spectrum_sweep(
    p: &SystemParams,
    e_in: f64,
    e_c: f64,
    detuning_axis: &[f64],
) -> Result<Spectrum> {
    p.validate()?;
    if detuning_axis.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidAxis("detuning axis must be finite".into()));
    }
    let points: Vec<(f64, f64)> = detuning_axis
        .par_iter()
        .map(|&det| {
            cw_steady_state(p, det, 0.0, e_in, e_c)
                .map(|rho| {
                    let m = rho.matrix();
                    (cavity_photon_number(m), joint_intensity_ixc(m))
                })
                .map_err(|e| Error::SpectrumPoint {
                    detuning: det,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let (cavity_photon_number, joint_intensity_ixc) = points.into_iter().unzip();
    Ok(Spectrum {
        detuning_axis: detuning_axis.to_vec(),
        cavity_photon_number,
        joint_intensity_ixc,
        approximations: vec![
            "rotating-wave approximation".into(),
            "secular: biexciton-binding-energy oscillating terms dropped".into(),
            format!("Fock space truncated at {} photons", p.fock_cutoff),
        ],
    })
}

/// Applies `rho ↦ L·vec(rho)` and returns the largest entry magnitude.
pub fn residual_norm(l: &Liouvillian, rho: &ComplexMatrix) -> Result<f64> {
    Ok(l.matrix
        .apply(rho.as_slice())?
        .iter()
        .map(|z: &C64| z.norm())
        .fold(0.0, f64::max))
}
