//! Lindblad right-hand side, time propagation and single-time observables.
//!
//! The master equation is kept in the form `ρ̇ = i[ρ,H]/ħ − D(ρ)/ħ + ℒ_d(ρ)/ħ`
//! with `D` the usual anticommutator/jump dissipator and `ℒ_d` the
//! projector-sandwich pure-dephasing term.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegrationStats, IntegratorOptions};
use crate::model::{
    collapse_operators, Coefficient, DriveEnvelope, FrameOptions, Hamiltonian, SystemParams,
};
use crate::operators::{
    hermitian_min_eigenvalue, ComplexMatrix, HilbertSpace, Level, C64, HBAR_UEV_PS, I, ONE, ZERO,
};

/// Validated density matrix on a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks trace (1e-8), Hermiticity (1e-10) and positivity (−1e-8).
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix of dim {} on a space of dim {}",
                matrix.dim(),
                space.dim()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite(f64::NAN));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-8 {
            return Err(Error::Invariant {
                time: f64::NAN,
                what: format!("trace {tr} differs from 1"),
            });
        }
        let herm = matrix.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::NonHermitian(herm));
        }
        let min_eig = hermitian_min_eigenvalue(&matrix)?;
        if min_eig < -1e-8 {
            return Err(Error::Invariant {
                time: f64::NAN,
                what: format!("minimum eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn basis(space: HilbertSpace, level: Level, photons: usize) -> Self {
        Self {
            space,
            matrix: space.basis_projector(level, photons),
        }
    }

    /// `|G,0⟩⟨G,0|`.
    pub fn ground(space: HilbertSpace) -> Self {
        Self::basis(space, Level::G, 0)
    }

    /// Pure state from a (not necessarily normalised) ket.
    pub fn from_ket(space: HilbertSpace, ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || ket.len() != space.dim() {
            return Err(Error::DimensionMismatch(
                "ket must be nonzero and match the space".into(),
            ));
        }
        let v: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Self::new(space, ComplexMatrix::outer(&v, &v)?)
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// `Tr(op·ρ)`.
pub fn expectation(rho: &ComplexMatrix, op: &ComplexMatrix) -> Result<C64> {
    Ok(op.matmul(rho)?.trace())
}

/// Sum of `weight(level, n)·ρ_{(level,n),(level,n)}`; all single-time
/// observables are diagonal in the bare basis.
fn diagonal_sum(
    space: &HilbertSpace,
    rho: &ComplexMatrix,
    weight: impl Fn(Level, usize) -> f64,
) -> f64 {
    let mut acc = 0.0;
    for level in Level::ALL {
        for n in 0..space.fock_dim() {
            let w = weight(level, n);
            if w != 0.0 {
                let k = space.index(level, n);
                acc += w * rho[(k, k)].re;
            }
        }
    }
    acc
}

pub(crate) fn space_of_matrix(rho: &ComplexMatrix) -> HilbertSpace {
    debug_assert_eq!(rho.dim() % 3, 0);
    HilbertSpace::new(rho.dim() / 3 - 1)
}

pub fn cavity_photon_number(rho: &ComplexMatrix) -> f64 {
    diagonal_sum(&space_of_matrix(rho), rho, |_, n| n as f64)
}

pub fn population(rho: &ComplexMatrix, level: Level) -> f64 {
    diagonal_sum(&space_of_matrix(rho), rho, |l, _| {
        if l == level {
            1.0
        } else {
            0.0
        }
    })
}

/// `I_xc = Tr(a†a·σ_x,x·ρ)`.
pub fn joint_intensity_ixc(rho: &ComplexMatrix) -> f64 {
    diagonal_sum(&space_of_matrix(rho), rho, |l, n| {
        if l == Level::X {
            n as f64
        } else {
            0.0
        }
    })
}

/// `g·√|⟨σ_x,x⟩ − ⟨σ_xx,xx⟩|` in μeV.
pub fn effective_coupling(rho: &ComplexMatrix, p: &SystemParams) -> f64 {
    p.g * (population(rho, Level::X) - population(rho, Level::XX))
        .abs()
        .sqrt()
}

/// Output-port photon rate `γ′_c⟨a†a⟩/ħ` in photons/ps.
pub fn output_flux(rho: &ComplexMatrix, p: &SystemParams) -> f64 {
    p.gamma_c_out / HBAR_UEV_PS * cavity_photon_number(rho)
}

/// Free-space exciton emission `⟨σ_x,g σ_g,x⟩` with unit collection factor.
pub fn emitter_intensity(rho: &ComplexMatrix) -> f64 {
    population(rho, Level::X)
}

/// Pure-dephasing contribution
/// `−γ₁ σ_x,x ρ σ_g,g − γ₂ σ_xx,xx ρ σ_x,x + H.c.` in μeV·(units of ρ).
///
/// The Hermitian-conjugate half is written as `σ_g,g ρ σ_x,x` etc. so the map
/// stays linear on non-Hermitian arguments.
pub fn dephasing_term(rho: &ComplexMatrix, p: &SystemParams) -> ComplexMatrix {
    let space = space_of_matrix(rho);
    let mut out = ComplexMatrix::zeros(rho.dim());
    let pairs = [
        (Level::X, Level::G, p.gamma_d1),
        (Level::XX, Level::X, p.gamma_d2),
    ];
    for (upper, lower, gamma) in pairs {
        if gamma == 0.0 {
            continue;
        }
        for m in 0..space.fock_dim() {
            for n in 0..space.fock_dim() {
                let (u, l) = (space.index(upper, m), space.index(lower, n));
                out[(u, l)] -= rho[(u, l)] * gamma;
                let (u, l) = (space.index(upper, n), space.index(lower, m));
                out[(l, u)] -= rho[(l, u)] * gamma;
            }
        }
    }
    out
}

/// Dense reference implementation of the master-equation right-hand side, per ps.
pub fn lindblad_rhs(
    rho: &ComplexMatrix,
    h: &ComplexMatrix,
    ls: &[ComplexMatrix],
    p: &SystemParams,
) -> Result<ComplexMatrix> {
    if rho.dim() != h.dim() || ls.iter().any(|l| l.dim() != rho.dim()) {
        return Err(Error::DimensionMismatch(
            "rho, H and collapse operators must agree".into(),
        ));
    }
    let mut out = rho.commutator(h)?.scale(I);
    for l in ls {
        let ldl = &l.dagger() * l;
        let dissipator =
            &(&(&ldl * rho) + &(rho * &ldl)) - &(&(l * rho) * &l.dagger()).scale_real(2.0);
        out = &out - &dissipator.scale_real(0.5);
    }
    out = &out + &dephasing_term(rho, p);
    Ok(out.scale_real(1.0 / HBAR_UEV_PS))
}

/// Coordinate-list sparse matrix used inside the propagation hot loop.
#[derive(Debug, Clone, Default)]
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut entries = Vec::new();
        for c in 0..n {
            for r in 0..n {
                let v = m[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        Self { entries }
    }

    /// `out += s·A·ρ` (column-major `ρ`).
    fn left_mul_add(&self, s: C64, rho: &[C64], out: &mut [C64], d: usize) {
        for &(r, j, v) in &self.entries {
            let f = s * v;
            for c in 0..d {
                out[c * d + r] += f * rho[c * d + j];
            }
        }
    }

    /// `out += s·ρ·A`.
    fn right_mul_add(&self, s: C64, rho: &[C64], out: &mut [C64], d: usize) {
        for &(i, c, v) in &self.entries {
            let f = s * v;
            let (src, dst) = (i * d, c * d);
            for r in 0..d {
                out[dst + r] += rho[src + r] * f;
            }
        }
    }

    /// `out += s·A·ρ·A†`.
    fn sandwich_add(&self, s: C64, rho: &[C64], out: &mut [C64], d: usize) {
        for &(i, j, a) in &self.entries {
            for &(k, m, b) in &self.entries {
                out[k * d + i] += s * a * rho[m * d + j] * b.conj();
            }
        }
    }
}

struct DrivenTerm {
    op: Sparse,
    op_dag: Sparse,
    coefficient: Coefficient,
}

/// Precompiled sparse form of the master-equation generator.
struct Generator {
    dim: usize,
    space: HilbertSpace,
    /// `H_static − (i/2)·Σ L†L`.
    effective_static: Sparse,
    effective_static_dag: Sparse,
    driven: Vec<DrivenTerm>,
    jumps: Vec<Sparse>,
    gamma_d1: f64,
    gamma_d2: f64,
}

impl Generator {
    fn new(p: &SystemParams, hamiltonian: &Hamiltonian) -> Self {
        let space = p.space();
        let ls = collapse_operators(p);
        let mut k = ComplexMatrix::zeros(space.dim());
        for l in &ls {
            k = &k + &(&l.dagger() * l);
        }
        let eff = &hamiltonian.static_part - &k.scale(C64::new(0.0, 0.5));
        let driven = hamiltonian
            .terms
            .iter()
            .map(|t| DrivenTerm {
                op: Sparse::from_dense(&t.op),
                op_dag: Sparse::from_dense(&t.op.dagger()),
                coefficient: t.coefficient,
            })
            .collect();
        Self {
            dim: space.dim(),
            space,
            effective_static: Sparse::from_dense(&eff),
            effective_static_dag: Sparse::from_dense(&eff.dagger()),
            driven,
            jumps: ls
                .iter()
                .filter(|l| l.max_abs() > 0.0)
                .map(Sparse::from_dense)
                .collect(),
            gamma_d1: p.gamma_d1,
            gamma_d2: p.gamma_d2,
        }
    }

    fn rhs(&self, t: f64, rho: &[C64], out: &mut [C64]) {
        let d = self.dim;
        let s = 1.0 / HBAR_UEV_PS;
        out.iter_mut().for_each(|z| *z = ZERO);
        let minus_i = C64::new(0.0, -s);
        let plus_i = C64::new(0.0, s);
        // −i(H_eff ρ − ρ H_eff†)/ħ
        self.effective_static.left_mul_add(minus_i, rho, out, d);
        self.effective_static_dag.right_mul_add(plus_i, rho, out, d);
        for term in &self.driven {
            let c = term.coefficient.at(t);
            if c == ZERO {
                continue;
            }
            let cc = c.conj();
            term.op.left_mul_add(minus_i * c, rho, out, d);
            term.op_dag.left_mul_add(minus_i * cc, rho, out, d);
            term.op.right_mul_add(plus_i * c, rho, out, d);
            term.op_dag.right_mul_add(plus_i * cc, rho, out, d);
        }
        let s_c = C64::new(s, 0.0);
        for l in &self.jumps {
            l.sandwich_add(s_c, rho, out, d);
        }
        let nf = self.space.fock_dim();
        for (upper, lower, gamma) in [
            (Level::X, Level::G, self.gamma_d1),
            (Level::XX, Level::X, self.gamma_d2),
        ] {
            if gamma == 0.0 {
                continue;
            }
            let rate = gamma * s;
            let (u0, l0) = (upper.ordinal() * nf, lower.ordinal() * nf);
            for m in 0..nf {
                for n in 0..nf {
                    // element (u0+m, l0+n) and its mirror (l0+n, u0+m)
                    let a = (l0 + n) * d + u0 + m;
                    let b = (u0 + m) * d + l0 + n;
                    out[a] -= rho[a] * rate;
                    out[b] -= rho[b] * rate;
                }
            }
        }
    }
}

/// Numerical settings of a propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Relative local-error tolerance.
    pub tolerance: f64,
    /// Absolute tolerance per unit trace of the propagated matrix.
    pub abs_tolerance: f64,
    pub frame: FrameOptions,
    /// Minimum-eigenvalue check at every output time.
    pub check_positivity: bool,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            abs_tolerance: 1e-15,
            frame: FrameOptions::default(),
            check_positivity: true,
        }
    }
}

/// Trace drift and negative-eigenvalue thresholds that abort a propagation,
/// relative to the initial trace.
pub const ABORT_TRACE_DRIFT: f64 = 1e-6;
pub const ABORT_MIN_EIGENVALUE: f64 = -1e-6;

/// Reusable propagator for one model (parameters + drives + frame).
pub struct Propagator {
    params: SystemParams,
    generator: Generator,
    options: PropagationOptions,
    h_max: Option<f64>,
}

impl Propagator {
    pub fn new(
        p: &SystemParams,
        drives: &[DriveEnvelope],
        options: PropagationOptions,
    ) -> Result<Self> {
        p.validate()?;
        for d in drives {
            d.validate()?;
        }
        let hamiltonian = Hamiltonian::pulsed(p, drives, options.frame);
        // Resolve the Δ oscillation with at least 20 steps per period.
        let h_max = if hamiltonian.has_active_residual() && p.delta != 0.0 {
            Some(2.0 * PI * HBAR_UEV_PS / p.delta.abs() / 20.0)
        } else {
            None
        };
        Ok(Self {
            params: *p,
            generator: Generator::new(p, &hamiltonian),
            options,
            h_max,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn space(&self) -> HilbertSpace {
        self.generator.space
    }

    pub fn max_step(&self) -> Option<f64> {
        self.h_max
    }

    pub fn options(&self) -> &PropagationOptions {
        &self.options
    }

    /// Derivative of `rho` at time `t`, per ps.
    pub fn derivative(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.dim());
        self.generator.rhs(t, rho.as_slice(), out.as_mut_slice());
        out
    }

    /// Evolves an arbitrary (possibly unnormalised) state from `t0` and
    /// hands the state at each output time to `on_sample`.
    ///
    /// Trace and positivity are checked relative to the initial trace.
    pub fn evolve<S>(
        &self,
        t0: f64,
        state: &ComplexMatrix,
        times: &[f64],
        mut on_sample: S,
    ) -> Result<IntegrationStats>
    where
        S: FnMut(usize, f64, &ComplexMatrix) -> Result<()>,
    {
        let d = self.generator.dim;
        if state.dim() != d {
            return Err(Error::DimensionMismatch(
                "state does not match the model space".into(),
            ));
        }
        let trace0 = state.trace().re;
        let scale = trace0.abs().max(state.max_abs());
        let opts = IntegratorOptions {
            rtol: self.options.tolerance,
            atol: (self.options.abs_tolerance * scale).max(f64::MIN_POSITIVE),
            h_max: self.h_max,
            ..Default::default()
        };
        let check_positivity = self.options.check_positivity;
        integrate(
            |t, y, dy| self.generator.rhs(t, y, dy),
            t0,
            state.as_slice(),
            times,
            &opts,
            |k, t, y| {
                let m = ComplexMatrix::from_column_stacked(d, y)?;
                if !m.is_finite() {
                    return Err(Error::NonFinite(t));
                }
                let tr = m.trace().re;
                if (tr - trace0).abs() > ABORT_TRACE_DRIFT * scale {
                    return Err(Error::Invariant {
                        time: t,
                        what: format!("trace drifted from {trace0:.6e} to {tr:.6e}"),
                    });
                }
                if check_positivity && scale > 0.0 {
                    let min_eig = hermitian_min_eigenvalue(&m.hermitian_part())?;
                    if min_eig < ABORT_MIN_EIGENVALUE * scale {
                        return Err(Error::Invariant {
                            time: t,
                            what: format!("minimum eigenvalue {min_eig:.3e}"),
                        });
                    }
                }
                on_sample(k, t, &m)
            },
        )
    }

    /// Propagates `rho0` from `t_grid[0]` and records every observable on the grid.
    /// `snapshot_times` must be a subset of `t_grid`.
    pub fn trajectory(
        &self,
        rho0: &DensityMatrix,
        t_grid: &[f64],
        snapshot_times: &[f64],
    ) -> Result<Trajectory> {
        check_grid(t_grid)?;
        let mut traj = Trajectory::with_capacity(t_grid.len());
        let mut snap = snapshot_times.iter().peekable();
        let p = self.params;
        let space = self.space();
        let stats = self.evolve(t_grid[0], rho0.matrix(), t_grid, |_, t, m| {
            traj.push(t, m, &p);
            while let Some(&&ts) = snap.peek() {
                if ts < t {
                    snap.next();
                } else if ts == t {
                    traj.states.push((
                        t,
                        DensityMatrix {
                            space,
                            matrix: m.clone(),
                        },
                    ));
                    snap.next();
                } else {
                    break;
                }
            }
            Ok(())
        })?;
        traj.stats = stats;
        Ok(traj)
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidAxis("time grid is empty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidAxis(
            "time grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Single-time observables recorded along a propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    CavityPhotonNumber,
    ExcitonPopulation,
    BiexcitonPopulation,
    JointIntensityIxc,
    EffectiveCoupling,
    OutputFlux,
    EmitterIntensity,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::CavityPhotonNumber,
        Observable::ExcitonPopulation,
        Observable::BiexcitonPopulation,
        Observable::JointIntensityIxc,
        Observable::EffectiveCoupling,
        Observable::OutputFlux,
        Observable::EmitterIntensity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::CavityPhotonNumber => "cavity_photon_number",
            Observable::ExcitonPopulation => "exciton_population",
            Observable::BiexcitonPopulation => "biexciton_population",
            Observable::JointIntensityIxc => "joint_intensity_Ixc",
            Observable::EffectiveCoupling => "effective_coupling",
            Observable::OutputFlux => "output_flux",
            Observable::EmitterIntensity => "emitter_intensity",
        }
    }

    pub fn evaluate(self, rho: &ComplexMatrix, p: &SystemParams) -> f64 {
        match self {
            Observable::CavityPhotonNumber => cavity_photon_number(rho),
            Observable::ExcitonPopulation => population(rho, Level::X),
            Observable::BiexcitonPopulation => population(rho, Level::XX),
            Observable::JointIntensityIxc => joint_intensity_ixc(rho),
            Observable::EffectiveCoupling => effective_coupling(rho, p),
            Observable::OutputFlux => output_flux(rho, p),
            Observable::EmitterIntensity => emitter_intensity(rho),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    series: [Vec<f64>; 7],
    /// State snapshots, in time order.
    pub states: Vec<(f64, DensityMatrix)>,
    pub stats: IntegrationStats,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        let mut t = Self::default();
        t.times.reserve(n);
        for s in &mut t.series {
            s.reserve(n);
        }
        t
    }

    fn push(&mut self, t: f64, rho: &ComplexMatrix, p: &SystemParams) {
        self.times.push(t);
        for (k, obs) in Observable::ALL.iter().enumerate() {
            self.series[k].push(obs.evaluate(rho, p));
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self, obs: Observable) -> &[f64] {
        let k = Observable::ALL.iter().position(|o| *o == obs).unwrap();
        &self.series[k]
    }

    /// Value at `t`: exact on grid points, linear interpolation otherwise.
    pub fn sample(&self, obs: Observable, t: f64) -> Option<f64> {
        let s = self.series(obs);
        let idx = self.times.partition_point(|&x| x < t);
        if idx < self.times.len() && (self.times[idx] - t).abs() <= 1e-12 * t.abs().max(1.0) {
            return Some(s[idx]);
        }
        if idx == 0 || idx >= self.times.len() {
            return None;
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let w = (t - t0) / (t1 - t0);
        Some(s[idx - 1] * (1.0 - w) + s[idx] * w)
    }

    pub fn state_at(&self, t: f64) -> Option<&DensityMatrix> {
        self.states.iter().find(|(ts, _)| *ts == t).map(|(_, s)| s)
    }
}

/// Initial condition of a scenario, expressed independently of the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Basis {
        level: Level,
        photons: usize,
    },
    /// Superposition of bare basis states `(level, n, amplitude)`, normalised on use.
    Superposition(Vec<(Level, usize, C64)>),
    Matrix(DensityMatrix),
}

impl InitialState {
    pub fn ground() -> Self {
        InitialState::Basis {
            level: Level::G,
            photons: 0,
        }
    }

    pub fn build(&self, space: HilbertSpace) -> Result<DensityMatrix> {
        match self {
            InitialState::Basis { level, photons } => {
                if *photons > space.fock_cutoff() {
                    return Err(Error::DimensionMismatch(format!(
                        "{photons} photons exceed the cutoff {}",
                        space.fock_cutoff()
                    )));
                }
                Ok(DensityMatrix::basis(space, *level, *photons))
            }
            InitialState::Superposition(parts) => {
                let mut ket = vec![ZERO; space.dim()];
                for (level, n, amp) in parts {
                    if *n > space.fock_cutoff() {
                        return Err(Error::DimensionMismatch(format!(
                            "{n} photons exceed the cutoff {}",
                            space.fock_cutoff()
                        )));
                    }
                    ket[space.index(*level, *n)] += amp;
                }
                DensityMatrix::from_ket(space, &ket)
            }
            InitialState::Matrix(rho) => {
                if rho.space() != space {
                    return Err(Error::DimensionMismatch(
                        "initial matrix has a different cutoff".into(),
                    ));
                }
                Ok(rho.clone())
            }
        }
    }
}

/// A complete propagation problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: SystemParams,
    pub drives: Vec<DriveEnvelope>,
    pub initial: InitialState,
    pub t_grid: Vec<f64>,
    pub options: PropagationOptions,
}

impl Scenario {
    pub fn propagator(&self) -> Result<Propagator> {
        Propagator::new(&self.params, &self.drives, self.options)
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        self.initial.build(self.params.space())
    }

    pub fn with_cutoff(&self, fock_cutoff: usize) -> Self {
        let mut s = self.clone();
        s.params.fock_cutoff = fock_cutoff;
        s
    }

    pub fn run(&self) -> Result<Trajectory> {
        propagate(
            &self.initial_state()?,
            &self.params,
            &self.drives,
            &self.t_grid,
            &self.options,
        )
    }
}

/// Integrates the master equation on `t_grid`, starting at `t_grid[0]`.
pub fn propagate(
    rho0: &DensityMatrix,
    p: &SystemParams,
    drives: &[DriveEnvelope],
    t_grid: &[f64],
    options: &PropagationOptions,
) -> Result<Trajectory> {
    if rho0.space() != p.space() {
        return Err(Error::DimensionMismatch(
            "initial state cutoff differs from the parameters".into(),
        ));
    }
    Propagator::new(p, drives, *options)?.trajectory(rho0, t_grid, &[])
}

/// Runs `scenario` at two cutoffs (concurrently) and returns the largest
/// absolute deviation over all times and observables.
pub fn check_cutoff_convergence(scenario: &Scenario, n1: usize, n2: usize) -> Result<f64> {
    if n2 <= n1 {
        return Err(Error::Config(format!(
            "cutoffs must satisfy n2 > n1, got {n1}, {n2}"
        )));
    }
    let (a, b) = rayon::join(
        || scenario.with_cutoff(n1).run(),
        || scenario.with_cutoff(n2).run(),
    );
    let (a, b) = (a?, b?);
    let mut worst: f64 = 0.0;
    for obs in Observable::ALL {
        for (x, y) in a.series(obs).iter().zip(b.series(obs)) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}
