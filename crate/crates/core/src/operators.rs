//! Units, dense complex matrices and the elementary operators of the
//! quantum-dot ⊗ cavity-mode Hilbert space.
//!
//! Energies are carried in μeV and times in ps throughout the crate; the only
//! bridge between the two is [`PhysConstants::hbar`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Reduced Planck constant in μeV·ps.
pub const HBAR_UEV_PS: f64 = 658.211_956_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    hbar: f64,
}

impl PhysConstants {
    pub const STANDARD: PhysConstants = PhysConstants { hbar: HBAR_UEV_PS };

    /// Energy·time constant in μeV·ps.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Converts an energy in μeV to an angular rate in rad/ps.
    pub fn energy_to_angular_rate(&self, energy_uev: f64) -> f64 {
        energy_uev / self.hbar
    }
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Shorthand for [`PhysConstants::STANDARD`] conversion.
pub fn energy_to_angular_rate(energy_uev: f64) -> f64 {
    PhysConstants::STANDARD.energy_to_angular_rate(energy_uev)
}

/// Dense square complex matrix.
///
/// Storage is column-major (nalgebra), so `as_slice` is exactly the
/// column-stacked vectorisation used by the Liouvillian.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |r, c| if r == c { diag[r] } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, row_major: &[C64]) -> Result<Self> {
        if row_major.len() != dim * dim || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                row_major.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, row_major)))
    }

    /// Inverse of [`ComplexMatrix::as_slice`]: rebuilds from column-stacked entries.
    pub fn from_column_stacked(dim: usize, data: &[C64]) -> Result<Self> {
        if data.len() != dim * dim || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self(DMatrix::from_column_slice(dim, dim, data)))
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    pub fn outer(ket: &[C64], bra: &[C64]) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::DimensionMismatch("outer product lengths".into()));
        }
        Ok(Self::from_fn(ket.len(), |r, c| ket[r] * bra[c].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    /// Column-stacked entries.
    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        self.0.as_mut_slice()
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "matmul")?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "add")?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "sub")?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "commutator")?;
        Ok(Self(&self.0 * &other.0 - &other.0 * &self.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against dim {}",
                v.len(),
                self.dim()
            )));
        }
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for (c, &vc) in v.iter().enumerate() {
            if vc == ZERO {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.0[(r, c)] * vc;
            }
        }
        Ok(out)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖A − A†‖∞` taken elementwise.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Kronecker product; `kron(a, b)[(i·db + k, j·db + l)] = a[(i, j)]·b[(k, l)]`,
/// so the first factor is the slow (major) index, as in [`HilbertSpace`].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for j in 0..da {
        for i in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for l in 0..db {
                for k in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Solves `m·x = rhs` by LU decomposition with partial pivoting.
///
/// A pivot smaller than `1e-13·max|m|` is reported as [`Error::Singular`].
pub fn solve_linear(m: &ComplexMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    let n = m.dim();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} against dim {n}",
            rhs.len()
        )));
    }
    // Row-major working copy keeps the elimination loops contiguous.
    let mut a: Vec<C64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    let mut x = rhs.to_vec();
    let threshold = 1e-13 * m.max_abs().max(f64::MIN_POSITIVE);

    for col in 0..n {
        let (piv_row, piv_abs) =
            (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_abs <= threshold {
            return Err(Error::Singular {
                column: col,
                pivot: piv_abs,
            });
        }
        if piv_row != col {
            for k in 0..n {
                a.swap(col * n + k, piv_row * n + k);
            }
            x.swap(col, piv_row);
        }
        let inv = ONE / a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] * inv;
            if factor == ZERO {
                continue;
            }
            a[r * n + col] = ZERO;
            for k in col + 1..n {
                let v = a[col * n + k];
                a[r * n + k] -= factor * v;
            }
            let xc = x[col];
            x[r] -= factor * xc;
        }
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for k in r + 1..n {
            acc -= a[r * n + k] * x[k];
        }
        x[r] = acc / a[r * n + r];
    }
    Ok(x)
}

/// Smallest eigenvalue of a Hermitian matrix (checked to `1e-10`).
pub fn hermitian_min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let dev = m.hermiticity_error();
    if dev > 1e-10 {
        return Err(Error::NonHermitian(dev));
    }
    let eig = m.hermitian_part().0.symmetric_eigenvalues();
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Quantum-dot level of the G → X → XX ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    G,
    X,
    XX,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::X, Level::XX];

    pub fn ordinal(self) -> usize {
        match self {
            Level::G => 0,
            Level::X => 1,
            Level::XX => 2,
        }
    }

    pub fn from_ordinal(k: usize) -> Option<Level> {
        Level::ALL.get(k).copied()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::G => "G",
            Level::X => "X",
            Level::XX => "XX",
        };
        f.write_str(s)
    }
}

/// Three-level dot ⊗ Fock space truncated at `fock_cutoff` photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    fock_cutoff: usize,
}

impl HilbertSpace {
    pub fn new(fock_cutoff: usize) -> Self {
        Self { fock_cutoff }
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        3 * self.fock_dim()
    }

    /// Basis index, dot-major and Fock-minor.
    pub fn index(&self, level: Level, photons: usize) -> usize {
        debug_assert!(photons <= self.fock_cutoff);
        level.ordinal() * self.fock_dim() + photons
    }

    pub fn decode(&self, index: usize) -> (Level, usize) {
        let level = Level::from_ordinal(index / self.fock_dim()).expect("index out of range");
        (level, index % self.fock_dim())
    }

    pub fn basis_ket(&self, level: Level, photons: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[self.index(level, photons)] = ONE;
        v
    }

    /// `|level, photons⟩⟨level, photons|`.
    pub fn basis_projector(&self, level: Level, photons: usize) -> ComplexMatrix {
        let k = self.index(level, photons);
        let mut m = ComplexMatrix::zeros(self.dim());
        m[(k, k)] = ONE;
        m
    }

    pub fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim())
    }

    /// Cavity annihilation operator on the Fock factor alone.
    pub fn fock_annihilation(&self) -> ComplexMatrix {
        let n = self.fock_dim();
        ComplexMatrix::from_fn(n, |r, c| {
            if c == r + 1 {
                C64::new((c as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|j⟩⟨k|` on the three-level factor alone.
    pub fn qd_transition(&self, j: Level, k: Level) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(3);
        m[(j.ordinal(), k.ordinal())] = ONE;
        m
    }

    /// `1_QD ⊗ a`.
    pub fn annihilation(&self) -> ComplexMatrix {
        kron(&ComplexMatrix::identity(3), &self.fock_annihilation())
    }

    /// `1_QD ⊗ a†`.
    pub fn creation(&self) -> ComplexMatrix {
        self.annihilation().dagger()
    }

    /// `1_QD ⊗ a†a`.
    pub fn number(&self) -> ComplexMatrix {
        let n = self.fock_dim();
        let diag: Vec<f64> = (0..3).flat_map(|_| (0..n).map(|k| k as f64)).collect();
        ComplexMatrix::from_real_diagonal(&diag)
    }

    /// `σ_{j,k} = |j⟩⟨k| ⊗ 1_Fock`.
    pub fn transition(&self, j: Level, k: Level) -> ComplexMatrix {
        kron(
            &self.qd_transition(j, k),
            &ComplexMatrix::identity(self.fock_dim()),
        )
    }

    /// `σ_{j,j}`.
    pub fn projector(&self, j: Level) -> ComplexMatrix {
        self.transition(j, j)
    }
}

/// Convenience free functions mirroring the [`HilbertSpace`] methods.
pub fn annihilation(space: &HilbertSpace) -> ComplexMatrix {
    space.annihilation()
}

pub fn transition(space: &HilbertSpace, j: Level, k: Level) -> ComplexMatrix {
    space.transition(j, k)
}
