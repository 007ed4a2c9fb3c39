//! Shared analysis helpers and independent oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const HBAR: f64 = 658.2119569;

/// Centred moving average over `2·half + 1` samples, shrinking at the edges.
pub fn smooth(x: &[f64], half: usize) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (k + half).min(x.len() - 1);
            x[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Interior strict-left / non-strict-right local maxima.
pub fn local_maxima(x: &[f64]) -> Vec<usize> {
    (1..x.len().saturating_sub(1))
        .filter(|&k| x[k] > x[k - 1] && x[k] >= x[k + 1])
        .collect()
}

pub fn local_minima(x: &[f64]) -> Vec<usize> {
    (1..x.len().saturating_sub(1))
        .filter(|&k| x[k] < x[k - 1] && x[k] <= x[k + 1])
        .collect()
}

/// Half-width in samples of a window spanning one period on a uniform grid.
pub fn half_window(period: f64, step: f64) -> usize {
    ((period / step) / 2.0).round() as usize
}

/// Amplitude of the `cos/sin(ω t)` component of `x − smooth(x)` on `[t0, t1]`.
pub fn ripple_amplitude(t: &[f64], x: &[f64], omega: f64, half: usize, t0: f64, t1: f64) -> f64 {
    let trend = smooth(x, half);
    let (mut re, mut im, mut n) = (0.0, 0.0, 0.0);
    for k in half..x.len().saturating_sub(half) {
        if t[k] < t0 || t[k] > t1 {
            continue;
        }
        let r = x[k] - trend[k];
        re += r * (omega * t[k]).cos();
        im += r * (omega * t[k]).sin();
        n += 1.0;
    }
    2.0 * (re * re + im * im).sqrt() / n
}

/// Operators of the toy ladder ⊗ Fock space built directly from index
/// formulas, independent of the library's operator code.
pub struct ToySpace {
    pub n: usize,
}

impl ToySpace {
    pub fn dim(&self) -> usize {
        3 * (self.n + 1)
    }

    fn idx(&self, level: usize, photons: usize) -> usize {
        level * (self.n + 1) + photons
    }

    pub fn a(&self) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for l in 0..3 {
            for k in 1..=self.n {
                m[(self.idx(l, k - 1), self.idx(l, k))] = Complex64::new((k as f64).sqrt(), 0.0);
            }
        }
        m
    }

    /// `|j⟩⟨k| ⊗ 1` with levels numbered G = 0, X = 1, XX = 2.
    pub fn sigma(&self, j: usize, k: usize) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for p in 0..=self.n {
            m[(self.idx(j, p), self.idx(k, p))] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn ket(&self, level: usize, photons: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[self.idx(level, photons)] = Complex64::new(1.0, 0.0);
        v
    }
}

/// Right-hand side `(i[ρ,H] − ½Σ(L†Lρ + ρL†L − 2LρL†) + ℒ_d)/ħ` written out
/// with plain matrix products.
pub fn toy_rhs(rho: &CMat, h: &CMat, ls: &[CMat], dephasing: &[(CMat, CMat, f64)]) -> CMat {
    let i = Complex64::new(0.0, 1.0);
    let mut out = (rho * h - h * rho) * i;
    for l in ls {
        let ld = l.adjoint();
        out -= (&ld * l * rho + rho * &ld * l - l * rho * &ld * Complex64::new(2.0, 0.0))
            * Complex64::new(0.5, 0.0);
    }
    for (upper, lower, gamma) in dephasing {
        out -= (upper * rho * lower + lower * rho * upper) * Complex64::new(*gamma, 0.0);
    }
    out / Complex64::new(HBAR, 0.0)
}

/// Generator on column-stacked vectors, assembled column by column.
pub fn toy_superoperator(h: &CMat, ls: &[CMat], dephasing: &[(CMat, CMat, f64)]) -> CMat {
    let d = h.nrows();
    let mut s = CMat::zeros(d * d, d * d);
    for col in 0..d {
        for row in 0..d {
            let mut e = CMat::zeros(d, d);
            e[(row, col)] = Complex64::new(1.0, 0.0);
            let out = toy_rhs(&e, h, ls, dephasing);
            let k = col * d + row;
            for c in 0..d {
                for r in 0..d {
                    s[(c * d + r, k)] = out[(r, c)];
                }
            }
        }
    }
    s
}

pub fn vec_of(m: &CMat) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

pub fn mat_of(v: &nalgebra::DVector<Complex64>, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// `exp(S·t)·vec(ρ)` by dense matrix exponential.
pub fn expm_apply(s: &CMat, t: f64, rho: &CMat) -> CMat {
    let d = rho.nrows();
    let e = (s * Complex64::new(t, 0.0)).exp();
    mat_of(&(e * vec_of(rho)), d)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}
