//! Dormand–Prince 5(4) integrator with adaptive step control and
//! fourth-order dense output, specialised to flat complex state vectors.
//!
//! Output times are served by interpolation inside accepted steps, so the
//! step sequence does not depend on how densely the caller samples.

use crate::error::{Error, Result};
use crate::operators::{C64, ZERO};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output (Hairer & Wanner, DOPRI5 continuous extension).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-15,
            h_max: None,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub max_step: f64,
    /// Sum over accepted steps of the largest absolute local error estimate.
    pub error_estimate: f64,
}

impl IntegrationStats {
    pub fn merge(&mut self, other: &IntegrationStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.rhs_evals += other.rhs_evals;
        self.max_step = self.max_step.max(other.max_step);
        self.error_estimate += other.error_estimate;
    }
}

fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0`, calling `sample(k, t, y)` for each
/// output time `t_out[k]` (non-decreasing, all `>= t0`).
pub fn integrate<F, S>(
    mut f: F,
    t0: f64,
    y0: &[C64],
    t_out: &[f64],
    opts: &IntegratorOptions,
    mut sample: S,
) -> Result<IntegrationStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    S: FnMut(usize, f64, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let mut stats = IntegrationStats::default();
    if t_out.is_empty() {
        return Ok(stats);
    }
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out[0] < t0 {
        return Err(Error::Integration(
            "output times must be non-decreasing and not precede the start".into(),
        ));
    }
    let t_end = *t_out.last().unwrap();

    let mut y = y0.to_vec();
    let mut t = t0;
    let mut next = 0;
    while next < t_out.len() && t_out[next] == t0 {
        sample(next, t0, &y)?;
        next += 1;
    }
    if next == t_out.len() {
        return Ok(stats);
    }

    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut k3 = vec![ZERO; n];
    let mut k4 = vec![ZERO; n];
    let mut k5 = vec![ZERO; n];
    let mut k6 = vec![ZERO; n];
    let mut k7 = vec![ZERO; n];
    let mut ytmp = vec![ZERO; n];
    let mut ynew = vec![ZERO; n];
    let mut interp = vec![ZERO; n];
    let mut rcont5 = vec![ZERO; n];

    f(t, &y, &mut k1);
    stats.rhs_evals += 1;

    let h_cap = opts.h_max.unwrap_or(f64::INFINITY).min(t_end - t0);
    let mut h = initial_step(&mut f, t, &y, &k1, opts, h_cap, &mut stats);
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while next < t_out.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration(format!(
                "step budget of {} exhausted at t = {t}",
                opts.max_steps
            )));
        }
        let remaining = t_end - t;
        let mut final_step = false;
        if h >= remaining {
            h = remaining;
            final_step = true;
        }
        if !h.is_finite() {
            return Err(Error::NonFinite(t));
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration(format!(
                "step size underflow at t = {t}"
            )));
        }

        axpy_into(&mut ytmp, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &ytmp, &mut k2);
        axpy_into(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &ytmp, &mut k3);
        axpy_into(&mut ytmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * h, &ytmp, &mut k4);
        axpy_into(
            &mut ytmp,
            &y,
            h,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        );
        f(t + C5 * h, &ytmp, &mut k5);
        axpy_into(
            &mut ytmp,
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        f(t + h, &ytmp, &mut k6);
        axpy_into(
            &mut ynew,
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        f(t + h, &ynew, &mut k7);
        stats.rhs_evals += 6;

        let mut err_norm: f64 = 0.0;
        let mut err_abs: f64 = 0.0;
        for i in 0..n {
            let e =
                (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            let en = e.norm();
            if !en.is_finite() || !ynew[i].re.is_finite() || !ynew[i].im.is_finite() {
                return Err(Error::NonFinite(t));
            }
            err_abs = err_abs.max(en);
            err_norm = err_norm.max(en / sc);
        }

        if err_norm <= 1.0 {
            // PI step-size control with Hairer's constants.
            let fac = (err_norm.max(1e-10).powf(0.17) * fac_old.powf(-0.04) / 0.9).clamp(0.1, 5.0);
            fac_old = err_norm.max(1e-4);
            let t_new = if final_step { t_end } else { t + h };

            if next < t_out.len() && t_out[next] <= t_new {
                for i in 0..n {
                    rcont5[i] = (k1[i] * D1
                        + k3[i] * D3
                        + k4[i] * D4
                        + k5[i] * D5
                        + k6[i] * D6
                        + k7[i] * D7)
                        * h;
                }
                while next < t_out.len() && t_out[next] <= t_new {
                    let tq = t_out[next];
                    if tq == t_new {
                        sample(next, tq, &ynew)?;
                    } else {
                        let theta = (tq - t) / h;
                        let theta1 = 1.0 - theta;
                        for i in 0..n {
                            let r1 = y[i];
                            let r2 = ynew[i] - y[i];
                            let r3 = k1[i] * h - r2;
                            let r4 = r2 - k7[i] * h - r3;
                            interp[i] = r1
                                + (r2 + (r3 + (r4 + rcont5[i] * theta1) * theta) * theta1) * theta;
                        }
                        sample(next, tq, &interp)?;
                    }
                    next += 1;
                }
            }

            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            stats.accepted += 1;
            stats.max_step = stats.max_step.max(h);
            stats.error_estimate += err_abs;

            let mut h_next = h / fac;
            if last_rejected {
                h_next = h_next.min(h);
            }
            if let Some(cap) = opts.h_max {
                h_next = h_next.min(cap);
            }
            h = h_next;
            last_rejected = false;
        } else {
            let fac = (err_norm.powf(0.2) / 0.9).min(10.0);
            h /= fac;
            stats.rejected += 1;
            last_rejected = true;
        }
    }
    Ok(stats)
}

fn initial_step<F>(
    f: &mut F,
    t: f64,
    y: &[C64],
    f0: &[C64],
    opts: &IntegratorOptions,
    h_cap: f64,
    stats: &mut IntegrationStats,
) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let scale = |i: usize| opts.atol + opts.rtol * y[i].norm();
    let d0 = (0..y.len())
        .map(|i| y[i].norm() / scale(i))
        .fold(0.0, f64::max);
    let d1 = (0..y.len())
        .map(|i| f0[i].norm() / scale(i))
        .fold(0.0, f64::max);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(h_cap);

    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![ZERO; y.len()];
    f(t + h0, &y1, &mut f1);
    stats.rhs_evals += 1;
    let d2 = (0..y.len())
        .map(|i| (f1[i] - f0[i]).norm() / scale(i))
        .fold(0.0, f64::max)
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(h_cap)
}
