//! Dormand-Prince 5(4) integrator with PI step control and continuous output.

use crate::error::{LabError, Result};

/// A first-order system `y' = F(t, y)` of fixed dimension.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);

    /// Called after every accepted step; returning `Some(reason)` aborts the run.
    fn guard(&self, _t: f64, _y: &[f64; N]) -> Option<String> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            rtol: tol,
            atol: tol,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }

    pub fn h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Integrate `sys` from `(t0, y0)` and return the state at each of `outputs`
/// (nondecreasing, all `>= t0`). Values between steps come from the
/// fourth-order continuous extension of the pair.
pub fn solve_dense<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    opts: SolverOptions,
) -> Result<(Vec<[f64; N]>, SolverStats)> {
    let mut stats = SolverStats::default();
    let mut out = Vec::with_capacity(outputs.len());
    if outputs.is_empty() {
        return Ok((out, stats));
    }
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs[0] < t0 {
        return Err(LabError::Precondition(
            "output times must be nondecreasing and not precede the start time".into(),
        ));
    }
    let t_end = *outputs.last().unwrap();
    let mut next = 0;
    while next < outputs.len() && outputs[next] == t0 {
        out.push(y0);
        next += 1;
    }
    if next == outputs.len() {
        return Ok((out, stats));
    }

    let span = t_end - t0;
    let h_max = opts.h_max.min(span);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    sys.rhs(t, &y, &mut k1);
    stats.evaluations += 1;
    let mut h = initial_step(sys, t, &y, &k1, span, &opts, &mut stats).min(h_max);

    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - BETA * 0.75;
    const SAFE: f64 = 0.9;
    const FAC_MIN: f64 = 0.2;
    const FAC_MAX: f64 = 10.0;
    let mut last_rejected = false;

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        ([0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N]);

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(LabError::MaxSteps { t });
        }
        let mut last = false;
        if t + 1.01 * h >= t_end {
            h = t_end - t;
            last = true;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(LabError::StepUnderflow { t, h });
        }

        let y2 = axpy(&y, h, &[(A21, &k1)]);
        sys.rhs(t + C2 * h, &y2, &mut k2);
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        sys.rhs(t + C3 * h, &y3, &mut k3);
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        sys.rhs(t + C4 * h, &y4, &mut k4);
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        sys.rhs(t + C5 * h, &y5, &mut k5);
        let y6 = axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let t_new = if last { t_end } else { t + h };
        sys.rhs(t_new, &y6, &mut k6);
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        sys.rhs(t_new, &y_new, &mut k7);
        stats.evaluations += 6;

        let mut err_sq = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc).powi(2);
        }
        let err = (err_sq / N as f64).sqrt();
        if !err.is_finite() {
            h *= FAC_MIN;
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            stats.accepted += 1;
            // continuous extension coefficients for (t, t + h)
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - h * k7[i] - bspl;
                r[4][i] = h
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            while next < outputs.len() && outputs[next] <= t_new {
                let theta = if last && outputs[next] == t_end {
                    1.0
                } else {
                    (outputs[next] - t) / h
                };
                let theta1 = 1.0 - theta;
                let mut v = [0.0; N];
                for i in 0..N {
                    v[i] = r[0][i]
                        + theta
                            * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
                }
                if theta == 1.0 {
                    v = y_new;
                }
                out.push(v);
                next += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            if let Some(reason) = sys.guard(t, &y) {
                return Err(LabError::Aborted { t, reason });
            }
            if last || next == outputs.len() {
                break;
            }
            let fac_old = err.max(1e-4);
            let fac = (fac11 / fac_old.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = (h / fac).min(h_max);
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
        }
    }
    Ok((out, stats))
}

fn initial_step<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    span: f64,
    opts: &SolverOptions,
    stats: &mut SolverStats,
) -> f64 {
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(span);
    let y1 = axpy(y, h, &[(1.0, f0)]);
    let mut f1 = [0.0; N];
    sys.rhs(t + h, &y1, &mut f1);
    stats.evaluations += 1;
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(span)
}
