//! Envelope fits of `A(t)x(t)` onto `sin(ωt), cos(ωt)`, the preservation
//! classification, and the converse check on the weighted integrals.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::conditions::{
    self, dyadic_windows, predicted_constants, window_trend, LimitEstimate, Thresholds,
    WindowTrend,
};
use crate::error::{LabError, Result};
use crate::integrate::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub window: (f64, f64),
    pub c_sin: f64,
    pub c_cos: f64,
    pub amplitude: f64,
    /// `A·x ≈ amplitude·sin(ωt + phase)`.
    pub phase: f64,
    pub residual_rms: f64,
}

/// Least-squares fit of `values` onto `{sin(ωt), cos(ωt)}`.
pub fn fit_sinusoid(times: &[f64], values: &[f64], omega: f64) -> (f64, f64, f64) {
    let (mut ss, mut sc, mut cc, mut sy, mut cy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in times.iter().zip(values) {
        let (s, c) = (omega * t).sin_cos();
        ss += s * s;
        sc += s * c;
        cc += c * c;
        sy += s * y;
        cy += c * y;
    }
    let det = ss * cc - sc * sc;
    let a = (sy * cc - cy * sc) / det;
    let b = (cy * ss - sy * sc) / det;
    let mut sq = 0.0;
    for (&t, &y) in times.iter().zip(values) {
        let (s, c) = (omega * t).sin_cos();
        sq += (y - a * s - b * c).powi(2);
    }
    (a, b, (sq / times.len() as f64).sqrt())
}

fn window_indices(traj: &Trajectory, window: (f64, f64)) -> Result<(usize, usize)> {
    let (lo, hi) = window;
    let tol = 1e-9 * traj.period();
    if lo < traj.t0 - tol || hi > traj.t_end() + tol || !(hi > lo) {
        return Err(LabError::Precondition(format!(
            "window [{lo}, {hi}] outside [{}, {}]",
            traj.t0,
            traj.t_end()
        )));
    }
    if hi - lo < 10.0 * traj.period() - tol {
        return Err(LabError::Precondition(format!(
            "window [{lo}, {hi}] spans fewer than 10 periods"
        )));
    }
    let a = traj.index_at(lo);
    let b = traj.times.partition_point(|&t| t <= hi + tol) - 1;
    Ok((a, b))
}

fn fit_channel(traj: &Trajectory, window: (f64, f64), values: &[f64]) -> Result<EnvelopeFit> {
    let (a, b) = window_indices(traj, window)?;
    let (c_sin, c_cos, residual_rms) = fit_sinusoid(&traj.times[a..=b], &values[a..=b], traj.omega);
    Ok(EnvelopeFit {
        window,
        c_sin,
        c_cos,
        amplitude: c_sin.hypot(c_cos),
        phase: c_cos.atan2(c_sin),
        residual_rms,
    })
}

/// Fit `A(t)x(t)` over `window`, which must cover at least 10 periods.
pub fn envelope_fit(traj: &Trajectory, window: (f64, f64)) -> Result<EnvelopeFit> {
    let ax: Vec<f64> = (0..traj.len()).map(|i| traj.a(i) * traj.x[i]).collect();
    fit_channel(traj, window, &ax)
}

/// Fit `A(t)W(t) = C₁A U₂ + C₂A V₂` over `window`.
pub fn w_fit(traj: &Trajectory, window: (f64, f64)) -> Result<EnvelopeFit> {
    let aw: Vec<f64> = (0..traj.len())
        .map(|i| conditions::w_from_normalized(traj, i))
        .collect();
    fit_channel(traj, window, &aw)
}

/// Smallest representative of `a - b` modulo `2π`.
pub fn phase_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        2.0 * PI - d
    } else {
        d
    }
}

/// The last two blocks of length `max(10 periods, span/4)`.
pub fn default_windows(traj: &Trajectory) -> [(f64, f64); 2] {
    let end = traj.t_end();
    let len = (10.0 * traj.period()).max(0.25 * (end - traj.t0));
    [(end - 2.0 * len, end - len), (end - len, end)]
}

pub const AMPLITUDE_TOLERANCE: f64 = 0.05;
pub const PHASE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct PreservationReport {
    /// Window trend of `A|y₂|`.
    pub weighted_y2: WindowTrend,
    pub fits: [EnvelopeFit; 2],
    pub amplitude_rel_diff: f64,
    pub phase_diff: f64,
    pub limits_converged: bool,
    /// `(c₁, c₂)` predicted from the limit estimate, when it converged.
    pub predicted: Option<(f64, f64)>,
    /// Sinusoidal fit of `A·W` over the last window.
    pub observed_w: Option<(f64, f64)>,
    pub preserved: bool,
}

/// Classify whether `A(t)x(t)` settles to a fixed sinusoid.
pub fn preservation_check(
    traj: &Trajectory,
    est: &LimitEstimate,
    windows: Option<[(f64, f64); 2]>,
) -> Result<PreservationReport> {
    let th = Thresholds::default();
    let ay2: Vec<f64> = (0..traj.len()).map(|i| traj.a(i) * traj.y2[i]).collect();
    let weighted_y2 = window_trend(traj, &dyadic_windows(traj), &ay2, &th);
    let windows = windows.unwrap_or_else(|| default_windows(traj));
    let f1 = envelope_fit(traj, windows[0])?;
    let f2 = envelope_fit(traj, windows[1])?;
    let scale = f1.amplitude.max(f2.amplitude);
    let (amplitude_rel_diff, phase_diff) = if scale <= 1e-300 {
        (0.0, 0.0)
    } else {
        (
            (f1.amplitude - f2.amplitude).abs() / f1.amplitude.max(1e-300),
            phase_difference(f1.phase, f2.phase),
        )
    };
    let predicted = predicted_constants(est, traj.omega).ok();
    let observed_w = match predicted {
        Some(_) => {
            let w = w_fit(traj, windows[1])?;
            Some((w.c_sin, w.c_cos))
        }
        None => None,
    };
    let preserved = weighted_y2.verdict == conditions::Verdict::Holds
        && amplitude_rel_diff < AMPLITUDE_TOLERANCE
        && phase_diff < PHASE_TOLERANCE
        && est.converged;
    Ok(PreservationReport {
        weighted_y2,
        fits: [f1, f2],
        amplitude_rel_diff,
        phase_diff,
        limits_converged: est.converged,
        predicted,
        observed_w,
        preserved,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConverseReport {
    pub checkpoints: Vec<f64>,
    pub sin_increments: Vec<f64>,
    pub cos_increments: Vec<f64>,
    pub sin_converged: bool,
    pub cos_converged: bool,
}

/// Geometric-mean shrink factor per doubling accepted as convergence.
pub const CONVERSE_RATIO: f64 = 0.8;

/// Examine `∫A sin(ωt) y₂` and `∫A cos(ωt) y₂` between dyadic checkpoints.
pub fn converse_check(traj: &Trajectory) -> Result<ConverseReport> {
    let w = traj.weighted.as_ref().ok_or_else(|| {
        LabError::Precondition("trajectory carries no weighted channels".into())
    })?;
    Ok(converse_from_running(traj, &w.is_run, &w.ic_run))
}

/// The converse test on explicit running integrals sampled on `traj.times`.
pub fn converse_from_running(traj: &Trajectory, sin_run: &[f64], cos_run: &[f64]) -> ConverseReport {
    let windows = dyadic_windows(traj);
    let increments = |run: &[f64]| -> Vec<f64> {
        windows
            .iter()
            .map(|&(a, b)| run[a..=b].iter().fold(0.0, |m: f64, v| m.max((v - run[a]).abs())))
            .collect()
    };
    let sin_increments = increments(sin_run);
    let cos_increments = increments(cos_run);
    let scale = sin_run
        .iter()
        .chain(cos_run)
        .fold(0.0, |m: f64, v| m.max(v.abs()))
        .max(1e-300);
    let converged = |d: &[f64]| -> bool {
        if d.last().is_some_and(|&v| v <= 1e-13 * scale) {
            return true;
        }
        if d.len() < 4 {
            return false;
        }
        let last = d[d.len() - 1];
        let before = d[d.len() - 4];
        before > 0.0 && (last / before).powf(1.0 / 3.0) <= CONVERSE_RATIO
    };
    ConverseReport {
        checkpoints: windows.iter().map(|&(a, _)| traj.times[a]).collect(),
        sin_converged: converged(&sin_increments),
        cos_converged: converged(&cos_increments),
        sin_increments,
        cos_increments,
    }
}

pub fn write_fits_csv<W: Write>(
    mut out: W,
    scenario: &str,
    fits: &[EnvelopeFit],
) -> std::io::Result<()> {
    writeln!(out, "scenario,window_lo,window_hi,c_sin,c_cos,amplitude,phase,residual_rms")?;
    for f in fits {
        writeln!(
            out,
            "{scenario},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            f.window.0, f.window.1, f.c_sin, f.c_cos, f.amplitude, f.phase, f.residual_rms
        )?;
    }
    Ok(())
}
