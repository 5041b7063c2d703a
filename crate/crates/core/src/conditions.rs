//! Leading-order kernels, the oscillation-matrix algebra, limit estimates for
//! the weighted integrals, and three-valued verdicts on the decay statements.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::integrate::Trajectory;
use crate::quad;

/// `L₁, L₂, L₃` and `F` as functions of `τ = t - s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingKernels {
    pub omega: f64,
}

impl LeadingKernels {
    pub fn new(omega: f64) -> Self {
        LeadingKernels { omega }
    }

    pub fn l1(&self, tau: f64) -> f64 {
        let (s, c) = (self.omega * tau).sin_cos();
        self.omega * s + c
    }

    pub fn l2(&self, tau: f64) -> f64 {
        let w = self.omega;
        let (s, c) = (w * tau).sin_cos();
        w * w * c - w * s
    }

    pub fn l3(&self, tau: f64) -> f64 {
        let w = self.omega;
        let (s, c) = (w * tau).sin_cos();
        (w * w * w - w) * s + 2.0 * w * w * c
    }

    /// Antiderivative of `L₁` in `s`.
    pub fn f(&self, tau: f64) -> f64 {
        let (s, c) = (self.omega * tau).sin_cos();
        c - s / self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationMatrix {
    pub m: [[f64; 2]; 2],
    pub det: f64,
}

impl OscillationMatrix {
    pub fn apply(&self, u: f64, v: f64) -> (f64, f64) {
        (
            self.m[0][0] * u + self.m[0][1] * v,
            self.m[1][0] * u + self.m[1][1] * v,
        )
    }
}

/// `M(t)` mapping `(U, V)` to `(∫E L₁ y, ∫E L₂ y)`.
pub fn oscillation_matrix(omega: f64, t: f64) -> OscillationMatrix {
    let w = omega;
    let (s, c) = (w * t).sin_cos();
    let m = [[w * s + c, s - w * c], [w * w * c - w * s, w * w * s + w * c]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    OscillationMatrix { m, det }
}

/// The constant matrix `[[ω², ω], [-ω, ω²]]` and its determinant `ω²(ω²+1)`.
pub fn forcing_transform(omega: f64) -> Result<([[f64; 2]; 2], f64)> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(LabError::Precondition(format!("omega must be nonzero, got {omega}")));
    }
    let w2 = omega * omega;
    Ok(([[w2, omega], [-omega, w2]], w2 * (w2 + 1.0)))
}

pub fn forcing_transform_det(omega: f64) -> Result<f64> {
    forcing_transform(omega).map(|(_, det)| det)
}

/// `(C₁(t), C₂(t))`, so that `W = C₁U₂ + C₂V₂`.
pub fn c_coefficients(omega: f64, t: f64) -> (f64, f64) {
    let w = omega;
    let (s, c) = (w * t).sin_cos();
    let a = w * w * w - w;
    let b = 2.0 * w * w;
    (a * s + b * c, b * s - a * c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub ic: f64,
    pub is: f64,
    pub tail_bound: f64,
    pub converged: bool,
}

/// Final values of the running weighted integrals, with the growth of
/// `∫A|y₂|` over the last decade of elapsed time as the tail bound.
pub fn estimate_limits(traj: &Trajectory) -> Result<LimitEstimate> {
    let w = traj.weighted.as_ref().ok_or_else(|| {
        LabError::Precondition("trajectory carries no weighted channels".into())
    })?;
    let last = traj.len() - 1;
    let ic = w.ic_run[last];
    let is = w.is_run[last];
    let split = traj.index_at(traj.t0 + 0.1 * (traj.t_end() - traj.t0));
    let tail_bound = (w.abs_run[last] - w.abs_run[split]).max(0.0);
    let converged = tail_bound < 0.01 * ic.abs().max(is.abs()).max(1.0);
    Ok(LimitEstimate {
        ic,
        is,
        tail_bound,
        converged,
    })
}

/// `c₁ = (ω³-ω)I_c + 2ω²I_s`, `c₂ = 2ω²I_c - (ω³-ω)I_s`.
pub fn predicted_constants(est: &LimitEstimate, omega: f64) -> Result<(f64, f64)> {
    if !est.converged {
        return Err(LabError::NotConverged {
            tail_bound: est.tail_bound,
        });
    }
    Ok(constants_from_limits(est.ic, est.is, omega))
}

pub fn constants_from_limits(ic: f64, is: f64, omega: f64) -> (f64, f64) {
    let a = omega.powi(3) - omega;
    let b = 2.0 * omega * omega;
    (a * ic + b * is, b * ic - a * is)
}

/// `A(t)W(t) = ∫A(s)L₃(t-s)y₂(s)ds` at grid index `i`, by Simpson on the trajectory grid.
pub fn w_direct(traj: &Trajectory, i: usize) -> f64 {
    let lk = LeadingKernels::new(traj.omega);
    let t = traj.times[i];
    let vals: Vec<f64> = (0..=i)
        .map(|j| traj.a(j) * lk.l3(t - traj.times[j]) * traj.y2[j])
        .collect();
    quad::simpson(&vals, traj.spacing())
}

/// `A(t)W(t) = C₁(t)A U₂ + C₂(t)A V₂` at grid index `i`.
pub fn w_from_normalized(traj: &Trajectory, i: usize) -> f64 {
    let (c1, c2) = c_coefficients(traj.omega, traj.times[i]);
    traj.a(i) * (c1 * traj.u2[i] + c2 * traj.v2[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Statement {
    A,
    B,
    C,
    D,
    S,
    T,
}

impl Statement {
    pub const ALL: [Statement; 6] = [
        Statement::A,
        Statement::B,
        Statement::C,
        Statement::D,
        Statement::S,
        Statement::T,
    ];

    /// The statement this one is claimed equivalent to.
    pub fn partner(&self) -> Statement {
        match self {
            Statement::A => Statement::B,
            Statement::B => Statement::A,
            Statement::C => Statement::D,
            Statement::D => Statement::C,
            Statement::S => Statement::T,
            Statement::T => Statement::S,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn is_definite(&self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }

    /// Holds and fails against each other.
    pub fn contradicts(&self, other: &Verdict) -> bool {
        self.is_definite() && other.is_definite() && self != other
    }

    /// Conjunction over channels: any failure fails, all holding holds.
    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Holds;
        for v in verdicts {
            match v {
                Verdict::Fails => return Verdict::Fails,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Holds => {}
            }
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Thresholds of the dyadic window test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Holds when the final window sup is below this fraction of the first.
    pub converge_ratio: f64,
    /// Fails when the final window sup stays above this fraction of the first.
    pub diverge_ratio: f64,
    /// ...and the log-log slope of the window sups is at least this.
    pub flat_slope: f64,
    pub min_windows: usize,
    /// Relative slack allowed when checking that window sups never increase.
    pub monotone_slack: f64,
    /// Minimum horizon, in oscillation periods past `t0`.
    pub min_periods: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            converge_ratio: 0.1,
            diverge_ratio: 0.5,
            flat_slope: -0.05,
            min_windows: 3,
            monotone_slack: 1e-2,
            min_periods: 20.0,
        }
    }
}

/// Dyadic windows `[τ/2, τ]` in elapsed time, built backward from the end of
/// the trajectory while the lower edge is at least one period. Returned as
/// index ranges in increasing time.
pub fn dyadic_windows(traj: &Trajectory) -> Vec<(usize, usize)> {
    let span = traj.t_end() - traj.t0;
    let period = traj.period();
    let mut out = Vec::new();
    let mut hi = span;
    while hi / 2.0 >= period {
        let lo = hi / 2.0;
        let a = traj.index_at(traj.t0 + lo);
        let b = traj.index_at(traj.t0 + hi).min(traj.len() - 1);
        out.push((a, b));
        hi = lo;
    }
    out.reverse();
    out
}

/// Window sups of a channel and the decay trend read from them.
#[derive(Debug, Clone, Serialize)]
pub struct WindowTrend {
    pub window_ends: Vec<f64>,
    pub sups: Vec<f64>,
    pub slope: f64,
    pub verdict: Verdict,
}

impl WindowTrend {
    pub fn first(&self) -> f64 {
        self.sups.first().copied().unwrap_or(0.0)
    }

    pub fn last(&self) -> f64 {
        self.sups.last().copied().unwrap_or(0.0)
    }
}

pub fn window_trend(
    traj: &Trajectory,
    windows: &[(usize, usize)],
    values: &[f64],
    th: &Thresholds,
) -> WindowTrend {
    let sups: Vec<f64> = windows
        .iter()
        .map(|&(a, b)| values[a..=b].iter().fold(0.0, |m: f64, v| m.max(v.abs())))
        .collect();
    let window_ends: Vec<f64> = windows.iter().map(|&(_, b)| traj.times[b]).collect();
    let mids: Vec<f64> = windows
        .iter()
        .map(|&(a, b)| 0.5 * (traj.times[a] + traj.times[b]) - traj.t0)
        .collect();
    classify(sups, window_ends, &mids, th)
}

fn classify(mut sups: Vec<f64>, window_ends: Vec<f64>, mids: &[f64], th: &Thresholds) -> WindowTrend {
    // subnormal leftovers of an underflowed channel count as zero
    for v in sups.iter_mut() {
        if *v < 1e-300 {
            *v = 0.0;
        }
    }
    let slope = loglog_slope(mids, &sups);
    let verdict = if sups.iter().any(|v| !v.is_finite()) {
        Verdict::Fails
    } else if sups.iter().all(|&v| v == 0.0) && !sups.is_empty() {
        Verdict::Holds
    } else if sups.len() < th.min_windows {
        Verdict::Inconclusive
    } else {
        let first = sups[0];
        let last = sups[sups.len() - 1];
        let monotone = sups
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + th.monotone_slack));
        if monotone && last < th.converge_ratio * first {
            Verdict::Holds
        } else if last > th.diverge_ratio * first && slope >= th.flat_slope {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        }
    };
    WindowTrend {
        window_ends,
        sups,
        slope,
        verdict,
    }
}

/// Least-squares slope of `ln y` against `ln x` (zeros floored at 1e-300).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.max(1e-300).ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub statement: Statement,
    pub result: Verdict,
    pub evidence: BTreeMap<String, f64>,
}

impl ConditionVerdict {
    pub fn evidence_json(&self) -> String {
        serde_json::to_string(&self.evidence).expect("finite evidence map serializes")
    }
}

fn statement_channels(traj: &Trajectory, statement: Statement) -> Vec<(&'static str, Vec<f64>)> {
    match statement {
        Statement::A => {
            let (i1, i2): (Vec<f64>, Vec<f64>) = (0..traj.len())
                .map(|i| oscillation_matrix(traj.omega, traj.times[i]).apply(traj.u1[i], traj.v1[i]))
                .unzip();
            vec![("y1", traj.y1.clone()), ("I1", i1), ("I2", i2)]
        }
        Statement::B | Statement::D => vec![("x", traj.x.clone()), ("dx", traj.dx.clone())],
        Statement::C => vec![
            ("y1", traj.y1.clone()),
            ("U1", traj.u1.clone()),
            ("V1", traj.v1.clone()),
        ],
        Statement::S => vec![("U1", traj.u1.clone()), ("V1", traj.v1.clone())],
        Statement::T => vec![("Uf", traj.uf.clone()), ("Vf", traj.vf.clone())],
    }
}

/// Window-test every statement on the trajectory.
pub fn statement_verdicts(traj: &Trajectory, th: &Thresholds) -> Vec<ConditionVerdict> {
    let periods = (traj.t_end() - traj.t0) / traj.period();
    let windows = dyadic_windows(traj);
    Statement::ALL
        .iter()
        .map(|&statement| {
            let mut evidence = BTreeMap::new();
            evidence.insert("periods".to_string(), periods);
            evidence.insert("windows".to_string(), windows.len() as f64);
            if periods < th.min_periods {
                return ConditionVerdict {
                    statement,
                    result: Verdict::Inconclusive,
                    evidence,
                };
            }
            let mut results = Vec::new();
            for (name, values) in statement_channels(traj, statement) {
                let trend = window_trend(traj, &windows, &values, th);
                evidence.insert(format!("{name}.first_sup"), trend.first());
                evidence.insert(format!("{name}.final_sup"), trend.last());
                evidence.insert(format!("{name}.slope"), trend.slope);
                results.push(trend.verdict);
            }
            ConditionVerdict {
                statement,
                result: Verdict::all(results),
                evidence,
            }
        })
        .collect()
}

/// Pairs of statements whose verdicts contradict a claimed equivalence.
pub fn contradictions(verdicts: &[ConditionVerdict]) -> Vec<(Statement, Statement)> {
    let get = |s: Statement| verdicts.iter().find(|v| v.statement == s).map(|v| v.result);
    [(Statement::A, Statement::B), (Statement::C, Statement::D), (Statement::S, Statement::T)]
        .into_iter()
        .filter(|&(a, b)| match (get(a), get(b)) {
            (Some(x), Some(y)) => x.contradicts(&y),
            _ => false,
        })
        .collect()
}

pub fn write_verdicts_csv<W: Write>(
    mut out: W,
    scenario: &str,
    verdicts: &[ConditionVerdict],
) -> std::io::Result<()> {
    writeln!(out, "scenario,statement,result,evidence_json")?;
    for v in verdicts {
        let json = v.evidence_json().replace('"', "\"\"");
        writeln!(out, "{scenario},{},{},\"{json}\"", v.statement, v.result)?;
    }
    Ok(())
}
