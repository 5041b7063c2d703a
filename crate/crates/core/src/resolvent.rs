//! Green's function of `u'' + (ω²+q)u = 0`, the resolvent `R = E·G` of the
//! damped equation, its partial derivatives and the kernels built from them.

use std::io::Write;

use serde::Serialize;

use crate::coeffs::{tail_q, default_tail_horizon, DampingFamily};
use crate::conditions::{loglog_slope, LeadingKernels};
use crate::error::{LabError, Result};
use crate::ode::{solve_dense, OdeSystem, SolverOptions};
use crate::quad::{self, GaussLegendre};

/// Tolerance of every Green's function integration.
pub const GREEN_TOL: f64 = 1e-12;

/// `G`, `∂G/∂t`, `∂G/∂s` and `∂²G/∂t∂s` at one `(t, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenState {
    pub g: f64,
    pub g_t: f64,
    pub g_s: f64,
    pub g_ts: f64,
}

struct Variational<'a> {
    omega: f64,
    family: &'a DampingFamily,
}

// G and ∂G/∂s solve the same equation in t, launched from (0, 1) and (-1, 0).
impl OdeSystem<4> for Variational<'_> {
    fn rhs(&self, t: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let k = self.omega * self.omega + self.family.q(t);
        dy[0] = y[1];
        dy[1] = -k * y[0];
        dy[2] = y[3];
        dy[3] = -k * y[2];
    }
}

fn check_times(family: &DampingFamily, omega: f64, s: f64, t_grid: &[f64]) -> Result<()> {
    if !(omega > 0.0) {
        return Err(LabError::Domain(format!("omega must be positive, got {omega}")));
    }
    if s < family.t0() {
        return Err(LabError::Domain(format!("s = {s} precedes t0 = {}", family.t0())));
    }
    if t_grid.iter().any(|&t| t < s) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(LabError::Precondition(
            "t grid must be nondecreasing and start at or after s".into(),
        ));
    }
    Ok(())
}

/// Exact-in-`t` partials of `G(·, s)` on a grid of `t ≥ s`.
pub fn green_states(
    family: &DampingFamily,
    omega: f64,
    s: f64,
    t_grid: &[f64],
) -> Result<Vec<GreenState>> {
    check_times(family, omega, s, t_grid)?;
    let sys = Variational { omega, family };
    let period = 2.0 * std::f64::consts::PI / omega;
    let opts = SolverOptions::with_tol(GREEN_TOL).h_max(period / 8.0);
    let (states, _) = solve_dense(&sys, s, [0.0, 1.0, -1.0, 0.0], t_grid, opts)?;
    Ok(states
        .into_iter()
        .map(|y| GreenState {
            g: y[0],
            g_t: y[1],
            g_s: y[2],
            g_ts: y[3],
        })
        .collect())
}

/// `G(t, s)` for every `t` in `t_grid`, by direct integration from `t = s`.
pub fn green_direct(family: &DampingFamily, omega: f64, s: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    Ok(green_states(family, omega, s, t_grid)?
        .into_iter()
        .map(|g| g.g)
        .collect())
}

/// Picard iterate `G⁽ⁿ⁾(t)` of the Volterra equation
/// `G = sin(ω(t-s))/ω - (1/ω)∫ sin(ω(t-τ)) q(τ) G(τ) dτ`, started from `sin/ω`.
/// The iteration runs on Gauss-Legendre panels, refined until two panel
/// counts agree.
pub fn green_picard(
    family: &DampingFamily,
    omega: f64,
    s: f64,
    t: f64,
    iterations: usize,
) -> Result<f64> {
    if iterations < 1 {
        return Err(LabError::Precondition("at least one Picard iteration".into()));
    }
    check_times(family, omega, s, &[t])?;
    if t == s {
        return Ok(0.0);
    }
    let gl = GaussLegendre::new(16);
    let period = 2.0 * std::f64::consts::PI / omega;
    let mut panels = (((t - s) / (0.5 * period)).ceil() as usize).max(1);
    let mut prev = picard_on_panels(family, omega, s, t, iterations, &gl, panels);
    for _ in 0..12 {
        panels *= 2;
        let next = picard_on_panels(family, omega, s, t, iterations, &gl, panels);
        if (next - prev).abs() <= 1e-13 * (1.0 + next.abs()) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

fn picard_on_panels(
    family: &DampingFamily,
    omega: f64,
    s: f64,
    t: f64,
    iterations: usize,
    gl: &GaussLegendre,
    panels: usize,
) -> f64 {
    let n = gl.nodes.len();
    let width = (t - s) / panels as f64;
    let mut tau = Vec::with_capacity(panels * n);
    for k in 0..panels {
        let a = s + k as f64 * width;
        for x in &gl.nodes {
            tau.push(a + 0.5 * width * (x + 1.0));
        }
    }
    let phase: Vec<(f64, f64)> = tau.iter().map(|&v| (omega * (v - s)).sin_cos()).collect();
    let q: Vec<f64> = tau.iter().map(|&v| family.q(v)).collect();
    let mut g: Vec<f64> = phase.iter().map(|(sn, _)| sn / omega).collect();
    let (st, ct) = (omega * (t - s)).sin_cos();
    let mut result = st / omega;
    for iter in 0..iterations {
        // sin(ω(t-τ)) = sin(a)cos(b) - cos(a)sin(b) with a = ω(t-s), b = ω(τ-s)
        let ic: Vec<f64> = (0..tau.len()).map(|i| phase[i].1 * q[i] * g[i]).collect();
        let is: Vec<f64> = (0..tau.len()).map(|i| phase[i].0 * q[i] * g[i]).collect();
        let mut cum_c = 0.0;
        let mut cum_s = 0.0;
        let last = iter + 1 == iterations;
        let mut next = vec![0.0; tau.len()];
        for k in 0..panels {
            let base = k * n;
            if !last {
                for i in 0..n {
                    let row = &gl.integration[i];
                    let mut c = cum_c;
                    let mut sn = cum_s;
                    for j in 0..n {
                        c += 0.5 * width * row[j] * ic[base + j];
                        sn += 0.5 * width * row[j] * is[base + j];
                    }
                    let (sa, ca) = phase[base + i];
                    next[base + i] = sa / omega - (sa * c - ca * sn) / omega;
                }
            }
            for j in 0..n {
                cum_c += 0.5 * width * gl.weights[j] * ic[base + j];
                cum_s += 0.5 * width * gl.weights[j] * is[base + j];
            }
        }
        result = st / omega - (st * cum_c - ct * cum_s) / omega;
        if !last {
            g = next;
        }
    }
    result
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GronwallCertificate {
    pub q_tail: f64,
    pub max_ratio: f64,
    pub passed: bool,
}

/// `max |G(t,s)|·ω·exp(-Q(s)/ω)` over the grid; the bound holds iff `≤ 1`.
pub fn certify_gronwall(
    family: &DampingFamily,
    omega: f64,
    s: f64,
    t_grid: &[f64],
) -> Result<GronwallCertificate> {
    let q_tail = tail_q(family, s, default_tail_horizon(s))?.value;
    let g = green_direct(family, omega, s, t_grid)?;
    let scale = omega * (-q_tail / omega).exp();
    let max_ratio = g.iter().fold(0.0, |m: f64, v| m.max(v.abs() * scale));
    Ok(GronwallCertificate {
        q_tail,
        max_ratio,
        passed: max_ratio <= 1.0 + 100.0 * GREEN_TOL,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionCertificate {
    pub s: f64,
    pub t: f64,
    pub actual: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Remainder of the first-order expansion of `G` against `e^{Q/ω}Q²/(2ω³)`.
pub fn certify_expansion_error(
    family: &DampingFamily,
    omega: f64,
    s: f64,
    t: f64,
) -> Result<ExpansionCertificate> {
    let q_tail = tail_q(family, s, default_tail_horizon(s))?.value;
    let g = green_direct(family, omega, s, &[t])?[0];
    let correction = quad::integrate(
        |tau| (omega * (t - tau)).sin() * (omega * (tau - s)).sin() * family.q(tau),
        s,
        t,
    )?;
    let actual = g - (omega * (t - s)).sin() / omega + correction / (omega * omega);
    let bound = (q_tail / omega).exp() * q_tail * q_tail / (2.0 * omega.powi(3));
    Ok(ExpansionCertificate {
        s,
        t,
        actual,
        bound,
        passed: actual.abs() <= bound * (1.0 + 1e-9) + 100.0 * GREEN_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSet {
    pub t: f64,
    pub s: f64,
    pub g: f64,
    pub g_t: f64,
    pub g_s: f64,
    pub r: f64,
    pub r_t: f64,
    pub r_s: f64,
    pub r_ts: f64,
    pub k1: f64,
    pub k2: f64,
    pub k4: f64,
    pub p1: f64,
    pub p4: f64,
}

fn assemble(family: &DampingFamily, omega: f64, t: f64, s: f64, gs: &GreenState) -> KernelSet {
    let w2 = omega * omega;
    let e = family.decay_factor(t, s);
    let hp_t = 0.5 * family.p(t);
    let hp_s = 0.5 * family.p(s);
    let (g, g_t, g_s, g_ts) = (gs.g, gs.g_t, gs.g_s, gs.g_ts);
    // ∂²G/∂s² = -(ω² + q(s))G, since G is a solution in s as well.
    let p_s = family.p(s);
    let r = e * g;
    let r_t = e * (g_t - hp_t * g);
    let r_s = e * (hp_s * g + g_s);
    let r_ts = e * (-hp_t * (hp_s * g + g_s) + hp_s * g_t + g_ts);
    let r_ss = e * ((0.5 * p_s * p_s + family.dp(s) - w2) * g + p_s * g_s);
    let k1 = w2 * r - r_s;
    let k2 = w2 * r_t - r_ts;
    let k4 = w2 * w2 * r - 2.0 * w2 * r_s + r_ss;
    let lk = LeadingKernels::new(omega);
    KernelSet {
        t,
        s,
        g,
        g_t,
        g_s,
        r,
        r_t,
        r_s,
        r_ts,
        k1,
        k2,
        k4,
        p1: k1 - e * lk.l1(t - s),
        p4: k4 - e * lk.l3(t - s),
    }
}

/// Kernels at every `t` of `t_grid` for a fixed source time `s`.
pub fn kernels_along(
    family: &DampingFamily,
    omega: f64,
    s: f64,
    t_grid: &[f64],
) -> Result<Vec<KernelSet>> {
    let states = green_states(family, omega, s, t_grid)?;
    Ok(t_grid
        .iter()
        .zip(&states)
        .map(|(&t, gs)| assemble(family, omega, t, s, gs))
        .collect())
}

/// Largest tolerated disagreement between the exact `K₄` and its
/// Richardson-extrapolated finite difference.
pub const FD_TOLERANCE: f64 = 1e-4;

/// Kernels at one `(t, s)`. With `fd_step`, `K₄` is also rebuilt from
/// central differences of `K₁` in `s` (Richardson over `h`, `h/2`) and
/// compared with the exact value.
pub fn kernels_at(
    family: &DampingFamily,
    omega: f64,
    t: f64,
    s: f64,
    fd_step: Option<f64>,
) -> Result<KernelSet> {
    let set = kernels_along(family, omega, s, &[t])?[0];
    if let Some(h) = fd_step {
        if let Some(disagreement) = k4_fd_disagreement(family, omega, t, s, h)? {
            if disagreement > FD_TOLERANCE {
                return Err(LabError::FiniteDifference { disagreement });
            }
        }
    }
    Ok(set)
}

/// Relative gap between the exact `K₄(t,s)` and `ω²K₁ - ∂ₛK₁` with the
/// derivative taken by Richardson-extrapolated central differences.
/// `None` when the stencil `[s-h, s+h]` leaves `[t0, t]`.
pub fn k4_fd_disagreement(
    family: &DampingFamily,
    omega: f64,
    t: f64,
    s: f64,
    h: f64,
) -> Result<Option<f64>> {
    if !(h > 0.0) {
        return Err(LabError::Precondition(format!("fd_step must be positive, got {h}")));
    }
    if s - h < family.t0() || s + h > t {
        return Ok(None);
    }
    let set = kernels_along(family, omega, s, &[t])?[0];
    let k1 = |sv: f64| -> Result<f64> { Ok(kernels_along(family, omega, sv, &[t])?[0].k1) };
    let d = |h: f64| -> Result<f64> { Ok((k1(s + h)? - k1(s - h)?) / (2.0 * h)) };
    let d1 = d(h)?;
    let d2 = d(0.5 * h)?;
    let dk1 = (4.0 * d2 - d1) / 3.0;
    let k4_fd = omega * omega * set.k1 - dk1;
    Ok(Some((k4_fd - set.k4).abs() / set.k4.abs().max(1.0)))
}

/// Default finite-difference step, a small fraction of the period.
pub fn default_fd_step(omega: f64) -> f64 {
    1e-4 * 2.0 * std::f64::consts::PI / omega
}

pub fn write_kernels_csv<W: Write>(mut out: W, sets: &[KernelSet]) -> std::io::Result<()> {
    writeln!(out, "t,s,G,R,K1,K2,K4,P1,P4")?;
    for k in sets {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            k.t, k.s, k.g, k.r, k.k1, k.k2, k.k4, k.p1, k.p4
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct L1Weights {
    pub t: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub bound3: f64,
}

impl L1Weights {
    /// `(bound - value)` for each weight; all nonnegative when certified.
    pub fn margins(&self) -> [f64; 3] {
        [
            self.bound1 - self.w1,
            self.bound2 - self.w2,
            self.bound3 - self.w3,
        ]
    }

    pub fn passed(&self) -> bool {
        self.margins().iter().all(|&m| m >= 0.0)
    }
}

/// `∫E p`, `p(t)∫E` and `∫E|q|` over `[t0, t]`, with their bounds `2`, `2`, `p(t0)`.
pub fn certify_l1_weights(family: &DampingFamily, t: f64) -> Result<L1Weights> {
    let t0 = family.t0();
    if t < t0 {
        return Err(LabError::Domain(format!("t = {t} precedes t0 = {t0}")));
    }
    let e = |s: f64| family.decay_factor(t, s);
    let w1 = quad::integrate(|s| e(s) * family.p(s), t0, t)?;
    let w2 = family.p(t) * quad::integrate(e, t0, t)?;
    let w3 = quad::integrate(|s| e(s) * family.q(s).abs(), t0, t)?;
    Ok(L1Weights {
        t,
        w1,
        w2,
        w3,
        bound1: 2.0,
        bound2: 2.0,
        bound3: family.p(t0),
    })
}

/// Window sups of `|K₁|/E` and `|K₂|/E` along `t` for one source time.
#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundSweep {
    pub s: f64,
    pub window_ends: Vec<f64>,
    pub k1_sups: Vec<f64>,
    pub k2_sups: Vec<f64>,
    pub k1_slope: f64,
    pub k2_slope: f64,
    pub passed: bool,
}

/// Largest log-log growth slope accepted as "bounded".
pub const BOUNDED_SLOPE: f64 = 0.05;

/// Sample `|K₁|/E`, `|K₂|/E` for `t ∈ [s, horizon]` on dyadic windows of
/// elapsed time and test for a growth trend.
pub fn kernel_bound_sweep(
    family: &DampingFamily,
    omega: f64,
    s: f64,
    horizon: f64,
) -> Result<KernelBoundSweep> {
    let period = 2.0 * std::f64::consts::PI / omega;
    if horizon - s < 8.0 * period {
        return Err(LabError::Precondition(
            "kernel sweep needs at least eight periods".into(),
        ));
    }
    let mut bounds = Vec::new();
    let mut hi = horizon - s;
    while hi / 2.0 >= period {
        bounds.push((hi / 2.0, hi));
        hi /= 2.0;
    }
    bounds.reverse();
    let per_window = 200;
    let mut grid = Vec::new();
    for &(lo, hi) in &bounds {
        for k in 0..=per_window {
            grid.push(s + lo + (hi - lo) * k as f64 / per_window as f64);
        }
    }
    let sets = kernels_along(family, omega, s, &grid)?;
    let mut k1_sups = Vec::new();
    let mut k2_sups = Vec::new();
    for chunk in sets.chunks(per_window + 1) {
        let mut m1: f64 = 0.0;
        let mut m2: f64 = 0.0;
        for k in chunk {
            let e = family.decay_factor(k.t, k.s);
            m1 = m1.max(k.k1.abs() / e);
            m2 = m2.max(k.k2.abs() / e);
        }
        k1_sups.push(m1);
        k2_sups.push(m2);
    }
    let mids: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let k1_slope = loglog_slope(&mids, &k1_sups);
    let k2_slope = loglog_slope(&mids, &k2_sups);
    Ok(KernelBoundSweep {
        s,
        window_ends: bounds.iter().map(|(_, hi)| s + hi).collect(),
        k1_sups,
        k2_sups,
        k1_slope,
        k2_slope,
        passed: k1_slope < BOUNDED_SLOPE && k2_slope < BOUNDED_SLOPE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> DampingFamily {
        DampingFamily::constant(0.0)
    }

    #[test]
    fn unperturbed_green_function_is_a_sine() {
        let ts: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
        let g = green_direct(&flat(), 2.0, 0.0, &ts).unwrap();
        for (t, g) in ts.iter().zip(&g) {
            assert!((g - (2.0 * t).sin() / 2.0).abs() < 1e-10);
        }
        let g = green_direct(&flat(), 2.0, 0.0, &[std::f64::consts::FRAC_PI_4]).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-11);
        assert_eq!(green_direct(&DampingFamily::Bessel, 1.0, 3.0, &[3.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn green_rejects_bad_inputs() {
        assert!(green_direct(&DampingFamily::Bessel, 1.0, 0.5, &[1.0]).is_err());
        assert!(green_direct(&DampingFamily::Bessel, 1.0, 2.0, &[1.5]).is_err());
        assert!(green_picard(&DampingFamily::Bessel, 1.0, 1.0, 2.0, 0).is_err());
    }

    #[test]
    fn picard_fixed_point_without_potential() {
        for n in [1, 3] {
            let g = green_picard(&flat(), 1.5, 0.0, 4.0, n).unwrap();
            assert!((g - (6.0f64).sin() / 1.5).abs() < 1e-14);
        }
    }

    #[test]
    fn picard_matches_direct_on_bessel() {
        let fam = DampingFamily::Bessel;
        let direct = green_direct(&fam, 1.0, 1.0, &[2.0]).unwrap()[0];
        let picard = green_picard(&fam, 1.0, 1.0, 2.0, 6).unwrap();
        assert!((direct - picard).abs() < 1e-8, "{direct} vs {picard}");
    }

    #[test]
    fn picard_contracts() {
        let fam = DampingFamily::Bessel;
        let g4 = green_picard(&fam, 1.0, 1.0, 5.0, 4).unwrap();
        let g8 = green_picard(&fam, 1.0, 1.0, 5.0, 8).unwrap();
        let bound = 0.25f64.powi(4) / 24.0;
        assert!((g4 - g8).abs() < bound, "{} vs {bound}", (g4 - g8).abs());
    }

    #[test]
    fn gronwall_examples() {
        let ts: Vec<f64> = (0..200).map(|k| 0.05 * k as f64).collect();
        let c = certify_gronwall(&flat(), 1.0, 0.0, &ts).unwrap();
        assert!(c.passed && c.max_ratio <= 1.0 && c.max_ratio > 0.99);

        let ts: Vec<f64> = (0..=1000).map(|k| 1.0 + 0.099 * k as f64).collect();
        assert!(certify_gronwall(&DampingFamily::Bessel, 1.0, 1.0, &ts).unwrap().passed);

        let fam = DampingFamily::power(2.0, 1.0).unwrap();
        let ts: Vec<f64> = (0..=1000).map(|k| 0.1 * k as f64).collect();
        assert!(certify_gronwall(&fam, 1.0, 0.0, &ts).unwrap().passed);
    }

    #[test]
    fn expansion_error_examples() {
        let c = certify_expansion_error(&flat(), 1.0, 0.0, 5.0).unwrap();
        assert!(c.actual.abs() < 1e-10 && c.bound == 0.0 && c.passed, "{c:?}");

        let c = certify_expansion_error(&DampingFamily::Bessel, 1.0, 1.0, 10.0).unwrap();
        assert!((c.bound - 0.25f64.exp() * 0.0625 / 2.0).abs() < 1e-10);
        assert!(c.passed, "{c:?}");

        let c = certify_expansion_error(&DampingFamily::Bessel, 1.0, 10.0, 20.0).unwrap();
        assert!(c.bound < 1e-3 && c.passed);
    }

    #[test]
    fn kernel_diagonal_values() {
        for fam in [DampingFamily::Bessel, DampingFamily::power(1.0, 1.0).unwrap()] {
            let s = fam.t0() + 0.7;
            let k = kernels_at(&fam, 1.3, s, s, None).unwrap();
            assert_eq!(k.r, 0.0);
            assert!((k.k1 - 1.0).abs() < 1e-15);
            assert!((k.r_t - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn wronskian_is_one() {
        let fam = DampingFamily::Bessel;
        let ts: Vec<f64> = (0..=500).map(|k| 2.0 + 0.2 * k as f64).collect();
        for gs in green_states(&fam, 1.0, 2.0, &ts).unwrap() {
            let w = gs.g * gs.g_ts - gs.g_s * gs.g_t;
            assert!((w - 1.0).abs() < 1e-9, "{w}");
        }
    }

    #[test]
    fn k4_agrees_with_finite_differences() {
        let fam = DampingFamily::power(1.0, 1.0).unwrap();
        let k = kernels_at(&fam, 2.0, 7.0, 3.0, Some(default_fd_step(2.0))).unwrap();
        assert!(k.k4.is_finite());
        // R and its s-partial against plain differences of R.
        let h = 1e-5;
        let r = |s: f64| kernels_at(&fam, 2.0, 7.0, s, None).unwrap().r;
        assert!(((r(3.0 + h) - r(3.0 - h)) / (2.0 * h) - k.r_s).abs() < 1e-7);
    }

    #[test]
    fn finite_difference_failure_is_reported() {
        let fam = DampingFamily::power(1.0, 1.0).unwrap();
        let err = kernels_at(&fam, 2.0, 7.0, 3.0, Some(1.5));
        assert!(matches!(err, Err(LabError::FiniteDifference { .. })));
    }

    #[test]
    fn l1_weight_examples() {
        let fam = DampingFamily::Bessel;
        let w = certify_l1_weights(&fam, 100.0).unwrap();
        assert!((w.w1 - 1.8).abs() < 1e-10);
        assert!(w.passed());
        let w = certify_l1_weights(&fam, 1.0).unwrap();
        assert_eq!((w.w1, w.w2, w.w3), (0.0, 0.0, 0.0));
        let fam = DampingFamily::power(1.0, 1.0).unwrap();
        for t in [10.0, 100.0, 1000.0] {
            let w = certify_l1_weights(&fam, t).unwrap();
            let e = (1.0 / (1.0 + t)).sqrt();
            assert!((w.w1 - 2.0 * (1.0 - e)).abs() < 1e-10);
            assert!(w.passed());
        }
    }

    #[test]
    fn kernels_stay_bounded() {
        let fam = DampingFamily::Bessel;
        let sweep = kernel_bound_sweep(&fam, 1.0, 1.0, 1000.0).unwrap();
        assert!(sweep.passed, "{sweep:?}");
    }

    #[test]
    fn kernel_csv_header() {
        let fam = DampingFamily::Bessel;
        let sets = kernels_along(&fam, 1.0, 1.0, &[1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_kernels_csv(&mut buf, &sets).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,s,G,R,K1,K2,K4,P1,P4\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
