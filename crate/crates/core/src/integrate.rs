//! One-pass integration of the forced oscillator together with its filters,
//! envelope weight and normalized integrals.

use std::io::Write;

use serde::Serialize;

use crate::coeffs::{DampingFamily, Forcing, SystemSpec};
use crate::error::{LabError, Result};
use crate::ode::{solve_dense, OdeSystem, SolverOptions};

/// Largest `log A` accepted before the weighted channels are considered to overflow.
pub const LOG_A_LIMIT: f64 = 300.0;

pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-6;

/// Uniform output grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub t_start: f64,
    pub t_end: f64,
    pub output_points: usize,
}

impl Grid {
    pub fn new(t_start: f64, t_end: f64, output_points: usize) -> Result<Self> {
        if !(t_end > t_start) || output_points < 2 || !t_end.is_finite() {
            return Err(LabError::Precondition(format!(
                "grid needs t_end > t_start and at least 2 points ({t_start}, {t_end}, {output_points})"
            )));
        }
        Ok(Grid {
            t_start,
            t_end,
            output_points,
        })
    }

    /// Grid with at least `per_period` samples per oscillation period.
    pub fn for_omega(t_start: f64, t_end: f64, omega: f64, per_period: usize) -> Result<Self> {
        let period = 2.0 * std::f64::consts::PI / omega;
        let intervals = ((t_end - t_start) / period * per_period as f64).ceil() as usize;
        Grid::new(t_start, t_end, intervals.max(1) + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.output_points - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.output_points)
            .map(|k| {
                if k + 1 == self.output_points {
                    self.t_end
                } else {
                    self.t_start + k as f64 * h
                }
            })
            .collect()
    }

    /// At least 40 samples per period of `sin(ωt)`.
    pub fn check_resolution(&self, omega: f64) -> Result<()> {
        let period = 2.0 * std::f64::consts::PI / omega;
        if self.spacing() > period / 40.0 * (1.0 + 1e-12) {
            return Err(LabError::Precondition(format!(
                "grid spacing {} exceeds period/40 = {}",
                self.spacing(),
                period / 40.0
            )));
        }
        Ok(())
    }
}

/// Running weighted integrals `∫cos(ωs)A y₂`, `∫sin(ωs)A y₂` and `∫A|y₂|`.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedChannels {
    pub ic_run: Vec<f64>,
    pub is_run: Vec<f64>,
    pub abs_run: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub omega: f64,
    pub t0: f64,
    pub xi0: f64,
    pub xi1: f64,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub dx: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub log_a: Vec<f64>,
    pub u1: Vec<f64>,
    pub v1: Vec<f64>,
    pub u2: Vec<f64>,
    pub v2: Vec<f64>,
    /// Normalized integrals of the forcing itself.
    pub uf: Vec<f64>,
    pub vf: Vec<f64>,
    pub weighted: Option<WeightedChannels>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn a(&self, i: usize) -> f64 {
        self.log_a[i].exp()
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn spacing(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn at_rest(&self) -> bool {
        self.xi0 == 0.0 && self.xi1 == 0.0
    }

    /// Index of the first grid point `>= t`.
    pub fn index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s < t - 1e-9 * self.spacing())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,x,dx,y1,y2,logA,U1,V1,U2,V2")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[i],
                self.x[i],
                self.dx[i],
                self.y1[i],
                self.y2[i],
                self.log_a[i],
                self.u1[i],
                self.v1[i],
                self.u2[i],
                self.v2[i]
            )?;
        }
        Ok(())
    }
}

struct ForcedSystem<'a> {
    omega: f64,
    family: &'a DampingFamily,
    forcing: &'a Forcing,
    weighted: bool,
}

// state: x, v, y1, y2, logA, U1, V1, U2, V2, Uf, Vf, Ic, Is, |A y2|
impl OdeSystem<14> for ForcedSystem<'_> {
    fn rhs(&self, t: f64, y: &[f64; 14], dy: &mut [f64; 14]) {
        let w2 = self.omega * self.omega;
        let p = self.family.p(t);
        let f = self.forcing.eval(t);
        let (s, c) = (self.omega * t).sin_cos();
        let half_p = 0.5 * p;
        dy[0] = y[1];
        dy[1] = f - p * y[1] - w2 * y[0];
        dy[2] = -w2 * y[2] + f;
        dy[3] = -w2 * y[3] + y[2];
        dy[4] = half_p;
        dy[5] = c * y[2] - half_p * y[5];
        dy[6] = s * y[2] - half_p * y[6];
        dy[7] = c * y[3] - half_p * y[7];
        dy[8] = s * y[3] - half_p * y[8];
        dy[9] = c * f - half_p * y[9];
        dy[10] = s * f - half_p * y[10];
        if self.weighted {
            let a = y[4].exp();
            dy[11] = c * a * y[3];
            dy[12] = s * a * y[3];
            dy[13] = a * y[3].abs();
        } else {
            dy[11] = 0.0;
            dy[12] = 0.0;
            dy[13] = 0.0;
        }
    }

    fn guard(&self, _t: f64, y: &[f64; 14]) -> Option<String> {
        if self.weighted && y[4] > LOG_A_LIMIT {
            return Some(format!("log A = {} exceeds {LOG_A_LIMIT}", y[4]));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Some("non-finite state".into());
        }
        None
    }
}

fn check_inputs(spec: &SystemSpec, family: &DampingFamily, grid: &Grid, tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(LabError::Precondition(format!(
            "tol {tol} outside [{MIN_TOL}, {MAX_TOL}]"
        )));
    }
    if (spec.t0 - family.t0()).abs() > 0.0 || (grid.t_start - spec.t0).abs() > 0.0 {
        return Err(LabError::Precondition(format!(
            "grid start {}, initial time {} and family start {} must coincide",
            grid.t_start,
            spec.t0,
            family.t0()
        )));
    }
    grid.check_resolution(spec.omega)
}

fn solver_options(omega: f64, tol: f64) -> SolverOptions {
    SolverOptions::with_tol(tol).h_max(0.25 * 2.0 * std::f64::consts::PI / omega)
}

/// Integrate the forced system and every augmented channel, sampled on `grid`.
/// With `weighted` the running integrals of `A y₂` are carried as well.
pub fn integrate_forced(
    spec: &SystemSpec,
    family: &DampingFamily,
    forcing: &Forcing,
    grid: &Grid,
    tol: f64,
    weighted: bool,
) -> Result<Trajectory> {
    check_inputs(spec, family, grid, tol)?;
    let sys = ForcedSystem {
        omega: spec.omega,
        family,
        forcing,
        weighted,
    };
    let times = grid.times();
    let mut y0 = [0.0; 14];
    y0[0] = spec.xi0;
    y0[1] = spec.xi1;
    let (states, _) = solve_dense(&sys, spec.t0, y0, &times, solver_options(spec.omega, tol))?;
    let channel = |k: usize| states.iter().map(|s| s[k]).collect::<Vec<_>>();
    Ok(Trajectory {
        omega: spec.omega,
        t0: spec.t0,
        xi0: spec.xi0,
        xi1: spec.xi1,
        x: channel(0),
        dx: channel(1),
        y1: channel(2),
        y2: channel(3),
        log_a: channel(4),
        u1: channel(5),
        v1: channel(6),
        u2: channel(7),
        v2: channel(8),
        uf: channel(9),
        vf: channel(10),
        weighted: weighted.then(|| WeightedChannels {
            ic_run: channel(11),
            is_run: channel(12),
            abs_run: channel(13),
        }),
        times,
    })
}

struct TransformedSystem<'a> {
    omega: f64,
    family: &'a DampingFamily,
    forcing: &'a Forcing,
}

// state: u, u', logA
impl OdeSystem<3> for TransformedSystem<'_> {
    fn rhs(&self, t: f64, y: &[f64; 3], dy: &mut [f64; 3]) {
        let q = self.family.q(t);
        let g = if self.forcing.is_zero() {
            0.0
        } else {
            self.forcing.eval(t) * y[2].exp()
        };
        dy[0] = y[1];
        dy[1] = g - (self.omega * self.omega + q) * y[0];
        dy[2] = 0.5 * self.family.p(t);
    }

    fn guard(&self, _t: f64, y: &[f64; 3]) -> Option<String> {
        (y[2] > LOG_A_LIMIT).then(|| format!("log A = {} exceeds {LOG_A_LIMIT}", y[2]))
    }
}

/// Solution of the transformed equation `u'' + (ω²+q)u = f·A`, mapped back
/// through `x = ρu`. Returns `(x, x')` on the grid.
pub fn integrate_undamped(
    spec: &SystemSpec,
    family: &DampingFamily,
    forcing: &Forcing,
    grid: &Grid,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_inputs(spec, family, grid, tol)?;
    let sys = TransformedSystem {
        omega: spec.omega,
        family,
        forcing,
    };
    let times = grid.times();
    let y0 = [spec.xi0, spec.xi1 + 0.5 * family.p(spec.t0) * spec.xi0, 0.0];
    let (states, _) = solve_dense(&sys, spec.t0, y0, &times, solver_options(spec.omega, tol))?;
    let mut x = Vec::with_capacity(times.len());
    let mut dx = Vec::with_capacity(times.len());
    for (t, s) in times.iter().zip(&states) {
        let rho = (-s[2]).exp();
        x.push(rho * s[0]);
        dx.push(rho * (s[1] - 0.5 * family.p(*t) * s[0]));
    }
    Ok((x, dx))
}

/// Largest `|ρu - x|` over the grid between the transformed and the direct integration.
pub fn integrate_undamped_crosscheck(
    spec: &SystemSpec,
    family: &DampingFamily,
    forcing: &Forcing,
    grid: &Grid,
    tol: f64,
) -> Result<f64> {
    let direct = integrate_forced(spec, family, forcing, grid, tol, false)?;
    let (x, _) = integrate_undamped(spec, family, forcing, grid, tol)?;
    Ok(direct
        .x
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power() -> DampingFamily {
        DampingFamily::power(1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        let g = Grid::new(0.0, 10.0, 11).unwrap();
        assert!(g.check_resolution(1.0).is_err());
        let g = Grid::for_omega(0.0, 10.0, 1.0, 40).unwrap();
        assert!(g.check_resolution(1.0).is_ok());
        assert_eq!(*g.times().last().unwrap(), 10.0);
    }

    #[test]
    fn tolerance_bounds_are_enforced() {
        let spec = SystemSpec::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 10.0, 1.0, 40).unwrap();
        for tol in [1e-14, 1e-5] {
            assert!(matches!(
                integrate_forced(&spec, &power(), &Forcing::Zero, &grid, tol, false),
                Err(LabError::Precondition(_))
            ));
        }
    }

    #[test]
    fn unforced_channels_stay_zero() {
        let spec = SystemSpec::new(1.5, 1.0, -0.5, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 30.0, 1.5, 40).unwrap();
        let tr = integrate_forced(&spec, &power(), &Forcing::Zero, &grid, 1e-10, true).unwrap();
        assert_eq!(tr.x[0], 1.0);
        assert_eq!(tr.dx[0], -0.5);
        for ch in [&tr.y1, &tr.y2, &tr.u1, &tr.v1, &tr.u2, &tr.v2, &tr.uf, &tr.vf] {
            assert!(ch.iter().all(|&v| v == 0.0));
        }
        let w = tr.weighted.as_ref().unwrap();
        assert!(w.abs_run.iter().all(|&v| v == 0.0));
        assert_eq!(tr.log_a[0], 0.0);
    }

    #[test]
    fn exponential_forcing_reproduces_h_kernel() {
        let omega = 1.2;
        let spec = SystemSpec::at_rest(omega, 0.0).unwrap();
        let forcing = Forcing::Exp { k: omega * omega };
        let grid = Grid::for_omega(0.0, 20.0, omega, 40).unwrap();
        let tr = integrate_forced(&spec, &power(), &forcing, &grid, 1e-11, false).unwrap();
        for (t, y1) in tr.times.iter().zip(&tr.y1) {
            assert!((y1 - t * (-omega * omega * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn log_a_tracks_closed_form() {
        let spec = SystemSpec::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 50.0, 1.0, 40).unwrap();
        let tr = integrate_forced(&spec, &power(), &Forcing::Zero, &grid, 1e-11, false).unwrap();
        for (t, la) in tr.times.iter().zip(&tr.log_a) {
            assert!((la - 0.5 * (1.0 + t).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn transformed_equation_agrees() {
        let spec = SystemSpec::at_rest(1.0, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 50.0, 1.0, 40).unwrap();
        let forcing = Forcing::PowerDecay { g: 2.0 };
        let d = integrate_undamped_crosscheck(&spec, &power(), &forcing, &grid, 1e-11).unwrap();
        assert!(d < 1e-7, "{d}");

        let zero = integrate_undamped_crosscheck(&spec, &power(), &Forcing::Zero, &grid, 1e-11);
        assert_eq!(zero.unwrap(), 0.0);
    }

    #[test]
    fn overflow_sentinel_fires() {
        let fam = DampingFamily::constant(1.0);
        let spec = SystemSpec::at_rest(1.0, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 700.0, 1.0, 40).unwrap();
        let err = integrate_forced(&spec, &fam, &Forcing::Exp { k: 1.0 }, &grid, 1e-8, true);
        match err {
            Err(LabError::Aborted { t, .. }) => assert!(t > 590.0 && t < 610.0),
            other => panic!("expected abort, got {other:?}"),
        }
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let spec = SystemSpec::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 2.0, 1.0, 40).unwrap();
        let tr = integrate_forced(&spec, &power(), &Forcing::Zero, &grid, 1e-10, false).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x,dx,y1,y2,logA,U1,V1,U2,V2");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 10);
        assert_eq!(first[1], "1.0000000000000000e0");
        assert_eq!(text.lines().count(), tr.len() + 1);
    }
}
