//! The exponential filter cascade `y₁ = e_{ω²} * f`, `y₂ = e_{ω²} * y₁`
//! and two independent ways of computing it.

use serde::Serialize;

use crate::coeffs::{DampingFamily, Forcing};
use crate::error::{LabError, Result};
use crate::integrate::Trajectory;
use crate::quad;

/// Kernels `e^{-ω²u}` and `u e^{-ω²u}` are negligible past this many `1/ω²`.
const KERNEL_CUTOFF: f64 = 45.0;

/// `h(t) = t e^{-ω²t}` and its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HKernel {
    pub h: f64,
    pub dh: f64,
    pub ddh: f64,
}

pub fn h_kernel(t: f64, omega: f64) -> Result<HKernel> {
    if !(t >= 0.0) {
        return Err(LabError::Domain(format!("h kernel needs t >= 0, got {t}")));
    }
    Ok(h_values(t, omega))
}

fn h_values(t: f64, omega: f64) -> HKernel {
    let w2 = omega * omega;
    let e = (-w2 * t).exp();
    HKernel {
        h: t * e,
        dh: (1.0 - w2 * t) * e,
        ddh: (w2 * w2 * t - 2.0 * w2) * e,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMethod {
    OdeCascade,
    DirectQuadrature,
    K3Reconstruction,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterOracleResult {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: FilterMethod,
}

impl FilterOracleResult {
    /// `y₁` or `y₂` (`order` 1 or 2) as carried by the trajectory.
    pub fn cascade(traj: &Trajectory, order: u8) -> Self {
        let values = if order == 1 { &traj.y1 } else { &traj.y2 };
        FilterOracleResult {
            times: traj.times.clone(),
            values: values.clone(),
            method: FilterMethod::OdeCascade,
        }
    }

    /// Largest pointwise difference at the times both results share.
    pub fn max_difference(&self, other: &FilterOracleResult) -> f64 {
        let mut j = 0;
        let mut worst: f64 = 0.0;
        for (i, &t) in self.times.iter().enumerate() {
            while j < other.times.len() && other.times[j] < t - 1e-12 * (1.0 + t.abs()) {
                j += 1;
            }
            if j < other.times.len() && (other.times[j] - t).abs() <= 1e-12 * (1.0 + t.abs()) {
                worst = worst.max((self.values[i] - other.values[j]).abs());
            }
        }
        worst
    }
}

/// `y₁(t) = ∫₀^{t-t0} e^{-ω²u} f(t-u) du` and `y₂(t) = ∫₀^{t-t0} u e^{-ω²u} f(t-u) du`
/// by adaptive quadrature at every grid time.
pub fn y_filters_quadrature(
    forcing: &Forcing,
    omega: f64,
    t0: f64,
    t_grid: &[f64],
) -> Result<(FilterOracleResult, FilterOracleResult)> {
    let w2 = omega * omega;
    let mut y1 = Vec::with_capacity(t_grid.len());
    let mut y2 = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t < t0 {
            return Err(LabError::Precondition(format!("grid time {t} precedes t0 {t0}")));
        }
        let upper = (t - t0).min(KERNEL_CUTOFF / w2);
        y1.push(quad::integrate(|u| (-w2 * u).exp() * forcing.eval(t - u), 0.0, upper)?);
        y2.push(quad::integrate(|u| u * (-w2 * u).exp() * forcing.eval(t - u), 0.0, upper)?);
    }
    let wrap = |values| FilterOracleResult {
        times: t_grid.to_vec(),
        values,
        method: FilterMethod::DirectQuadrature,
    };
    Ok((wrap(y1), wrap(y2)))
}

/// `K₃(t, s) = h''(t-s) + ω²h(t-s) + p(s)h'(t-s) - p'(s)h(t-s)`.
pub fn k3(family: &DampingFamily, omega: f64, t: f64, s: f64) -> f64 {
    let h = h_values(t - s, omega);
    h.ddh + omega * omega * h.h + family.p(s) * h.dh - family.dp(s) * h.h
}

/// `y₂(t) = x(t) + ∫K₃(t,s)x(s)ds`, evaluated at every `stride`-th grid
/// point by Simpson's rule on the trajectory grid. Only valid from rest.
pub fn y2_from_x(
    traj: &Trajectory,
    family: &DampingFamily,
    stride: usize,
) -> Result<FilterOracleResult> {
    if !traj.at_rest() {
        return Err(LabError::Precondition(
            "the K3 representation needs zero initial conditions".into(),
        ));
    }
    let stride = stride.max(1);
    let cutoff = KERNEL_CUTOFF / (traj.omega * traj.omega);
    let h = traj.spacing();
    let mut times = Vec::new();
    let mut values = Vec::new();
    for i in (0..traj.len()).step_by(stride) {
        let t = traj.times[i];
        let lo = traj.index_at(t - cutoff).min(i);
        let integrand: Vec<f64> = (lo..=i)
            .map(|j| k3(family, traj.omega, t, traj.times[j]) * traj.x[j])
            .collect();
        times.push(t);
        values.push(traj.x[i] + quad::simpson(&integrand, h));
    }
    Ok(FilterOracleResult {
        times,
        values,
        method: FilterMethod::K3Reconstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::SystemSpec;
    use crate::integrate::{integrate_forced, Grid};

    #[test]
    fn h_kernel_values() {
        let h = h_kernel(0.0, 1.7).unwrap();
        assert_eq!((h.h, h.dh), (0.0, 1.0));
        assert!((h_kernel(1.0, 1.0).unwrap().h - (-1f64).exp()).abs() < 1e-15);
        assert!(h_kernel(-0.1, 1.0).is_err());
        // derivatives against central differences
        let (w, t, d) = (1.3, 0.8, 1e-5);
        let f = |t| h_kernel(t, w).unwrap();
        assert!(((f(t + d).h - f(t - d).h) / (2.0 * d) - f(t).dh).abs() < 1e-9);
        assert!(((f(t + d).dh - f(t - d).dh) / (2.0 * d) - f(t).ddh).abs() < 1e-9);
    }

    #[test]
    fn h_is_self_convolution_of_exponential() {
        let w: f64 = 1.4;
        for t in [0.3, 1.0, 2.5, 7.0] {
            let conv = quad::integrate(
                |s| (-w * w * (t - s)).exp() * (-w * w * s).exp(),
                0.0,
                t,
            )
            .unwrap();
            assert!((conv - h_kernel(t, w).unwrap().h).abs() < 1e-10);
        }
    }

    #[test]
    fn quadrature_filters_closed_forms() {
        let w = 1.1;
        let ts: Vec<f64> = (0..60).map(|k| 0.25 * k as f64).collect();
        let (y1, y2) = y_filters_quadrature(&Forcing::Exp { k: w * w }, w, 0.0, &ts).unwrap();
        assert_eq!(y1.method, FilterMethod::DirectQuadrature);
        for (i, &t) in ts.iter().enumerate() {
            let e = (-w * w * t).exp();
            assert!((y1.values[i] - t * e).abs() < 1e-12);
            assert!((y2.values[i] - 0.5 * t * t * e).abs() < 1e-12);
        }
        let (y1, _) = y_filters_quadrature(&Forcing::Constant { c: 1.0 }, 1.0, 0.0, &ts).unwrap();
        for (i, &t) in ts.iter().enumerate() {
            assert!((y1.values[i] - (1.0 - (-t).exp())).abs() < 1e-12);
        }
        let (y1, y2) = y_filters_quadrature(&Forcing::Zero, 1.0, 0.0, &ts).unwrap();
        assert!(y1.values.iter().chain(&y2.values).all(|&v| v == 0.0));
    }

    #[test]
    fn reconstruction_requires_rest() {
        let fam = DampingFamily::power(1.0, 1.0).unwrap();
        let spec = SystemSpec::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 10.0, 1.0, 40).unwrap();
        let tr = integrate_forced(&spec, &fam, &Forcing::Zero, &grid, 1e-10, false).unwrap();
        assert!(matches!(y2_from_x(&tr, &fam, 10), Err(LabError::Precondition(_))));
    }

    #[test]
    fn reconstruction_matches_cascade() {
        let fam = DampingFamily::power(1.0, 1.0).unwrap();
        let spec = SystemSpec::at_rest(1.0, 0.0).unwrap();
        let grid = Grid::for_omega(0.0, 20.0, 1.0, 400).unwrap();
        let forcing = Forcing::PowerDecay { g: 2.0 };
        let tr = integrate_forced(&spec, &fam, &forcing, &grid, 1e-11, false).unwrap();
        let rec = y2_from_x(&tr, &fam, 10).unwrap();
        assert_eq!(rec.values[0], 0.0);
        let cascade = FilterOracleResult::cascade(&tr, 2);
        let d = rec.max_difference(&cascade);
        assert!(d < 1e-6, "{d}");
    }
}
