//! Damping families, forcing terms, the envelope weight `A(t) = exp(½∫p)` and
//! the residual potential `q = -¼p² - ½p'` left after removing the damping.

use std::fmt;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::quad;

/// A decreasing, positive damping coefficient `p(t)` on `[t0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DampingFamily {
    /// `p(t) = alpha / (1 + t)^beta`
    Power { alpha: f64, beta: f64, t0: f64 },
    /// `p(t) = 1 / t` on `[1, ∞)`
    Bessel,
    /// `p(t) = c`. Degenerate (p' = 0), used for the unperturbed oscillator.
    Constant { c: f64, t0: f64 },
}

impl DampingFamily {
    pub fn power(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(LabError::Domain(format!(
                "power family needs alpha > 0 and beta > 0 (got {alpha}, {beta})"
            )));
        }
        Ok(DampingFamily::Power {
            alpha,
            beta,
            t0: 0.0,
        })
    }

    pub fn constant(c: f64) -> Self {
        DampingFamily::Constant { c, t0: 0.0 }
    }

    pub fn t0(&self) -> f64 {
        match *self {
            DampingFamily::Power { t0, .. } | DampingFamily::Constant { t0, .. } => t0,
            DampingFamily::Bessel => 1.0,
        }
    }

    pub fn p(&self, t: f64) -> f64 {
        match *self {
            DampingFamily::Power { alpha, beta, .. } => alpha * (1.0 + t).powf(-beta),
            DampingFamily::Bessel => 1.0 / t,
            DampingFamily::Constant { c, .. } => c,
        }
    }

    pub fn dp(&self, t: f64) -> f64 {
        match *self {
            DampingFamily::Power { alpha, beta, .. } => -alpha * beta * (1.0 + t).powf(-beta - 1.0),
            DampingFamily::Bessel => -1.0 / (t * t),
            DampingFamily::Constant { .. } => 0.0,
        }
    }

    /// Closed form of `½∫_{t0}^t p`.
    pub fn log_a(&self, t: f64) -> f64 {
        match *self {
            DampingFamily::Power { alpha, beta, t0 } => {
                if (beta - 1.0).abs() < 1e-15 {
                    0.5 * alpha * ((1.0 + t) / (1.0 + t0)).ln()
                } else {
                    let e = 1.0 - beta;
                    0.5 * alpha / e * ((1.0 + t).powf(e) - (1.0 + t0).powf(e))
                }
            }
            DampingFamily::Bessel => 0.5 * t.ln(),
            DampingFamily::Constant { c, t0 } => 0.5 * c * (t - t0),
        }
    }

    /// `E(t, s) = A(s) / A(t)`.
    pub fn decay_factor(&self, t: f64, s: f64) -> f64 {
        (self.log_a(s) - self.log_a(t)).exp()
    }

    /// `q(t) = -¼p(t)² - ½p'(t)`, without the domain check.
    pub fn q(&self, t: f64) -> f64 {
        let p = self.p(t);
        -0.25 * p * p - 0.5 * self.dp(t)
    }

    /// `q'(t)`, evaluated from the closed forms.
    pub fn dq(&self, t: f64) -> f64 {
        match *self {
            DampingFamily::Power { alpha, beta, .. } => {
                let u = 1.0 + t;
                // q = -¼α²u^{-2β} + ½αβu^{-β-1}
                0.5 * alpha * alpha * beta * u.powf(-2.0 * beta - 1.0)
                    - 0.5 * alpha * beta * (beta + 1.0) * u.powf(-beta - 2.0)
            }
            DampingFamily::Bessel => -0.5 / (t * t * t),
            DampingFamily::Constant { .. } => 0.0,
        }
    }

    /// `∫_h^∞ |q|` in closed form with the decay exponent `k` of `|q| ~ t^{-k}`,
    /// when `q` keeps one sign on `[h, ∞)` and is integrable there.
    pub fn tail_abs_q(&self, h: f64) -> Option<(f64, f64)> {
        match *self {
            DampingFamily::Power { alpha, beta, .. } => {
                if 2.0 * beta <= 1.0 {
                    return None;
                }
                let u = 1.0 + h;
                // q changes sign where u^{1-β} = 2β/α
                if beta != 1.0 {
                    let root = (2.0 * beta / alpha).powf(1.0 / (1.0 - beta));
                    if u < root {
                        return None;
                    }
                }
                let integral = -0.25 * alpha * alpha * u.powf(1.0 - 2.0 * beta) / (2.0 * beta - 1.0)
                    + 0.5 * alpha * u.powf(-beta);
                Some((integral.abs(), (2.0 * beta).min(beta + 1.0)))
            }
            DampingFamily::Bessel => Some((0.25 / h, 2.0)),
            DampingFamily::Constant { c, .. } => (c == 0.0).then_some((0.0, f64::INFINITY)),
        }
    }

    pub fn descriptor(&self) -> String {
        match *self {
            DampingFamily::Power { alpha, beta, .. } => format!("power:a={alpha},b={beta}"),
            DampingFamily::Bessel => "bessel".to_string(),
            DampingFamily::Constant { c, .. } => format!("const:c={c}"),
        }
    }

    /// Parse `power:a=..,b=..`, `bessel` or `const:c=..`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let (kind, params) = split_descriptor(descriptor)?;
        match kind {
            "bessel" if params.is_empty() => Ok(DampingFamily::Bessel),
            "power" => {
                let alpha = lookup(&params, "a", descriptor)?;
                let beta = lookup(&params, "b", descriptor)?;
                DampingFamily::power(alpha, beta)
            }
            "const" => Ok(DampingFamily::constant(lookup(&params, "c", descriptor)?)),
            _ => Err(LabError::Descriptor(descriptor.to_string())),
        }
    }
}

impl fmt::Display for DampingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn split_descriptor(descriptor: &str) -> Result<(&str, Vec<(&str, f64)>)> {
    let descriptor = descriptor.trim();
    let (kind, rest) = match descriptor.split_once(':') {
        Some((k, r)) => (k.trim(), r.trim()),
        None => (descriptor, ""),
    };
    let mut params = Vec::new();
    if !rest.is_empty() {
        for item in rest.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| LabError::Descriptor(descriptor.to_string()))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| LabError::Descriptor(descriptor.to_string()))?;
            params.push((k.trim(), v));
        }
    }
    Ok((kind, params))
}

fn lookup(params: &[(&str, f64)], key: &str, descriptor: &str) -> Result<f64> {
    params
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| LabError::Descriptor(descriptor.to_string()))
}

/// External forcing `f(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Forcing {
    Zero,
    /// `f(t) = (1 + t)^{-g}`
    PowerDecay { g: f64 },
    /// `f(t) = exp(-k t)`
    Exp { k: f64 },
    /// `f(t) = c`
    Constant { c: f64 },
    /// `f = y' + ω²y` with `y(t) = cos(ωt)(1 + t)^{-g}`, so that the first
    /// filter reproduces `y` up to a decaying transient.
    Resonant { g: f64, omega: f64 },
}

impl Forcing {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Forcing::Zero => 0.0,
            Forcing::PowerDecay { g } => (1.0 + t).powf(-g),
            Forcing::Exp { k } => (-k * t).exp(),
            Forcing::Constant { c } => c,
            Forcing::Resonant { g, omega } => {
                let (s, c) = (omega * t).sin_cos();
                let u = 1.0 + t;
                let y = c * u.powf(-g);
                let dy = -omega * s * u.powf(-g) - g * c * u.powf(-g - 1.0);
                dy + omega * omega * y
            }
        }
    }

    /// Closed form of `y₁(t) = ∫_{t0}^t e^{-ω²(t-s)} f(s) ds`, when known.
    pub fn analytic_y1(&self, t: f64, t0: f64, omega: f64) -> Option<f64> {
        let w2 = omega * omega;
        match *self {
            Forcing::Zero => Some(0.0),
            Forcing::Exp { k } => {
                if (k - w2).abs() < 1e-14 * w2.max(1.0) {
                    Some((-w2 * t).exp() * (t - t0))
                } else {
                    Some(((-k * t).exp() - (-w2 * (t - t0) - k * t0).exp()) / (w2 - k))
                }
            }
            Forcing::Constant { c } => Some(c * (1.0 - (-w2 * (t - t0)).exp()) / w2),
            Forcing::Resonant { g, omega: w } if (w - omega).abs() < 1e-15 => {
                let y = |s: f64| (w * s).cos() * (1.0 + s).powf(-g);
                Some(y(t) - (-w2 * (t - t0)).exp() * y(t0))
            }
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::Zero)
    }

    pub fn descriptor(&self) -> String {
        match *self {
            Forcing::Zero => "zero".to_string(),
            Forcing::PowerDecay { g } => format!("powerdecay:g={g}"),
            Forcing::Exp { k } => format!("exp:k={k}"),
            Forcing::Constant { c } => format!("const:c={c}"),
            Forcing::Resonant { g, .. } => format!("resonant:g={g}"),
        }
    }

    /// Parse a forcing descriptor. `omega` is needed by the resonant forcing,
    /// which is tuned to the oscillator frequency. An empty descriptor is `zero`.
    pub fn parse(descriptor: &str, omega: f64) -> Result<Self> {
        if descriptor.trim().is_empty() {
            return Ok(Forcing::Zero);
        }
        let (kind, params) = split_descriptor(descriptor)?;
        match kind {
            "zero" if params.is_empty() => Ok(Forcing::Zero),
            "powerdecay" => Ok(Forcing::PowerDecay {
                g: lookup(&params, "g", descriptor)?,
            }),
            "exp" => Ok(Forcing::Exp {
                k: lookup(&params, "k", descriptor)?,
            }),
            "const" => Ok(Forcing::Constant {
                c: lookup(&params, "c", descriptor)?,
            }),
            "resonant" => Ok(Forcing::Resonant {
                g: lookup(&params, "g", descriptor)?,
                omega,
            }),
            _ => Err(LabError::Descriptor(descriptor.to_string())),
        }
    }
}

/// Frequency and initial data, given at the family's start time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemSpec {
    pub omega: f64,
    pub xi0: f64,
    pub xi1: f64,
    pub t0: f64,
}

impl SystemSpec {
    pub fn new(omega: f64, xi0: f64, xi1: f64, t0: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(LabError::Domain(format!("omega must be positive, got {omega}")));
        }
        Ok(SystemSpec {
            omega,
            xi0,
            xi1,
            t0,
        })
    }

    pub fn at_rest(omega: f64, t0: f64) -> Result<Self> {
        Self::new(omega, 0.0, 0.0, t0)
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn is_at_rest(&self) -> bool {
        self.xi0 == 0.0 && self.xi1 == 0.0
    }
}

/// `q(t) = -¼p(t)² - ½p'(t)`.
pub fn residual_potential(family: &DampingFamily, t: f64) -> Result<f64> {
    if !(t >= family.t0()) {
        return Err(LabError::Domain(format!(
            "t = {t} precedes the family start time {}",
            family.t0()
        )));
    }
    Ok(family.q(t))
}

/// Three-valued outcome of the last-decade test for an improper integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegralBehavior {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegralCheck {
    /// `∫_{t0}^{horizon}` of the integrand.
    pub value: f64,
    /// Contribution of the last decade of elapsed time.
    pub last_decade: f64,
    pub behavior: IntegralBehavior,
}

impl IntegralCheck {
    fn classify(value: f64, last_decade: f64) -> Self {
        let behavior = if value == 0.0 {
            IntegralBehavior::Convergent
        } else {
            let share = last_decade / value;
            if share > 0.2 {
                IntegralBehavior::Divergent
            } else if share < 0.01 {
                IntegralBehavior::Convergent
            } else {
                IntegralBehavior::Inconclusive
            }
        };
        IntegralCheck {
            value,
            last_decade,
            behavior,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub descriptor: String,
    pub horizon: f64,
    pub positive: bool,
    pub decreasing: bool,
    /// Supplied `p'` agrees with a central difference of `p` (rel. 1e-6).
    pub derivative_consistent: bool,
    /// `|p'(horizon)|` is below 1e-3 of its largest sampled value.
    pub derivative_vanishes: bool,
    pub integral_p: IntegralCheck,
    pub integral_p_squared: IntegralCheck,
    pub integral_abs_q: IntegralCheck,
}

impl HypothesisReport {
    /// Positivity, monotonicity, `p ∉ L¹` and `p² ∈ L¹` all confirmed.
    pub fn satisfied(&self) -> bool {
        self.positive
            && self.decreasing
            && self.integral_p.behavior == IntegralBehavior::Divergent
            && self.integral_p_squared.behavior == IntegralBehavior::Convergent
    }
}

fn sample_times(t0: f64, horizon: f64, samples: usize) -> Vec<f64> {
    let span = horizon - t0;
    (0..samples)
        .map(|i| {
            let frac = i as f64 / (samples - 1) as f64;
            t0 + ((1.0 + span).powf(frac) - 1.0)
        })
        .collect()
}

fn decade_check<F: Fn(f64) -> f64 + Copy>(f: F, t0: f64, horizon: f64) -> Result<IntegralCheck> {
    let lo = t0 + 0.1 * (horizon - t0);
    let head = quad::integrate(f, t0, lo)?;
    let tail = quad::integrate(f, lo, horizon)?;
    Ok(IntegralCheck::classify(head + tail, tail))
}

/// Sample the hypotheses on `p` over `[t0, horizon]`. Failed checks are
/// reported in the result, never raised.
pub fn validate_hypotheses(
    family: &DampingFamily,
    horizon: f64,
    samples: usize,
) -> Result<HypothesisReport> {
    let t0 = family.t0();
    if !(horizon > t0) || samples < 100 {
        return Err(LabError::Precondition(format!(
            "need horizon > t0 and at least 100 samples (horizon {horizon}, samples {samples})"
        )));
    }
    let times = sample_times(t0, horizon, samples);
    let positive = times.iter().all(|&t| family.p(t) > 0.0);
    let decreasing = times.iter().all(|&t| family.dp(t) < 0.0);
    let derivative_consistent = times.iter().all(|&t| {
        let h = 1e-4 * (1.0 + (t - t0).abs());
        let fd = (family.p(t + h) - family.p(t - h)) / (2.0 * h);
        let exact = family.dp(t);
        (fd - exact).abs() <= 1e-6 * exact.abs().max(1e-300)
    });
    let max_dp = times.iter().map(|&t| family.dp(t).abs()).fold(0.0, f64::max);
    let derivative_vanishes = family.dp(horizon).abs() <= 1e-3 * max_dp;

    let integral_p = decade_check(|t| family.p(t), t0, horizon)?;
    let integral_p_squared = decade_check(|t| family.p(t).powi(2), t0, horizon)?;
    let integral_abs_q = decade_check(|t| family.q(t).abs(), t0, horizon)?;

    Ok(HypothesisReport {
        descriptor: family.descriptor(),
        horizon,
        positive,
        decreasing,
        derivative_consistent,
        derivative_vanishes,
        integral_p,
        integral_p_squared,
        integral_abs_q,
    })
}

/// `Q(s) = ∫_s^∞ |q|`, split into its quadrature and extrapolated parts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailIntegral {
    pub value: f64,
    pub quadrature: f64,
    pub extrapolated: f64,
    /// Decay exponent `k` of `|q| ~ t^{-k}`: exact when the family has a
    /// closed-form tail, otherwise fitted over the last decade.
    pub exponent: f64,
}

/// `Q(s)`: adaptive quadrature of `|q|` on `[s, horizon]` plus the tail beyond
/// `horizon`. The tail is exact where the family allows it, otherwise a
/// power law fitted from the log-log slope over the last decade.
pub fn tail_q(family: &DampingFamily, s: f64, horizon: f64) -> Result<TailIntegral> {
    let t0 = family.t0();
    if !(s >= t0 && s <= horizon) {
        return Err(LabError::Precondition(format!(
            "tail integral needs t0 <= s <= horizon (t0 {t0}, s {s}, horizon {horizon})"
        )));
    }
    let quadrature = quad::integrate(|t| family.q(t).abs(), s, horizon)?;
    if let Some((extrapolated, exponent)) = family.tail_abs_q(horizon) {
        return Ok(TailIntegral {
            value: quadrature + extrapolated,
            quadrature,
            extrapolated,
            exponent,
        });
    }
    let q_end = family.q(horizon).abs();
    let lo = (horizon / 10.0).max(t0);
    let q_lo = family.q(lo).abs();
    let (extrapolated, exponent) = if q_end == 0.0 && q_lo == 0.0 {
        (0.0, f64::INFINITY)
    } else if lo >= horizon || q_end == 0.0 || q_lo == 0.0 {
        return Err(LabError::DivergentTail { exponent: 0.0 });
    } else {
        let exponent = -(q_end / q_lo).ln() / (horizon / lo).ln();
        if exponent <= 1.0 {
            return Err(LabError::DivergentTail { exponent });
        }
        (q_end * horizon / (exponent - 1.0), exponent)
    };
    Ok(TailIntegral {
        value: quadrature + extrapolated,
        quadrature,
        extrapolated,
        exponent,
    })
}

/// Default horizon used when `Q(s)` is needed without an explicit one.
pub fn default_tail_horizon(s: f64) -> f64 {
    1e4 * (1.0 + s.abs())
}

/// `log A` sampled on a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct WeightState {
    pub times: Vec<f64>,
    pub log_a: Vec<f64>,
}

impl WeightState {
    pub fn a(&self, i: usize) -> f64 {
        self.log_a[i].exp()
    }

    pub fn rho(&self, i: usize) -> f64 {
        (-self.log_a[i]).exp()
    }

    /// `E(t_i, t_j) = A(t_j) / A(t_i)`.
    pub fn decay(&self, i: usize, j: usize) -> f64 {
        (self.log_a[j] - self.log_a[i]).exp()
    }
}

/// Cumulative quadrature of `½p` along `times` (which must start at `t0`).
pub fn weight_log_a(family: &DampingFamily, times: &[f64]) -> Result<WeightState> {
    match times.first() {
        Some(&first) if first == family.t0() => {}
        _ => {
            return Err(LabError::Precondition(
                "weight grid must start at the family start time".into(),
            ))
        }
    }
    let mut log_a = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    log_a.push(0.0);
    for w in times.windows(2) {
        acc += 0.5 * quad::integrate(|t| family.p(t), w[0], w[1])?;
        log_a.push(acc);
    }
    Ok(WeightState {
        times: times.to_vec(),
        log_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bessel_from_one() -> DampingFamily {
        DampingFamily::Bessel
    }

    #[test]
    fn residual_potential_examples() {
        // p = 1/t: q = -1/(4t²) + 1/(2t²) = 1/(4t²)
        let q = residual_potential(&bessel_from_one(), 2.0).unwrap();
        assert!((q - 0.0625).abs() < 1e-15);

        let c = 0.7;
        let q = residual_potential(&DampingFamily::constant(c), 3.0).unwrap();
        assert!((q + c * c / 4.0).abs() < 1e-15);

        let fam = DampingFamily::power(1.0, 1.0).unwrap();
        assert!((residual_potential(&fam, 0.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn residual_potential_rejects_early_times() {
        assert!(matches!(
            residual_potential(&bessel_from_one(), 0.5),
            Err(LabError::Domain(_))
        ));
    }

    #[test]
    fn residual_potential_matches_finite_difference() {
        let families = [
            DampingFamily::Bessel,
            DampingFamily::power(1.0, 1.0).unwrap(),
            DampingFamily::power(0.5, 0.75).unwrap(),
            DampingFamily::power(2.0, 0.9).unwrap(),
        ];
        for fam in families {
            for k in 0..50 {
                let t = fam.t0() + 0.37 * k as f64;
                let h = 1e-5 * (1.0 + t);
                let fd = (fam.p(t + h) - fam.p(t - h)) / (2.0 * h);
                let q_fd = -0.25 * fam.p(t).powi(2) - 0.5 * fd;
                let q = fam.q(t);
                assert!((q - q_fd).abs() <= 1e-6 * q.abs(), "{fam} t={t}");

                let dq_fd = (fam.q(t + h) - fam.q(t - h)) / (2.0 * h);
                assert!((fam.dq(t) - dq_fd).abs() <= 1e-6 * fam.dq(t).abs().max(1e-12));
            }
        }
    }

    #[test]
    fn hypotheses_on_the_three_reference_families() {
        let weak = DampingFamily::power(1.0, 1.0).unwrap();
        let r = validate_hypotheses(&weak, 1e4, 200).unwrap();
        assert!(r.positive && r.decreasing && r.derivative_consistent);
        assert_eq!(r.integral_p.behavior, IntegralBehavior::Divergent);
        assert_eq!(r.integral_p_squared.behavior, IntegralBehavior::Convergent);
        assert!((r.integral_p.value - 10001f64.ln()).abs() < 1e-9);
        assert!((r.integral_p_squared.value - 1e4 / 10001.0).abs() < 1e-9);
        assert!(r.satisfied());

        let strong = DampingFamily::power(1.0, 2.0).unwrap();
        let r = validate_hypotheses(&strong, 1e4, 200).unwrap();
        assert_eq!(r.integral_p.behavior, IntegralBehavior::Convergent);
        assert!((r.integral_p.value - (1.0 - 1.0 / 10001.0)).abs() < 1e-9);
        assert!(!r.satisfied());

        let slow = DampingFamily::power(1.0, 0.5).unwrap();
        let r = validate_hypotheses(&slow, 1e4, 200).unwrap();
        assert_eq!(r.integral_p.behavior, IntegralBehavior::Divergent);
        assert_eq!(r.integral_p_squared.behavior, IntegralBehavior::Divergent);
        assert!((r.integral_p.value - 2.0 * (10001f64.sqrt() - 1.0)).abs() < 1e-8);
        assert!((r.integral_p_squared.value - 10001f64.ln()).abs() < 1e-9);
        assert!(!r.satisfied());
    }

    #[test]
    fn validate_preconditions() {
        let fam = DampingFamily::Bessel;
        assert!(validate_hypotheses(&fam, 0.5, 200).is_err());
        assert!(validate_hypotheses(&fam, 100.0, 10).is_err());
    }

    #[test]
    fn bessel_tail_is_one_over_four_s() {
        let fam = DampingFamily::Bessel;
        let q2 = tail_q(&fam, 2.0, 1e4).unwrap();
        assert!((q2.value - 0.125).abs() < 1e-12, "{q2:?}");
        assert!((q2.exponent - 2.0).abs() < 1e-12);
        let q1 = tail_q(&fam, 1.0, 1e4).unwrap();
        assert!((q1.value - 0.25).abs() < 1e-12);
        let at_end = tail_q(&fam, 1e4, 1e4).unwrap();
        assert_eq!(at_end.quadrature, 0.0);
        assert!((at_end.value - 2.5e-5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_tail_matches_quadrature() {
        for (a, b) in [(1.0, 1.0), (0.5, 0.75), (0.2, 0.55), (3.0, 1.4)] {
            let fam = DampingFamily::power(a, b).unwrap();
            let h = 2e3;
            let (tail, k) = fam.tail_abs_q(h).unwrap();
            let far = quad::integrate(|t| fam.q(t).abs(), h, 1e9).unwrap();
            let beyond = fam.tail_abs_q(1e9).unwrap().0;
            assert!((tail - far - beyond).abs() <= 1e-9 * tail, "{a} {b}");
            assert_eq!(k, (2.0 * b).min(b + 1.0));
        }
        // sign change of q at u^{1/4} = 3 for (0.5, 0.75)
        assert!(DampingFamily::power(0.5, 0.75).unwrap().tail_abs_q(10.0).is_none());
        assert!(DampingFamily::power(1.0, 0.5).unwrap().tail_abs_q(1e3).is_none());
    }

    #[test]
    fn slowly_decaying_potential_has_finite_tail() {
        let fam = DampingFamily::power(0.2, 0.55).unwrap();
        let q = tail_q(&fam, 0.0, 1e4).unwrap();
        assert!(q.value.is_finite() && q.exponent > 1.0);
    }

    #[test]
    fn tail_is_nonincreasing() {
        let fam = DampingFamily::power(0.5, 0.75).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let s = 0.5 * k as f64 * k as f64;
            let q = tail_q(&fam, s, 1e4).unwrap().value;
            assert!(q <= prev + 1e-14, "s = {s}");
            prev = q;
        }
    }

    #[test]
    fn tail_reports_nonintegrable_potential() {
        let fam = DampingFamily::constant(0.3);
        assert!(matches!(
            tail_q(&fam, 0.0, 100.0),
            Err(LabError::DivergentTail { .. })
        ));
        let zero = DampingFamily::constant(0.0);
        assert_eq!(tail_q(&zero, 0.0, 100.0).unwrap().value, 0.0);
    }

    #[test]
    fn weight_matches_closed_forms() {
        let fam = DampingFamily::Bessel;
        let times: Vec<f64> = (0..=30).map(|k| 1.0 + 0.1 * k as f64).collect();
        let w = weight_log_a(&fam, &times).unwrap();
        assert_eq!(w.log_a[0], 0.0);
        assert_eq!(w.a(0), 1.0);
        assert!((w.a(30) - 2.0).abs() < 1e-12);

        let fam = DampingFamily::power(1.0, 1.0).unwrap();
        let times: Vec<f64> = (0..=300).map(|k| 0.01 * k as f64).collect();
        let w = weight_log_a(&fam, &times).unwrap();
        assert!((w.a(300) - 2.0).abs() < 1e-12);
        for (i, t) in times.iter().enumerate() {
            assert!((w.a(i).powi(2) - (1.0 + t)).abs() < 1e-10);
            assert!((w.rho(i) * w.a(i) - 1.0).abs() < 1e-14);
            assert!((w.log_a[i] - fam.log_a(*t)).abs() < 1e-12);
        }
        assert!(w.log_a.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn weight_rejects_misaligned_grid() {
        let fam = DampingFamily::Bessel;
        assert!(weight_log_a(&fam, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn forcing_descriptors_round_trip() {
        for d in ["zero", "powerdecay:g=2", "exp:k=1", "resonant:g=0.5", "const:c=1"] {
            let f = Forcing::parse(d, 1.0).unwrap();
            assert_eq!(f.descriptor(), d);
        }
        assert_eq!(Forcing::parse("", 1.0).unwrap(), Forcing::Zero);
        assert!(Forcing::parse("sine:w=2", 1.0).is_err());
        assert!(Forcing::parse("powerdecay:g=x", 1.0).is_err());
        for d in ["power:a=1,b=1", "bessel", "const:c=0"] {
            assert_eq!(DampingFamily::parse(d).unwrap().descriptor(), d);
        }
        assert!(DampingFamily::parse("power:a=1").is_err());
        assert!(DampingFamily::parse("power:a=-1,b=1").is_err());
    }

    #[test]
    fn resonant_forcing_is_consistent_with_its_filter() {
        let w = 1.3;
        let f = Forcing::Resonant { g: 0.5, omega: w };
        let t0 = 0.0;
        for k in 1..40 {
            let t = 0.25 * k as f64;
            let h = 1e-5;
            let y1 = |s| f.analytic_y1(s, t0, w).unwrap();
            let dy = (y1(t + h) - y1(t - h)) / (2.0 * h);
            assert!((dy + w * w * y1(t) - f.eval(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn system_spec_rejects_zero_frequency() {
        assert!(SystemSpec::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(SystemSpec::new(f64::NAN, 1.0, 0.0, 0.0).is_err());
        let s = SystemSpec::at_rest(2.0, 1.0).unwrap();
        assert!(s.is_at_rest());
        assert!((s.period() - std::f64::consts::PI).abs() < 1e-15);
    }
}
