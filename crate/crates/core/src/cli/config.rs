//! Flat `key=value` scenario files with optional `[section]` headers.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::coeffs::{DampingFamily, Forcing, SystemSpec};
use crate::error::{LabError, Result};
use crate::integrate::{MAX_TOL, MIN_TOL};

/// `J₀(1)` and `J₁(1)`, the initial data that make `x = J₀` for `p = 1/t`, `ω = 1`.
pub const J0_AT_1: f64 = 0.765_197_686_557_966_6;
pub const J1_AT_1: f64 = 0.440_050_585_744_933_5;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_PERIODS: f64 = 400.0;
pub const MIN_PERIODS: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub family: String,
    pub forcing: String,
    pub omega: f64,
    pub xi0: f64,
    pub xi1: f64,
    /// Elapsed time integrated past `t0`.
    pub horizon: f64,
    pub tol: f64,
    /// Carry the running weighted integrals of `A y₂`.
    pub weighted: bool,
    pub samples_per_period: usize,
    /// Envelope-fit windows; the first two also drive the preservation check.
    pub windows: Vec<(f64, f64)>,
}

const SECTIONS: [&str; 3] = ["scenario", "integration", "fit"];

fn config_err(line: usize, key: &str, message: impl Into<String>) -> LabError {
    LabError::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| config_err(line, key, format!("`{value}` is not a finite number")))
}

/// Parse a scenario file. Omitted keys take their defaults
/// (`tol = 1e-10`, `horizon = 400` periods, `forcing = zero`).
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut name = None;
    let mut family = None;
    let mut forcing = String::new();
    let mut omega = None;
    let (mut xi0, mut xi1) = (0.0, 0.0);
    let mut horizon = None;
    let mut tol = DEFAULT_TOL;
    let mut weighted = true;
    let mut samples_per_period = 40usize;
    let mut windows = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(section) = line.strip_prefix('[') {
            let section = section
                .strip_suffix(']')
                .ok_or_else(|| config_err(line_no, line, "unterminated section header"))?
                .trim();
            if !SECTIONS.contains(&section) {
                return Err(config_err(line_no, section, "unknown section"));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(line_no, line, "expected key=value"))?;
        let (key, value) = (key.trim(), value.trim());
        let canonical: &'static str = match key {
            "name" => "name",
            "family" => "family",
            "forcing" => "forcing",
            "omega" => "omega",
            "xi0" => "xi0",
            "xi1" => "xi1",
            "horizon" => "horizon",
            "tol" => "tol",
            "weighted" => "weighted",
            "samples_per_period" => "samples_per_period",
            "window" => "window",
            _ => return Err(config_err(line_no, key, "unknown key")),
        };
        if canonical != "window" && seen.insert(canonical, line_no).is_some() {
            return Err(config_err(line_no, key, "duplicate key"));
        }
        match canonical {
            "name" => {
                if value.is_empty() || value.contains(|c: char| c == ',' || c.is_whitespace()) {
                    return Err(config_err(line_no, key, "name must be non-empty without commas or spaces"));
                }
                name = Some(value.to_string());
            }
            "family" => {
                DampingFamily::parse(value).map_err(|e| config_err(line_no, key, e.to_string()))?;
                family = Some(value.to_string());
            }
            "forcing" => forcing = value.to_string(),
            "omega" => {
                let w = parse_f64(line_no, key, value)?;
                if w <= 0.0 {
                    return Err(config_err(line_no, key, "omega must be positive"));
                }
                omega = Some(w);
            }
            "xi0" => xi0 = parse_f64(line_no, key, value)?,
            "xi1" => xi1 = parse_f64(line_no, key, value)?,
            "horizon" => horizon = Some((parse_f64(line_no, key, value)?, line_no)),
            "tol" => {
                tol = parse_f64(line_no, key, value)?;
                if !(MIN_TOL..=MAX_TOL).contains(&tol) {
                    return Err(config_err(line_no, key, format!("tol must lie in [{MIN_TOL}, {MAX_TOL}]")));
                }
            }
            "weighted" => {
                weighted = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(config_err(line_no, key, "expected true or false")),
                }
            }
            "samples_per_period" => {
                samples_per_period = value
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n >= 40)
                    .ok_or_else(|| config_err(line_no, key, "expected an integer >= 40"))?;
            }
            "window" => {
                let (lo, hi) = value
                    .split_once(',')
                    .ok_or_else(|| config_err(line_no, key, "expected lo,hi"))?;
                let lo = parse_f64(line_no, key, lo.trim())?;
                let hi = parse_f64(line_no, key, hi.trim())?;
                if hi <= lo {
                    return Err(config_err(line_no, key, "window needs lo < hi"));
                }
                windows.push((lo, hi));
            }
            _ => unreachable!(),
        }
    }

    let eof = last_line + 1;
    let name = name.ok_or_else(|| config_err(eof, "name", "missing required key"))?;
    let family = family.ok_or_else(|| config_err(eof, "family", "missing required key"))?;
    let omega = omega.ok_or_else(|| config_err(eof, "omega", "missing required key"))?;
    let forcing_line = seen.get("forcing").copied().unwrap_or(eof);
    Forcing::parse(&forcing, omega).map_err(|e| config_err(forcing_line, "forcing", e.to_string()))?;
    let forcing = if forcing.is_empty() { "zero".to_string() } else { forcing };
    let period = 2.0 * PI / omega;
    let horizon = match horizon {
        Some((h, line)) => {
            if h < MIN_PERIODS * period * (1.0 - 1e-12) {
                return Err(config_err(line, "horizon", format!("horizon must cover at least {MIN_PERIODS} periods ({:.6})", MIN_PERIODS * period)));
            }
            h
        }
        None => DEFAULT_PERIODS * period,
    };
    Ok(ScenarioConfig {
        name,
        family,
        forcing,
        omega,
        xi0,
        xi1,
        horizon,
        tol,
        weighted,
        samples_per_period,
        windows,
    })
}

impl ScenarioConfig {
    pub fn family(&self) -> Result<DampingFamily> {
        DampingFamily::parse(&self.family)
    }

    pub fn forcing(&self) -> Result<Forcing> {
        Forcing::parse(&self.forcing, self.omega)
    }

    pub fn spec(&self) -> Result<SystemSpec> {
        SystemSpec::new(self.omega, self.xi0, self.xi1, self.family()?.t0())
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Override the tolerance, checking the integrator bounds.
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(MIN_TOL..=MAX_TOL).contains(&tol) {
            return Err(config_err(0, "tol", format!("tol must lie in [{MIN_TOL}, {MAX_TOL}]")));
        }
        self.tol = tol;
        Ok(self)
    }

    /// Override the horizon, which must cover at least 40 periods. Fit
    /// windows reaching past the new end are dropped.
    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon >= MIN_PERIODS * self.period() * (1.0 - 1e-12)) || !horizon.is_finite() {
            return Err(config_err(0, "horizon", format!("horizon must cover at least {MIN_PERIODS} periods")));
        }
        let end = self.family()?.t0() + horizon;
        self.windows.retain(|w| w.1 <= end);
        self.horizon = horizon;
        Ok(self)
    }

    /// Render back to the file format; `parse_config` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[scenario]");
        let _ = writeln!(out, "name={}", self.name);
        let _ = writeln!(out, "family={}", self.family);
        let _ = writeln!(out, "forcing={}", self.forcing);
        let _ = writeln!(out, "omega={:?}", self.omega);
        let _ = writeln!(out, "xi0={:?}", self.xi0);
        let _ = writeln!(out, "xi1={:?}", self.xi1);
        let _ = writeln!(out, "\n[integration]");
        let _ = writeln!(out, "horizon={:?}", self.horizon);
        let _ = writeln!(out, "tol={:?}", self.tol);
        let _ = writeln!(out, "weighted={}", self.weighted);
        let _ = writeln!(out, "samples_per_period={}", self.samples_per_period);
        if !self.windows.is_empty() {
            let _ = writeln!(out, "\n[fit]");
            for (lo, hi) in &self.windows {
                let _ = writeln!(out, "window={lo:?},{hi:?}");
            }
        }
        out
    }
}

fn builtin(
    name: &str,
    family: &str,
    forcing: &str,
    omega: f64,
    xi: (f64, f64),
    windows: Vec<(f64, f64)>,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        family: family.to_string(),
        forcing: forcing.to_string(),
        omega,
        xi0: xi.0,
        xi1: xi.1,
        horizon: 800.0 * 2.0 * PI / omega,
        tol: DEFAULT_TOL,
        weighted: true,
        samples_per_period: 40,
        windows,
    }
}

/// The scenario registry.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    vec![
        builtin(
            "bessel-unforced",
            "bessel",
            "zero",
            1.0,
            (J0_AT_1, -J1_AT_1),
            vec![(200.0, 400.0)],
        ),
        builtin("bessel-expdecay", "bessel", "exp:k=1", 1.0, (0.0, 0.0), vec![]),
        builtin("power-decay", "power:a=1,b=1", "powerdecay:g=2", 2.0, (0.0, 0.0), vec![]),
        builtin("resonant-counterexample", "power:a=1,b=1", "resonant:g=0.5", 1.0, (0.0, 0.0), vec![]),
        builtin("power-slow-unforced", "power:a=0.5,b=0.75", "zero", 1.5, (1.0, 0.0), vec![]),
    ]
}

pub fn builtin_scenario(name: &str) -> Option<ScenarioConfig> {
    builtin_scenarios().into_iter().find(|c| c.name == name)
}
