//! Run summaries: certification rows, the JSON report and a console table.

use std::io::Write;

use serde::Serialize;

use crate::asympt::{ConverseReport, EnvelopeFit, PreservationReport};
use crate::cli::config::ScenarioConfig;
use crate::coeffs::HypothesisReport;
use crate::conditions::{ConditionVerdict, LimitEstimate, Statement};
use crate::error::LabError;

/// A named inequality `value <= limit` with the formula it checks.
#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub name: String,
    pub anchor: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Certification {
    pub fn at_most(name: impl Into<String>, anchor: &str, value: f64, limit: f64) -> Self {
        Certification {
            name: name.into(),
            anchor: anchor.to_string(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    pub fn margin(&self) -> f64 {
        self.limit - self.value
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub hypotheses: HypothesisReport,
    pub verdicts: Vec<ConditionVerdict>,
    pub contradictions: Vec<(Statement, Statement)>,
    pub fits: Vec<EnvelopeFit>,
    pub limits: Option<LimitEstimate>,
    pub preservation: Option<PreservationReport>,
    pub converse: Option<ConverseReport>,
    pub certifications: Vec<Certification>,
    pub artifacts: Vec<String>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Exit code for an error that aborted a run.
pub fn exit_code_for(err: &LabError) -> i32 {
    match err {
        LabError::Config { .. }
        | LabError::Descriptor(_)
        | LabError::Domain(_)
        | LabError::Precondition(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.certifications.iter().all(|c| c.passed) && self.contradictions.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            EXIT_OK
        } else {
            EXIT_CERTIFICATION
        }
    }

    pub fn verdict(&self, s: Statement) -> Option<&ConditionVerdict> {
        self.verdicts.iter().find(|v| v.statement == s)
    }

    pub fn preserved(&self) -> bool {
        self.preservation.as_ref().is_some_and(|p| p.preserved)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Plain-text summary for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "scenario {}  family {}  forcing {}  omega {}\n",
            self.config.name, self.config.family, self.config.forcing, self.config.omega
        ));
        out.push_str("verdicts:");
        for v in &self.verdicts {
            out.push_str(&format!(" {}={}", v.statement, v.result));
        }
        out.push('\n');
        if let Some(p) = &self.preservation {
            out.push_str(&format!(
                "preservation: {} (amplitudes {:.6e} / {:.6e}, phase drift {:.3e})\n",
                if p.preserved { "preserved" } else { "not preserved" },
                p.fits[0].amplitude,
                p.fits[1].amplitude,
                p.phase_diff
            ));
        }
        out.push_str(&format_certifications(&self.certifications));
        out
    }
}

pub fn format_certifications(certs: &[Certification]) -> String {
    let mut out = String::new();
    for c in certs {
        out.push_str(&format!(
            "  [{}] {:<28} value {:>12.4e}  limit {:>12.4e}  ({})\n",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.limit,
            c.anchor
        ));
    }
    out
}

pub fn write_certifications_csv<W: Write>(
    mut out: W,
    scenario: &str,
    certs: &[Certification],
) -> std::io::Result<()> {
    writeln!(out, "scenario,name,passed,value,limit,margin,anchor")?;
    for c in certs {
        writeln!(
            out,
            "{scenario},{},{},{:.16e},{:.16e},{:.16e},\"{}\"",
            c.name,
            c.passed,
            c.value,
            c.limit,
            c.margin(),
            c.anchor.replace('"', "\"\"")
        )?;
    }
    Ok(())
}
