//! The scenario pipeline: integrate, cross-check the filters, classify the
//! decay statements, fit envelopes, certify the resolvent, write artifacts.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::asympt::{self, EnvelopeFit};
use crate::cli::config::ScenarioConfig;
use crate::cli::plot;
use crate::cli::report::{write_certifications_csv, Certification, RunReport};
use crate::coeffs::{self, DampingFamily, Forcing, SystemSpec};
use crate::conditions::{self, Thresholds};
use crate::error::{LabError, Result};
use crate::filters::{self, FilterOracleResult};
use crate::integrate::{self, Grid, Trajectory};
use crate::quad;
use crate::resolvent::{self, KernelSet, BOUNDED_SLOPE, FD_TOLERANCE, GREEN_TOL};

/// Filter and reconstruction agreement required on the fine grid.
pub const FILTER_TOLERANCE: f64 = 1e-6;
pub const W_TOLERANCE: f64 = 1e-8;
pub const PICARD_TOLERANCE: f64 = 1e-8;
pub const PICARD_ITERATIONS: usize = 6;
pub const LIOUVILLE_TOLERANCE: f64 = 1e-7;
/// Times at which the L1 weight bounds are certified.
pub const WEIGHT_TIMES: [f64; 3] = [10.0, 100.0, 1000.0];

const FINE_PER_PERIOD: usize = 800;
const FINE_TOL: f64 = 1e-11;
const QUADRATURE_STRIDE: usize = 10;

/// Everything a run produces before it is written out.
pub struct ScenarioRun {
    pub report: RunReport,
    pub trajectory: Trajectory,
    pub kernels: Vec<KernelSet>,
}

fn fine_end(t0: f64, period: f64) -> f64 {
    50f64.max(t0 + 10.0 * period)
}

/// Run the full pipeline for one scenario. Nothing is written to disk.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun> {
    let family = config.family()?;
    let forcing = config.forcing()?;
    let spec = config.spec()?;
    let t0 = spec.t0;
    let grid = Grid::for_omega(t0, t0 + config.horizon, config.omega, config.samples_per_period)?;
    let traj = integrate::integrate_forced(&spec, &family, &forcing, &grid, config.tol, config.weighted)?;

    let hypotheses = coeffs::validate_hypotheses(&family, t0 + 1e4, 400)?;
    let mut certs = Vec::new();

    let check_end = t0 + config.horizon.min(100.0);
    let check_grid = Grid::for_omega(t0, check_end, config.omega, config.samples_per_period)?;
    let gap = integrate::integrate_undamped_crosscheck(&spec, &family, &forcing, &check_grid, config.tol)?;
    certs.push(Certification::at_most(
        "liouville-crosscheck",
        "x = rho*u with u'' + (omega^2 + q)u = f*A",
        gap,
        LIOUVILLE_TOLERANCE,
    ));

    certs.extend(filter_certifications(&spec, &family, &forcing)?);

    let verdicts = conditions::statement_verdicts(&traj, &Thresholds::default());
    let contradictions = conditions::contradictions(&verdicts);
    certs.push(Certification::at_most(
        "equivalence-consistency",
        "(A)<=>(B), (C)<=>(D), (S)<=>(T)",
        contradictions.len() as f64,
        0.0,
    ));

    let windows: Option<[(f64, f64); 2]> = match config.windows.as_slice() {
        [] => None,
        [w] => {
            let len = w.1 - w.0;
            Some([*w, (w.1, (w.1 + len).min(traj.t_end()))])
        }
        [a, b, ..] => Some([*a, *b]),
    };
    let fit_windows: Vec<(f64, f64)> = if config.windows.is_empty() {
        asympt::default_windows(&traj).to_vec()
    } else {
        config.windows.clone()
    };
    let fits = fit_windows
        .iter()
        .map(|&w| asympt::envelope_fit(&traj, w))
        .collect::<Result<Vec<EnvelopeFit>>>()?;

    let (limits, preservation, converse) = if config.weighted {
        let est = conditions::estimate_limits(&traj)?;
        let pres = asympt::preservation_check(&traj, &est, windows)?;
        let conv = asympt::converse_check(&traj)?;
        if pres.preserved {
            let worst = |d: &[f64]| d.last().copied().unwrap_or(0.0);
            certs.push(Certification::at_most(
                "preservation-amplitude",
                "A(t)x(t) - (c1 sin(wt) + c2 cos(wt)) -> 0",
                pres.amplitude_rel_diff,
                asympt::AMPLITUDE_TOLERANCE,
            ));
            certs.push(Certification::at_most(
                "converse-convergence",
                "preserved => int A sin(ws) y2, int A cos(ws) y2 converge",
                if conv.sin_converged && conv.cos_converged {
                    0.0
                } else {
                    worst(&conv.sin_increments).max(worst(&conv.cos_increments))
                },
                0.0,
            ));
        }
        if let (Some((c1, c2)), Some((o1, o2))) = (pres.predicted, pres.observed_w) {
            let amp = c1.hypot(c2);
            let rel = if amp > 1e-300 { (o1.hypot(o2) - amp).abs() / amp } else { o1.hypot(o2) };
            certs.push(Certification::at_most(
                "w-constants",
                "A(t)W(t) -> c1 sin(wt) + c2 cos(wt), c1 = (w^3 - w)Ic + 2w^2 Is",
                rel,
                0.02,
            ));
        }
        (Some(est), Some(pres), Some(conv))
    } else {
        (None, None, None)
    };

    certs.extend(algebra_certifications(config.omega, t0, config.horizon));
    certs.extend(resolvent_certifications(&family, config.omega, config.horizon)?);
    let kernels = kernel_lattice(&family, config.omega)?;

    let report = RunReport {
        config: config.clone(),
        hypotheses,
        verdicts,
        contradictions,
        fits,
        limits,
        preservation,
        converse,
        certifications: certs,
        artifacts: Vec::new(),
    };
    Ok(ScenarioRun {
        report,
        trajectory: traj,
        kernels,
    })
}

/// Run several scenarios on separate threads, results in input order.
pub fn run_scenarios(configs: &[ScenarioConfig]) -> Vec<Result<ScenarioRun>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || run_scenario(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}

/// Fine-grid checks of the cascade against quadrature and the `K₃`
/// representation, plus the `W` identity and the `U₂` normalization.
fn filter_certifications(
    spec: &SystemSpec,
    family: &DampingFamily,
    forcing: &Forcing,
) -> Result<Vec<Certification>> {
    let end = fine_end(spec.t0, spec.period());
    let grid = Grid::for_omega(spec.t0, end, spec.omega, FINE_PER_PERIOD)?;
    let fine = integrate::integrate_forced(spec, family, forcing, &grid, FINE_TOL, false)?;
    let sparse: Vec<f64> = fine.times.iter().step_by(QUADRATURE_STRIDE).copied().collect();
    let (q1, q2) = filters::y_filters_quadrature(forcing, spec.omega, spec.t0, &sparse)?;
    let d1 = q1.max_difference(&FilterOracleResult::cascade(&fine, 1));
    let d2 = q2.max_difference(&FilterOracleResult::cascade(&fine, 2));

    let rest = if fine.at_rest() {
        fine.clone()
    } else {
        let spec0 = SystemSpec::at_rest(spec.omega, spec.t0)?;
        integrate::integrate_forced(&spec0, family, forcing, &grid, FINE_TOL, false)?
    };
    let rec = filters::y2_from_x(&rest, family, QUADRATURE_STRIDE)?;
    let d3 = rec.max_difference(&FilterOracleResult::cascade(&rest, 2));

    let mut w_gap: f64 = 0.0;
    let mut w_scale: f64 = 0.0;
    for i in (0..fine.len()).step_by(QUADRATURE_STRIDE) {
        let direct = conditions::w_direct(&fine, i);
        w_gap = w_gap.max((direct - conditions::w_from_normalized(&fine, i)).abs());
        w_scale = w_scale.max(direct.abs());
    }

    let weighted: Vec<f64> = (0..fine.len())
        .map(|i| (spec.omega * fine.times[i]).cos() * fine.a(i) * fine.y2[i])
        .collect();
    let running = quad::cumulative_simpson(&weighted, fine.spacing());
    let mut u_gap: f64 = 0.0;
    let mut u_scale: f64 = 0.0;
    for (i, r) in running.iter().enumerate() {
        u_gap = u_gap.max((fine.a(i) * fine.u2[i] - r).abs());
        u_scale = u_scale.max(r.abs());
    }
    let rel = |gap: f64, scale: f64| if scale > 1e-300 { gap / scale } else { gap };

    Ok(vec![
        Certification::at_most("filter-y1-quadrature", "y1 = e_{w^2} * f", d1, FILTER_TOLERANCE),
        Certification::at_most("filter-y2-quadrature", "y2 = e_{w^2} * y1 = h * f", d2, FILTER_TOLERANCE),
        Certification::at_most(
            "filter-y2-k3",
            "y2(t) = x(t) + int K3(t,s) x(s) ds",
            d3,
            FILTER_TOLERANCE,
        ),
        Certification::at_most(
            "w-identity",
            "A(t)W(t) = C1(t) A U2 + C2(t) A V2",
            rel(w_gap, w_scale),
            W_TOLERANCE,
        ),
        Certification::at_most(
            "normalized-u2",
            "A(t)U2(t) = int cos(ws) A(s) y2(s) ds",
            rel(u_gap, u_scale),
            LIOUVILLE_TOLERANCE,
        ),
    ])
}

/// Exact identities of the oscillation algebra at this `ω`.
pub fn algebra_certifications(omega: f64, t0: f64, horizon: f64) -> Vec<Certification> {
    let w2 = omega * omega;
    let det_exact = omega * (w2 + 1.0);
    let c_exact = w2 * (w2 + 1.0) * (w2 + 1.0);
    let (mut det_gap, mut c_gap): (f64, f64) = (0.0, 0.0);
    for k in 0..=200 {
        let t = t0 + horizon * k as f64 / 200.0;
        let m = conditions::oscillation_matrix(omega, t);
        det_gap = det_gap.max((m.det - det_exact).abs() / det_exact);
        let (c1, c2) = conditions::c_coefficients(omega, t);
        c_gap = c_gap.max((c1 * c1 + c2 * c2 - c_exact).abs() / c_exact);
    }
    let transform_gap = match conditions::forcing_transform(omega) {
        Ok((m, det)) => {
            let entries = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            (entries - det).abs().max((det - w2 * (w2 + 1.0)).abs()) / det
        }
        Err(_) => f64::INFINITY,
    };
    vec![
        Certification::at_most("oscillation-det", "det M(t) = w(w^2 + 1)", det_gap, 1e-12),
        Certification::at_most("c-norm", "C1^2 + C2^2 = w^2(w^2 + 1)^2", c_gap, 1e-12),
        Certification::at_most(
            "forcing-transform-det",
            "det [[w^2, w], [-w, w^2]] = w^2(w^2 + 1)",
            transform_gap,
            4.0 * f64::EPSILON,
        ),
    ]
}

/// Green's function and resolvent certifications on a sparse `(t, s)` lattice.
pub fn resolvent_certifications(
    family: &DampingFamily,
    omega: f64,
    horizon: f64,
) -> Result<Vec<Certification>> {
    let t0 = family.t0();
    let period = 2.0 * std::f64::consts::PI / omega;
    let sources = [t0, t0 + period, t0 + 4.0 * period];
    let span = horizon.min(200.0);
    let mut certs = Vec::new();

    let mut gronwall: f64 = 0.0;
    let mut expansion: f64 = 0.0;
    let mut wronskian: f64 = 0.0;
    for &s in &sources {
        let n = (span / period * 20.0).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|k| s + span * k as f64 / n as f64).collect();
        gronwall = gronwall.max(resolvent::certify_gronwall(family, omega, s, &grid)?.max_ratio);
        for g in resolvent::green_states(family, omega, s, &grid)? {
            wronskian = wronskian.max((g.g * g.g_ts - g.g_s * g.g_t - 1.0).abs());
        }
        for k in 1..=8 {
            let t = s + 0.5 * period * k as f64;
            let c = resolvent::certify_expansion_error(family, omega, s, t)?;
            expansion = expansion.max(c.actual.abs() / (c.bound + 100.0 * GREEN_TOL));
        }
    }
    certs.push(Certification::at_most(
        "gronwall",
        "|G(t,s)| <= exp(Q(s)/w)/w",
        gronwall,
        1.0 + 100.0 * GREEN_TOL,
    ));
    certs.push(Certification::at_most(
        "expansion-error",
        "|G - sin/w + (1/w^2) int sin sin q| <= e^{Q/w} Q^2/(2w^3)",
        expansion,
        1.0,
    ));
    certs.push(Certification::at_most(
        "wronskian",
        "G G_ts - G_s G_t = 1",
        wronskian,
        1e-8,
    ));

    let mut picard: f64 = 0.0;
    for k in [1.0, 2.0] {
        let t = t0 + k * period;
        let direct = resolvent::green_direct(family, omega, t0, &[t])?[0];
        let iterate = resolvent::green_picard(family, omega, t0, t, PICARD_ITERATIONS)?;
        picard = picard.max((iterate - direct).abs());
    }
    certs.push(Certification::at_most(
        "picard",
        "G = sin(w(t-s))/w - (1/w) int sin(w(t-tau)) q G",
        picard,
        PICARD_TOLERANCE,
    ));

    let s = t0 + period;
    let diag = resolvent::kernels_at(family, omega, s, s, None)?;
    certs.push(Certification::at_most(
        "kernel-diagonal",
        "K1(t,t) = 1, R_t(t,t) = 1",
        (diag.k1 - 1.0).abs() + (diag.r_t - 1.0).abs(),
        1e-12,
    ));
    let fd = resolvent::k4_fd_disagreement(
        family,
        omega,
        t0 + 3.0 * period,
        s,
        resolvent::default_fd_step(omega),
    )?
    .unwrap_or(0.0);
    certs.push(Certification::at_most(
        "k4-finite-difference",
        "K4 = w^2 K1 - dK1/ds",
        fd,
        FD_TOLERANCE,
    ));

    let sweep = resolvent::kernel_bound_sweep(family, omega, t0, t0 + horizon.min(1000.0))?;
    certs.push(Certification::at_most(
        "kernel-bounds",
        "|K1|, |K2| <= M E(t,s)",
        sweep.k1_slope.max(sweep.k2_slope),
        BOUNDED_SLOPE,
    ));

    for t in WEIGHT_TIMES.into_iter().filter(|&t| t > t0) {
        let w = resolvent::certify_l1_weights(family, t)?;
        certs.push(Certification::at_most(
            format!("l1-weight-p(t={t})"),
            "int E p ds <= 2",
            w.w1,
            w.bound1,
        ));
        certs.push(Certification::at_most(
            format!("l1-weight-e(t={t})"),
            "p(t) int E ds <= 2",
            w.w2,
            w.bound2,
        ));
        certs.push(Certification::at_most(
            format!("l1-weight-q(t={t})"),
            "int E |q| ds <= p(t0)",
            w.w3,
            w.bound3,
        ));
    }
    Ok(certs)
}

/// Kernel values for three source times, each over ten periods.
pub fn kernel_lattice(family: &DampingFamily, omega: f64) -> Result<Vec<KernelSet>> {
    let t0 = family.t0();
    let period = 2.0 * std::f64::consts::PI / omega;
    let mut out = Vec::new();
    for s in [t0, t0 + period, t0 + 5.0 * period] {
        let grid: Vec<f64> = (0..=80).map(|k| s + period * k as f64 / 8.0).collect();
        out.extend(resolvent::kernels_along(family, omega, s, &grid)?);
    }
    Ok(out)
}

/// Only the algebra and resolvent certifications, for `certify <scenario>`.
pub fn certify_scenario(config: &ScenarioConfig) -> Result<Vec<Certification>> {
    let family = config.family()?;
    let mut certs = algebra_certifications(config.omega, family.t0(), config.horizon);
    certs.extend(resolvent_certifications(&family, config.omega, config.horizon)?);
    Ok(certs)
}

fn io_err(path: &Path, e: std::io::Error) -> LabError {
    LabError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Write CSVs, SVGs and `report.json` into `dir`. Artifact paths in the
/// report are relative to `dir`, so the report itself is reproducible.
pub fn write_outputs(run: &mut ScenarioRun, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let name = run.report.config.name.clone();
    let create = |file: &str| -> Result<BufWriter<File>> {
        let path = dir.join(file);
        Ok(BufWriter::new(File::create(&path).map_err(|e| io_err(&path, e))?))
    };
    run.trajectory.write_csv(create("trajectory.csv")?)?;
    conditions::write_verdicts_csv(create("verdicts.csv")?, &name, &run.report.verdicts)?;
    asympt::write_fits_csv(create("fits.csv")?, &name, &run.report.fits)?;
    resolvent::write_kernels_csv(create("kernels.csv")?, &run.kernels)?;
    write_certifications_csv(create("certifications.csv")?, &name, &run.report.certifications)?;
    let mut artifacts: Vec<String> = [
        "trajectory.csv",
        "verdicts.csv",
        "fits.csv",
        "kernels.csv",
        "certifications.csv",
    ]
    .map(String::from)
    .to_vec();
    let last_fit = run.report.fits.last();
    for p in plot::emit_plots(dir, &name, &run.trajectory, last_fit)? {
        if let Some(f) = p.file_name() {
            artifacts.push(f.to_string_lossy().into_owned());
        }
    }
    artifacts.push("report.json".into());
    run.report.artifacts = artifacts;
    let path = dir.join("report.json");
    std::fs::write(&path, run.report.to_json()).map_err(|e| io_err(&path, e))?;
    Ok(())
}
