//! A(t)W(t) = ∫A(s)L₃(t-s)y₂(s)ds tends to c₁sin(ωt) + c₂cos(ωt), with the
//! constants given by the limits of ∫A cos(ωs)y₂ and ∫A sin(ωs)y₂.

use weakdamp::cli::builtin_scenario;
use weakdamp::conditions::{estimate_limits, predicted_constants, w_direct, w_from_normalized};
use weakdamp::asympt::w_fit;
use weakdamp::integrate::{integrate_forced, Grid};

fn main() -> weakdamp::Result<()> {
    let cfg = builtin_scenario("power-decay").expect("built-in");
    let (fam, forcing, spec) = (cfg.family()?, cfg.forcing()?, cfg.spec()?);

    let fine = integrate_forced(&spec, &fam, &forcing, &Grid::for_omega(0.0, 50.0, cfg.omega, 800)?, 1e-11, false)?;
    for t in [5.0, 20.0, 50.0] {
        let i = fine.index_at(t);
        println!("t = {t:>4}: direct {:+.10}  via C1 U2 + C2 V2 {:+.10}", w_direct(&fine, i), w_from_normalized(&fine, i));
    }

    let grid = Grid::for_omega(0.0, cfg.horizon, cfg.omega, cfg.samples_per_period)?;
    let traj = integrate_forced(&spec, &fam, &forcing, &grid, cfg.tol, true)?;
    let est = estimate_limits(&traj)?;
    let (c1, c2) = predicted_constants(&est, cfg.omega)?;
    println!("Ic = {:.8}, Is = {:.8} (tail bound {:.1e})", est.ic, est.is, est.tail_bound);
    let end = traj.t_end();
    let fit = w_fit(&traj, (end - 0.25 * cfg.horizon, end))?;
    println!("predicted (c1, c2) = ({c1:+.6}, {c2:+.6})");
    println!("fitted    (c1, c2) = ({:+.6}, {:+.6})", fit.c_sin, fit.c_cos);
    Ok(())
}
