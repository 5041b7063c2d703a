//! Does the forcing change the leading-order shape ρ(t)(c₁sin ωt + c₂cos ωt)?
//! Two-window envelope fits plus the converse test on the weighted integrals.

use weakdamp::asympt::{converse_check, preservation_check};
use weakdamp::cli::builtin_scenario;
use weakdamp::conditions::estimate_limits;
use weakdamp::integrate::{integrate_forced, Grid};

fn main() -> weakdamp::Result<()> {
    for name in ["bessel-expdecay", "power-slow-unforced", "resonant-counterexample"] {
        let cfg = builtin_scenario(name).expect("built-in");
        let spec = cfg.spec()?;
        let grid = Grid::for_omega(spec.t0, spec.t0 + cfg.horizon, cfg.omega, cfg.samples_per_period)?;
        let traj = integrate_forced(&spec, &cfg.family()?, &cfg.forcing()?, &grid, cfg.tol, true)?;
        let est = estimate_limits(&traj)?;
        let report = preservation_check(&traj, &est, None)?;
        let conv = converse_check(&traj)?;
        println!("{name}:");
        for f in &report.fits {
            println!("  window [{:.0}, {:.0}]: amplitude {:.6e} phase {:+.5}", f.window.0, f.window.1, f.amplitude, f.phase);
        }
        println!(
            "  preserved {} | weighted y2 {} | integrals converge: sin {} cos {}",
            report.preserved, report.weighted_y2.verdict, conv.sin_converged, conv.cos_converged
        );
    }
    Ok(())
}
