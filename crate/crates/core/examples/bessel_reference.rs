//! The unforced oscillator with p = 1/t and ω = 1 is Bessel's equation of
//! order zero. Starting from J₀(1), -J₁(1) the solution is J₀ and
//! √t·x(t) settles to a sinusoid of amplitude √(2/π).

use weakdamp::asympt::envelope_fit;
use weakdamp::cli::config::{J0_AT_1, J1_AT_1};
use weakdamp::coeffs::{DampingFamily, Forcing, SystemSpec};
use weakdamp::integrate::{integrate_forced, Grid};

fn main() -> weakdamp::Result<()> {
    let spec = SystemSpec::new(1.0, J0_AT_1, -J1_AT_1, 1.0)?;
    let grid = Grid::for_omega(1.0, 600.0, 1.0, 40)?;
    let traj = integrate_forced(&spec, &DampingFamily::Bessel, &Forcing::Zero, &grid, 1e-10, false)?;

    for t in [1.0, 2.404825557695773, 10.0, 100.0] {
        let i = traj.index_at(t);
        println!("x({:>9.5}) = {:+.12}", traj.times[i], traj.x[i]);
    }
    let fit = envelope_fit(&traj, (200.0, 400.0))?;
    println!(
        "amplitude over [200, 400]: {:.6}  (sqrt(2/pi) = {:.6})",
        fit.amplitude,
        (2.0 / std::f64::consts::PI).sqrt()
    );
    println!("phase {:.6} rad, residual rms {:.2e}", fit.phase, fit.residual_rms);
    Ok(())
}
