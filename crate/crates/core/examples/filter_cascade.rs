//! y₁ = e * f and y₂ = e * y₁ with e(t) = exp(-ω²t), computed by the ODE
//! cascade, by direct quadrature, and rebuilt from x through K₃.

use weakdamp::coeffs::{DampingFamily, Forcing, SystemSpec};
use weakdamp::filters::{y2_from_x, y_filters_quadrature, FilterOracleResult};
use weakdamp::integrate::{integrate_forced, Grid};

fn main() -> weakdamp::Result<()> {
    let omega = 2.0;
    let fam = DampingFamily::power(1.0, 1.0)?;
    let forcing = Forcing::PowerDecay { g: 2.0 };
    let spec = SystemSpec::at_rest(omega, 0.0)?;
    let grid = Grid::for_omega(0.0, 30.0, omega, 400)?;
    let traj = integrate_forced(&spec, &fam, &forcing, &grid, 1e-11, false)?;

    let times: Vec<f64> = traj.times.iter().step_by(200).copied().collect();
    let (q1, q2) = y_filters_quadrature(&forcing, omega, 0.0, &times)?;
    let rebuilt = y2_from_x(&traj, &fam, 200)?;
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "y2 cascade", "y2 quadrature", "y2 from x");
    for (k, &t) in times.iter().enumerate().step_by(4) {
        let i = traj.index_at(t);
        println!("{t:>8.3} {:>14.9} {:>14.9} {:>14.9}", traj.y2[i], q2.values[k], rebuilt.values[k]);
    }
    let c1 = FilterOracleResult::cascade(&traj, 1);
    let c2 = FilterOracleResult::cascade(&traj, 2);
    println!("max |y1 cascade - quadrature| = {:.2e}", q1.max_difference(&c1));
    println!("max |y2 cascade - quadrature| = {:.2e}", q2.max_difference(&c2));
    println!("max |y2 cascade - K3 rebuild| = {:.2e}", rebuilt.max_difference(&c2));
    Ok(())
}
