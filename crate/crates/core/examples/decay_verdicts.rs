//! Classify the decay statements on a decaying forcing and on the resonant
//! counterexample, where y₁ = cos(ωt)/√(1+t) is exact by construction.
//! With f = 2/(1+t)² the solution decays like (1+t)^{-1/2}, which over 400
//! periods falls just short of the tenfold drop the window test asks for;
//! four times the horizon settles it.

use weakdamp::coeffs::{DampingFamily, Forcing, SystemSpec};
use weakdamp::conditions::{contradictions, statement_verdicts, Thresholds};
use weakdamp::integrate::{integrate_forced, Grid};

fn main() -> weakdamp::Result<()> {
    let fam = DampingFamily::power(1.0, 1.0)?;
    for (label, forcing, periods) in [
        ("f = 2/(1+t)^2, 400 periods", Forcing::PowerDecay { g: 2.0 }, 400.0),
        ("f = 2/(1+t)^2, 1600 periods", Forcing::PowerDecay { g: 2.0 }, 1600.0),
        ("resonant, 400 periods", Forcing::Resonant { g: 0.5, omega: 1.0 }, 400.0),
    ] {
        let spec = SystemSpec::at_rest(1.0, 0.0)?;
        let grid = Grid::for_omega(0.0, periods * 2.0 * std::f64::consts::PI, 1.0, 40)?;
        let traj = integrate_forced(&spec, &fam, &forcing, &grid, 1e-10, false)?;
        let verdicts = statement_verdicts(&traj, &Thresholds::default());
        println!("{label}:");
        for v in &verdicts {
            let finals: Vec<String> = v
                .evidence
                .iter()
                .filter(|(k, _)| k.ends_with("final_sup"))
                .map(|(k, x)| format!("{}={x:.2e}", k.trim_end_matches(".final_sup")))
                .collect();
            println!("  ({}) {:<12} {}", v.statement, v.result.to_string(), finals.join(" "));
        }
        println!("  contradictions: {:?}", contradictions(&verdicts));
    }
    Ok(())
}
