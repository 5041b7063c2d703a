//! Check the standing hypotheses on a few damping coefficients: p positive
//! and decreasing, ∫p = ∞, ∫p² < ∞, and an integrable residual potential.
//! The last-decade test is a heuristic: slowly converging integrals such as
//! ∫(1+t)^{-3/2} come out inconclusive at this horizon.

use weakdamp::coeffs::{tail_q, validate_hypotheses, DampingFamily};

fn main() -> weakdamp::Result<()> {
    let families = [
        DampingFamily::Bessel,
        DampingFamily::power(1.0, 1.0)?,
        DampingFamily::power(0.5, 0.75)?,
        // too fast: ∫p converges, so this is not weak damping
        DampingFamily::power(1.0, 1.5)?,
        // too slow: p² is not integrable
        DampingFamily::power(1.0, 0.4)?,
    ];
    for fam in families {
        let r = validate_hypotheses(&fam, fam.t0() + 1e4, 400)?;
        println!(
            "{:<20} positive {} decreasing {} | int p {:?}, int p^2 {:?}, int |q| {:?} => {}",
            fam.descriptor(),
            r.positive,
            r.decreasing,
            r.integral_p.behavior,
            r.integral_p_squared.behavior,
            r.integral_abs_q.behavior,
            if r.satisfied() { "confirmed" } else { "not confirmed" }
        );
        match tail_q(&fam, fam.t0(), 1e4) {
            Ok(q) => println!("    Q(t0) = {:.6} (tail exponent {:.2})", q.value, q.exponent),
            Err(e) => println!("    Q(t0): {e}"),
        }
    }
    Ok(())
}
