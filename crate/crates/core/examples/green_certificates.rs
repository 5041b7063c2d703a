//! Green's function of the transformed equation, three ways: direct
//! integration, Picard iteration of the Volterra equation, and the
//! first-order expansion with its certified error bound.

use weakdamp::coeffs::{default_tail_horizon, tail_q, DampingFamily};
use weakdamp::resolvent::{
    certify_expansion_error, certify_gronwall, green_direct, green_picard, kernels_at,
    default_fd_step,
};

fn main() -> weakdamp::Result<()> {
    let fam = DampingFamily::power(1.0, 1.0)?;
    let (w, s) = (1.0, 0.0);
    let q = tail_q(&fam, s, default_tail_horizon(s))?.value;
    println!("Q({s}) = {q:.6}, Gronwall bound exp(Q/w)/w = {:.6}", (q / w).exp() / w);

    let ts = [1.0, 3.0, 6.0, 12.0];
    let direct = green_direct(&fam, w, s, &ts)?;
    for (t, g) in ts.iter().zip(&direct) {
        print!("G({t:>4}, 0) = {g:+.10}  picard:");
        for n in [1, 3, 6] {
            print!(" {:.1e}", (green_picard(&fam, w, s, *t, n)? - g).abs());
        }
        println!();
    }

    let grid: Vec<f64> = (0..=1000).map(|k| 0.2 * k as f64).collect();
    let g = certify_gronwall(&fam, w, s, &grid)?;
    println!("max |G| w exp(-Q/w) = {:.6} -> {}", g.max_ratio, if g.passed { "certified" } else { "violated" });
    for t in [2.0, 10.0, 50.0] {
        let e = certify_expansion_error(&fam, w, s, t)?;
        println!("expansion error at t = {t:>4}: {:.3e} <= {:.3e}", e.actual.abs(), e.bound);
    }

    let k = kernels_at(&fam, w, 8.0, 2.0, Some(default_fd_step(w)))?;
    println!("kernels at (8, 2): R {:.6} K1 {:.6} K2 {:.6} K4 {:.6} P1 {:.2e} P4 {:.2e}", k.r, k.k1, k.k2, k.k4, k.p1, k.p4);
    Ok(())
}
