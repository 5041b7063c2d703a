use std::f64::consts::PI;

use proptest::prelude::*;
use weakdamp::asympt::{fit_sinusoid, phase_difference};
use weakdamp::cli::config::{parse_config, ScenarioConfig};
use weakdamp::coeffs::{residual_potential, tail_q, DampingFamily};
use weakdamp::conditions::{
    c_coefficients, constants_from_limits, forcing_transform, oscillation_matrix, LeadingKernels,
    Verdict,
};
use weakdamp::resolvent::{certify_gronwall, green_direct};

fn family() -> impl Strategy<Value = DampingFamily> {
    prop_oneof![
        Just(DampingFamily::Bessel),
        (0.2f64..2.0, 0.55f64..1.0).prop_map(|(a, b)| DampingFamily::power(a, b).unwrap()),
    ]
}

proptest! {
    #[test]
    fn oscillation_determinant_is_constant(w in 0.1f64..10.0, t in 0.0f64..1e4) {
        let m = oscillation_matrix(w, t);
        let exact = w * (w * w + 1.0);
        prop_assert!((m.det - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn c_coefficients_have_constant_norm(w in 0.1f64..10.0, t in 0.0f64..1e4) {
        let (c1, c2) = c_coefficients(w, t);
        let exact = w * w * (w * w + 1.0).powi(2);
        prop_assert!((c1 * c1 + c2 * c2 - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn forcing_transform_is_invertible(w in 0.01f64..100.0) {
        let (m, det) = forcing_transform(w).unwrap();
        prop_assert_eq!(det, w * w * (w * w + 1.0));
        let entries = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        prop_assert!((entries - det).abs() <= 4.0 * f64::EPSILON * det);
    }

    #[test]
    fn l2_is_a_quarter_period_shift_of_l1(w in 0.1f64..10.0, tau in 0.0f64..100.0) {
        let lk = LeadingKernels::new(w);
        let shifted = w * lk.l1(tau + PI / (2.0 * w));
        prop_assert!((lk.l2(tau) - shifted).abs() <= 1e-10 * (1.0 + w * w));
    }

    #[test]
    fn f_is_an_antiderivative_of_l1(w in 0.1f64..5.0, t in 10.0f64..50.0, s in 0.0f64..10.0) {
        let lk = LeadingKernels::new(w);
        let h = 1e-5;
        let ds = (lk.f(t - s - h) - lk.f(t - s + h)) / (2.0 * h);
        prop_assert!((ds - lk.l1(t - s)).abs() <= 1e-7 * (1.0 + w));
    }

    #[test]
    fn l3_combines_into_the_c_coefficients(w in 0.1f64..5.0, t in 0.0f64..100.0, s in 0.0f64..100.0) {
        // L3(t - s) = C1(t) cos(ws) + C2(t) sin(ws)
        let lk = LeadingKernels::new(w);
        let (c1, c2) = c_coefficients(w, t);
        let (sn, cs) = (w * s).sin_cos();
        let scale = w * (w * w + 1.0);
        prop_assert!((lk.l3(t - s) - (c1 * cs + c2 * sn)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn constants_are_a_scaled_rotation(w in 0.1f64..5.0, ic in -10.0f64..10.0, is in -10.0f64..10.0) {
        let (c1, c2) = constants_from_limits(ic, is, w);
        let norm = w * (w * w + 1.0);
        prop_assert!((c1.hypot(c2) - norm * ic.hypot(is)).abs() <= 1e-12 * norm * (1.0 + ic.hypot(is)));
    }

    #[test]
    fn sinusoid_fit_recovers_coefficients(
        w in 0.3f64..4.0,
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        start in 0.0f64..100.0,
    ) {
        let n = 4000;
        let span = 12.0 * 2.0 * PI / w;
        let times: Vec<f64> = (0..n).map(|k| start + span * k as f64 / n as f64).collect();
        let values: Vec<f64> = times.iter().map(|&t| a * (w * t).sin() + b * (w * t).cos()).collect();
        let (cs, cc, rms) = fit_sinusoid(&times, &values, w);
        prop_assert!((cs - a).abs() < 1e-9 && (cc - b).abs() < 1e-9);
        prop_assert!(rms < 1e-9);
    }

    #[test]
    fn phase_difference_is_minimal(a in -10.0f64..10.0, b in -10.0f64..10.0, k in -3i32..3) {
        let d = phase_difference(a, b + 2.0 * PI * k as f64);
        prop_assert!((0.0..=PI + 1e-12).contains(&d));
        prop_assert!((d - phase_difference(b, a)).abs() < 1e-9);
    }

    #[test]
    fn residual_potential_formula(fam in family(), x in 0.0f64..1e3) {
        let t = fam.t0() + x;
        let q = residual_potential(&fam, t).unwrap();
        prop_assert!((q - (-0.25 * fam.p(t).powi(2) - 0.5 * fam.dp(t))).abs() <= 1e-15 * (1.0 + q.abs()));
    }

    #[test]
    fn decay_factor_is_multiplicative(fam in family(), a in 0.0f64..50.0, b in 0.0f64..50.0, c in 0.0f64..50.0) {
        let mut v = [a, b, c];
        v.sort_by(f64::total_cmp);
        let [r, s, t] = v.map(|x| fam.t0() + x);
        let lhs = fam.decay_factor(t, s) * fam.decay_factor(s, r);
        prop_assert!((lhs - fam.decay_factor(t, r)).abs() <= 1e-13);
        prop_assert!(fam.decay_factor(t, r) <= 1.0);
    }

    #[test]
    fn tail_integral_decreases(fam in family(), a in 0.0f64..100.0, b in 0.0f64..100.0) {
        let (lo, hi) = (fam.t0() + a.min(b), fam.t0() + a.max(b));
        let horizon = 1e5;
        let q_lo = tail_q(&fam, lo, horizon).unwrap().value;
        let q_hi = tail_q(&fam, hi, horizon).unwrap().value;
        prop_assert!(q_lo >= q_hi - 1e-12);
        prop_assert!(q_hi >= 0.0);
    }

    #[test]
    fn verdict_conjunction(vs in prop::collection::vec(0u8..3, 0..6)) {
        let vs: Vec<Verdict> = vs.into_iter().map(|k| [Verdict::Holds, Verdict::Fails, Verdict::Inconclusive][k as usize]).collect();
        let all = Verdict::all(vs.iter().copied());
        if vs.contains(&Verdict::Fails) {
            prop_assert_eq!(all, Verdict::Fails);
        } else if vs.contains(&Verdict::Inconclusive) {
            prop_assert_eq!(all, Verdict::Inconclusive);
        } else {
            prop_assert_eq!(all, Verdict::Holds);
        }
    }

    #[test]
    fn config_text_round_trips(
        w in 0.2f64..5.0,
        xi0 in -3.0f64..3.0,
        xi1 in -3.0f64..3.0,
        periods in 40.0f64..2000.0,
        tol_exp in -13i32..-6,
        weighted in any::<bool>(),
    ) {
        let cfg = ScenarioConfig {
            name: "prop".into(),
            family: "power:a=0.7,b=0.9".into(),
            forcing: "powerdecay:g=1.5".into(),
            omega: w,
            xi0,
            xi1,
            horizon: periods * 2.0 * PI / w,
            tol: 10f64.powi(tol_exp),
            weighted,
            samples_per_period: 48,
            windows: vec![(10.0, 20.0)],
        };
        prop_assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gronwall_bound_holds(fam in family(), w in 0.5f64..3.0, x in 0.0f64..20.0) {
        let s = fam.t0() + x;
        let period = 2.0 * PI / w;
        let grid: Vec<f64> = (0..=400).map(|k| s + 40.0 * period * k as f64 / 400.0).collect();
        let cert = certify_gronwall(&fam, w, s, &grid).unwrap();
        prop_assert!(cert.passed, "ratio {}", cert.max_ratio);
    }

    #[test]
    fn green_function_starts_like_a_sine(fam in family(), w in 0.5f64..3.0, x in 0.0f64..20.0) {
        let s = fam.t0() + x;
        let h = 1e-3;
        let g = green_direct(&fam, w, s, &[s, s + h]).unwrap();
        prop_assert_eq!(g[0], 0.0);
        prop_assert!((g[1] - (w * h).sin() / w).abs() < 1e-8);
    }
}
