use obliq_core::estimators::{self, Method};
use obliq_core::measurement_error::{kappa_tilde, madansky_variances, mle_circularity, table3_row};
use obliq_core::oblique::{
    lambda_for_slope, oblique_angle, p4_eval, solve_slope_for_lambda, sse_oblique,
    sse_oblique_weighted,
};
use obliq_core::{summarize, PairedSample, SummaryStats};
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn stats_strategy() -> impl Strategy<Value = SummaryStats> {
    (
        5usize..500,
        0.05f64..20.0,
        0.05f64..20.0,
        0.02f64..0.98,
        any::<bool>(),
    )
        .prop_map(|(n, sxx, syy, r, negative)| {
            let rho = if negative { -r } else { r };
            SummaryStats::from_correlation(n, sxx, syy, rho, 0.0, 0.0).unwrap()
        })
}

fn positive_stats() -> impl Strategy<Value = SummaryStats> {
    (5usize..500, 0.05f64..20.0, 0.05f64..20.0, 0.02f64..0.98).prop_map(|(n, sxx, syy, r)| {
        SummaryStats::from_correlation(n, sxx, syy, r, 0.0, 0.0).unwrap()
    })
}

/// Noisy samples around a line with a random slope.
fn sample_strategy() -> impl Strategy<Value = PairedSample> {
    (
        -3.0f64..3.0,
        0.2f64..4.0,
        prop::collection::vec((-10.0f64..10.0, -1.0f64..1.0), 8..60),
    )
        .prop_filter_map("needs spread", |(slope, noise, pts)| {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts
                .iter()
                .map(|p| slope * p.0 + noise * p.1 * 5.0)
                .collect();
            let sample = PairedSample::new(xs, ys).ok()?;
            let s = summarize(&sample).ok()?;
            (s.rho.abs() > 0.05 && s.rho.abs() < 0.999).then_some(sample)
        })
}

fn naive_stats(xs: &[f64], ys: &[f64]) -> [f64; 5] {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut out = [0.0; 5];
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        out[0] += dx * dx;
        out[1] += dy * dy;
        out[2] += dx * dy;
        out[3] += dx * dx * dx * dy;
        out[4] += dx * dy * dy * dy;
    }
    out
}

fn oblique_slope(lambda: f64, s: &SummaryStats) -> f64 {
    solve_slope_for_lambda(lambda, s).unwrap().beta1
}

proptest! {
    #[test]
    fn summary_ignores_order(sample in sample_strategy(), seed in any::<u64>()) {
        let mut pairs: Vec<(f64, f64)> = sample.xs().iter().copied().zip(sample.ys().iter().copied()).collect();
        let k = (seed as usize) % pairs.len();
        pairs.rotate_left(k);
        pairs.reverse();
        let a = summarize(&sample).unwrap();
        let b = summarize(&PairedSample::from_pairs(&pairs).unwrap()).unwrap();
        for (u, v) in [(a.sxx, b.sxx), (a.syy, b.syy), (a.sxy, b.sxy), (a.sxxxy, b.sxxxy), (a.sxyyy, b.sxyyy)] {
            prop_assert!(rel_close(u, v, 1e-12), "{} vs {}", u, v);
        }
    }

    #[test]
    fn summary_under_affine_maps(sample in sample_strategy(), c in 0.1f64..10.0, d in 0.1f64..10.0,
                                 a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let s = summarize(&sample).unwrap();
        let xs: Vec<f64> = sample.xs().iter().map(|x| c * x + a).collect();
        let ys: Vec<f64> = sample.ys().iter().map(|y| d * y + b).collect();
        let t = summarize(&PairedSample::new(xs, ys).unwrap()).unwrap();
        prop_assert!(rel_close(t.sxx, c * c * s.sxx, 1e-12));
        prop_assert!(rel_close(t.syy, d * d * s.syy, 1e-12));
        prop_assert!(rel_close(t.sxy, c * d * s.sxy, 1e-12));
        prop_assert!(rel_close(t.rho, s.rho, 1e-12));
        prop_assert!(rel_close(t.sxxxy, c.powi(3) * d * s.sxxxy, 1e-10));
        prop_assert!(rel_close(t.sxyyy, c * d.powi(3) * s.sxyyy, 1e-10));
    }

    #[test]
    fn summary_matches_naive_definitions(sample in sample_strategy()) {
        let s = summarize(&sample).unwrap();
        let naive = naive_stats(sample.xs(), sample.ys());
        for (u, v) in [s.sxx, s.syy, s.sxy, s.sxxxy, s.sxyyy].iter().zip(naive) {
            prop_assert!(rel_close(*u, v, 1e-12), "{} vs {}", u, v);
        }
    }

    #[test]
    fn quartic_has_two_real_roots_of_opposite_sign(s in stats_strategy(), lambda in 0.01f64..0.99) {
        let scale = (s.syy / s.sxx).sqrt();
        let steps = 40_000;
        let (lo, hi) = (-200.0 * scale, 200.0 * scale);
        let mut roots = Vec::new();
        let mut prev = p4_eval(lo, lambda, &s).unwrap();
        for i in 1..=steps {
            let b = lo + (hi - lo) * i as f64 / steps as f64;
            let v = p4_eval(b, lambda, &s).unwrap();
            if v == 0.0 || v.signum() != prev.signum() {
                roots.push(b);
            }
            prev = v;
        }
        prop_assert_eq!(roots.len(), 2, "{:?}", roots);
        prop_assert!(roots[0] < 0.0 && roots[1] > 0.0);
    }

    #[test]
    fn solver_root_is_a_quartic_zero_inside_the_ols_interval(s in stats_strategy(), lambda in 0.0f64..=1.0) {
        let b = oblique_slope(lambda, &s);
        let (ver, hor) = (s.sxy / s.sxx, s.syy / s.sxy);
        let (lo, hi) = (ver.min(hor), ver.max(hor));
        prop_assert!(b >= lo * (1.0 + 1e-12f64.copysign(-lo)) && b <= hi * (1.0 + 1e-12f64.copysign(hi)));
        prop_assert!(b.signum() == s.sxy.signum());
    }

    #[test]
    fn slope_is_monotone_in_lambda(s in positive_stats(), l1 in 0.0f64..=1.0, l2 in 0.0f64..=1.0) {
        let (a, b) = (l1.min(l2), l1.max(l2));
        prop_assert!(oblique_slope(a, &s) >= oblique_slope(b, &s) * (1.0 - 1e-12));
    }

    #[test]
    fn lambda_round_trip(s in stats_strategy(), lambda in 0.01f64..0.99) {
        let b = oblique_slope(lambda, &s);
        let back = lambda_for_slope(b, &s).unwrap();
        prop_assert!((back - lambda).abs() <= 1e-9, "{} -> {} -> {}", lambda, b, back);
    }

    #[test]
    fn oblique_root_scales_with_units(s in stats_strategy(), lambda in 0.0f64..=1.0,
                                      c in 0.1f64..10.0, d in 0.1f64..10.0) {
        let t = SummaryStats::from_correlation(s.n, c * c * s.sxx, d * d * s.syy, s.rho, 0.0, 0.0).unwrap();
        prop_assert!(rel_close(oblique_slope(lambda, &t), d / c * oblique_slope(lambda, &s), 1e-10));
    }

    #[test]
    fn angle_decreases_in_lambda(b in 0.01f64..100.0, l1 in 0.0f64..=1.0, l2 in 0.0f64..=1.0) {
        prop_assume!((l1 - l2).abs() > 1e-6);
        let (lo, hi) = (l1.min(l2), l1.max(l2));
        prop_assert!(oblique_angle(lo, b) > oblique_angle(hi, b));
        let sum = oblique_angle(0.0, b) + oblique_angle(1.0, b);
        prop_assert!((sum - (270.0 - 2.0 * b.atan().to_degrees())).abs() < 1e-9);
        prop_assert!((oblique_angle(0.0, 1.0) - (180.0 - oblique_angle(1.0, 1.0))).abs() < 1e-12);
    }

    #[test]
    fn weighted_objective_is_proportional_at_gm_variances(s in stats_strategy(), lambda in 0.0f64..=1.0,
                                                          b1 in 0.1f64..5.0, b2 in 0.1f64..5.0) {
        let gm = estimators::geometric_mean(&s).unwrap().beta1;
        let v = madansky_variances(gm, &s).unwrap();
        let sign = s.sxy.signum();
        let ratio = |b: f64| {
            let b = sign * b;
            let plain = sse_oblique(s.intercept(b), b, lambda, &s).unwrap();
            let weighted = sse_oblique_weighted(s.intercept(b), b, lambda, &s, v.sigma_delta_sq, v.sigma_tau_sq).unwrap();
            weighted / plain
        };
        let expected = s.n as f64 / ((1.0 - s.rho.abs()) * s.sxx * s.syy);
        prop_assert!(rel_close(ratio(b1), expected, 1e-9));
        prop_assert!(rel_close(ratio(b2), expected, 1e-9));
    }

    #[test]
    fn estimators_lie_between_the_ols_slopes(sample in sample_strategy(), kappa in 0.001f64..1000.0) {
        let s = summarize(&sample).unwrap();
        let ver = s.sxy / s.sxx;
        let hor = s.syy / s.sxy;
        let (lo, hi) = (ver.min(hor), ver.max(hor));
        let slack = 1e-12 * hi.abs().max(lo.abs());
        let slopes = [
            estimators::geometric_mean(&s).unwrap().beta1,
            estimators::perpendicular(&s).unwrap().beta1,
            estimators::moment_clamped(&s).unwrap().beta1,
            estimators::minimum_deviation(&s).unwrap().beta1,
            estimators::mle(&s, kappa).unwrap().beta1,
        ];
        for b in slopes {
            prop_assert!(b >= lo - slack && b <= hi + slack, "{} not in [{}, {}]", b, lo, hi);
        }
    }

    #[test]
    fn likelihood_special_ratios(s in stats_strategy()) {
        let gm = estimators::geometric_mean(&s).unwrap().beta1;
        prop_assert!(rel_close(estimators::mle(&s, s.syy / s.sxx).unwrap().beta1, gm, 1e-12));
        let per = estimators::perpendicular(&s).unwrap().beta1;
        prop_assert!(rel_close(estimators::mle(&s, 1.0).unwrap().beta1, per, 1e-12));
    }

    #[test]
    fn likelihood_is_monotone_in_kappa(s in positive_stats(), k1 in 0.0f64..1e4, k2 in 0.0f64..1e4) {
        let (a, b) = (k1.min(k2), k1.max(k2));
        let ma = estimators::mle(&s, a).unwrap().beta1;
        let mb = estimators::mle(&s, b).unwrap().beta1;
        prop_assert!(ma >= mb * (1.0 - 1e-12));
    }

    #[test]
    fn copas_picks_an_endpoint(s in stats_strategy()) {
        let c = estimators::copas(&s).unwrap().beta1;
        let options = [
            estimators::ols_vertical(&s).unwrap().beta1,
            estimators::ols_horizontal(&s).unwrap().beta1,
            estimators::geometric_mean(&s).unwrap().beta1,
        ];
        prop_assert!(options.contains(&c));
    }

    #[test]
    fn kappa_tilde_decreases_across_the_interval(s in stats_strategy(), u1 in 0.001f64..0.999, u2 in 0.001f64..0.999) {
        prop_assume!((u1 - u2).abs() > 1e-6);
        let ver = s.sxy / s.sxx;
        let hor = s.syy / s.sxy;
        let at = |u: f64| ver + u * (hor - ver);
        let (lo, hi) = (u1.min(u2), u1.max(u2));
        prop_assert!(kappa_tilde(at(lo), &s).unwrap() > kappa_tilde(at(hi), &s).unwrap());
    }

    #[test]
    fn gm_variance_ratio_is_a_fixed_point(s in stats_strategy()) {
        let gm = estimators::geometric_mean(&s).unwrap().beta1;
        let v = madansky_variances(gm, &s).unwrap();
        prop_assert!(rel_close((v.sigma_tau_sq / v.sigma_delta_sq).sqrt(), gm.abs(), 1e-10));
    }

    #[test]
    fn circularity_recovers_interior_slopes(s in stats_strategy(), u in 0.001f64..0.999) {
        let b = s.sxy / s.sxx + u * (s.syy / s.sxy - s.sxy / s.sxx);
        prop_assert!(rel_close(mle_circularity(b, &s).unwrap(), b, 1e-9));
    }

    #[test]
    fn closed_form_rows_match_moments(s in stats_strategy(), kappa in 0.01f64..100.0) {
        for method in [Method::Ver, Method::Hor, Method::Gm, Method::Per, Method::Mle] {
            let b = match method {
                Method::Ver => estimators::ols_vertical(&s),
                Method::Hor => estimators::ols_horizontal(&s),
                Method::Gm => estimators::geometric_mean(&s),
                Method::Per => estimators::perpendicular(&s),
                _ => estimators::mle(&s, kappa),
            }.unwrap().beta1;
            let closed = table3_row(method, &s, Some(kappa)).unwrap();
            let moments = madansky_variances(b, &s).unwrap();
            let scale = (s.sxx + s.syy) / s.n as f64;
            prop_assert!((closed.sigma_delta_sq - moments.sigma_delta_sq).abs() <= 1e-10 * scale);
            prop_assert!((closed.sigma_tau_sq - moments.sigma_tau_sq).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn slopes_follow_the_units(sample in sample_strategy(), c in 0.1f64..10.0, d in 0.1f64..10.0, kappa in 0.01f64..100.0) {
        let s = summarize(&sample).unwrap();
        let xs: Vec<f64> = sample.xs().iter().map(|x| c * x).collect();
        let ys: Vec<f64> = sample.ys().iter().map(|y| d * y).collect();
        let t = summarize(&PairedSample::new(xs, ys).unwrap()).unwrap();
        let k = d / c;
        let pairs = [
            (estimators::ols_vertical(&s), estimators::ols_vertical(&t)),
            (estimators::ols_horizontal(&s), estimators::ols_horizontal(&t)),
            (estimators::geometric_mean(&s), estimators::geometric_mean(&t)),
            (estimators::moment_raw(&s), estimators::moment_raw(&t)),
            (estimators::moment_clamped(&s), estimators::moment_clamped(&t)),
            (estimators::minimum_deviation(&s), estimators::minimum_deviation(&t)),
            (estimators::mle(&s, kappa), estimators::mle(&t, k * k * kappa)),
        ];
        for (a, b) in pairs {
            let (a, b) = (a.unwrap().beta1, b.unwrap().beta1);
            prop_assert!(rel_close(b, k * a, 1e-8), "{} vs {}", b, k * a);
        }
    }
}

#[test]
fn moment_slope_is_continuous_where_copas_jumps() {
    // Syy crosses Sxx = 1 while the fourth moments stay fixed.
    let at = |syy: f64| SummaryStats::from_correlation(1, 1.0, syy, 0.5, 10.0, 5.0).unwrap();
    let eps = 1e-7;
    let below = at(1.0 - eps);
    let above = at(1.0 + eps);
    let mom_jump = (estimators::moment_clamped(&above).unwrap().beta1
        - estimators::moment_clamped(&below).unwrap().beta1)
        .abs();
    let copas_jump =
        (estimators::copas(&above).unwrap().beta1 - estimators::copas(&below).unwrap().beta1).abs();
    assert!(mom_jump < 10.0 * eps, "{}", mom_jump);
    assert!(copas_jump > 1.0, "{}", copas_jump);
}
