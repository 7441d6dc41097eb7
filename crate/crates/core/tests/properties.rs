use laguerre_edge::decomposition::build_decomposition;
use laguerre_edge::ensemble::{build_tridiagonal, sample_bidiagonal};
use laguerre_edge::geometry::{edge_params, EdgeGeometry};
use laguerre_edge::logdet::{eigen_oracle, run_recursion, tridiagonal_eigenvalues};
use laguerre_edge::marchenko_pastur::{mp_cdf, mp_density};
use laguerre_edge::stats::Moments;
use laguerre_edge::theory::{standardize, CltConstants};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = (usize, f64, f64)> {
    (5usize..400, 0.05f64..=1.0, prop_oneof![Just(1.0), Just(2.0), 0.2f64..4.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursion_is_finite_or_typed_error((n, lambda, alpha) in params(), seed in any::<u64>(), replica in 0u64..1000) {
        let p = edge_params(n, lambda, alpha, None).unwrap();
        let g = EdgeGeometry::build(&p).unwrap();
        let s = sample_bidiagonal(&p, seed, replica).unwrap();
        match run_recursion(&s, &g) {
            Ok(t) => {
                prop_assert!(t.log_abs_cal_d.is_finite());
                prop_assert!(t.max_abs_r.is_finite());
                prop_assert!(t.r.iter().all(|r| r.is_finite()));
                prop_assert!((t.log_abs_d - (t.log_abs_e + g.sum_log_rho_plus())).abs() <= 1e-9 * t.log_abs_d.abs().max(1.0));
                prop_assert!((t.log_abs_cal_d - (t.log_abs_d - n as f64 * (p.m as f64).ln())).abs() <= 1e-9 * t.log_abs_d.abs().max(1.0));
                prop_assert!(standardize(t.log_abs_cal_d, &p).unwrap().is_finite());
            }
            Err(e) => prop_assert!(e.is_resamplable()),
        }
    }

    #[test]
    fn recursion_agrees_with_oracle((n, lambda, alpha) in params(), seed in any::<u64>()) {
        let p = edge_params(n, lambda, alpha, None).unwrap();
        let g = EdgeGeometry::build(&p).unwrap();
        let s = sample_bidiagonal(&p, seed, 0).unwrap();
        if let Ok(t) = run_recursion(&s, &g) {
            let o = eigen_oracle(&s, &p).unwrap();
            prop_assert!((t.log_abs_d - o).abs() < 1e-8 * t.log_abs_d.abs(), "{} vs {}", t.log_abs_d, o);
        }
    }

    #[test]
    fn sampling_is_pure((n, lambda, alpha) in params(), seed in any::<u64>(), replica in any::<u64>()) {
        let p = edge_params(n, lambda, alpha, None).unwrap();
        let a = sample_bidiagonal(&p, seed, replica).unwrap();
        let b = sample_bidiagonal(&p, seed, replica).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn spectrum_is_nonnegative((n, lambda, alpha) in params(), seed in any::<u64>()) {
        let p = edge_params(n, lambda, alpha, None).unwrap();
        let s = sample_bidiagonal(&p, seed, 3).unwrap();
        let (d, o) = build_tridiagonal(&s);
        let ev = tridiagonal_eigenvalues(&d, &o).unwrap();
        let max = ev.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!(ev.iter().all(|&x| x >= -1e-10 * max));
    }

    #[test]
    fn geometry_invariants((n, lambda, alpha) in (5usize..3000, 0.05f64..=1.0, 0.2f64..4.0)) {
        let p = edge_params(n, lambda, alpha, None).unwrap();
        let g = EdgeGeometry::build(&p).unwrap();
        let gm = p.gamma * p.m as f64;
        let (lo, hi) = (0.5 * (gm - (p.m + n - 1) as f64), gm - (p.m - n + 1) as f64);
        for i in 1..=n {
            let rp = g.rho_plus(i);
            prop_assert!(rp >= lo * (1.0 - 1e-12) && rp <= hi * (1.0 + 1e-12));
            prop_assert!(g.rho_minus(i) >= 0.0 && g.rho_minus(i) <= rp);
        }
        for i in 2..=n {
            prop_assert!(g.omega(i) >= 0.0 && g.omega(i) < 1.0);
            prop_assert!(g.gap(i) > 0.0);
            let resid = g.g(i) - 1.0 - g.omega(i) * g.g(i + 1);
            prop_assert!(resid.abs() <= 1e-12 * g.g(i));
        }
        for i in 3..=n {
            prop_assert!(g.omega(i) >= g.omega(i - 1));
        }
    }

    #[test]
    fn decomposition_identity((n, lambda, alpha) in params(), seed in any::<u64>()) {
        prop_assume!(n >= 3);
        let p = edge_params(n, lambda, alpha, None).unwrap();
        let g = EdgeGeometry::build(&p).unwrap();
        let d = build_decomposition(&sample_bidiagonal(&p, seed, 0).unwrap(), &g).unwrap();
        let weighted: f64 = (3..=n).map(|i| g.g(i + 1) * d.x[i]).sum();
        let alphas: f64 = (2..=n).map(|i| d.alpha_v[i]).sum();
        let rhs = weighted + alphas - g.g(3) * d.alpha_v[2];
        prop_assert!((d.sum_l - rhs).abs() < 1e-9 * (1.0 + d.sum_l.abs()));
        prop_assert!(d.b3_star_sum >= 0.0);
    }

    #[test]
    fn constants_tie(lambda in 0.01f64..=1.0, alpha in 0.1f64..5.0, n in 5usize..1_000_000) {
        let p = edge_params(n, lambda, alpha, None).unwrap();
        let c = CltConstants::new(&p).unwrap();
        prop_assert!((c.coef_logn - (alpha / 6.0 - c.a0_constant)).abs() < 1e-12);
        prop_assert!((c.scale * c.scale * 3.0 / alpha - (n as f64).ln()).abs() < 1e-12 * (n as f64).ln());
    }

    #[test]
    fn mp_cdf_monotone(lambda in 0.05f64..=1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lm, lp) = ((1.0 - lambda.sqrt()).powi(2), (1.0 + lambda.sqrt()).powi(2));
        let (x, y) = (lm + a.min(b) * (lp - lm), lm + a.max(b) * (lp - lm));
        prop_assert!(mp_density(x, lambda).unwrap() >= 0.0);
        let (fx, fy) = (mp_cdf(x, lambda).unwrap(), mp_cdf(y, lambda).unwrap());
        prop_assert!(fx <= fy + 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&fx));
    }

    #[test]
    fn moments_merge_matches_concatenation(xs in prop::collection::vec(-1e3f64..1e3, 2..200), split in 0usize..200) {
        let k = split.min(xs.len());
        let mut a = Moments::from_slice(&xs[..k]);
        a.merge(&Moments::from_slice(&xs[k..]));
        let whole = Moments::from_slice(&xs);
        prop_assert_eq!(a.count, whole.count);
        prop_assert!((a.mean - whole.mean).abs() <= 1e-12 * (1.0 + whole.mean.abs()));
        prop_assert!((a.variance() - whole.variance()).abs() <= 1e-9 * (1.0 + whole.variance()));
    }
}
