#![allow(clippy::excessive_precision)]

use laguerre_edge::geometry::{edge_params, EdgeGeometry};
use laguerre_edge::marchenko_pastur::{mp_cdf, mp_density};
use laguerre_edge::theory::{c_lambda, centering, standardize, CltConstants};

// 50-digit evaluations of the defining formula.
const C_LAMBDA_REFERENCE: [(f64, f64); 5] = [
    (0.25, 0.090457495115561544649),
    (1.0, 1.0),
    (1e-6, -6.4070888621822203283),
    (0.5, 0.53283997535355202357),
    (0.1, -0.46194391800375114439),
];

#[test]
fn c_lambda_reference_values() {
    for (lam, expected) in C_LAMBDA_REFERENCE {
        let got = c_lambda(lam).unwrap();
        assert!((got - expected).abs() <= 1e-14 * expected.abs().max(1.0), "lambda {lam}: {got} vs {expected}");
    }
}

#[test]
fn c_lambda_small_lambda_tends_to_half_plus_log_root() {
    // (1 - 1/l) log(1 + s) + 1/s -> 1/2 as l -> 0, so C_l ~ 1/2 + log sqrt(l).
    for &lam in &[1e-8, 1e-10, 1e-12] {
        let c = c_lambda(lam).unwrap();
        assert!((c - (0.5 + 0.5 * f64::ln(lam))).abs() < 2.0 * lam.sqrt(), "lambda {lam}: {c}");
    }
}

#[test]
fn constants_satisfy_algebraic_ties() {
    for k in 1..=10 {
        let lam = k as f64 / 10.0;
        for &alpha in &[0.5, 1.0, 2.0] {
            let p = edge_params(5000, lam, alpha, None).unwrap();
            let c = CltConstants::new(&p).unwrap();
            let s = lam.sqrt();
            let tail = 0.25 + 3.0 * s / (2.0 * (s + 1.0).powi(2));
            assert!((c.coef_logn * 6.0 + tail - alpha).abs() < 1e-12);
            assert!((tail / 6.0 - c.a0_constant).abs() < 1e-12);
            assert!((c.coef_logn - (alpha / 6.0 - c.a0_constant)).abs() < 1e-12);
            assert!((c.scale * c.scale * 3.0 / alpha - 5000f64.ln()).abs() < 1e-12);
            assert_eq!(c.b3_constant, alpha / 6.0);
            assert_eq!(c.variance_constant, alpha / 3.0);
        }
    }
}

#[test]
fn centering_at_square_aspect() {
    let n = 10_000f64;
    for &alpha in &[1.0, 2.0] {
        let p = edge_params(10_000, 1.0, alpha, None).unwrap();
        let s = p.sigma_n;
        let expected = n + 0.5 * s * n.cbrt() - s.powf(1.5) / 6.0 - (alpha - 5.0 / 8.0) / 6.0 * n.ln();
        let got = centering(&p).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected, "{got} vs {expected}");
    }
}

#[test]
fn centering_depends_on_alpha_only_through_log_term() {
    let p1 = edge_params(4000, 0.5, 1.0, None).unwrap();
    let p2 = edge_params(4000, 0.5, 2.0, None).unwrap();
    let diff = centering(&p1).unwrap() - centering(&p2).unwrap();
    assert!((diff - 4000f64.ln() / 6.0).abs() < 1e-9, "{diff}");
}

#[test]
fn centering_leading_terms_are_the_deterministic_shift() {
    let p = edge_params(20_000, 0.7, 2.0, None).unwrap();
    let c = CltConstants::new(&p).unwrap();
    assert_eq!(c.centering(&p), c.deterministic_shift(&p) - c.coef_logn * 20_000f64.ln());
}

#[test]
fn deterministic_shift_residual_stays_bounded() {
    // log|calD_n| - log|E_n| = sum log rho^+ - n log m, predicted up to O(1).
    for &lam in &[0.3, 0.5, 1.0] {
        let res: Vec<f64> = [1_000usize, 10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| {
                let p = edge_params(n, lam, 1.0, None).unwrap();
                let g = EdgeGeometry::build(&p).unwrap();
                let c = CltConstants::new(&p).unwrap();
                g.sum_log_rho_plus() - n as f64 * (p.m as f64).ln() - c.deterministic_shift(&p)
            })
            .collect();
        let first = res[0].abs();
        assert!(res.iter().all(|r| r.abs() <= 1.1 * first), "lambda {lam}: {res:?}");
        assert!(res[3].abs() <= first, "lambda {lam}: {res:?}");
    }
}

#[test]
fn standardize_is_affine() {
    let p = edge_params(3000, 0.5, 2.0, None).unwrap();
    let c = CltConstants::new(&p).unwrap();
    let mu = centering(&p).unwrap();
    assert_eq!(standardize(mu, &p).unwrap(), 0.0);
    assert!((standardize(mu + c.scale, &p).unwrap() - 1.0).abs() < 1e-12);
    assert!((standardize(mu - 2.0 * c.scale, &p).unwrap() + 2.0).abs() < 1e-12);
}

#[test]
fn marchenko_pastur_reference_points() {
    assert!((mp_density(2.0, 1.0).unwrap() - 0.15915494309189535).abs() < 1e-15);
    for &lam in &[0.1, 0.5, 1.0] {
        let s = f64::sqrt(lam);
        let (lo, hi) = ((1.0 - s).powi(2), (1.0 + s).powi(2));
        assert_eq!(mp_cdf(lo, lam).unwrap(), 0.0);
        assert_eq!(mp_cdf(hi, lam).unwrap(), 1.0);
        assert!((mp_cdf(hi - 1e-12, lam).unwrap() - 1.0).abs() < 1e-10);
        let mut prev = 0.0;
        for k in 0..=200 {
            let x = lo + (hi - lo) * k as f64 / 200.0;
            assert!(mp_density(x, lam).unwrap() >= 0.0);
            let f = mp_cdf(x, lam).unwrap();
            assert!(f >= prev, "cdf decreasing at {x}");
            prev = f;
        }
    }
    // lambda = 1, x = 2: substituting x = 4 sin^2 t gives 1/2 + 1/pi.
    let f2 = mp_cdf(2.0, 1.0).unwrap();
    let exact = 0.5 + 1.0 / std::f64::consts::PI;
    assert!((f2 - exact).abs() < 1e-12, "{f2} vs {exact}");
}

#[test]
fn domain_errors() {
    assert!(c_lambda(-0.1).is_err());
    assert!(mp_density(1.0, 0.0).is_err());
    assert!(mp_cdf(1.0, 2.0).is_err());
}
