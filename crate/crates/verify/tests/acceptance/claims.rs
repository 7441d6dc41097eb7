//! Finite-n checks of asymptotic statements that are not separate criteria.

use std::time::Instant;

use rayon::prelude::*;

use laguerre_edge::decomposition::build_decomposition;
use laguerre_edge::ensemble::sample_bidiagonal;
use laguerre_edge::geometry::{edge_params, EdgeGeometry};
use laguerre_edge::harness::{run_batch, SimulationConfig};
use laguerre_edge::logdet::run_recursion;
use laguerre_edge::stats::Moments;
use laguerre_edge::theory::CltConstants;

fn finish(label: &str, pass: bool, detail: String, start: Instant) {
    crate::report_line(pass, label, &detail, start.elapsed().as_secs_f64());
    assert!(pass, "{label}: {detail}");
}

#[test]
fn b3_star_mean_matches_leading_term() {
    let _guard = crate::serial();
    let start = Instant::now();
    let n = 100_000;
    let p = edge_params(n, 0.5, 2.0, None).unwrap();
    let g = EdgeGeometry::build(&p).unwrap();
    let sums: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|r| build_decomposition(&sample_bidiagonal(&p, 6, r).unwrap(), &g).unwrap().b3_star_sum)
        .collect();
    let mean = Moments::from_slice(&sums).mean;
    let predicted = CltConstants::new(&p).unwrap().b3_constant * (n as f64).ln();
    let ratio = mean / predicted;
    finish(
        "claim b3* mean (n=1e5, lambda=0.5, alpha=2, 200 replicas)",
        (ratio - 1.0).abs() < 0.3,
        format!("mean {mean:.4} vs (alpha/6) log n = {predicted:.4}, ratio {ratio:.3}"),
        start,
    );
}

#[test]
fn max_r_below_n_to_minus_third_in_95_percent() {
    let _guard = crate::serial();
    let start = Instant::now();
    let n = 100_000;
    let p = edge_params(n, 0.5, 2.0, None).unwrap();
    let g = EdgeGeometry::build(&p).unwrap();
    let scaled: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|r| run_recursion(&sample_bidiagonal(&p, 606, r).unwrap(), &g).unwrap().max_abs_r * (n as f64).cbrt())
        .collect();
    let below = scaled.iter().filter(|&&v| v < 1.0).count();
    finish(
        "claim max|R| n^(1/3) < 1 (n=1e5, lambda=0.5, 100 replicas)",
        below >= 95,
        format!("{below}/100 replicas below 1"),
        start,
    );
}

#[test]
fn standardized_moments_alpha_two() {
    let _guard = crate::serial();
    let start = Instant::now();
    let p = edge_params(4000, 0.5, 2.0, None).unwrap();
    let b = run_batch(&SimulationConfig::new(p, 2000, 303)).unwrap();
    finish(
        "claim standardized mean/variance (n=4000, lambda=0.5, alpha=2, 2000 replicas)",
        b.mean.abs() <= 0.3 && (0.7..=1.3).contains(&b.variance),
        format!("mean {:.4}, variance {:.4}", b.mean, b.variance),
        start,
    );
}

#[test]
fn batch_ks_alpha_one() {
    let _guard = crate::serial();
    let start = Instant::now();
    let p = edge_params(4000, 0.5, 1.0, None).unwrap();
    let b = run_batch(&SimulationConfig::new(p, 2000, 303)).unwrap();
    finish(
        "claim batch KS (n=4000, lambda=0.5, alpha=1, 2000 replicas)",
        b.ks_stat < 0.08,
        format!("KS {:.4}", b.ks_stat),
        start,
    );
}
