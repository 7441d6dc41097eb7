//! The nine acceptance criteria, each returning a pass/fail report.

use std::fmt;
use std::time::Instant;

use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use laguerre_edge::decomposition::{a0_sum, subgamma_params, tail_check, variance_sum, ComponentSampler, SubGammaParams, SubGammaTarget};
use laguerre_edge::ensemble::{sample_bidiagonal, sample_bidiagonal_attempt, EnsembleParams};
use laguerre_edge::error::{EdgeError, Result};
use laguerre_edge::geometry::{edge_params, EdgeGeometry};
use laguerre_edge::harness::{jsonl_bytes, run_batch, SimulationConfig, MAX_ATTEMPTS};
use laguerre_edge::logdet::{eigen_oracle, eigenvalues_scaled, run_recursion, RecursionTrace};
use laguerre_edge::marchenko_pastur::mp_cdf;
use laguerre_edge::seeding::{replica_seed, rng_from_seed};
use laguerre_edge::stats::{ks_statistic_against, median};
use laguerre_edge::theory::CltConstants;
use crate::tolerances::Tolerances;

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub elapsed_s: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {} ({}): {} [{:.1}s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_s
        )
    }
}

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "oracle equivalence",
        2 => "geometry identities",
        3 => "CLT desk scale",
        4 => "variance lemma",
        5 => "A0-sum lemma",
        6 => "uniform R bound",
        7 => "Marchenko-Pastur bulk",
        8 => "sub-gamma tails",
        9 => "determinism across workers",
        _ => "unknown",
    }
}

pub fn run_criterion(id: u8, tol: &Tolerances) -> Result<CriterionReport> {
    let start = Instant::now();
    let (pass, detail) = match id {
        1 => oracle_grid(tol)?,
        2 => geometry_identities(tol)?,
        3 => clt_desk_scale(tol)?,
        4 => variance_lemma(tol)?,
        5 => a0_lemma(tol)?,
        6 => r_bound(tol)?,
        7 => marchenko_pastur(tol)?,
        8 => subgamma_tails(tol)?,
        9 => determinism(tol)?,
        _ => return Err(EdgeError::InvalidParameter(format!("no acceptance criterion {id}"))),
    };
    Ok(CriterionReport {
        id,
        name: criterion_name(id).to_string(),
        pass,
        detail,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

pub fn run_all(tol: &Tolerances) -> Result<Vec<CriterionReport>> {
    CRITERIA.iter().map(|&id| run_criterion(id, tol)).collect()
}

/// Recursion on replica `r`, redrawing on guard failures as the harness does.
fn recursion_with_retry(
    params: &EnsembleParams,
    geom: &EdgeGeometry,
    seed: u64,
    r: u64,
) -> Result<(laguerre_edge::ensemble::TridiagonalSample, RecursionTrace)> {
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let s = sample_bidiagonal_attempt(params, seed, r, attempt)?;
        match run_recursion(&s, geom) {
            Ok(t) => return Ok((s, t)),
            Err(e) if e.is_resamplable() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn oracle_grid(tol: &Tolerances) -> Result<(bool, String)> {
    let g = &tol.oracle_grid;
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut instances = 0;
    for &n in &g.n {
        for &lambda in &g.lambda {
            for &alpha in &g.alpha {
                let params = edge_params(n, lambda, alpha, None)?;
                let geom = EdgeGeometry::build(&params)?;
                let diffs: Vec<(u64, f64)> = (0..g.replicas as u64)
                    .into_par_iter()
                    .map(|r| {
                        let (s, t) = recursion_with_retry(&params, &geom, g.seed, r)?;
                        let oracle = eigen_oracle(&s, &params)?;
                        Ok((r, (t.log_abs_d - oracle).abs() / t.log_abs_d.abs()))
                    })
                    .collect::<Result<_>>()?;
                instances += diffs.len();
                for (r, d) in diffs {
                    if d.is_nan() || d > worst {
                        worst = d;
                        worst_at = format!("n={n} lambda={lambda} alpha={alpha} replica={r}");
                    }
                }
            }
        }
    }
    let pass = worst < g.max_rel_diff;
    Ok((pass, format!("{instances} instances, max rel diff {worst:.3e} at {worst_at} (limit {:e})", g.max_rel_diff)))
}

fn geometry_identities(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.geometry;
    let params = edge_params(c.n, c.lambda, c.alpha, None)?;
    let geom = EdgeGeometry::build(&params)?;
    let k = params.excess() as f64;
    let mut vieta: f64 = 0.0;
    for i in 2..=c.n {
        let prod = geom.rho_plus(i) * geom.rho_minus(i);
        let exact = (k + i as f64 - 1.0) * (i as f64 - 1.0);
        vieta = vieta.max((prod - exact).abs() / prod);
    }
    let mut omega_ok = true;
    for i in 2..=c.n {
        let w = geom.omega(i);
        if !(w > 0.0 && w < 1.0) || (i > 2 && w < geom.omega(i - 1)) {
            omega_ok = false;
        }
    }
    let bound_factor = 1.0 + params.sigma_n.powf(-1.5);
    let mut g_worst: f64 = 0.0;
    for i in 3..=c.n {
        g_worst = g_worst.max(geom.g(i) * (1.0 - geom.omega(i)) / bound_factor);
    }
    let pass = vieta < c.max_vieta_rel && omega_ok && g_worst < 1.0;
    Ok((
        pass,
        format!(
            "n={}: max Vieta rel err {vieta:.2e}, omega monotone in (0,1): {omega_ok}, max g_i(1-omega_i)/(1+sigma^-3/2) = {g_worst:.6}",
            c.n
        ),
    ))
}

fn clt_desk_scale(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.clt;
    let mut pass = true;
    let mut parts = Vec::new();
    for &alpha in &c.alpha {
        let params = edge_params(c.n, c.lambda, alpha, None)?;
        let batch = run_batch(&SimulationConfig::new(params, c.replicas, c.seed))?;
        let ok = batch.mean.abs() <= c.mean_abs_max
            && batch.variance >= c.var_min
            && batch.variance <= c.var_max
            && batch.ks_stat < c.ks_max;
        pass &= ok;
        parts.push(format!(
            "alpha={alpha}: mean {:.4}, var {:.4}, KS {:.4}",
            batch.mean, batch.variance, batch.ks_stat
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn variance_ratio(n: usize, lambda: f64, alpha: f64) -> Result<f64> {
    let geom = EdgeGeometry::build(&edge_params(n, lambda, alpha, None)?)?;
    Ok(variance_sum(&geom) / (alpha / 3.0 * (n as f64).ln()))
}

fn variance_lemma(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.variance_lemma;
    let mut pass = true;
    let mut parts = Vec::new();
    for &lambda in &c.lambda {
        let small = variance_ratio(c.n_small, lambda, c.alpha)?;
        let large = variance_ratio(c.n_large, lambda, c.alpha)?;
        let ok = large >= c.ratio_min && large <= c.ratio_max && (large - 1.0).abs() < (small - 1.0).abs();
        pass &= ok;
        parts.push(format!("lambda={lambda}: ratio {small:.4} (n={}) -> {large:.4} (n={})", c.n_small, c.n_large));
    }
    Ok((pass, parts.join("; ")))
}

fn a0_ratio(n: usize, lambda: f64) -> Result<(f64, f64)> {
    let params = edge_params(n, lambda, 1.0, None)?;
    let geom = EdgeGeometry::build(&params)?;
    let target = CltConstants::new(&params)?.a0_constant;
    Ok((a0_sum(&geom) / (n as f64).ln(), target))
}

fn a0_lemma(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.a0_lemma;
    let mut pass = true;
    let mut parts = Vec::new();
    for &lambda in &c.lambda {
        let (small, target) = a0_ratio(c.n_small, lambda)?;
        let (large, _) = a0_ratio(c.n_large, lambda)?;
        let ok = (large / target - 1.0).abs() <= c.rel_tol && (large - target).abs() < (small - target).abs();
        pass &= ok;
        parts.push(format!(
            "lambda={lambda}: a0/log n {small:.5} -> {large:.5}, target {target:.5} (ratio {:.3})",
            large / target
        ));
    }
    Ok((pass, parts.join("; ")))
}

/// Median over replicas of `max_i |R_i| n^{1/3}`.
pub fn median_scaled_max_r(n: usize, lambda: f64, alpha: f64, replicas: usize, seed: u64) -> Result<f64> {
    let params = edge_params(n, lambda, alpha, None)?;
    let geom = EdgeGeometry::build(&params)?;
    let vals: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| Ok(recursion_with_retry(&params, &geom, seed, r)?.1.max_abs_r * (n as f64).cbrt()))
        .collect::<Result<_>>()?;
    Ok(median(&vals))
}

fn r_bound(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.r_bound;
    let small = median_scaled_max_r(c.n_small, c.lambda, c.alpha, c.replicas, c.seed)?;
    let large = median_scaled_max_r(c.n_large, c.lambda, c.alpha, c.replicas, c.seed)?;
    let pass = large < small && large < c.abs_max;
    Ok((pass, format!("median max|R| n^(1/3): {small:.4} (n={}) -> {large:.4} (n={})", c.n_small, c.n_large)))
}

fn marchenko_pastur(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.marchenko_pastur;
    let params = edge_params(c.n, c.lambda, c.alpha, None)?;
    let sample = sample_bidiagonal(&params, c.seed, 0)?;
    let ev = eigenvalues_scaled(&sample, &params)?;
    let ks = ks_statistic_against(&ev, |x| mp_cdf(x, c.lambda))?;
    Ok((ks < c.ks_max, format!("KS {ks:.5} (limit {})", c.ks_max)))
}

fn run_tails<F: FnMut() -> f64>(sg: &SubGammaParams, mut draw: F, ts: &[f64], draws: usize, label: &str, parts: &mut Vec<String>) -> Result<bool> {
    let mut ok = true;
    for &t in ts {
        let check = tail_check(sg, &mut draw, t, draws)?;
        ok &= check.pass;
        if !check.pass {
            parts.push(format!("{label} t={t}: {:.3e} > {:.3e}", check.empirical, check.bound));
        }
    }
    Ok(ok)
}

fn subgamma_tails(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.subgamma;
    let mut parts = Vec::new();
    let mut pass = true;
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        rng_from_seed(replica_seed(c.seed, stream, 0))
    };

    let mut rng = next_rng();
    let chi4 = Gamma::new(2.0, 2.0).map_err(|e| EdgeError::InvalidParameter(e.to_string()))?;
    let sg = SubGammaParams { v: 8.0, u: 2.0, target: SubGammaTarget::AlphaI };
    pass &= run_tails(&sg, || chi4.sample(&mut rng) - 4.0, &c.t, c.draws, "chi2(4)-4", &mut parts)?;
    let mut checks = 1;

    let params = edge_params(c.n, c.lambda, c.alpha, None)?;
    let geom = EdgeGeometry::build(&params)?;
    for &i in &[c.n / 4, c.n / 2, c.n] {
        for target in [SubGammaTarget::AlphaI, SubGammaTarget::XI] {
            let sampler = ComponentSampler::new(i, &geom, target)?;
            let sg = subgamma_params(i, &geom, target);
            let mut rng = next_rng();
            let label = format!("{target:?} i={i}");
            pass &= run_tails(&sg, || sampler.draw(&mut rng), &c.t, c.draws, &label, &mut parts)?;
            checks += 1;
        }
    }
    let detail = if parts.is_empty() {
        format!("{checks} families x {} thresholds, {} draws each: all within bound", c.t.len(), c.draws)
    } else {
        parts.join("; ")
    };
    Ok((pass, detail))
}

fn determinism(tol: &Tolerances) -> Result<(bool, String)> {
    let c = &tol.determinism;
    let params = edge_params(c.n, c.lambda, c.alpha, None)?;
    let mut reference: Option<Vec<u8>> = None;
    let mut pass = true;
    for &w in &c.workers {
        let mut cfg = SimulationConfig::new(params, c.replicas, c.seed);
        cfg.workers = w;
        let bytes = jsonl_bytes(&run_batch(&cfg)?.records)?;
        match &reference {
            None => reference = Some(bytes),
            Some(r) => pass &= *r == bytes,
        }
    }
    let len = reference.map(|r| r.len()).unwrap_or(0);
    Ok((pass, format!("workers {:?}: {len}-byte JSONL identical: {pass}", c.workers)))
}
