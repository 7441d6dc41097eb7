//! Replica-parallel simulation of the standardized edge statistic.
//!
//! Replica `r` draws from seed `(master, r, attempt)` only, so the output does not
//! depend on the worker count or on scheduling.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{sample_bidiagonal_attempt, EnsembleParams};
use crate::error::{EdgeError, Result};
use crate::geometry::EdgeGeometry;
use crate::logdet::{eigen_oracle, run_recursion, ORACLE_MAX_N};
use crate::stats::{ks_statistic, summarize, Moments, QuantilePoint};
use crate::theory::CltConstants;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "LAGUERRE_EDGE_WORKERS";

/// Attempts per replica before giving up on it.
pub const MAX_ATTEMPTS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub params: EnsembleParams,
    pub replicas: usize,
    pub master_seed: u64,
    /// 0 picks the environment default, then the number of CPUs.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub run_oracle: bool,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl SimulationConfig {
    pub fn new(params: EnsembleParams, replicas: usize, master_seed: u64) -> Self {
        Self { params, replicas, master_seed, workers: 0, run_oracle: false, output_path: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(EdgeError::InvalidParameter("replicas must be at least 1".into()));
        }
        if self.run_oracle && self.params.n > ORACLE_MAX_N {
            return Err(EdgeError::InvalidParameter(format!(
                "oracle requested with n = {} > {ORACLE_MAX_N}",
                self.params.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub replica: u64,
    pub seed: u64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub z: f64,
    #[serde(rename = "log_abs_calD", serialize_with = "crate::numfmt::serialize")]
    pub log_abs_cal_d: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub max_abs_r: f64,
    #[serde(
        rename = "oracle_log_abs_D",
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::numfmt::option::serialize"
    )]
    pub oracle_log_abs_d: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimulationBatch {
    pub config: SimulationConfig,
    pub records: Vec<ReplicaRecord>,
    pub z: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub ks_stat: f64,
    pub resample_count: usize,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub params: EnsembleParams,
    pub replicas: usize,
    pub master_seed: u64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub mean: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub variance: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub skewness: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub ks_stat: f64,
    pub quantiles: Vec<QuantilePoint>,
    pub resample_count: usize,
    pub wall_time: f64,
}

/// Worker count: explicit value, else the environment variable, else all CPUs.
pub fn resolve_workers(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// One replica through sample -> recursion -> standardization, redrawing on guard failures.
/// Returns the record and the number of redraws it needed.
pub fn run_replica(
    geom: &EdgeGeometry,
    constants: &CltConstants,
    master_seed: u64,
    replica: u64,
    run_oracle: bool,
) -> Result<(ReplicaRecord, usize)> {
    let params = &geom.params;
    let mut last_err = None;
    for attempt in 0..MAX_ATTEMPTS {
        let sample = sample_bidiagonal_attempt(params, master_seed, replica, attempt)?;
        match run_recursion(&sample, geom) {
            Ok(trace) => {
                let oracle_log_abs_d = if run_oracle { Some(eigen_oracle(&sample, params)?) } else { None };
                let z = (trace.log_abs_cal_d - constants.centering(params)) / constants.scale;
                let rec = ReplicaRecord {
                    replica,
                    seed: sample.seed,
                    z,
                    log_abs_cal_d: trace.log_abs_cal_d,
                    max_abs_r: trace.max_abs_r,
                    oracle_log_abs_d,
                };
                return Ok((rec, attempt as usize));
            }
            Err(e) if e.is_resamplable() => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

pub fn run_batch(config: &SimulationConfig) -> Result<SimulationBatch> {
    run_batch_with_progress(config, |_| {})
}

/// As [`run_batch`], calling `progress(done)` roughly every 1% of replicas.
pub fn run_batch_with_progress<P: Fn(usize) + Sync>(config: &SimulationConfig, progress: P) -> Result<SimulationBatch> {
    config.validate()?;
    let start = Instant::now();
    let geom = EdgeGeometry::build(&config.params)?;
    let constants = CltConstants::new(&config.params)?;
    let workers = resolve_workers(config.workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| EdgeError::InvalidParameter(format!("thread pool: {e}")))?;
    let done = AtomicUsize::new(0);
    let step = (config.replicas / 100).max(1);
    let results: Result<Vec<(ReplicaRecord, usize)>> = pool.install(|| {
        (0..config.replicas as u64)
            .into_par_iter()
            .map(|r| {
                let out = run_replica(&geom, &constants, config.master_seed, r, config.run_oracle);
                let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                if d.is_multiple_of(step) || d == config.replicas {
                    progress(d);
                }
                out
            })
            .collect()
    });
    let results = results?;
    let resample_count: usize = results.iter().map(|(_, a)| a).sum();
    if resample_count as f64 > 0.001 * config.replicas as f64 {
        return Err(EdgeError::SuspiciousParameters { resamples: resample_count, replicas: config.replicas });
    }
    let records: Vec<ReplicaRecord> = results.into_iter().map(|(r, _)| r).collect();
    let z: Vec<f64> = records.iter().map(|r| r.z).collect();
    let moments = Moments::from_slice(&z);
    let ks_stat = if z.len() >= 2 { ks_statistic(&z)? } else { f64::NAN };
    let batch = SimulationBatch {
        config: config.clone(),
        records,
        mean: moments.mean,
        variance: moments.variance(),
        skewness: moments.skewness(),
        ks_stat,
        z,
        resample_count,
        wall_time: start.elapsed().as_secs_f64(),
    };
    if let Some(path) = &config.output_path {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_jsonl(&batch.records, f)?;
    }
    Ok(batch)
}

impl SimulationBatch {
    pub fn summary(&self) -> Result<BatchSummary> {
        let s = summarize(&self.z)?;
        Ok(BatchSummary {
            params: self.config.params,
            replicas: self.config.replicas,
            master_seed: self.config.master_seed,
            mean: self.mean,
            variance: self.variance,
            skewness: self.skewness,
            ks_stat: self.ks_stat,
            quantiles: s.quantiles,
            resample_count: self.resample_count,
            wall_time: self.wall_time,
        })
    }
}

pub fn write_jsonl<W: Write>(records: &[ReplicaRecord], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<ReplicaRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

pub fn jsonl_bytes(records: &[ReplicaRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_jsonl(records, &mut buf)?;
    Ok(buf)
}

pub fn write_summary<W: Write>(summary: &BatchSummary, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, summary)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// CSV with columns `replica, seed, z, log_abs_calD, max_abs_r`.
pub fn write_csv<W: Write>(records: &[ReplicaRecord], w: W) -> Result<()> {
    use crate::numfmt::format_f64;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["replica", "seed", "z", "log_abs_calD", "max_abs_r"])?;
    for r in records {
        out.write_record([
            r.replica.to_string(),
            r.seed.to_string(),
            format_f64(r.z),
            format_f64(r.log_abs_cal_d),
            format_f64(r.max_abs_r),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::edge_params;

    #[test]
    fn config_validation() {
        let p = edge_params(6000, 0.5, 1.0, None).unwrap();
        let mut c = SimulationConfig::new(p, 0, 1);
        assert!(c.validate().is_err());
        c.replicas = 5;
        assert!(c.validate().is_ok());
        c.run_oracle = true;
        assert!(c.validate().is_err());
    }

    #[test]
    fn explicit_workers_win() {
        assert_eq!(resolve_workers(3), 3);
        assert!(resolve_workers(0) >= 1);
    }
}
