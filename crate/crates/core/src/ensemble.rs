//! Bidiagonal model of the Laguerre beta-ensemble.
//!
//! `a_i^2 ~ (alpha/2) chi^2(2(m-n+i)/alpha)` for `i = 1..n` and
//! `b_i^2 ~ (alpha/2) chi^2(2i/alpha)` for `i = 1..n-1`, all independent.
//! `T = B B^T` is tridiagonal and carries the ensemble's eigenvalue law.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{EdgeError, Result};
use crate::seeding::{replica_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub m: usize,
    /// `alpha = 2 / beta`
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub alpha: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub lambda: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub sigma_n: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub gamma: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub d_plus: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub d_minus: f64,
}

impl EnsembleParams {
    /// Validates and assembles `gamma = d_plus + sigma_n n^{-2/3}`.
    pub fn new(n: usize, m: usize, alpha: f64, lambda: f64, sigma_n: f64) -> Result<Self> {
        if n == 0 {
            return Err(EdgeError::InvalidParameter("n must be positive".into()));
        }
        if m < n {
            return Err(EdgeError::InvalidParameter(format!("m = {m} < n = {n}")));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(EdgeError::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(EdgeError::InvalidParameter(format!("alpha = {alpha} must be positive")));
        }
        if !(sigma_n > 0.0 && sigma_n.is_finite()) {
            return Err(EdgeError::InvalidParameter(format!("sigma_n = {sigma_n} must be positive")));
        }
        let ratio = n as f64 / m as f64;
        if (ratio - lambda).abs() > 1.0 / m as f64 + 1e-15 {
            return Err(EdgeError::InvalidParameter(format!(
                "n/m = {ratio} too far from lambda = {lambda}"
            )));
        }
        let s = lambda.sqrt();
        let d_plus = (1.0 + s) * (1.0 + s);
        let d_minus = (1.0 - s) * (1.0 - s);
        let gamma = d_plus + sigma_n * (n as f64).powf(-2.0 / 3.0);
        Ok(Self { n, m, alpha, lambda, sigma_n, gamma, d_plus, d_minus })
    }

    /// `m - n`, the offset appearing in every chi-squared degree of freedom.
    #[inline]
    pub fn excess(&self) -> usize {
        self.m - self.n
    }

    /// `gamma * m`, the unscaled shift.
    #[inline]
    pub fn shift(&self) -> f64 {
        self.gamma * self.m as f64
    }
}

/// One realization. Index `i` (1-based) lives at position `i - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalSample {
    pub m: usize,
    pub a_sq: Vec<f64>,
    pub b_sq: Vec<f64>,
    pub d: Vec<f64>,
    pub c: Vec<f64>,
    pub seed: u64,
}

impl TridiagonalSample {
    /// Fills the centered variables `d_i`, `c_i` from given squares.
    pub fn from_squares(m: usize, a_sq: Vec<f64>, b_sq: Vec<f64>, seed: u64) -> Result<Self> {
        let n = a_sq.len();
        if n == 0 {
            return Err(EdgeError::EmptyInput("a_sq".into()));
        }
        if m < n {
            return Err(EdgeError::InvalidParameter(format!("m = {m} < n = {n}")));
        }
        if b_sq.len() + 1 != n {
            return Err(EdgeError::InvalidParameter(format!(
                "b_sq has {} entries, expected {}",
                b_sq.len(),
                n - 1
            )));
        }
        let k = (m - n) as f64;
        let d = a_sq
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let mean = k + (j + 1) as f64;
                (a - mean) / mean.sqrt()
            })
            .collect();
        let c = b_sq
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                let mean = (j + 1) as f64;
                (b - mean) / mean.sqrt()
            })
            .collect();
        Ok(Self { m, a_sq, b_sq, d, c, seed })
    }

    /// The sample with every variable at its mean (`d = c = 0`).
    pub fn noise_free(params: &EnsembleParams) -> Self {
        let k = params.excess() as f64;
        let a_sq = (1..=params.n).map(|i| k + i as f64).collect();
        let b_sq = (1..params.n).map(|i| i as f64).collect();
        Self::from_squares(params.m, a_sq, b_sq, 0).expect("consistent dimensions")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a_sq.len()
    }
}

/// One chi-squared draw with possibly fractional `dof`, as Gamma(dof/2, 2).
pub fn sample_chi_squared<R: Rng + ?Sized>(dof: f64, rng: &mut R) -> Result<f64> {
    if !(dof > 0.0 && dof.is_finite()) {
        return Err(EdgeError::InvalidParameter(format!("chi-squared dof = {dof}")));
    }
    let g = Gamma::new(0.5 * dof, 2.0)
        .map_err(|e| EdgeError::InvalidParameter(format!("gamma law: {e}")))?;
    Ok(g.sample(rng))
}

/// `(alpha/2) chi^2(2 mean / alpha)`, which has the given mean and variance `alpha * mean`.
fn scaled_chi_squared<R: Rng + ?Sized>(mean: f64, alpha: f64, rng: &mut R) -> Result<f64> {
    let x = 0.5 * alpha * sample_chi_squared(2.0 * mean / alpha, rng)?;
    if x > 0.0 {
        Ok(x)
    } else {
        // Gamma samplers can underflow to zero for tiny shapes; the law has no atom there.
        Ok(f64::MIN_POSITIVE)
    }
}

/// Draws a sample from an explicit seed. Order: `a_1^2, b_1^2, a_2^2, b_2^2, ..., a_n^2`.
pub fn sample_with_seed(params: &EnsembleParams, seed: u64) -> Result<TridiagonalSample> {
    let n = params.n;
    let k = params.excess() as f64;
    let mut rng = rng_from_seed(seed);
    let mut a_sq = Vec::with_capacity(n);
    let mut b_sq = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..=n {
        a_sq.push(scaled_chi_squared(k + i as f64, params.alpha, &mut rng)?);
        if i < n {
            b_sq.push(scaled_chi_squared(i as f64, params.alpha, &mut rng)?);
        }
    }
    TridiagonalSample::from_squares(params.m, a_sq, b_sq, seed)
}

pub fn sample_bidiagonal(
    params: &EnsembleParams,
    master_seed: u64,
    replica_index: u64,
) -> Result<TridiagonalSample> {
    sample_bidiagonal_attempt(params, master_seed, replica_index, 0)
}

/// Like [`sample_bidiagonal`] but for retry number `attempt` of the replica.
pub fn sample_bidiagonal_attempt(
    params: &EnsembleParams,
    master_seed: u64,
    replica_index: u64,
    attempt: u32,
) -> Result<TridiagonalSample> {
    sample_with_seed(params, replica_seed(master_seed, replica_index, attempt))
}

/// Diagonal and off-diagonal of `T = B B^T`.
pub fn build_tridiagonal(sample: &TridiagonalSample) -> (Vec<f64>, Vec<f64>) {
    let n = sample.n();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let b_prev = if i == 0 { 0.0 } else { sample.b_sq[i - 1] };
        diag.push(sample.a_sq[i] + b_prev);
    }
    let off = (0..n.saturating_sub(1))
        .map(|i| (sample.a_sq[i] * sample.b_sq[i]).sqrt())
        .collect();
    (diag, off)
}
