//! Symmetric tridiagonal eigenvalues by Sturm-count bisection.
//!
//! Slow (O(n^2) per spectrum) but bit-stable across platforms.

use crate::ensemble::{build_tridiagonal, EnsembleParams, TridiagonalSample};
use crate::error::{EdgeError, Result};

/// Largest dimension the oracle accepts.
pub const ORACLE_MAX_N: usize = 5000;

const MAX_BISECTIONS: usize = 400;

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for j in 1..diag.len() {
        q = diag[j] - x - off_sq[j - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

struct Bracket {
    lo: f64,
    hi: f64,
    off_sq: Vec<f64>,
    pivmin: f64,
}

fn bracket(diag: &[f64], off: &[f64]) -> Result<Bracket> {
    let n = diag.len();
    if n == 0 {
        return Err(EdgeError::EmptyInput("tridiagonal diagonal".into()));
    }
    if off.len() + 1 != n {
        return Err(EdgeError::InvalidParameter(format!(
            "off-diagonal has {} entries, expected {}",
            off.len(),
            n - 1
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..n {
        let r = if j > 0 { off[j - 1].abs() } else { 0.0 } + if j + 1 < n { off[j].abs() } else { 0.0 };
        lo = lo.min(diag[j] - r);
        hi = hi.max(diag[j] + r);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(EdgeError::OracleFailure("non-finite matrix entries".into()));
    }
    let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
    let emax = off_sq.iter().cloned().fold(1.0, f64::max);
    let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
    Ok(Bracket { lo: lo - pad, hi: hi + pad, off_sq, pivmin: f64::MIN_POSITIVE * emax })
}

/// The `k`-th smallest eigenvalue (0-based) searched inside `[lo, hi]`.
fn bisect(diag: &[f64], b: &Bracket, k: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 2.0 * f64::EPSILON * mid.abs() + f64::MIN_POSITIVE || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if sturm_count(diag, &b.off_sq, mid, b.pivmin) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(EdgeError::OracleFailure(format!("bisection for eigenvalue {k} did not converge")))
}

/// All eigenvalues, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let b = bracket(diag, off)?;
    let mut out = Vec::with_capacity(diag.len());
    let mut lo = b.lo;
    for k in 0..diag.len() {
        let mu = bisect(diag, &b, k, lo, b.hi)?;
        out.push(mu);
        // Eigenvalues are ascending; the previous one bounds the next from below.
        lo = lo.max(mu - 4.0 * f64::EPSILON * mu.abs() - f64::MIN_POSITIVE);
    }
    Ok(out)
}

pub fn largest_eigenvalue(diag: &[f64], off: &[f64]) -> Result<f64> {
    let b = bracket(diag, off)?;
    bisect(diag, &b, diag.len() - 1, b.lo, b.hi)
}

/// `sum_j log|mu_j - shift|` over the eigenvalues of the tridiagonal matrix.
pub fn log_abs_det_shifted(diag: &[f64], off: &[f64], shift: f64) -> Result<f64> {
    Ok(tridiagonal_eigenvalues(diag, off)?
        .iter()
        .map(|mu| (mu - shift).abs().ln())
        .sum())
}

fn check_size(n: usize) -> Result<()> {
    if n > ORACLE_MAX_N {
        return Err(EdgeError::InvalidParameter(format!("oracle limited to n <= {ORACLE_MAX_N}, got {n}")));
    }
    Ok(())
}

/// Independent value of `log|det(T - gamma m)|` from the spectrum of `T`.
pub fn eigen_oracle(sample: &TridiagonalSample, params: &EnsembleParams) -> Result<f64> {
    check_size(sample.n())?;
    let (diag, off) = build_tridiagonal(sample);
    log_abs_det_shifted(&diag, &off, params.shift())
}

/// Eigenvalues of `T / m`, ascending.
pub fn eigenvalues_scaled(sample: &TridiagonalSample, params: &EnsembleParams) -> Result<Vec<f64>> {
    check_size(sample.n())?;
    let (diag, off) = build_tridiagonal(sample);
    let m = params.m as f64;
    Ok(tridiagonal_eigenvalues(&diag, &off)?.into_iter().map(|mu| mu / m).collect())
}
