//! Stable `log|det(T - gamma m)|` through the normalized ratio recursion.
//!
//! With `E_i = D_i / prod_{j<=i} rho_j^+` and `R_i = 1 + E_i / E_{i-1}`,
//! `log|E_n| = log|1 - alpha_1| + sum_{i>=2} log|1 - R_i|`. Each `R_i` stays near
//! zero, so the sum never overflows where the raw minors would.

mod eigen;

use serde::{Deserialize, Serialize};

use crate::ensemble::TridiagonalSample;
use crate::error::{EdgeError, Result};
use crate::geometry::EdgeGeometry;
pub use eigen::{
    eigen_oracle, eigenvalues_scaled, largest_eigenvalue, log_abs_det_shifted, tridiagonal_eigenvalues,
    ORACLE_MAX_N,
};

/// `|1 - R|` below this aborts the replica.
pub const SINGULAR_GUARD: f64 = 1e-13;
/// `|1 - R|` below this is counted as a guard event but tolerated.
pub const WARN_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace {
    /// `r[j] = R_{j+2}`, i.e. the values for `i = 2..=n`.
    pub r: Vec<f64>,
    pub log_abs_e: f64,
    pub log_abs_e2: f64,
    pub sign_e: i8,
    pub log_abs_d: f64,
    pub log_abs_cal_d: f64,
    pub max_abs_r: f64,
    pub guard_events: usize,
}

impl RecursionTrace {
    /// `R_i` for `2 <= i <= n`.
    pub fn r_at(&self, i: usize) -> f64 {
        self.r[i - 2]
    }
}

#[inline]
pub(crate) fn alpha_at(sample: &TridiagonalSample, geom: &EdgeGeometry, i: usize) -> f64 {
    let mean = (geom.params.excess() + i) as f64;
    (sample.a_sq[i - 1] - mean) / geom.rho_plus(i)
}

#[inline]
pub(crate) fn beta_at(sample: &TridiagonalSample, geom: &EdgeGeometry, i: usize) -> f64 {
    (sample.b_sq[i - 2] - (i - 1) as f64) / geom.rho_plus(i)
}

fn check_dims(sample: &TridiagonalSample, geom: &EdgeGeometry) -> Result<()> {
    if sample.n() != geom.n() || sample.m != geom.params.m {
        return Err(EdgeError::InvalidParameter(format!(
            "sample (n={}, m={}) does not match geometry (n={}, m={})",
            sample.n(),
            sample.m,
            geom.n(),
            geom.params.m
        )));
    }
    Ok(())
}

/// Closed form `R_2 = -gamma_2 + alpha_2 + beta_2 + (alpha_1 + tau_1)(beta_2 + delta_2)/(1 - alpha_1)`.
pub fn r2_initial(sample: &TridiagonalSample, geom: &EdgeGeometry) -> Result<f64> {
    check_dims(sample, geom)?;
    let a1 = alpha_at(sample, geom, 1);
    if (1.0 - a1).abs() < SINGULAR_GUARD {
        return Err(EdgeError::DegenerateDraw((1.0 - a1).abs()));
    }
    let a2 = alpha_at(sample, geom, 2);
    let b2 = beta_at(sample, geom, 2);
    Ok(-geom.gamma_ratio(2) + a2 + b2 + (a1 + geom.tau(1)) * (b2 + geom.delta(2)) / (1.0 - a1))
}

/// Runs the exact nonlinear recursion
/// `R_i = alpha_i + beta_i - (gamma_i - omega_i)
///        + (alpha_{i-1} beta_i + alpha_{i-1} delta_i + tau_{i-1} beta_i + omega_i R_{i-1}) / (1 - R_{i-1})`
/// started from `R_1 = alpha_1`.
pub fn run_recursion(sample: &TridiagonalSample, geom: &EdgeGeometry) -> Result<RecursionTrace> {
    check_dims(sample, geom)?;
    let n = geom.n();
    let a1 = alpha_at(sample, geom, 1);
    let one_minus = 1.0 - a1;
    if one_minus.abs() < SINGULAR_GUARD {
        return Err(EdgeError::DegenerateDraw(one_minus.abs()));
    }
    // E_1 = alpha_1 - 1
    let mut log_abs_e = one_minus.abs().ln();
    let mut negative = one_minus > 0.0;
    let mut guard_events = usize::from(one_minus.abs() < WARN_GUARD);

    let mut r = Vec::with_capacity(n - 1);
    let mut r_prev = a1;
    let mut alpha_prev = a1;
    let mut max_abs_r: f64 = 0.0;
    let mut log_abs_e2 = f64::NAN;
    for i in 2..=n {
        let denom = 1.0 - r_prev;
        if denom.abs() < SINGULAR_GUARD {
            return Err(EdgeError::NearSingularMinor { index: i - 1, value: denom.abs() });
        }
        let a = alpha_at(sample, geom, i);
        let b = beta_at(sample, geom, i);
        let numer = alpha_prev * b + alpha_prev * geom.delta(i) + geom.tau(i - 1) * b + geom.omega(i) * r_prev;
        let ri = a + b - geom.gap(i) + numer / denom;

        let step = 1.0 - ri;
        if step.abs() < WARN_GUARD {
            guard_events += 1;
        }
        log_abs_e += step.abs().ln();
        // E_i = E_{i-1} (R_i - 1)
        if step > 0.0 {
            negative = !negative;
        }
        if i == 2 {
            log_abs_e2 = log_abs_e;
        }
        max_abs_r = max_abs_r.max(ri.abs());
        r.push(ri);
        r_prev = ri;
        alpha_prev = a;
    }
    let last = 1.0 - r_prev;
    if last.abs() < SINGULAR_GUARD {
        return Err(EdgeError::NearSingularMinor { index: n, value: last.abs() });
    }
    if !log_abs_e.is_finite() {
        return Err(EdgeError::NearSingularMinor { index: n, value: f64::NAN });
    }

    let log_abs_d = log_abs_e + geom.sum_log_rho_plus();
    let log_abs_cal_d = log_abs_d - n as f64 * (geom.params.m as f64).ln();
    Ok(RecursionTrace {
        r,
        log_abs_e,
        log_abs_e2,
        sign_e: if negative { -1 } else { 1 },
        log_abs_d,
        log_abs_cal_d,
        max_abs_r,
        guard_events,
    })
}
