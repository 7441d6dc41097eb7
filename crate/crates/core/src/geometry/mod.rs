//! Deterministic per-index tables of the minor recursion.
//!
//! Index conventions are 1-based throughout: accessors take `i` as written in
//! the formulas. Quantities that need `i - 1` (omega, the gap) start at `i = 2`.

pub mod dd;
mod regime;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleParams;
use crate::error::{EdgeError, Result};
pub use dd::DoubleDouble;
pub use regime::{classify, omega_asymptote, OmegaRegime};

/// Default edge offset `(log n)^{3/2}`.
pub fn default_sigma(n: usize) -> f64 {
    (n as f64).ln().powf(1.5)
}

/// Parameters for the edge problem: `m = round(n / lambda)`, clamped to `m >= n`.
pub fn edge_params(n: usize, lambda: f64, alpha: f64, sigma_override: Option<f64>) -> Result<EnsembleParams> {
    if n < 5 {
        return Err(EdgeError::InvalidParameter(format!("n = {n} < 5")));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(EdgeError::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    let m = ((n as f64 / lambda).round() as usize).max(n);
    let sigma = sigma_override.unwrap_or_else(|| default_sigma(n));
    EnsembleParams::new(n, m, alpha, lambda, sigma)
}

/// Roots of `x^2 - A x + B` with `A = gamma m - (m - n + 2i - 1)`, `B = (m-n+i-1)(i-1)`.
///
/// Returns `(rho_plus, rho_minus, sqrt(discriminant))`.
pub fn characteristic_roots(i: usize, n: usize, m: usize, gamma: f64) -> Result<(f64, f64, f64)> {
    debug_assert!(i >= 1 && i <= n && n <= m);
    let k = (m - n) as f64;
    let fi = i as f64;
    let a = gamma.mul_add(m as f64, -(k + 2.0 * fi - 1.0));
    let b = (k + fi - 1.0) * (fi - 1.0);
    let disc = a.mul_add(a, -4.0 * b);
    if disc.is_nan() || disc < 0.0 || a <= 0.0 {
        return Err(EdgeError::ShiftInsideSpectrum { i, discriminant: disc });
    }
    let s = disc.sqrt();
    let rho_plus = 0.5 * (a + s);
    Ok((rho_plus, b / rho_plus, s))
}

/// `(|rho_i^+|, |rho_i^-|)` for the given parameters.
pub fn rho_pair(i: usize, params: &EnsembleParams) -> Result<(f64, f64)> {
    if i == 0 || i > params.n {
        return Err(EdgeError::InvalidParameter(format!("index {i} outside 1..={}", params.n)));
    }
    let (p, q, _) = characteristic_roots(i, params.n, params.m, params.gamma)?;
    Ok((p, q))
}

/// Same roots in double-double arithmetic; `gamma` is taken as an exact double.
pub fn rho_pair_extended(i: usize, n: usize, m: usize, gamma: f64) -> Result<(DoubleDouble, DoubleDouble)> {
    let dd = DoubleDouble::from;
    let k = (m - n) as f64;
    let fi = i as f64;
    let a = dd(gamma) * dd(m as f64) - dd(k + 2.0 * fi - 1.0);
    let b = dd(k + fi - 1.0) * dd(fi - 1.0);
    let disc = a * a - dd(4.0) * b;
    if disc.hi < 0.0 {
        return Err(EdgeError::ShiftInsideSpectrum { i, discriminant: disc.to_f64() });
    }
    let rho_plus = (a + disc.sqrt()) * dd(0.5);
    Ok((rho_plus, b / rho_plus))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeGeometry {
    pub params: EnsembleParams,
    // All vectors are indexed directly by i; slot 0 (and any undefined slot) holds NaN.
    rho_plus: Vec<f64>,
    rho_minus: Vec<f64>,
    tau: Vec<f64>,
    delta: Vec<f64>,
    omega: Vec<f64>,
    gamma_ratio: Vec<f64>,
    gap: Vec<f64>,
    g: Vec<f64>,
    sum_log_rho_plus: f64,
}

impl EdgeGeometry {
    pub fn build(params: &EnsembleParams) -> Result<Self> {
        let n = params.n;
        if n < 2 {
            return Err(EdgeError::InvalidParameter(format!("geometry needs n >= 2, got {n}")));
        }
        let gm = params.shift();
        let k = params.excess() as f64;
        let mut rho_plus = vec![f64::NAN; n + 1];
        let mut rho_minus = vec![f64::NAN; n + 1];
        let mut sqrt_disc = vec![f64::NAN; n + 1];
        let mut tau = vec![f64::NAN; n + 1];
        let mut delta = vec![f64::NAN; n + 1];
        for i in 1..=n {
            let (p, q, s) = characteristic_roots(i, n, params.m, params.gamma)?;
            rho_plus[i] = p;
            rho_minus[i] = q;
            sqrt_disc[i] = s;
            tau[i] = (k + i as f64) / p;
            delta[i] = (i - 1) as f64 / p;
        }

        let mut omega = vec![f64::NAN; n + 1];
        let mut gamma_ratio = vec![f64::NAN; n + 1];
        let mut gap = vec![f64::NAN; n + 1];
        for i in 2..=n {
            omega[i] = rho_minus[i] / rho_plus[i - 1];
            gamma_ratio[i] = rho_minus[i] / rho_plus[i];
            // rho+_{i-1} - rho+_i = 1 + 2(gamma m - 1)/(S_{i-1} + S_i) since S_{i-1}^2 - S_i^2 = 4(gamma m - 1)
            let drop = 1.0 + 2.0 * (gm - 1.0) / (sqrt_disc[i - 1] + sqrt_disc[i]);
            gap[i] = rho_minus[i] * drop / (rho_plus[i] * rho_plus[i - 1]);
        }

        let mut g = vec![f64::NAN; n + 2];
        g[n + 1] = 1.0;
        for i in (2..=n).rev() {
            g[i] = 1.0 + omega[i] * g[i + 1];
        }

        let sum_log_rho_plus = rho_plus[1..].iter().map(|p| p.ln()).sum();
        Ok(Self {
            params: *params,
            rho_plus,
            rho_minus,
            tau,
            delta,
            omega,
            gamma_ratio,
            gap,
            g,
            sum_log_rho_plus,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.params.n
    }
    #[inline]
    pub fn rho_plus(&self, i: usize) -> f64 {
        self.rho_plus[i]
    }
    #[inline]
    pub fn rho_minus(&self, i: usize) -> f64 {
        self.rho_minus[i]
    }
    #[inline]
    pub fn tau(&self, i: usize) -> f64 {
        self.tau[i]
    }
    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        self.delta[i]
    }
    /// `omega_i = |rho_i^-| / |rho_{i-1}^+|`, defined for `i >= 2`.
    #[inline]
    pub fn omega(&self, i: usize) -> f64 {
        self.omega[i]
    }
    /// `gamma_i = |rho_i^-| / |rho_i^+|`, defined for `i >= 2`.
    #[inline]
    pub fn gamma_ratio(&self, i: usize) -> f64 {
        self.gamma_ratio[i]
    }
    /// `gamma_i - omega_i`, evaluated without cancellation.
    #[inline]
    pub fn gap(&self, i: usize) -> f64 {
        self.gap[i]
    }
    /// `g_i` for `2 <= i <= n + 1`.
    #[inline]
    pub fn g(&self, i: usize) -> f64 {
        self.g[i]
    }
    pub fn sum_log_rho_plus(&self) -> f64 {
        self.sum_log_rho_plus
    }

    /// CSV with columns `i, rho_plus, rho_minus, omega, gamma_ratio, tau, delta, g`.
    /// Entries undefined at an index are left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["i", "rho_plus", "rho_minus", "omega", "gamma_ratio", "tau", "delta", "g"])?;
        let cell = |x: f64| if x.is_finite() { crate::numfmt::format_f64(x) } else { String::new() };
        for i in 1..=self.n() {
            out.write_record([
                i.to_string(),
                cell(self.rho_plus[i]),
                cell(self.rho_minus[i]),
                cell(self.omega[i]),
                cell(self.gamma_ratio[i]),
                cell(self.tau[i]),
                cell(self.delta[i]),
                cell(self.g[i]),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
