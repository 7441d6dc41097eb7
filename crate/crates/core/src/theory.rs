//! Centering and scaling constants of the edge CLT.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleParams;
use crate::error::{EdgeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltConstants {
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub c_lambda: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub coef_n13: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub coef_sigma32: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub coef_logn: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub scale: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub a0_constant: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub b3_constant: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub variance_constant: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(EdgeError::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")))
    }
}

/// `C_lambda = (1 - 1/lambda) log(1 + sqrt(lambda)) + log sqrt(lambda) + 1/sqrt(lambda)`.
///
/// Rewritten as `log s + log1p(s) + (s - log1p(s)) / s^2` with `s = sqrt(lambda)`;
/// the two large terms of the textbook form cancel as `lambda -> 0`.
pub fn c_lambda(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let s = lambda.sqrt();
    let tail = if s < 0.05 {
        // (s - log1p(s)) / s^2 = sum_k (-1)^k s^k / (k + 2)
        let mut acc = 0.0;
        let mut pow = 1.0;
        for k in 0..16 {
            let term = pow / (k + 2) as f64;
            acc += if k % 2 == 0 { term } else { -term };
            pow *= s;
        }
        acc
    } else {
        (s - s.ln_1p()) / (s * s)
    };
    Ok(s.ln() + s.ln_1p() + tail)
}

impl CltConstants {
    pub fn new(params: &EnsembleParams) -> Result<Self> {
        let lam = params.lambda;
        check_lambda(lam)?;
        let s = lam.sqrt();
        let sp1 = 1.0 + s;
        let alpha = params.alpha;
        Ok(Self {
            c_lambda: c_lambda(lam)?,
            coef_n13: 1.0 / (s * sp1),
            coef_sigma32: 2.0 / (3.0 * lam.powf(0.75) * sp1 * sp1),
            coef_logn: (alpha - 0.25 - 1.5 * s / (sp1 * sp1)) / 6.0,
            scale: (alpha / 3.0 * (params.n as f64).ln()).sqrt(),
            a0_constant: (sp1 * sp1 + 6.0 * s) / (24.0 * sp1 * sp1),
            b3_constant: alpha / 6.0,
            variance_constant: alpha / 3.0,
        })
    }

    /// First three terms of the centering, i.e. the predicted deterministic shift
    /// `log|calD_n| - log|E_n|` up to O(1).
    pub fn deterministic_shift(&self, params: &EnsembleParams) -> f64 {
        let n = params.n as f64;
        let sigma = params.sigma_n;
        self.c_lambda * n + self.coef_n13 * sigma * n.cbrt() - self.coef_sigma32 * sigma.powf(1.5)
    }

    pub fn centering(&self, params: &EnsembleParams) -> f64 {
        self.deterministic_shift(params) - self.coef_logn * (params.n as f64).ln()
    }
}

pub fn centering(params: &EnsembleParams) -> Result<f64> {
    Ok(CltConstants::new(params)?.centering(params))
}

/// `z = (log|calD_n| - centering) / sqrt((alpha/3) log n)`.
pub fn standardize(log_abs_cal_d: f64, params: &EnsembleParams) -> Result<f64> {
    let c = CltConstants::new(params)?;
    Ok((log_abs_cal_d - c.centering(params)) / c.scale)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::geometry::edge_params;

    #[test]
    fn c_lambda_values() {
        assert!((c_lambda(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((c_lambda(0.25).unwrap() - 0.090457495115561544649).abs() < 1e-15);
        assert!(c_lambda(0.0).is_err());
        assert!(c_lambda(1.5).is_err());
    }

    #[test]
    fn c_lambda_series_branch_is_continuous() {
        let s = 0.05f64;
        let below = c_lambda((s * (1.0 - 1e-12)).powi(2)).unwrap();
        let above = c_lambda((s * (1.0 + 1e-12)).powi(2)).unwrap();
        assert!((below - above).abs() < 1e-11);
    }

    #[test]
    fn lambda_one_coefficients() {
        let p = edge_params(10_000, 1.0, 2.0, None).unwrap();
        let c = CltConstants::new(&p).unwrap();
        assert!((c.coef_n13 - 0.5).abs() < 1e-15);
        assert!((c.coef_sigma32 - 1.0 / 6.0).abs() < 1e-15);
        assert!((c.coef_logn - (2.0 - 5.0 / 8.0) / 6.0).abs() < 1e-15);
        assert!((c.a0_constant - 10.0 / 96.0).abs() < 1e-15);
    }

    #[test]
    fn standardize_definition() {
        let p = edge_params(1000, 0.5, 1.0, None).unwrap();
        let c = CltConstants::new(&p).unwrap();
        let mu = c.centering(&p);
        assert_eq!(standardize(mu, &p).unwrap(), 0.0);
        assert!((standardize(mu + c.scale, &p).unwrap() - 1.0).abs() < 1e-12);
    }
}
