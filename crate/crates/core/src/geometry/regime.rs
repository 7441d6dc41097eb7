//! Leading-order predictions for `omega_i` in the four ranges of `n - i`.
//! Diagnostics only; the main computation never uses them.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaRegime {
    /// `n - i << n^{1/3} sigma_n`
    NearEdge,
    /// `n - i` comparable to `n^{1/3} sigma_n`
    Transition,
    /// `n^{1/3} sigma_n << n - i << n`
    Intermediate,
    /// `n - i` a fixed fraction of `n`
    Bulk,
}

/// Heuristic assignment of an index to a regime.
///
/// With `r = (n-i)/(n^{1/3} sigma_n)` and `x = (n-i)/n`: `r < 0.1` is near the edge,
/// `r <= 10` is the transition, then `x < 0.1` is intermediate and the rest is bulk.
pub fn classify(i: usize, params: &EnsembleParams) -> OmegaRegime {
    let n = params.n as f64;
    let dist = (params.n - i) as f64;
    let r = dist / (n.cbrt() * params.sigma_n);
    if r < 0.1 {
        OmegaRegime::NearEdge
    } else if r <= 10.0 {
        OmegaRegime::Transition
    } else if dist / n < 0.1 {
        OmegaRegime::Intermediate
    } else {
        OmegaRegime::Bulk
    }
}

pub fn omega_asymptote(i: usize, params: &EnsembleParams, regime: OmegaRegime) -> f64 {
    let n = params.n as f64;
    let lam = params.lambda;
    let s = lam.sqrt();
    let sigma = params.sigma_n;
    let dist = (params.n - i) as f64;
    let edge_scale = n.powf(-1.0 / 3.0) * sigma.sqrt();
    match regime {
        OmegaRegime::NearEdge => 1.0 - 2.0 * lam.powf(-0.25) * edge_scale,
        OmegaRegime::Transition => {
            let inner = 1.0 / s + (s + 1.0).powi(2) * dist / (n.cbrt() * sigma);
            1.0 - 2.0 * inner.sqrt() * edge_scale
        }
        OmegaRegime::Intermediate => 1.0 - 2.0 * (1.0 + s) * (dist / n).sqrt(),
        OmegaRegime::Bulk => {
            let l = 1.0 / s;
            let x = dist / n;
            let rx = x.sqrt();
            (l + x - (l + 1.0) * rx) / (l + x + (l + 1.0) * rx)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::edge_params;

    #[test]
    fn closed_forms() {
        let p = edge_params(1_000_000, 0.5, 1.0, None).unwrap();
        let n = 1e6f64;
        let near = 1.0 - 2.0 * 0.5f64.powf(-0.25) * n.powf(-1.0 / 3.0) * p.sigma_n.sqrt();
        assert_eq!(omega_asymptote(p.n, &p, OmegaRegime::NearEdge), near);
        let i = p.n - 10_000;
        let mid = 1.0 - 2.0 * (1.0 + 0.5f64.sqrt()) * 0.01f64.sqrt();
        assert!((omega_asymptote(i, &p, OmegaRegime::Intermediate) - mid).abs() < 1e-15);
    }

    #[test]
    fn regimes_agree_where_they_overlap() {
        let p = edge_params(1_000_000, 0.5, 1.0, None).unwrap();
        // Transition collapses to the near-edge value at i = n.
        let a = omega_asymptote(p.n, &p, OmegaRegime::Transition);
        let b = omega_asymptote(p.n, &p, OmegaRegime::NearEdge);
        assert!((a - b).abs() < 1e-14);
        // Bulk and intermediate agree to first order for small x.
        let i = p.n - 100;
        let a = 1.0 - omega_asymptote(i, &p, OmegaRegime::Bulk);
        let b = 1.0 - omega_asymptote(i, &p, OmegaRegime::Intermediate);
        // Relative difference is of order (1 + sqrt(lambda)) sqrt(x) = 0.017 here.
        assert!((a / b - 1.0).abs() < 0.03);
    }

    #[test]
    fn classification_is_ordered() {
        let p = edge_params(1_000_000, 0.5, 1.0, None).unwrap();
        assert_eq!(classify(p.n, &p), OmegaRegime::NearEdge);
        assert_eq!(classify(p.n - 5_000, &p), OmegaRegime::Transition);
        assert_eq!(classify(p.n - 80_000, &p), OmegaRegime::Intermediate);
        assert_eq!(classify(p.n / 2, &p), OmegaRegime::Bulk);
    }
}
