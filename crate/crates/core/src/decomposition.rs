//! Linearized decomposition of `log|E_n|` and the lemma-level quantities built on it.
//!
//! `xi_i = alpha_i + beta_i (1 + tau_{i-1}) + alpha_{i-1} delta_i`,
//! `X_i = (1 + tau_{i-1})(delta_i alpha_{i-1} + beta_i)`,
//! `L_i = xi_i + omega_i L_{i-1}` and `Y_i = X_i + omega_i Y_{i-1}` from `i = 3`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::ensemble::TridiagonalSample;
use crate::error::{EdgeError, Result};
use crate::geometry::EdgeGeometry;
use crate::logdet::{alpha_at, beta_at, RecursionTrace};

/// All vectors are indexed by `i` directly; slots where a quantity is undefined hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTrace {
    pub alpha_v: Vec<f64>,
    pub beta_v: Vec<f64>,
    pub xi: Vec<f64>,
    pub x: Vec<f64>,
    pub l: Vec<f64>,
    pub y: Vec<f64>,
    pub sum_l: f64,
    pub a0_sum: f64,
    pub b3_star_sum: f64,
}

pub fn build_decomposition(sample: &TridiagonalSample, geom: &EdgeGeometry) -> Result<DecompositionTrace> {
    let n = geom.n();
    if sample.n() != n || sample.m != geom.params.m {
        return Err(EdgeError::InvalidParameter("sample does not match geometry".into()));
    }
    if n < 3 {
        return Err(EdgeError::InvalidParameter(format!("decomposition needs n >= 3, got {n}")));
    }
    let mut alpha_v = vec![f64::NAN; n + 1];
    let mut beta_v = vec![f64::NAN; n + 1];
    for i in 1..=n {
        alpha_v[i] = alpha_at(sample, geom, i);
        if i >= 2 {
            beta_v[i] = beta_at(sample, geom, i);
        }
    }
    let mut xi = vec![f64::NAN; n + 1];
    let mut x = vec![f64::NAN; n + 1];
    let mut l = vec![f64::NAN; n + 1];
    let mut y = vec![f64::NAN; n + 1];
    for i in 3..=n {
        let t1 = 1.0 + geom.tau(i - 1);
        xi[i] = alpha_v[i] + beta_v[i] * t1 + alpha_v[i - 1] * geom.delta(i);
        x[i] = t1 * (geom.delta(i) * alpha_v[i - 1] + beta_v[i]);
        if i == 3 {
            l[i] = xi[i];
            y[i] = x[i];
        } else {
            l[i] = xi[i] + geom.omega(i) * l[i - 1];
            y[i] = x[i] + geom.omega(i) * y[i - 1];
        }
    }
    let sum_l = l[3..].iter().sum();
    let mut trace = DecompositionTrace {
        alpha_v,
        beta_v,
        xi,
        x,
        l,
        y,
        sum_l,
        a0_sum: a0_sum(geom),
        b3_star_sum: 0.0,
    };
    trace.b3_star_sum = b3_star_sum(&trace, geom);
    Ok(trace)
}

/// `sum_{i=3}^n g_{i+1} (gamma_i - omega_i)`.
pub fn a0_sum(geom: &EdgeGeometry) -> f64 {
    (3..=geom.n()).map(|i| geom.g(i + 1) * geom.gap(i)).sum()
}

/// `E X_i^2 = alpha delta_i (1 + tau_{i-1})^2 (omega_i / rho_{i-1}^+ + 1 / rho_i^+)`.
pub fn expected_x_sq(i: usize, geom: &EdgeGeometry) -> f64 {
    let t1 = 1.0 + geom.tau(i - 1);
    geom.params.alpha
        * geom.delta(i)
        * t1
        * t1
        * (geom.omega(i) / geom.rho_plus(i - 1) + 1.0 / geom.rho_plus(i))
}

/// `sum_{i=3}^n g_{i+1}^2 E X_i^2`, in closed form.
pub fn variance_sum(geom: &EdgeGeometry) -> f64 {
    (3..=geom.n()).map(|i| geom.g(i + 1).powi(2) * expected_x_sq(i, geom)).sum()
}

/// `sum_{i=4}^n (g_i - 1) L_{i-1}^2`.
pub fn b3_star_sum(trace: &DecompositionTrace, geom: &EdgeGeometry) -> f64 {
    (4..=geom.n()).map(|i| (geom.g(i) - 1.0) * trace.l[i - 1].powi(2)).sum()
}

/// `log|E_n| - (-sum L + a0_sum - b3_star_sum)`.
pub fn linearization_gap(rec: &RecursionTrace, decomp: &DecompositionTrace) -> f64 {
    rec.log_abs_e - (-decomp.sum_l + decomp.a0_sum - decomp.b3_star_sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubGammaTarget {
    AlphaI,
    BetaI,
    XI,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubGammaParams {
    pub v: f64,
    pub u: f64,
    pub target: SubGammaTarget,
}

impl SubGammaParams {
    /// `sqrt(2 v t) + u t`
    pub fn threshold(&self, t: f64) -> f64 {
        (2.0 * self.v * t).sqrt() + self.u * t
    }

    /// `E X^4 <= 2 (8v)^2 + 4! (4u)^4`
    pub fn fourth_moment_bound(&self) -> f64 {
        2.0 * (8.0 * self.v).powi(2) + 24.0 * (4.0 * self.u).powi(4)
    }
}

pub fn subgamma_params(i: usize, geom: &EdgeGeometry, target: SubGammaTarget) -> SubGammaParams {
    let alpha = geom.params.alpha;
    let rp = geom.rho_plus(i);
    let (v, u) = match target {
        SubGammaTarget::AlphaI => (alpha * geom.tau(i) / rp, alpha / rp),
        SubGammaTarget::BetaI => (alpha * geom.delta(i) / rp, alpha / rp),
        SubGammaTarget::XI => {
            let t1 = 1.0 + geom.tau(i - 1);
            (
                alpha * geom.delta(i) / rp * (geom.omega(i) + 1.0) * t1 * t1,
                alpha * t1 / rp,
            )
        }
    };
    SubGammaParams { v, u, target }
}

/// `sum g^4 E X^4 / (sum g^2 E X^2)^2` over `i = 3..n`, with the sub-gamma fourth-moment envelope.
pub fn lyapunov_ratio(geom: &EdgeGeometry) -> f64 {
    let num: f64 = (3..=geom.n())
        .map(|i| geom.g(i + 1).powi(4) * subgamma_params(i, geom, SubGammaTarget::XI).fourth_moment_bound())
        .sum();
    num / variance_sum(geom).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub t: f64,
    pub threshold: f64,
    pub empirical: f64,
    pub bound: f64,
    pub standard_error: f64,
    pub pass: bool,
}

/// Monte Carlo estimate of `P(|X| > sqrt(2vt) + ut)`; passes when it is at most
/// `2 e^{-t}` plus three binomial standard errors.
pub fn tail_check<F: FnMut() -> f64>(params: &SubGammaParams, mut draw: F, t: f64, n_draws: usize) -> Result<TailCheck> {
    if t.is_nan() || t <= 0.0 {
        return Err(EdgeError::InvalidParameter(format!("t = {t} must be positive")));
    }
    if n_draws == 0 {
        return Err(EdgeError::EmptyInput("tail check with no draws".into()));
    }
    let threshold = params.threshold(t);
    let hits = (0..n_draws).filter(|_| draw().abs() > threshold).count();
    let p = hits as f64 / n_draws as f64;
    let se = (p * (1.0 - p) / n_draws as f64).sqrt();
    let bound = 2.0 * (-t).exp();
    Ok(TailCheck { t, threshold, empirical: p, bound, standard_error: se, pass: p <= bound + 3.0 * se })
}

/// Independent draws of `alpha_i`, `beta_i` or `X_i` without building a whole sample.
pub struct ComponentSampler {
    target: SubGammaTarget,
    scale: f64,
    a_mean: f64,
    a_law: Gamma<f64>,
    b_mean: f64,
    b_law: Option<Gamma<f64>>,
    rho: f64,
    rho_prev: f64,
    tau_prev: f64,
    delta: f64,
}

impl ComponentSampler {
    pub fn new(i: usize, geom: &EdgeGeometry, target: SubGammaTarget) -> Result<Self> {
        let n = geom.n();
        let lo = if target == SubGammaTarget::AlphaI { 1 } else { 2 };
        if i < lo || i > n {
            return Err(EdgeError::InvalidParameter(format!("index {i} outside {lo}..={n}")));
        }
        let alpha = geom.params.alpha;
        let k = geom.params.excess() as f64;
        // alpha_i needs a_i^2; X_i needs a_{i-1}^2 and b_{i-1}^2; beta_i needs b_{i-1}^2.
        let a_index = if target == SubGammaTarget::AlphaI { i } else { i - 1 };
        let a_mean = k + a_index as f64;
        let law = |mean: f64| {
            Gamma::new(mean / alpha, alpha).map_err(|e| EdgeError::InvalidParameter(format!("gamma law: {e}")))
        };
        let b_mean = (i - 1) as f64;
        Ok(Self {
            target,
            scale: alpha,
            a_mean,
            a_law: law(a_mean)?,
            b_mean,
            b_law: if i >= 2 { Some(law(b_mean)?) } else { None },
            rho: geom.rho_plus(i),
            rho_prev: if i >= 2 { geom.rho_plus(i - 1) } else { f64::NAN },
            tau_prev: if i >= 2 { geom.tau(i - 1) } else { f64::NAN },
            delta: geom.delta(i),
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        debug_assert!(self.scale > 0.0);
        match self.target {
            SubGammaTarget::AlphaI => (self.a_law.sample(rng) - self.a_mean) / self.rho,
            SubGammaTarget::BetaI => (self.b_draw(rng) - self.b_mean) / self.rho,
            SubGammaTarget::XI => {
                let a_prev = (self.a_law.sample(rng) - self.a_mean) / self.rho_prev;
                let b = (self.b_draw(rng) - self.b_mean) / self.rho;
                (1.0 + self.tau_prev) * (self.delta * a_prev + b)
            }
        }
    }

    fn b_draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.b_law.as_ref().expect("index >= 2").sample(rng)
    }
}
