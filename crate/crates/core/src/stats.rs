//! Summary statistics and goodness-of-fit against the standard normal.

use serde::{Deserialize, Serialize};

use crate::error::{EdgeError, Result};

/// Standard normal CDF via `erfc`, accurate to about 1e-16 absolute.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Mergeable running moments (count, mean, second and third central sums).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Self::new();
        for &x in xs {
            m.push(x);
        }
        m
    }

    pub fn push(&mut self, x: f64) {
        self.merge(&Moments { count: 1, mean: x, m2: 0.0, m3: 0.0 });
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta * delta * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        *self = Moments { count: self.count + other.count, mean, m2, m3 };
    }

    /// Unbiased sample variance (divisor `N - 1`).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    /// Moment skewness `m3 / m2^{3/2}` with population normalization; 0 for constant data.
    pub fn skewness(&self) -> f64 {
        if self.count < 2 || self.m2 == 0.0 {
            return 0.0;
        }
        let n = self.count as f64;
        (self.m3 / n) / (self.m2 / n).powf(1.5)
    }
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(xs: &[f64]) -> f64 {
    quantile_sorted(&sorted_copy(xs), 0.5)
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic_against<F: FnMut(f64) -> Result<f64>>(samples: &[f64], mut cdf: F) -> Result<f64> {
    if samples.len() < 2 {
        return Err(EdgeError::EmptyInput(format!("KS needs at least 2 samples, got {}", samples.len())));
    }
    let sorted = sorted_copy(samples);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((k + 1) as f64 / n - f).max(f - k as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// KS distance to the standard normal.
pub fn ks_statistic(samples: &[f64]) -> Result<f64> {
    ks_statistic_against(samples, |x| Ok(normal_cdf(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: u64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub mean: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub variance: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub skewness: f64,
    pub quantiles: Vec<QuantilePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub q: f64,
    #[serde(serialize_with = "crate::numfmt::serialize")]
    pub value: f64,
}

pub const SUMMARY_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

pub fn summarize(xs: &[f64]) -> Result<Summary> {
    if xs.is_empty() {
        return Err(EdgeError::EmptyInput("summary of empty data".into()));
    }
    let m = Moments::from_slice(xs);
    let sorted = sorted_copy(xs);
    Ok(Summary {
        count: m.count,
        mean: m.mean,
        variance: m.variance(),
        skewness: m.skewness(),
        quantiles: SUMMARY_QUANTILES
            .iter()
            .map(|&q| QuantilePoint { q, value: quantile_sorted(&sorted, q) })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-15);
        assert!((normal_cdf(-8.0) - 6.22096057427178e-16).abs() < 1e-28);
    }

    #[test]
    fn ks_small_cases() {
        assert_eq!(ks_statistic(&[0.0; 10]).unwrap(), 0.5);
        assert!(ks_statistic(&[1.0]).is_err());
        assert!(ks_statistic(&[]).is_err());
    }

    #[test]
    fn alternating_signs() {
        let n = 1001;
        let xs: Vec<f64> = (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let m = Moments::from_slice(&xs);
        assert!((m.mean - 1.0 / n as f64).abs() < 1e-15);
        let xs: Vec<f64> = (0..1000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let m = Moments::from_slice(&xs);
        assert!(m.mean.abs() < 1e-15);
        assert!((m.variance() - 1000.0 / 999.0).abs() < 1e-14);
    }

    #[test]
    fn constant_data() {
        let m = Moments::from_slice(&[3.25; 50]);
        assert_eq!(m.variance(), 0.0);
        assert_eq!(m.skewness(), 0.0);
    }

    #[test]
    fn skewness_of_exponential_like_data() {
        let xs = [0.0, 0.0, 0.0, 1.0, 5.0];
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let m = Moments::from_slice(&xs);
        assert!((m.skewness() - m3 / m2.powf(1.5)).abs() < 1e-13);
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 4.0);
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }
}
