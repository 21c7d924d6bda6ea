//! Order-independent reductions and Monte Carlo estimators.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;

/// Pairwise (cascade) summation. The result depends only on the order of
/// `xs`, never on how it was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                n,
            };
        }
        let mean = pairwise_sum(xs) / n as f64;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 {
            pairwise_sum(&dev) / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        }
    }

    pub fn ci(&self, z: f64) -> (f64, f64) {
        (self.mean - z * self.se, self.mean + z * self.se)
    }
}

pub fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Estimate of `ln E[e^X]` from samples of `X`, computed by log-sum-exp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMeanExp {
    /// `ln` of the sample mean of `e^X`.
    pub log_mean: f64,
    /// Standard error of `log_mean` (delta method).
    pub log_se: f64,
    /// Effective sample size `(Σw)² / Σw²`.
    pub ess: f64,
    /// Share of the total weight carried by the largest 0.1% of samples.
    pub top_share: f64,
    pub n: usize,
}

impl LogMeanExp {
    pub const MIN_ESS: f64 = 100.0;
    pub const MAX_TOP_SHARE: f64 = 0.5;

    pub fn from_log_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let shift = max_of(xs);
        if n == 0 || !shift.is_finite() {
            return Self {
                log_mean: shift,
                log_se: f64::NAN,
                ess: 0.0,
                top_share: 1.0,
                n,
            };
        }
        let w: Vec<f64> = xs.iter().map(|x| (x - shift).exp()).collect();
        let est = MeanEstimate::from_samples(&w);
        let w2: Vec<f64> = w.iter().map(|x| x * x).collect();
        let sum = pairwise_sum(&w);
        let ess = sum * sum / pairwise_sum(&w2);
        let mut sorted = w.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let top = (n / 1000).max(1);
        let top_share = pairwise_sum(&sorted[..top]) / sum;
        Self {
            log_mean: shift + est.mean.ln(),
            log_se: est.se / est.mean,
            ess,
            top_share,
            n,
        }
    }

    /// Whether the estimate is trustworthy enough to support a verdict.
    pub fn reliable(&self) -> bool {
        self.ess >= Self::MIN_ESS && (self.n < 1000 || self.top_share <= Self::MAX_TOP_SHARE)
    }
}
