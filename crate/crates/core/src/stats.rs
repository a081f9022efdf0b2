//! Estimators and confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

/// How a confidence interval was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CiMethod {
    ClopperPearson,
    Normal,
}

/// A Monte Carlo estimate with a confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub samples: u64,
    pub ci_halfwidth: f64,
    pub method: CiMethod,
}

/// Binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials);
        Proportion { successes, trials }
    }

    pub fn merge(self, o: Proportion) -> Proportion {
        Proportion::new(self.successes + o.successes, self.trials + o.trials)
    }

    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Standard error of the estimate.
    pub fn sigma(&self) -> f64 {
        let p = self.value();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Standard error at a hypothesised true value.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Exact two-sided interval at confidence `1 − alpha`.
    pub fn clopper_pearson(&self, alpha: f64) -> (f64, f64) {
        let (k, n) = (self.successes as f64, self.trials as f64);
        let lo = if self.successes == 0 {
            0.0
        } else {
            Beta::new(k, n - k + 1.0).unwrap().inverse_cdf(alpha / 2.0)
        };
        let hi = if self.successes == self.trials {
            1.0
        } else {
            Beta::new(k + 1.0, n - k)
                .unwrap()
                .inverse_cdf(1.0 - alpha / 2.0)
        };
        (lo, hi)
    }

    /// Estimate with a 95% Clopper–Pearson half-width (the larger side).
    pub fn estimate(&self) -> Estimate {
        let (lo, hi) = self.clopper_pearson(0.05);
        let v = self.value();
        Estimate {
            value: v,
            samples: self.trials,
            ci_halfwidth: (v - lo).max(hi - v),
            method: CiMethod::ClopperPearson,
        }
    }
}

/// Streaming mean and variance (Welford), mergeable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanVar {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, o: MeanVar) -> MeanVar {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        MeanVar {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    /// Normal-approximation 95% interval.
    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.mean,
            samples: self.n,
            ci_halfwidth: 1.96 * self.std_error(),
            method: CiMethod::Normal,
        }
    }
}

/// Least-squares line `y = slope·x + intercept` with coefficient of
/// determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Pearson correlation of paired 0/1 (or real) samples.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}
