//! Monte-Carlo means with standard errors.

use serde::{Deserialize, Serialize};

/// A sample mean together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    /// Upper end of the `k`-standard-error interval.
    pub fn upper(&self, k: f64) -> f64 {
        self.mean + k * self.se
    }

    pub fn lower(&self, k: f64) -> f64 {
        self.mean - k * self.se
    }
}

/// Streaming mean/variance (Welford), summation in input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn estimate(&self) -> Estimate {
        if self.n == 0 {
            return Estimate { mean: 0.0, se: 0.0 };
        }
        let n = self.n as f64;
        let var = if self.n > 1 { self.m2 / (n - 1.0) } else { 0.0 };
        Estimate { mean: self.mean, se: (var / n).sqrt() }
    }
}

impl FromIterator<f64> for MeanVar {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanVar::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Median of a slice (NaN-free input), averaging the middle pair.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}
