use crate::error::{Error, Result};

/// Monte Carlo estimate of a scalar expectation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of `mean` (first-order delta method for derived quantities).
    pub std_error: f64,
    pub n_samples: u64,
}

impl McEstimate {
    /// `std_error / |mean|`; infinite for a zero mean with nonzero error.
    pub fn relative_error(&self) -> f64 {
        if self.std_error == 0.0 {
            0.0
        } else {
            self.std_error / self.mean.abs()
        }
    }
}

/// One-pass (count, mean, M2) moments; mergeable across disjoint streams.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(count: u64, mean: f64, m2: f64) -> Self {
        Accumulator { count, mean, m2 }
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise combination of two disjoint sample sets.
    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / count as f64;
        self.mean += delta * weight;
        self.m2 += other.m2 + delta * delta * self.count as f64 * weight;
        self.count = count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance (zero below two samples).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self) -> McEstimate {
        McEstimate {
            mean: self.mean,
            std_error: (self.variance() / self.count.max(1) as f64).sqrt(),
            n_samples: self.count,
        }
    }
}

/// Pools stream-level accumulators, in order, into a single estimate.
pub fn merge_estimates(parts: &[Accumulator]) -> Result<McEstimate> {
    if parts.is_empty() {
        return Err(Error::domain("merge_estimates needs at least one part"));
    }
    let mut pooled = Accumulator::new();
    for part in parts {
        pooled.merge(part);
    }
    if pooled.count == 0 {
        return Err(Error::domain("merge_estimates: all parts are empty"));
    }
    Ok(pooled.estimate())
}
