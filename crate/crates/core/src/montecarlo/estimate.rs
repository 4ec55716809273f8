#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

impl EstimateWithCI {
    /// Proportion `k / n` with the binomial standard error.
    pub fn binomial(k: u64, n: u64) -> Self {
        let p = k as f64 / n as f64;
        EstimateWithCI {
            mean: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }

    /// Whether `value` lies within `z` standard errors of the mean.
    pub fn covers(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.std_error
    }
}

/// Running count, sum and sum of squares. Merging is associative, so partial
/// accumulators from independent streams can be combined in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    pub fn estimate(&self) -> EstimateWithCI {
        let n = self.n as f64;
        let mean = self.mean();
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        EstimateWithCI {
            mean,
            std_error: (var / n).sqrt(),
            n: self.n,
        }
    }
}

pub(crate) const MIN_SAMPLES: usize = 100;

pub(crate) fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::domain(
            "sample count",
            alloc::format!("{n} is below the minimum of {MIN_SAMPLES}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs = [0.5, 1.5, 2.0, -1.0, 3.25, 0.0];
        let mut all = Accumulator::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Accumulator::default(), Accumulator::default());
        xs[..2].iter().for_each(|&x| a.push(x));
        xs[2..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.n, all.n);
        assert!((a.estimate().std_error - all.estimate().std_error).abs() < 1e-15);
        // statistics.stdev(xs) / sqrt(6) in Python
        assert!((all.estimate().std_error - 0.620_539_639_704_382_3).abs() < 1e-12);
    }

    #[test]
    fn binomial_error() {
        let e = EstimateWithCI::binomial(25, 100);
        assert_eq!(e.mean, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(e.covers(0.3, 2.0) && !e.covers(0.4, 3.0));
    }
}
