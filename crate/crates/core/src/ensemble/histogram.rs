use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts of points of `[0, 1)` in `bin_count` equal bins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalHistogram {
    pub fn new(bin_count: usize) -> Result<Self> {
        if bin_count == 0 {
            return Err(Error::InvalidArgument("bin_count must be positive".into()));
        }
        Ok(EmpiricalHistogram {
            counts: vec![0; bin_count],
            total: 0,
        })
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument("bin_count must be positive".into()));
        }
        let total = counts.iter().sum();
        Ok(EmpiricalHistogram { counts, total })
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn bin_of(&self, x: f64) -> usize {
        let m = self.counts.len();
        ((x * m as f64) as usize).min(m - 1)
    }

    /// Adds a point of `[0, 1)`.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let b = self.bin_of(x);
        self.counts[b] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &EmpiricalHistogram) -> Result<()> {
        if other.bin_count() != self.bin_count() {
            return Err(Error::InvalidArgument(format!(
                "cannot merge histograms with {} and {} bins",
                self.bin_count(),
                other.bin_count()
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    /// Bin masses as a probability vector.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        if self.total == 0 {
            return Err(Error::EmptyHistogram);
        }
        let t = self.total as f64;
        Ok(self.counts.iter().map(|&c| c as f64 / t).collect())
    }

    /// Which bins were hit at least once.
    pub fn support(&self) -> Vec<bool> {
        self.counts.iter().map(|&c| c > 0).collect()
    }

    /// Largest gap between the empirical CDF and `x`, taken at bin
    /// boundaries.
    pub fn ks_distance_to_uniform(&self) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::EmptyHistogram);
        }
        let m = self.counts.len() as f64;
        let t = self.total as f64;
        let mut cum = 0u64;
        let mut worst = 0.0f64;
        for (i, &c) in self.counts.iter().enumerate() {
            cum += c;
            let gap = (cum as f64 / t - (i + 1) as f64 / m).abs();
            worst = worst.max(gap);
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_extremes() {
        let uniform = EmpiricalHistogram::from_counts(vec![5; 100]).unwrap();
        assert!(uniform.ks_distance_to_uniform().unwrap() <= 1.0 / 100.0);
        let mut spike = EmpiricalHistogram::new(100).unwrap();
        for _ in 0..10 {
            spike.add(0.001);
        }
        let ks = spike.ks_distance_to_uniform().unwrap();
        assert!((ks - (1.0 - 1.0 / 100.0)).abs() < 1e-12);
        assert_eq!(
            EmpiricalHistogram::new(10)
                .unwrap()
                .ks_distance_to_uniform(),
            Err(Error::EmptyHistogram)
        );
    }

    #[test]
    fn merge_adds_counts() {
        let mut a = EmpiricalHistogram::new(4).unwrap();
        let mut b = EmpiricalHistogram::new(4).unwrap();
        a.add(0.1);
        b.add(0.9);
        b.add(0.95);
        a.merge(&b).unwrap();
        assert_eq!(a.counts(), &[1, 0, 0, 2]);
        assert_eq!(a.total(), 3);
        assert!(a.merge(&EmpiricalHistogram::new(5).unwrap()).is_err());
    }
}
