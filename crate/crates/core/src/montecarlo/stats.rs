use serde::Serialize;

/// Neumaier-compensated sum over a fixed order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Aggregate of per-trial success masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialStats {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance; zero for a single trial.
    pub variance: f64,
    pub stderr: f64,
    pub ci95_half_width: f64,
}

impl TrialStats {
    /// Summarizes samples in the order given, so equal inputs always give
    /// bit-identical statistics.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n > 0, "statistics need at least one sample");
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let variance = if n > 1 {
            compensated_sum(samples.iter().map(|&x| (x - mean) * (x - mean))) / (n - 1) as f64
        } else {
            0.0
        };
        let stderr = (variance / n as f64).sqrt();
        Self {
            n,
            mean,
            variance,
            stderr,
            ci95_half_width: 1.96 * stderr,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples_have_zero_spread() {
        let s = TrialStats::from_samples(&[0.25; 10]);
        assert_eq!(s.mean, 0.25);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn known_moments() {
        let s = TrialStats::from_samples(&[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(s.mean, 0.5);
        assert!((s.variance - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.stderr - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!((s.ci95_half_width - 1.96 * s.stderr).abs() < 1e-15);
    }

    #[test]
    fn single_sample() {
        let s = TrialStats::from_samples(&[0.7]);
        assert_eq!((s.n, s.mean, s.variance), (1, 0.7, 0.0));
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 10_000));
        assert!((compensated_sum(v) - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
