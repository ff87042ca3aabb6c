//! The iterative module that replaces the inner interferometer: a chain of
//! beam splitters with mirrors and absorbing detectors, treated at the level
//! of path probabilities.

use crate::error::{check_unit, Error, Result};
use crate::Scalar;

/// Ordered beam-splitter transmissivities `t_1..t_N` (probabilities).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModule<T> {
    transmissivities: Vec<T>,
}

impl<T: Scalar> ChainModule<T> {
    pub fn new(transmissivities: Vec<T>) -> Result<Self> {
        if transmissivities.is_empty() {
            return Err(Error::Config("chain module needs at least one beam splitter".into()));
        }
        for &t in &transmissivities {
            check_unit("t_j", t)?;
        }
        Ok(Self { transmissivities })
    }

    /// `n` identical splitters with product `t_target`, i.e. each
    /// `t_j = t_target^(1/n)`.
    pub fn uniform_for_target(n: usize, t_target: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("chain module needs at least one beam splitter".into()));
        }
        if !(t_target > T::zero() && t_target <= T::one()) {
            return Err(Error::Domain {
                name: "t_target",
                value: t_target.to_f64().unwrap_or(f64::NAN),
                range: "(0, 1]",
            });
        }
        let tj = t_target.powf(T::one() / T::from_count(n));
        Ok(Self {
            transmissivities: vec![tj; n],
        })
    }

    pub fn len(&self) -> usize {
        self.transmissivities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissivities.is_empty()
    }

    pub fn transmissivities(&self) -> &[T] {
        &self.transmissivities
    }

    /// Probability that the pulse crosses every splitter and reaches Bob.
    pub fn total_transmission(&self) -> T {
        self.transmissivities.iter().fold(T::one(), |acc, &t| acc * t)
    }

    /// Probability of being sent back to the polarizing beam splitter by one
    /// of the module mirrors: `sum_i [prod_{j<i} t_j^2] (1 - t_i)^2`.
    pub fn reflect_back_prob(&self) -> T {
        let mut through = T::one();
        let mut total = T::zero();
        for &t in &self.transmissivities {
            let r = T::one() - t;
            total = total + through * r * r;
            through = through * t * t;
        }
        total
    }

    /// Mass caught by the module detectors (in aggregate).
    pub fn absorb_prob(&self) -> T {
        (T::one() - self.reflect_back_prob() - self.total_transmission()).max(T::zero())
    }

    /// Return rate of the channel amplitude when the module is closed off;
    /// equal to the reflect-back probability.
    pub fn effective_return_rate(&self) -> T {
        self.reflect_back_prob()
    }
}

/// Optical-delay layout of the module: `n` delays spaced by `spacing`, the
/// first one matched to the real channel length `first`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayGeometry<T> {
    n: usize,
    spacing: T,
    first: T,
}

impl<T: Scalar> DelayGeometry<T> {
    pub fn new(n: usize, spacing: T, first: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("delay count must be at least 1".into()));
        }
        for (name, v) in [("L0", spacing), ("L1", first)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Domain {
                    name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                    range: "(0, inf)",
                });
            }
        }
        Ok(Self { n, spacing, first })
    }

    /// `L_i = L1 + (i - 1) L0` for `i = 1..=n`.
    pub fn od_lengths(&self) -> Vec<T> {
        (0..self.n)
            .map(|k| self.first + T::from_count(k) * self.spacing)
            .collect()
    }
}
