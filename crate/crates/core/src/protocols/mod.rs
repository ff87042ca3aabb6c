//! Protocol engines and closed-form analytics for the single-loop protocol
//! with an iterative module ("improved") and the nested-loop baseline
//! ("SLAZ").

pub(crate) mod improved;
mod slaz;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

pub use improved::{
    counterfactuality_improved, improved_c0, improved_c1, improved_run, improved_single_block_d2, theta_of,
    ImprovedParams,
};
pub use slaz::{slaz_p1, slaz_p2, slaz_run, slaz_run_segments, InnerCycle, SlazEngine, SlazParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Improved,
    Slaz,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Improved => "improved",
            Protocol::Slaz => "slaz",
        })
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "improved" => Ok(Protocol::Improved),
            "slaz" | "slaz2013" => Ok(Protocol::Slaz),
            other => Err(Error::Config(format!("unknown protocol `{other}`"))),
        }
    }
}

/// Bob's encoding action: `Block` sends logic 1, `Pass` sends logic 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BobBit {
    Block,
    Pass,
}

impl FromStr for BobBit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "block" | "1" => Ok(BobBit::Block),
            "pass" | "0" => Ok(BobBit::Pass),
            other => Err(Error::Config(format!("bob must be `block` or `pass`, got `{other}`"))),
        }
    }
}

impl fmt::Display for BobBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BobBit::Block => "block",
            BobBit::Pass => "pass",
        })
    }
}

/// Per-segment obstruction pattern; `true` means the environment blocks the
/// channel during that segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NoiseMask(Vec<bool>);

impl NoiseMask {
    pub fn clean(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn blocked(len: usize) -> Self {
        Self(vec![true; len])
    }

    /// Blocks the listed 1-based segments.
    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = vec![false; len];
        for &i in indices {
            if i == 0 || i > len {
                return Err(Error::OutOfRange { index: i, max: len });
            }
            bits[i - 1] = true;
        }
        Ok(Self(bits))
    }

    /// Parses `none`, `all`, or a comma-separated list of 1-based indices.
    pub fn parse(spec: &str, len: usize) -> Result<Self> {
        match spec.trim() {
            "none" | "" => Ok(Self::clean(len)),
            "all" => Ok(Self::blocked(len)),
            list => {
                let indices = list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Config(format!("malformed mask entry `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_indices(len, &indices)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_blocked(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub(crate) fn expect_len(&self, len: usize) -> Result<()> {
        if self.0.len() == len {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "noise mask has {} entries, expected {len}",
                self.0.len()
            )))
        }
    }
}

impl From<Vec<bool>> for NoiseMask {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

/// Final probability mass per outcome of a single-photon run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectorDist<T> {
    pub d1: T,
    pub d2: T,
    /// Aggregate of the module detectors (improved) or of the inner-loop
    /// detector (baseline).
    pub d3_module: T,
    pub d4_bob: T,
    pub noise_absorbed: T,
}

impl<T: Scalar> DetectorDist<T> {
    pub fn total(&self) -> T {
        self.d1 + self.d2 + self.d3_module + self.d4_bob + self.noise_absorbed
    }

    /// Checks the mass budget to `tol`.
    pub fn check_conservation(&self, tol: T) -> Result<()> {
        let masses = [self.d1, self.d2, self.d3_module, self.d4_bob, self.noise_absorbed];
        let total = self.total();
        if masses.iter().all(|&m| m >= -tol) && (total - T::one()).abs() <= tol {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "detector masses do not sum to 1: {self:?}"
            )))
        }
    }
}

/// `(C0, C1)`: counterfactuality rates for logic 0 and logic 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterfactualityVec<T> {
    pub c0: T,
    pub c1: T,
}

impl<T: Scalar> CounterfactualityVec<T> {
    /// Abnormality rates `A = 1 - C`, componentwise.
    pub fn abnormality(&self) -> (T, T) {
        (T::one() - self.c0, T::one() - self.c1)
    }
}

/// Total path length traversed per bit: `M L` for the improved protocol and
/// `M N L` for the nested baseline.
pub fn equivalent_distance<T: Scalar>(protocol: Protocol, outer: usize, inner: usize, length: T) -> Result<T> {
    if !(length > T::zero() && length.is_finite()) {
        return Err(Error::Domain {
            name: "L",
            value: length.to_f64().unwrap_or(f64::NAN),
            range: "(0, inf)",
        });
    }
    let cycles = match protocol {
        Protocol::Improved => outer,
        Protocol::Slaz => outer * inner,
    };
    Ok(T::from_count(cycles) * length)
}
