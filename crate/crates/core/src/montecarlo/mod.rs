//! Seeded Monte Carlo harness for the noise-robustness study, and the exact
//! second-moment oracle it is checked against.
//!
//! Each trial draws its own obstruction pattern from a ChaCha stream keyed by
//! `(master_seed, trial_index)`. Trial results are collected in index order
//! and reduced with a compensated sum, so the statistics do not depend on how
//! many workers ran the trials.

mod exact;
mod stats;

use std::fmt;
use std::str::FromStr;

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_unit, Error, Result};
use crate::protocols::{
    improved::improved_success_unchecked, ImprovedParams, NoiseMask, Protocol, SlazEngine, SlazParams,
};
use crate::state::Rotation;

pub use exact::exact_expected_success;
pub use stats::TrialStats;

/// Where environmental obstruction acts in the nested baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SlazNoise {
    /// One Bernoulli event per outer cycle, obstructing all `N` inner
    /// segments of that cycle.
    PerOuterCycle,
    /// One Bernoulli event per inner channel segment (`M * N` events).
    #[default]
    PerInnerSegment,
}

impl FromStr for SlazNoise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outer" | "per-outer-cycle" => Ok(Self::PerOuterCycle),
            "inner" | "per-inner-segment" => Ok(Self::PerInnerSegment),
            other => Err(Error::Config(format!("unknown noise granularity `{other}`"))),
        }
    }
}

impl fmt::Display for SlazNoise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PerOuterCycle => "outer",
            Self::PerInnerSegment => "inner",
        })
    }
}

/// Obstruction rate `B` and return rate `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    b: f64,
    c: f64,
    granularity: SlazNoise,
}

impl NoiseSpec {
    pub fn new(b: f64, c: f64) -> Result<Self> {
        check_unit("B", b)?;
        check_unit("c", c)?;
        Ok(Self {
            b,
            c,
            granularity: SlazNoise::default(),
        })
    }

    pub fn with_granularity(mut self, granularity: SlazNoise) -> Self {
        self.granularity = granularity;
        self
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn granularity(&self) -> SlazNoise {
        self.granularity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent stream for one trial.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(trial);
        rng
    }
}

/// Protocol configuration for noise studies.
#[derive(Debug, Clone, PartialEq)]
pub enum McProtocol {
    Improved(ImprovedParams<f64>),
    Slaz(SlazParams<f64>),
}

impl McProtocol {
    pub fn improved(cycles: usize) -> Result<Self> {
        Ok(Self::Improved(ImprovedParams::bare(cycles)?))
    }

    pub fn slaz(outer: usize, inner: usize) -> Result<Self> {
        Ok(Self::Slaz(SlazParams::new(outer, inner)?))
    }

    pub fn protocol(&self) -> Protocol {
        match self {
            Self::Improved(_) => Protocol::Improved,
            Self::Slaz(_) => Protocol::Slaz,
        }
    }

    pub fn outer_cycles(&self) -> usize {
        match self {
            Self::Improved(p) => p.cycles(),
            Self::Slaz(p) => p.outer_cycles(),
        }
    }

    pub fn inner_cycles(&self) -> Option<usize> {
        match self {
            Self::Improved(_) => None,
            Self::Slaz(p) => Some(p.inner_cycles()),
        }
    }
}

/// Draws `len` independent obstruction flags, each set with probability `b`.
pub fn sample_mask<R: Rng + ?Sized>(len: usize, b: f64, rng: &mut R) -> Result<NoiseMask> {
    let dist = Bernoulli::new(b).map_err(|_| Error::Domain {
        name: "B",
        value: b,
        range: "[0, 1]",
    })?;
    Ok(dist.sample_iter(rng).take(len).collect::<Vec<_>>().into())
}

/// Per-trial success sampler with everything that does not depend on the
/// trial precomputed.
enum Sampler {
    Improved {
        cycles: usize,
        rot: Rotation<f64>,
        c: f64,
    },
    Slaz {
        engine: Box<SlazEngine<f64>>,
        granularity: SlazNoise,
    },
}

impl Sampler {
    fn new(protocol: &McProtocol, spec: &NoiseSpec) -> Self {
        match protocol {
            McProtocol::Improved(p) => Sampler::Improved {
                cycles: p.cycles(),
                rot: Rotation::new(p.theta()),
                c: spec.c,
            },
            McProtocol::Slaz(p) => Sampler::Slaz {
                engine: Box::new(SlazEngine::new(*p)),
                granularity: spec.granularity,
            },
        }
    }

    fn success(&self, noise: &Bernoulli, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Improved { cycles, rot, c } => {
                let mask: Vec<bool> = noise.sample_iter(rng).take(*cycles).collect();
                improved_success_unchecked(rot, &mask, *c)
            }
            Sampler::Slaz {
                engine,
                granularity: SlazNoise::PerOuterCycle,
            } => {
                let mask: Vec<bool> = noise.sample_iter(rng).take(engine.params().outer_cycles()).collect();
                engine.pass_success_outer(&mask)
            }
            Sampler::Slaz {
                engine,
                granularity: SlazNoise::PerInnerSegment,
            } => {
                let rot = engine.outer_rotation();
                let inner = engine.params().inner_cycles();
                let (mut a, mut b) = (1.0f64, 0.0f64);
                for _ in 0..engine.params().outer_cycles() {
                    (a, b) = rot.apply(a, b);
                    b *= engine.pass_keep_with(noise.sample_iter(&mut *rng).take(inner));
                }
                a * a
            }
        }
    }
}

fn run_trials(protocol: &McProtocol, spec: &NoiseSpec, trials: usize, seed: Seed) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::Config("trial count must be at least 1".into()));
    }
    let sampler = Sampler::new(protocol, spec);
    let noise = Bernoulli::new(spec.b).expect("B validated by NoiseSpec");
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| sampler.success(&noise, &mut seed.trial_rng(trial)))
        .collect();
    Ok(TrialStats::from_samples(&samples))
}

/// Averages the success mass (D2 improved, D1 baseline) of passing runs over
/// `trials` sampled obstruction patterns, on the global worker pool.
pub fn run_mc(protocol: &McProtocol, spec: &NoiseSpec, trials: usize, seed: Seed) -> Result<TrialStats> {
    run_trials(protocol, spec, trials, seed)
}

/// Like [`run_mc`] on a dedicated pool of `workers` threads.
pub fn run_mc_with_workers(
    protocol: &McProtocol,
    spec: &NoiseSpec,
    trials: usize,
    seed: Seed,
    workers: usize,
) -> Result<TrialStats> {
    with_workers(Some(workers), || run_trials(protocol, spec, trials, seed))
}

/// Runs `f` on a pool of the requested size, or on the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match workers {
        None => f(),
        Some(0) => Err(Error::Config("worker count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(f),
    }
}

/// Full grid of statistics, indexed `[config][grid point]`. Every grid point
/// reuses the same trial streams.
pub fn compare_protocols(
    b_grid: &[f64],
    configs: &[McProtocol],
    c: f64,
    granularity: SlazNoise,
    trials: usize,
    seed: Seed,
) -> Result<Vec<Vec<TrialStats>>> {
    if b_grid.is_empty() {
        return Err(Error::Config("noise grid is empty".into()));
    }
    configs
        .iter()
        .map(|protocol| {
            b_grid
                .iter()
                .map(|&b| {
                    let spec = NoiseSpec::new(b, c)?.with_granularity(granularity);
                    run_mc(protocol, &spec, trials, seed)
                })
                .collect()
        })
        .collect()
}
