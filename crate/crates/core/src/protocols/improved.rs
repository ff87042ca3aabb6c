use crate::chain::ChainModule;
use crate::error::{check_unit, Error, Result};
use crate::state::{detect, BeamSplitterAngle, Rotation, TwoModeState};
use crate::Scalar;

use super::{BobBit, CounterfactualityVec, DetectorDist, NoiseMask};

/// `M` outer cycles with angle `pi / 2M`, plus the iterative module sitting
/// at Bob's end of the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovedParams<T> {
    cycles: usize,
    angle: BeamSplitterAngle<T>,
    module: ChainModule<T>,
}

impl<T: Scalar> ImprovedParams<T> {
    pub fn new(cycles: usize, module: ChainModule<T>) -> Result<Self> {
        Ok(Self {
            cycles,
            angle: BeamSplitterAngle::from_cycles(cycles)?,
            module,
        })
    }

    /// Parameters with a fully transparent single-splitter module, for runs
    /// where only the outer interferometer matters.
    pub fn bare(cycles: usize) -> Result<Self> {
        Self::new(cycles, ChainModule::new(vec![T::one()])?)
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn theta(&self) -> T {
        self.angle.radians()
    }

    pub fn module(&self) -> &ChainModule<T> {
        &self.module
    }
}

/// `pi / 2M`.
pub fn theta_of<T: Scalar>(cycles: usize) -> Result<T> {
    Ok(BeamSplitterAngle::from_cycles(cycles)?.radians())
}

/// Probability that D1 clicks when Bob blocks: `cos^{2M}(pi / 2M)`.
pub fn improved_c1<T: Scalar>(cycles: usize) -> Result<T> {
    let theta: T = theta_of(cycles)?;
    Ok(theta.cos().powi(2 * cycles as i32))
}

/// Probability that the photon never enters the channel when Bob passes:
/// `prod_{m=1..M} (1 - sin^2(m theta) t)`.
pub fn improved_c0<T: Scalar>(cycles: usize, t: T) -> Result<T> {
    check_unit("t", t)?;
    let theta: T = theta_of(cycles)?;
    Ok((1..=cycles).fold(T::one(), |acc, m| {
        let s = (T::from_count(m) * theta).sin();
        acc * (T::one() - s * s * t)
    }))
}

pub fn counterfactuality_improved<T: Scalar>(params: &ImprovedParams<T>) -> Result<CounterfactualityVec<T>> {
    Ok(CounterfactualityVec {
        c0: improved_c0(params.cycles, params.module.total_transmission())?,
        c1: improved_c1(params.cycles)?,
    })
}

/// Steps the two-mode state through `M` cycles of beam splitter followed by a
/// channel segment, then reads out D1/D2.
///
/// A segment is obstructed when Bob blocks or the mask entry is set; the
/// channel amplitude is then scaled by `c`. Mass lost to Bob's blocking is
/// split between D4 (the module's transmitted fraction) and the module
/// detectors; mass lost to the environment goes to `noise_absorbed`, which
/// takes precedence when both apply.
pub fn improved_run<T: Scalar>(
    params: &ImprovedParams<T>,
    bob: BobBit,
    mask: &NoiseMask,
    c: T,
) -> Result<DetectorDist<T>> {
    mask.expect_len(params.cycles)?;
    check_unit("c", c)?;
    let rot = params.angle.rotation();
    let to_bob = params.module.total_transmission();
    let mut dist = DetectorDist::default();
    let mut state = TwoModeState::initial();
    for &noisy in mask.bits() {
        state = state.rotated(&rot);
        if noisy || bob == BobBit::Block {
            let (next, lost) = state.attenuated(c);
            state = next;
            if noisy {
                dist.noise_absorbed = dist.noise_absorbed + lost;
            } else {
                dist.d4_bob = dist.d4_bob + lost * to_bob;
                dist.d3_module = dist.d3_module + lost * (T::one() - to_bob);
            }
        }
    }
    let readout = detect(&state);
    dist.d1 = readout.d1;
    dist.d2 = readout.d2;
    Ok(dist)
}

/// D2 probability of a passing run whose only obstruction is at cycle `i`:
/// `(1 - (1 - c) sin(i theta) cos((M - i) theta))^2`.
pub fn improved_single_block_d2<T: Scalar>(cycles: usize, blocked: usize, c: T) -> Result<T> {
    if blocked == 0 || blocked > cycles {
        return Err(Error::OutOfRange {
            index: blocked,
            max: cycles,
        });
    }
    check_unit("c", c)?;
    let theta: T = theta_of(cycles)?;
    let y = (T::from_count(blocked) * theta).sin();
    let tail = (T::from_count(cycles - blocked) * theta).cos();
    let amp = T::one() - (T::one() - c) * y * tail;
    Ok(amp * amp)
}

// Used by the Monte Carlo layer to replay masks without re-validating.
#[inline]
pub(crate) fn improved_success_unchecked<T: Scalar>(rot: &Rotation<T>, mask: &[bool], c: T) -> T {
    let mut state = TwoModeState::initial();
    for &noisy in mask {
        state = state.rotated(rot);
        if noisy {
            state = state.attenuated(c).0;
        }
    }
    detect(&state).d2
}
