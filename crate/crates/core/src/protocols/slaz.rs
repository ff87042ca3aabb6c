use crate::error::{Error, Result};
use crate::state::{BeamSplitterAngle, Rotation, ThreeModeState};
use crate::Scalar;

use super::{BobBit, DetectorDist, NoiseMask};

/// Nested interferometer: `M` outer cycles, each containing `N` inner cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlazParams<T> {
    outer: usize,
    inner: usize,
    outer_angle: BeamSplitterAngle<T>,
    inner_angle: BeamSplitterAngle<T>,
}

impl<T: Scalar> SlazParams<T> {
    pub fn new(outer: usize, inner: usize) -> Result<Self> {
        Ok(Self {
            outer,
            inner,
            outer_angle: BeamSplitterAngle::from_cycles(outer)?,
            inner_angle: BeamSplitterAngle::from_cycles(inner)?,
        })
    }

    pub fn outer_cycles(&self) -> usize {
        self.outer
    }

    pub fn inner_cycles(&self) -> usize {
        self.inner
    }

    pub fn theta_outer(&self) -> T {
        self.outer_angle.radians()
    }

    pub fn theta_inner(&self) -> T {
        self.inner_angle.radians()
    }
}

/// Explicit step-by-step engine. `blocked(k, j)` reports environmental
/// obstruction of inner segment `j` of outer cycle `k` (both 0-based).
fn run_explicit<T: Scalar>(
    params: &SlazParams<T>,
    bob: BobBit,
    blocked: impl Fn(usize, usize) -> bool,
) -> DetectorDist<T> {
    let outer_rot = params.outer_angle.rotation();
    let inner_rot = params.inner_angle.rotation();
    let mut dist = DetectorDist::default();
    let mut state = ThreeModeState::initial();
    for k in 0..params.outer {
        state = state.rotate_outer(&outer_rot);
        for j in 0..params.inner {
            state = state.rotate_inner(&inner_rot);
            let noisy = blocked(k, j);
            if noisy || bob == BobBit::Block {
                let (next, lost) = state.clear_channel();
                state = next;
                if noisy {
                    dist.noise_absorbed = dist.noise_absorbed + lost;
                } else {
                    dist.d4_bob = dist.d4_bob + lost;
                }
            }
        }
        // whatever completed the inner loop through the channel leaves via D3
        let (next, leaked) = state.clear_channel();
        state = next;
        dist.d3_module = dist.d3_module + leaked;
    }
    dist.d1 = state.outer_amp() * state.outer_amp();
    dist.d2 = state.inner_amp() * state.inner_amp();
    dist
}

/// Runs the nested protocol with one mask entry per outer cycle; a noisy
/// cycle has all `N` of its channel segments obstructed.
pub fn slaz_run<T: Scalar>(params: &SlazParams<T>, bob: BobBit, mask: &NoiseMask) -> Result<DetectorDist<T>> {
    mask.expect_len(params.outer)?;
    let bits = mask.bits();
    Ok(run_explicit(params, bob, |k, _| bits[k]))
}

/// Runs the nested protocol with one mask entry per inner channel segment,
/// ordered outer-major (`M * N` entries).
pub fn slaz_run_segments<T: Scalar>(params: &SlazParams<T>, bob: BobBit, mask: &NoiseMask) -> Result<DetectorDist<T>> {
    mask.expect_len(params.outer * params.inner)?;
    let bits = mask.bits();
    let n = params.inner;
    Ok(run_explicit(params, bob, |k, j| bits[k * n + j]))
}

/// Effect of one complete inner loop on an inner-arm amplitude. The channel
/// is empty when the loop starts, so the loop is a scalar map on the inner
/// amplitude plus a loss fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerCycle<T> {
    /// Inner amplitude factor with the channel open.
    pub pass_keep: T,
    /// Fraction of inner mass leaking to D3 with the channel open.
    pub pass_leak: T,
    /// Inner amplitude factor with every segment obstructed.
    pub block_keep: T,
    /// Fraction of inner mass absorbed with every segment obstructed.
    pub block_loss: T,
}

impl<T: Scalar> InnerCycle<T> {
    /// Collapses `n` explicit inner steps acting on a unit amplitude.
    fn simulate(n: usize, rot: &Rotation<T>) -> Self {
        let (mut a, mut b) = (T::one(), T::zero());
        for _ in 0..n {
            (a, b) = rot.apply(a, b);
        }
        let (pass_keep, pass_leak) = (a, b * b);

        let (mut a, mut lost) = (T::one(), T::zero());
        for _ in 0..n {
            let (na, nb) = rot.apply(a, T::zero());
            a = na;
            lost = lost + nb * nb;
        }
        Self {
            pass_keep,
            pass_leak,
            block_keep: a,
            block_loss: lost,
        }
    }
}

/// Nested-protocol engine with each inner loop collapsed to a precomputed
/// scalar map, giving `O(M)` runs for per-outer-cycle masks.
#[derive(Debug, Clone)]
pub struct SlazEngine<T> {
    params: SlazParams<T>,
    outer_rot: Rotation<T>,
    cycle: InnerCycle<T>,
    gap_cos: Vec<T>,
}

impl<T: Scalar> SlazEngine<T> {
    pub fn new(params: SlazParams<T>) -> Self {
        let inner_rot = params.inner_angle.rotation();
        let theta = params.theta_inner();
        Self {
            outer_rot: params.outer_angle.rotation(),
            cycle: InnerCycle::simulate(params.inner, &inner_rot),
            gap_cos: (0..=params.inner).map(|g| (T::from_count(g) * theta).cos()).collect(),
            params,
        }
    }

    pub fn params(&self) -> &SlazParams<T> {
        &self.params
    }

    pub fn inner_cycle(&self) -> &InnerCycle<T> {
        &self.cycle
    }

    pub fn run(&self, bob: BobBit, mask: &NoiseMask) -> Result<DetectorDist<T>> {
        mask.expect_len(self.params.outer)?;
        let mut dist = DetectorDist::default();
        let mut state = ThreeModeState::initial();
        for &noisy in mask.bits() {
            state = state.rotate_outer(&self.outer_rot);
            let b = state.inner_amp();
            let mass = b * b;
            let keep = if noisy || bob == BobBit::Block {
                let lost = mass * self.cycle.block_loss;
                if noisy {
                    dist.noise_absorbed = dist.noise_absorbed + lost;
                } else {
                    dist.d4_bob = dist.d4_bob + lost;
                }
                self.cycle.block_keep
            } else {
                dist.d3_module = dist.d3_module + mass * self.cycle.pass_leak;
                self.cycle.pass_keep
            };
            state = ThreeModeState::new(state.outer_amp(), b * keep, T::zero())?;
        }
        dist.d1 = state.outer_amp() * state.outer_amp();
        dist.d2 = state.inner_amp() * state.inner_amp();
        Ok(dist)
    }

    /// D1 mass of a passing run with per-outer-cycle obstruction.
    #[inline]
    pub(crate) fn pass_success_outer(&self, mask: &[bool]) -> T {
        let (mut a, mut b) = (T::one(), T::zero());
        for &noisy in mask {
            (a, b) = self.outer_rot.apply(a, b);
            b = b * if noisy {
                self.cycle.block_keep
            } else {
                self.cycle.pass_keep
            };
        }
        a * a
    }

    /// Inner amplitude factor of one passing inner loop whose obstructed
    /// segments are given by `segments` (`N` flags). Between obstructions the
    /// inner/channel pair rotates freely from an empty channel, so each run of
    /// `g` free steps closed by an obstruction (or by the end of the loop)
    /// contributes `cos(g theta_N)`.
    #[inline]
    pub(crate) fn pass_keep_with(&self, segments: impl Iterator<Item = bool>) -> T {
        let mut keep = T::one();
        let mut gap = 0;
        for noisy in segments {
            gap += 1;
            if noisy {
                keep = keep * self.gap_cos[gap];
                gap = 0;
            }
        }
        keep * self.gap_cos[gap]
    }

    #[inline]
    pub(crate) fn outer_rotation(&self) -> &Rotation<T> {
        &self.outer_rot
    }
}

/// `|x_M|^2 = cos^{2M}(pi / 2M)`: D1 mass of a clean passing run.
pub fn slaz_p1<T: Scalar>(outer: usize) -> Result<T> {
    super::improved_c1(outer)
}

/// D2 mass of a clean blocking run, from the outer recursion
/// `(a, b) -> (a cos - b sin, (a sin + b cos) cos^N(pi / 2N))`.
pub fn slaz_p2<T: Scalar>(outer: usize, inner: usize) -> Result<T> {
    if inner == 0 {
        return Err(Error::Config("inner cycle count must be at least 1".into()));
    }
    let rot = BeamSplitterAngle::<T>::from_cycles(outer)?.rotation();
    // cos^N evaluated as exp(N ln(1 - 2 sin^2(theta/2))) to keep precision
    // for the tiny inner angles
    let half = BeamSplitterAngle::<T>::from_cycles(inner)?.radians() / T::lit(2.0);
    let damping = (T::from_count(inner) * (-T::lit(2.0) * half.sin() * half.sin()).ln_1p()).exp();
    let (mut a, mut b) = (T::one(), T::zero());
    for _ in 0..outer {
        let (na, nb) = rot.apply(a, b);
        a = na;
        b = nb * damping;
    }
    Ok(b * b)
}
