//! Real-amplitude single-photon states and the beam-splitter / channel maps
//! acting on them.
//!
//! Every map in scope is a real rotation or a real scaling of one amplitude,
//! so amplitudes are kept real. States are plain values: each operation
//! returns a new state.

use crate::error::{Error, Result};
use crate::Scalar;

/// Beam-splitter mixing angle in radians, `0 <= theta <= pi/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterAngle<T> {
    theta: T,
}

impl<T: Scalar> BeamSplitterAngle<T> {
    pub fn new(theta: T) -> Result<Self> {
        if theta.is_finite() && theta >= T::zero() && theta <= T::FRAC_PI_2() {
            Ok(Self { theta })
        } else {
            Err(Error::Domain {
                name: "theta",
                value: theta.to_f64().unwrap_or(f64::NAN),
                range: "[0, pi/2]",
            })
        }
    }

    /// The angle `pi / (2 * cycles)` that completes a quarter turn after
    /// `cycles` applications.
    pub fn from_cycles(cycles: usize) -> Result<Self> {
        if cycles == 0 {
            return Err(Error::Config("cycle count must be at least 1".into()));
        }
        Ok(Self {
            theta: T::FRAC_PI_2() / T::from_count(cycles),
        })
    }

    pub fn radians(&self) -> T {
        self.theta
    }

    pub fn rotation(&self) -> Rotation<T> {
        Rotation::new(self.theta)
    }
}

/// Precomputed `(cos, sin)` pair of a rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T> {
    pub cos: T,
    pub sin: T,
}

impl<T: Scalar> Rotation<T> {
    pub fn new(theta: T) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self { cos, sin }
    }

    #[inline]
    pub(crate) fn apply(&self, a: T, b: T) -> (T, T) {
        (a * self.cos - b * self.sin, a * self.sin + b * self.cos)
    }
}

fn check_amplitudes<T: Scalar>(amps: &[T]) -> Result<()> {
    if amps.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidState(format!("non-finite amplitude in {amps:?}")));
    }
    let norm = amps.iter().fold(T::zero(), |acc, &a| acc + a * a);
    if norm > T::one() + T::NORM_TOL {
        return Err(Error::InvalidState(format!("norm {norm} exceeds 1")));
    }
    Ok(())
}

/// Photon amplitudes in Alice's arm (`|10>`) and in the channel arm (`|01>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeState<T> {
    alice: T,
    channel: T,
}

impl<T: Scalar> TwoModeState<T> {
    pub fn new(alice: T, channel: T) -> Result<Self> {
        check_amplitudes(&[alice, channel])?;
        Ok(Self { alice, channel })
    }

    /// Photon entirely in Alice's arm.
    pub fn initial() -> Self {
        Self {
            alice: T::one(),
            channel: T::zero(),
        }
    }

    pub fn alice_amp(&self) -> T {
        self.alice
    }

    pub fn channel_amp(&self) -> T {
        self.channel
    }

    pub fn norm_sqr(&self) -> T {
        self.alice * self.alice + self.channel * self.channel
    }

    #[inline]
    pub(crate) fn rotated(self, rot: &Rotation<T>) -> Self {
        let (alice, channel) = rot.apply(self.alice, self.channel);
        Self { alice, channel }
    }

    /// Scales the channel amplitude by `c`; the lost mass is returned
    /// alongside the new state.
    #[inline]
    pub(crate) fn attenuated(self, c: T) -> (Self, T) {
        let absorbed = (T::one() - c * c) * self.channel * self.channel;
        (
            Self {
                alice: self.alice,
                channel: self.channel * c,
            },
            absorbed,
        )
    }
}

/// Beam-splitter update `(x, y) -> (x cos - y sin, x sin + y cos)`.
pub fn rotate<T: Scalar>(state: TwoModeState<T>, theta: T) -> Result<TwoModeState<T>> {
    if !theta.is_finite() {
        return Err(Error::Domain {
            name: "theta",
            value: theta.to_f64().unwrap_or(f64::NAN),
            range: "finite",
        });
    }
    let out = state.rotated(&Rotation::new(theta));
    check_amplitudes(&[out.alice, out.channel])?;
    Ok(out)
}

/// Multiplies the channel amplitude by `c` and reports the absorbed
/// probability `(1 - c^2) y^2`.
pub fn attenuate_channel<T: Scalar>(state: TwoModeState<T>, c: T) -> Result<(TwoModeState<T>, T)> {
    crate::error::check_unit("c", c)?;
    Ok(state.attenuated(c))
}

/// Terminal readout probabilities: `|10>` clicks D1, `|01>` clicks D2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readout<T> {
    pub d1: T,
    pub d2: T,
}

pub fn detect<T: Scalar>(state: &TwoModeState<T>) -> Readout<T> {
    Readout {
        d1: state.alice * state.alice,
        d2: state.channel * state.channel,
    }
}

/// Amplitudes of the nested-interferometer baseline: outer arm, inner arm,
/// and channel arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeModeState<T> {
    outer: T,
    inner: T,
    channel: T,
}

impl<T: Scalar> ThreeModeState<T> {
    pub fn new(outer: T, inner: T, channel: T) -> Result<Self> {
        check_amplitudes(&[outer, inner, channel])?;
        Ok(Self { outer, inner, channel })
    }

    pub fn initial() -> Self {
        Self {
            outer: T::one(),
            inner: T::zero(),
            channel: T::zero(),
        }
    }

    pub fn outer_amp(&self) -> T {
        self.outer
    }

    pub fn inner_amp(&self) -> T {
        self.inner
    }

    pub fn channel_amp(&self) -> T {
        self.channel
    }

    pub fn norm_sqr(&self) -> T {
        self.outer * self.outer + self.inner * self.inner + self.channel * self.channel
    }

    /// Outer beam splitter, mixing the outer and inner arms.
    #[inline]
    pub fn rotate_outer(self, rot: &Rotation<T>) -> Self {
        let (outer, inner) = rot.apply(self.outer, self.inner);
        Self {
            outer,
            inner,
            channel: self.channel,
        }
    }

    /// Inner beam splitter, mixing the inner arm with the channel.
    #[inline]
    pub fn rotate_inner(self, rot: &Rotation<T>) -> Self {
        let (inner, channel) = rot.apply(self.inner, self.channel);
        Self {
            outer: self.outer,
            inner,
            channel,
        }
    }

    /// Removes the channel component, returning the mass it carried.
    #[inline]
    pub fn clear_channel(self) -> (Self, T) {
        (
            Self {
                channel: T::zero(),
                ..self
            },
            self.channel * self.channel,
        )
    }
}
