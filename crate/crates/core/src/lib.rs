//! Simulation and analytics for chained-Zeno counterfactual communication:
//! a single-loop protocol whose inner interferometer is replaced by an
//! iterative beam-splitter module, and the nested-loop baseline it improves
//! on.
//!
//! The state algebra, chain module and protocol engines are generic over the
//! floating point type (see [`Scalar`]); the `*F64` aliases below are the
//! concrete types used by the Monte Carlo and experiment layers.

pub mod chain;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod protocols;
mod scalar;
pub mod state;

pub use chain::{ChainModule, DelayGeometry};
pub use error::{Error, Result};
pub use protocols::{
    BobBit, CounterfactualityVec, DetectorDist, ImprovedParams, NoiseMask, Protocol, SlazEngine, SlazParams,
};
pub use scalar::Scalar;
pub use state::{BeamSplitterAngle, Readout, Rotation, ThreeModeState, TwoModeState};

pub type TwoModeStateF64 = TwoModeState<f64>;
pub type ThreeModeStateF64 = ThreeModeState<f64>;
pub type ChainModuleF64 = ChainModule<f64>;
pub type ImprovedParamsF64 = ImprovedParams<f64>;
pub type SlazParamsF64 = SlazParams<f64>;
pub type DetectorDistF64 = DetectorDist<f64>;
pub type CounterfactualityVecF64 = CounterfactualityVec<f64>;

pub type TwoModeStateF32 = TwoModeState<f32>;
pub type ThreeModeStateF32 = ThreeModeState<f32>;
pub type ChainModuleF32 = ChainModule<f32>;
