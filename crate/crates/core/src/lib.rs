//! Ruin analysis for generalised Ornstein-Uhlenbeck processes
//! `V_t = e^{ξ_t}(z + ∫_0^t e^{-ξ_{s-}} dη_s)` driven by a bivariate Lévy
//! process `(ξ, η)` with finite, atomic jump measure.

pub mod asymptotics;
pub mod bounds_engine;
pub mod cli;
pub mod expr;
pub mod ext;
pub mod fixtures;
pub mod levy_model;
pub mod model_file;
pub mod quadrant_thresholds;
pub mod quadrature;
pub mod ruin_classifier;
pub mod simulator;

pub use ext::{ExtInterval, ExtReal, IntervalKind};
pub use levy_model::{AtomicJumpMeasure, BivariateTriplet, Drift, GaussianCovariance, JumpAtom, MarginalTriplet};
