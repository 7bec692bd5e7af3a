//! Multi-objective hyperparameter and feature-structure search for
//! constrained gradient-boosted trees.

pub mod closure;
pub mod data;
pub mod detectors;
pub mod eagga;
pub mod gbm;
pub mod groupstruct;
pub mod measures;
pub mod moo;

pub use data::Dataset;
pub use groupstruct::{GroupStructure, Monotonicity};
pub use measures::ObjectiveVector;
