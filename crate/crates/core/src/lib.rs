//! Average smoothness of functions on [0, 1].
//!
//! Exact models for piecewise-linear and step functions, their local slope,
//! total variation and maximal function, the strong and weak average
//! smoothness seminorms, the disjoint-segment covering selection, and
//! γ-shattering certificates for the classes those seminorms define.

pub mod cli;
pub mod constructions;
pub mod corpus;
pub mod covering;
pub mod error;
pub mod extended;
pub mod func_model;
pub mod maximal;
pub mod rational;
mod ratio_max;
pub mod report;
pub mod seminorms;
pub mod shattering;
pub mod slope;
pub mod variation;
pub mod verify;

pub use error::{Error, Result};
pub use extended::{Extended, ExtendedReal};
pub use func_model::{Function, FunctionSpec, PiecewiseLinear, StepFunction};
pub use rational::Rational;
