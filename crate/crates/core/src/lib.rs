//! Jiles-Atherton hysteresis simulation and parameter estimation.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: the scalar JA forward model and the RMS fitness used by every
//!   estimator.
//! - [`bounds`]: the five-parameter search box and its per-parameter scaling.
//! - [`sampling`]: initial-candidate draws (uniform over bounds or Gaussian
//!   around an expert estimate) from reproducible random streams.
//! - [`optim`]: GA, PSO and DE minimizers with the shared stagnation rule.
//! - [`grid`]: exhaustive grid sweep used as the brute-force reference.
//! - [`harness`]: repeated sample-then-optimize restarts.
//! - [`stats`]: kernel density summaries (mode and 95% interval) of restart
//!   outcomes.
//! - [`io`]: B-H CSV files, experiment configuration, reports and synthetic
//!   curves.

pub mod bounds;
pub mod error;
pub mod grid;
pub mod harness;
pub mod io;
pub mod model;
pub mod optim;
pub mod sampling;
pub mod stats;

pub use bounds::{Param, ParamBounds, ParamRange, Scale};
pub use error::{Error, Result};
pub use model::{BhCurve, Direction, JaParams, SimState, MU0};
pub use sampling::{InitStrategy, SeededRng};
