//! Semiparametric proportional hazards regression for interval-censored
//! data with the baseline density approximated by Bernstein polynomials.

pub mod bernstein;
pub mod cli;
pub mod degree;
pub mod error;
pub mod io;
pub mod likelihood;
pub mod model;
pub mod optimizer;
pub mod report;
pub mod simulation;

pub use error::{Error, Result};
pub use model::{BernsteinPHModel, Dataset, Event, Observation};
pub use optimizer::{mable_fit, FitConfig, FitReport};
