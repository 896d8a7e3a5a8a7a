//! Prediction of combination-therapy efficacy from monotherapy data under
//! independent drug action.
//!
//! - [`ida`]: response rate, responder composition and duration-of-response
//!   survival of the combination, with variance and median ordering.
//! - [`waterfall`]: best % tumor-size change distribution of the combination
//!   via a Gaussian copula, with bootstrap bands.
//! - [`design`]: inverting the response-rate model and sizing two-arm studies.
//! - [`io`]: CSV schemas and study files.

pub mod design;
pub mod error;
pub mod fixtures;
pub mod ida;
pub mod io;
pub mod rate;
pub mod reproduce;
pub mod rng;
pub mod stats;
pub mod survival;
pub mod svg;
pub mod waterfall;

pub use error::{Error, Result};
pub use rate::{CorrelationSpec, Rate};
pub use survival::{median_of_curve, Median, SurvivalCurve};
