//! Combination waterfall (best % tumor-size change) prediction.
//!
//! Two monotherapy samples are coupled through a Gaussian copula on their
//! empirical CDFs. Each simulated patient then receives the combination value
//! from [`combine_pair`]: the dual-responder Bliss rule when both draws are
//! responses, the best single-drug change otherwise.
//!
//! Values are signed % change from baseline: negative is shrinkage and `-100`
//! is complete disappearance.

mod band;
mod combine;
mod copula;
mod quantile;

pub use band::{bootstrap_band, deep_response_rate, predict_waterfall, BootstrapConfig, PredictedBand};
pub use combine::combine_pair;
pub use copula::gaussian_copula_pairs;
pub use quantile::{empirical_quantile, QuantileTable};

use crate::error::{Error, Result};

/// Floor for % change: a lesion cannot shrink by more than 100%.
pub const MIN_CHANGE: f64 = -100.0;

/// Best % change from baseline for each patient in an arm.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfallSample {
    values: Vec<f64>,
}

impl WaterfallSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < MIN_CHANGE)
        {
            return Err(Error::InvalidInput(format!(
                "value {v} at position {i} is not a finite change >= -100"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Bliss rule for dual responders, best single-drug change otherwise.
    Proposed,
    /// Best single-drug change for every patient.
    Palmer,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Mode::Proposed),
            "palmer" => Ok(Mode::Palmer),
            other => Err(Error::InvalidInput(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Proposed => "proposed",
            Mode::Palmer => "palmer",
        })
    }
}

/// How the inverse empirical CDF is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantileMethod {
    /// Smallest point of the evaluation grid whose ECDF reaches `u`.
    Grid,
    /// Generalized inverse of the ECDF on the raw sample.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopulaConfig {
    /// Copula correlation; also the correlation in the dual-responder rule.
    pub rho: f64,
    pub n_draws: usize,
    /// A draw is a response when strictly below this % change.
    pub cutoff: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_step: f64,
    pub mode: Mode,
    pub seed: u64,
    pub quantile: QuantileMethod,
}

impl Default for CopulaConfig {
    fn default() -> Self {
        Self {
            rho: 0.25,
            n_draws: 5000,
            cutoff: -30.0,
            grid_min: -120.0,
            grid_max: 100.0,
            grid_step: 1.0,
            mode: Mode::Proposed,
            seed: 20201,
            quantile: QuantileMethod::Grid,
        }
    }
}

impl CopulaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidInput(format!("rho = {} outside [-1, 1]", self.rho)));
        }
        if self.n_draws < 100 {
            return Err(Error::InvalidInput(format!("n_draws = {} < 100", self.n_draws)));
        }
        if self.grid_step.is_nan() || self.grid_step <= 0.0 {
            return Err(Error::InvalidInput("grid_step must be positive".into()));
        }
        if !(self.grid_min < self.cutoff && self.cutoff < self.grid_max) {
            return Err(Error::InvalidInput(format!(
                "need grid_min < cutoff < grid_max, got {} < {} < {}",
                self.grid_min, self.cutoff, self.grid_max
            )));
        }
        Ok(())
    }

    /// Evaluation grid `grid_min, grid_min + step, ..., <= grid_max`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.grid_max - self.grid_min) / self.grid_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.grid_min + i as f64 * self.grid_step)
            .collect()
    }
}
