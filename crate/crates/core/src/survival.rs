//! Tabulated survival functions.

use crate::error::{Error, Result};

/// A nonincreasing survival function tabulated on a strictly increasing time
/// grid (months) that starts at `t = 0` with `S(0) = 1`.
///
/// Evaluation between grid points is right-continuous step interpolation, the
/// Kaplan–Meier convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    times: Vec<f64>,
    probs: Vec<f64>,
}

/// Result of [`SurvivalCurve::median`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Median {
    Reached(f64),
    NotReached,
}

impl Median {
    pub fn value(self) -> Option<f64> {
        match self {
            Median::Reached(m) => Some(m),
            Median::NotReached => None,
        }
    }
}

impl SurvivalCurve {
    pub fn new(times: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if times.len() != probs.len() {
            return Err(Error::InvalidInput(format!(
                "times/probs length mismatch: {} vs {}",
                times.len(),
                probs.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidInput("a survival curve needs at least 2 points".into()));
        }
        if times[0] != 0.0 || probs[0] != 1.0 {
            return Err(Error::InvalidInput("a survival curve must start at (0, 1)".into()));
        }
        for i in 0..times.len() {
            if !times[i].is_finite() || !probs[i].is_finite() {
                return Err(Error::InvalidInput(format!("non-finite value at point {i}")));
            }
            if !(0.0..=1.0).contains(&probs[i]) {
                return Err(Error::InvalidInput(format!(
                    "survival probability {} at point {i} outside [0, 1]",
                    probs[i]
                )));
            }
            if i > 0 {
                if times[i] <= times[i - 1] {
                    return Err(Error::InvalidInput(format!(
                        "times not strictly increasing at point {i}"
                    )));
                }
                if probs[i] > probs[i - 1] {
                    return Err(Error::InvalidInput(format!(
                        "survival probabilities increase at point {i}"
                    )));
                }
            }
        }
        Ok(Self { times, probs })
    }

    /// Tabulate a function on the given grid.
    pub fn from_fn(times: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let probs = times.iter().map(|&t| f(t)).collect();
        Self::new(times, probs)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Last tabulated time.
    pub fn support_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Right-continuous step evaluation. Beyond the last grid time the last
    /// value is carried forward; `t < 0` gives 1.
    pub fn at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        let idx = self.times.partition_point(|&x| x <= t);
        self.probs[idx - 1]
    }

    /// Step-evaluate on another grid.
    pub fn resample(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&t| self.at(t)).collect()
    }

    /// Earliest time with `S(t) <= 0.5`, interpolated linearly between the
    /// bracketing grid points.
    pub fn median(&self) -> Median {
        let Some(i) = self.probs.iter().position(|&p| p <= 0.5) else {
            return Median::NotReached;
        };
        if self.probs[i] == 0.5 || i == 0 {
            return Median::Reached(self.times[i]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (p0, p1) = (self.probs[i - 1], self.probs[i]);
        Median::Reached(t0 + (p0 - 0.5) / (p0 - p1) * (t1 - t0))
    }
}

/// Median of a survival curve; see [`SurvivalCurve::median`].
pub fn median_of_curve(s: &SurvivalCurve) -> Median {
    s.median()
}

/// Union of the two curves' time grids restricted to their common support.
pub fn merged_grid(a: &SurvivalCurve, b: &SurvivalCurve) -> Vec<f64> {
    let end = a.support_end().min(b.support_end());
    let mut grid: Vec<f64> = a
        .times
        .iter()
        .chain(b.times.iter())
        .copied()
        .filter(|&t| t <= end)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}
