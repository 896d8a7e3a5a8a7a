//! Response rates and the correlation parameters that couple two drugs.

use crate::error::{Error, Result};

/// Absolute slack allowed when checking Fréchet bounds on joint cell probabilities.
pub(crate) const FEAS_TOL: f64 = 1e-12;

/// A probability such as an objective response rate, optionally carrying the
/// arm size it was estimated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    value: f64,
    n: Option<u32>,
}

impl Rate {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidInput(format!("rate {value} outside [0, 1]")));
        }
        Ok(Self { value, n: None })
    }

    pub fn with_n(value: f64, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("arm size must be >= 1".into()));
        }
        Ok(Self {
            n: Some(n),
            ..Self::new(value)?
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn n(&self) -> Option<u32> {
        self.n
    }

    /// Binomial standard error, when the arm size is known.
    pub fn std_err(&self) -> Option<f64> {
        self.n
            .map(|n| (self.value * (1.0 - self.value) / f64::from(n)).sqrt())
    }

    pub(crate) fn is_degenerate(&self) -> bool {
        self.value == 0.0 || self.value == 1.0
    }
}

/// The three correlations used across the models.
///
/// `phi_prime` couples the two response indicators, `phi_dprime` the two
/// duration-exceedance indicators (constant over time), and `phi_tumor` the
/// two cell-kill fractions in the dual-responder tumor-size rule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrelationSpec {
    pub phi_prime: f64,
    pub phi_dprime: f64,
    pub phi_tumor: f64,
}

impl CorrelationSpec {
    pub fn new(phi_prime: f64, phi_dprime: f64, phi_tumor: f64) -> Result<Self> {
        for (name, v) in [
            ("phi_prime", phi_prime),
            ("phi_dprime", phi_dprime),
            ("phi_tumor", phi_tumor),
        ] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        Ok(Self {
            phi_prime,
            phi_dprime,
            phi_tumor,
        })
    }

    pub fn independent() -> Self {
        Self::default()
    }

    /// Advisory messages for values outside the range supported by xenograft
    /// evidence. These never reject the input.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(0.0..=0.3).contains(&self.phi_tumor) {
            out.push(format!(
                "phi_tumor = {} is outside the typical range [0, 0.3]",
                self.phi_tumor
            ));
        }
        out
    }
}

/// Range of `phi` for which two Bernoulli margins `a`, `b` admit a valid joint
/// table: `P(1,1) = ab + phi*sqrt(a(1-a)b(1-b))` within its Fréchet bounds.
/// Returns `None` when a margin is 0 or 1 (any `phi` gives the same table).
pub(crate) fn bernoulli_phi_bounds(a: f64, b: f64) -> Option<(f64, f64)> {
    let scale = (a * (1.0 - a) * b * (1.0 - b)).sqrt();
    if scale == 0.0 {
        return None;
    }
    let lo = ((a + b - 1.0).max(0.0) - a * b) / scale;
    let hi = (a.min(b) - a * b) / scale;
    Some((lo.max(-1.0), hi.min(1.0)))
}

/// Joint probability `P(A=1, B=1)` implied by `phi`, validated.
pub(crate) fn joint_one_one(a: f64, b: f64, phi: f64) -> Result<f64> {
    let scale = (a * (1.0 - a) * b * (1.0 - b)).sqrt();
    let p11 = a * b + phi * scale;
    if let Some((lo, hi)) = bernoulli_phi_bounds(a, b) {
        let p_lo = (a + b - 1.0).max(0.0);
        let p_hi = a.min(b);
        if p11 < p_lo - FEAS_TOL || p11 > p_hi + FEAS_TOL || !(-1.0..=1.0).contains(&phi) {
            return Err(Error::InfeasibleCorrelation { phi, a, b, lo, hi });
        }
        Ok(p11.clamp(p_lo, p_hi))
    } else {
        Ok(a * b)
    }
}
