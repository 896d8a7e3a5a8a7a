//! Closed-form independent-drug-action predictions for response rate and
//! duration of response.
//!
//! Notation follows the usual convention: `r1`, `r2` are monotherapy response
//! rates, `S1`, `S2` monotherapy DoR survival functions among responders,
//! `phi_prime` the correlation of the response indicators and `phi_dprime`
//! the correlation of the indicators `T1 > t`, `T2 > t`.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rate::{bernoulli_phi_bounds, joint_one_one, CorrelationSpec, Rate};
use crate::survival::{merged_grid, SurvivalCurve};

/// Predicted response rate of the combination when a patient responds to the
/// combination iff they respond to at least one drug.
pub fn predict_orr(r1: Rate, r2: Rate, phi_prime: f64) -> Result<Rate> {
    let (a, b) = (r1.value(), r2.value());
    let p11 = joint_one_one(a, b, phi_prime)?;
    Rate::new((a + b - p11).clamp(0.0, 1.0))
}

/// Closed interval of `phi_prime` values that keep every cell of the joint
/// response table inside `[0, 1]`.
pub fn feasible_phi_range(r1: Rate, r2: Rate) -> Result<(f64, f64)> {
    for r in [r1, r2] {
        if r.is_degenerate() {
            return Err(Error::DegenerateRate(r.value()));
        }
    }
    Ok(bernoulli_phi_bounds(r1.value(), r2.value()).expect("non-degenerate margins"))
}

/// Composition of the combination's responders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponderMix {
    /// Would respond to both drugs.
    pub r12: f64,
    /// Would respond to drug 1 only.
    pub r10: f64,
    /// Would respond to drug 2 only.
    pub r02: f64,
    /// Combination response rate.
    pub r: f64,
}

pub fn responder_mix(r1: Rate, r2: Rate, phi_prime: f64) -> Result<ResponderMix> {
    let (a, b) = (r1.value(), r2.value());
    let p11 = joint_one_one(a, b, phi_prime)?;
    let r = a + b - p11;
    if r <= 0.0 {
        return Err(Error::NoResponders);
    }
    Ok(ResponderMix {
        r12: p11 / r,
        r10: (a - p11) / r,
        r02: (b - p11) / r,
        r,
    })
}

/// Correlation at time `t` between the indicators `X1*T1 > t` and `X2*T2 > t`,
/// given the response correlation and the duration correlation at `t`.
pub fn phi_of_t(phi_prime: f64, phi_dprime: f64, r1: Rate, r2: Rate, s1: f64, s2: f64) -> Result<f64> {
    let (a, b) = (r1.value(), r2.value());
    let (y1, y2) = (a * s1, b * s2);
    let denom = (y1 * (1.0 - y1) * y2 * (1.0 - y2)).sqrt();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateMargin(format!(
            "r1*S1 = {y1}, r2*S2 = {y2}; both must lie strictly inside (0, 1)"
        )));
    }
    let p11 = joint_one_one(a, b, phi_prime)?;
    let j11 = joint_one_one(s1, s2, phi_dprime)?;
    Ok((p11 * j11 - y1 * y2) / denom)
}

/// Survival among combination responders at one time point, computed from
/// `Y = max(X1*T1, X2*T2)`.
pub fn dor_survival_at(r1: Rate, r2: Rate, phi_prime: f64, phi_dprime: f64, s1: f64, s2: f64) -> Result<f64> {
    let (a, b) = (r1.value(), r2.value());
    let r = predict_orr(r1, r2, phi_prime)?.value();
    if r <= 0.0 {
        return Err(Error::NoResponders);
    }
    let (y1, y2) = (a * s1, b * s2);
    let d = y1 * (1.0 - y1) * y2 * (1.0 - y2);
    let corr_term = if d > 0.0 {
        phi_of_t(phi_prime, phi_dprime, r1, r2, s1, s2)? * d.sqrt()
    } else {
        // a zero margin forces the joint cell to its product value
        joint_one_one(s1, s2, phi_dprime)?;
        0.0
    };
    Ok((y1 + y2 - y1 * y2 - corr_term) / r)
}

/// The same quantity as [`dor_survival_at`], assembled as a mixture over the
/// three responder categories: dual responders keep `max(T1, T2)`, single-drug
/// responders keep that drug's duration.
pub fn dor_survival_mixture_at(
    r1: Rate,
    r2: Rate,
    phi_prime: f64,
    phi_dprime: f64,
    s1: f64,
    s2: f64,
) -> Result<f64> {
    let mix = responder_mix(r1, r2, phi_prime)?;
    let both = s1 + s2 - joint_one_one(s1, s2, phi_dprime)?;
    Ok(mix.r12 * both + mix.r10 * s1 + mix.r02 * s2)
}

/// Options for [`predict_dor_curve`].
#[derive(Debug, Clone, Default)]
pub struct DorOptions {
    /// Output grid. Defaults to the union of the input grids over their common
    /// support. Must start at 0.
    pub grid: Option<Vec<f64>>,
    /// Per-grid-point duration correlation, overriding `phi_dprime`.
    pub phi_dprime_override: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct DorPrediction {
    pub curve: SurvivalCurve,
    /// Values before the running-minimum projection.
    pub raw: Vec<f64>,
    /// `phi(t)` per grid point; `None` where a margin is degenerate.
    pub phi_t: Vec<Option<f64>>,
    /// Largest downward adjustment applied to enforce monotonicity.
    pub max_monotone_adjustment: f64,
    pub orr: f64,
}

/// Predict the combination's DoR survival curve among responders.
pub fn predict_dor_curve(
    s1: &SurvivalCurve,
    s2: &SurvivalCurve,
    r1: Rate,
    r2: Rate,
    corr: CorrelationSpec,
    opts: &DorOptions,
) -> Result<DorPrediction> {
    let end = s1.support_end().min(s2.support_end());
    let grid = match &opts.grid {
        Some(g) => {
            if g.len() < 2 || g[0] != 0.0 {
                return Err(Error::GridMismatch("output grid must start at 0 and have >= 2 points".into()));
            }
            if g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::GridMismatch("output grid must be strictly increasing".into()));
            }
            if *g.last().unwrap() > end {
                return Err(Error::GridMismatch(format!(
                    "output grid extends to {} beyond the common support {end}",
                    g.last().unwrap()
                )));
            }
            g.clone()
        }
        None => merged_grid(s1, s2),
    };
    if let Some(v) = &opts.phi_dprime_override {
        if v.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "phi_dprime override has {} values for {} grid points",
                v.len(),
                grid.len()
            )));
        }
    }
    let orr = predict_orr(r1, r2, corr.phi_prime)?.value();
    if orr <= 0.0 {
        return Err(Error::NoResponders);
    }

    let mut raw = Vec::with_capacity(grid.len());
    let mut phi_t = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let phi_dprime = opts
            .phi_dprime_override
            .as_ref()
            .map_or(corr.phi_dprime, |v| v[i]);
        let (p1, p2) = (s1.at(t), s2.at(t));
        raw.push(dor_survival_at(r1, r2, corr.phi_prime, phi_dprime, p1, p2)?);
        phi_t.push(phi_of_t(corr.phi_prime, phi_dprime, r1, r2, p1, p2).ok());
    }

    let mut probs = Vec::with_capacity(raw.len());
    let mut max_adj: f64 = 0.0;
    for (i, &v) in raw.iter().enumerate() {
        let mut p = v.clamp(0.0, 1.0);
        if i == 0 {
            // S(0) = 1 holds exactly; only rounding noise is removed here
            p = 1.0;
        } else {
            p = p.min(probs[i - 1]);
            max_adj = max_adj.max(v - p);
        }
        probs.push(p);
    }
    Ok(DorPrediction {
        curve: SurvivalCurve::new(grid, probs)?,
        raw,
        phi_t,
        max_monotone_adjustment: max_adj,
        orr,
    })
}

/// First-order (delta-method) variance of the predicted survival at one time
/// point, holding `r1`, `r2` and the correlations fixed and propagating the
/// standard errors of the two monotherapy survival estimates.
///
/// `phi_prime` only enters through the combination response rate `r`.
#[allow(clippy::too_many_arguments)]
pub fn dor_variance(
    s1: f64,
    s2: f64,
    r1: Rate,
    r2: Rate,
    phi_prime: f64,
    phi: f64,
    sigma_s1: f64,
    sigma_s2: f64,
) -> Result<f64> {
    if sigma_s1 < 0.0 || sigma_s2 < 0.0 {
        return Err(Error::InvalidInput("standard errors must be >= 0".into()));
    }
    let (a, b) = (r1.value(), r2.value());
    let r = predict_orr(r1, r2, phi_prime)?.value();
    if r <= 0.0 {
        return Err(Error::NoResponders);
    }
    let (y1, y2) = (a * s1, b * s2);
    let big_b = a * b * s1 * s2 * (1.0 - y1) * (1.0 - y2);
    let (g1, g2) = if phi == 0.0 {
        (1.0 - y2, 1.0 - y1)
    } else {
        if big_b <= 0.0 {
            return Err(Error::DegenerateMargin(format!(
                "r1*S1 = {y1}, r2*S2 = {y2} leave the correlation term undefined"
            )));
        }
        // d/dS1 of B is r1 * A1, d/dS2 of B is r2 * A2
        let a1 = y2 * (1.0 - y2) * (1.0 - 2.0 * y1);
        let a2 = y1 * (1.0 - y1) * (1.0 - 2.0 * y2);
        let root = big_b.sqrt();
        (
            (1.0 - y2) - phi * a1 / (2.0 * root),
            (1.0 - y1) - phi * a2 / (2.0 * root),
        )
    };
    Ok((a * a * g1 * g1 * sigma_s1 * sigma_s1 + b * b * g2 * g2 * sigma_s2 * sigma_s2) / (r * r))
}

/// Pointwise standard errors of the monotherapy survival estimates, aligned
/// with the prediction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DorVarianceInputs {
    pub sigma_s1: Vec<f64>,
    pub sigma_s2: Vec<f64>,
}

impl DorVarianceInputs {
    pub fn new(sigma_s1: Vec<f64>, sigma_s2: Vec<f64>) -> Result<Self> {
        if sigma_s1.len() != sigma_s2.len() {
            return Err(Error::GridMismatch("sigma vectors differ in length".into()));
        }
        if sigma_s1.iter().chain(&sigma_s2).any(|s| s.is_nan() || *s < 0.0) {
            return Err(Error::InvalidInput("standard errors must be >= 0".into()));
        }
        Ok(Self { sigma_s1, sigma_s2 })
    }

    /// Binomial approximation `sqrt(S(1-S)/m)` with `m` responders per arm,
    /// ignoring censoring.
    pub fn binomial(s1: &[f64], s2: &[f64], responders1: f64, responders2: f64) -> Result<Self> {
        if responders1 <= 0.0 || responders2 <= 0.0 {
            return Err(Error::InvalidInput("responder counts must be positive".into()));
        }
        let se = |s: &[f64], m: f64| s.iter().map(|p| (p * (1.0 - p) / m).sqrt()).collect();
        Self::new(se(s1, responders1), se(s2, responders2))
    }
}

/// Pointwise variance of a DoR prediction. Grid points whose `phi(t)` is
/// undefined use the independence form.
pub fn predict_dor_variance(
    pred: &DorPrediction,
    s1: &SurvivalCurve,
    s2: &SurvivalCurve,
    r1: Rate,
    r2: Rate,
    phi_prime: f64,
    inputs: &DorVarianceInputs,
) -> Result<Vec<f64>> {
    let grid = pred.curve.times();
    if inputs.sigma_s1.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} standard errors for {} grid points",
            inputs.sigma_s1.len(),
            grid.len()
        )));
    }
    grid.iter()
        .enumerate()
        .map(|(i, &t)| {
            dor_variance(
                s1.at(t),
                s2.at(t),
                r1,
                r2,
                phi_prime,
                pred.phi_t[i].unwrap_or(0.0),
                inputs.sigma_s1[i],
                inputs.sigma_s2[i],
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    ComboShorter,
    ComboEqual,
    ComboLonger,
}

impl Ordering {
    pub fn as_str(self) -> &'static str {
        match self {
            Ordering::ComboShorter => "combo_shorter",
            Ordering::ComboEqual => "combo_equal",
            Ordering::ComboLonger => "combo_longer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianOrdering {
    pub verdict: Ordering,
    pub s1_at_u2: f64,
    pub threshold: f64,
    /// `u2` lay beyond the tabulated support of `S1`; its last value was used.
    pub extrapolated: bool,
}

/// Under independence, compare the combination median against `u2`, the
/// longer of the two monotherapy medians, via `S1(u2)` versus
/// `(1 - r2) / (2 - r2)`.
pub fn classify_median_ordering(s1: &SurvivalCurve, r2: Rate, u2: f64) -> Result<MedianOrdering> {
    if !u2.is_finite() || u2 < 0.0 {
        return Err(Error::OutOfRange(format!("u2 = {u2} must be a finite time >= 0")));
    }
    let s1_at_u2 = s1.at(u2);
    let threshold = threshold_for(r2.value());
    Ok(MedianOrdering {
        verdict: compare_to_threshold(s1_at_u2, threshold),
        s1_at_u2,
        threshold,
        extrapolated: u2 > s1.support_end(),
    })
}

pub(crate) fn threshold_for(r2: f64) -> f64 {
    (1.0 - r2) / (2.0 - r2)
}

fn compare_to_threshold(s: f64, threshold: f64) -> Ordering {
    const EQ_TOL: f64 = 1e-12;
    if (s - threshold).abs() <= EQ_TOL {
        Ordering::ComboEqual
    } else if s < threshold {
        Ordering::ComboShorter
    } else {
        Ordering::ComboLonger
    }
}

/// Combination ORR with a normal-approximation confidence interval from the
/// monotherapy arm sizes (delta method).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrrInterval {
    pub r: f64,
    pub std_err: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn orr_interval(r1: Rate, r2: Rate, phi_prime: f64, level: f64) -> Result<OrrInterval> {
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidInput(format!("confidence level {level} outside (0, 1)")));
    }
    let (se1, se2) = match (r1.std_err(), r2.std_err()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("arm sizes are required for an interval".into())),
    };
    let r = predict_orr(r1, r2, phi_prime)?.value();
    let (a, b) = (r1.value(), r2.value());
    let va = a * (1.0 - a);
    let vb = b * (1.0 - b);
    let (d1, d2) = if va > 0.0 && vb > 0.0 {
        let root = (va * vb).sqrt();
        (
            1.0 - b - phi_prime * (1.0 - 2.0 * a) * vb / (2.0 * root),
            1.0 - a - phi_prime * (1.0 - 2.0 * b) * va / (2.0 * root),
        )
    } else {
        (1.0 - b, 1.0 - a)
    };
    let std_err = (d1 * d1 * se1 * se1 + d2 * d2 * se2 * se2).sqrt();
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    Ok(OrrInterval {
        r,
        std_err,
        lower: (r - z * std_err).max(0.0),
        upper: (r + z * std_err).min(1.0),
    })
}
