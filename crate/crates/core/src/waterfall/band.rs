use rand::Rng;
use rayon::prelude::*;

use super::copula::draw_pairs;
use super::{combine_pair, CopulaConfig, WaterfallSample};
use crate::error::{Error, Result};
use crate::rate::Rate;
use crate::rng::{stream_rng, StreamRng};
use crate::stats::quantile_sorted;

const LOWER_PROB: f64 = 0.05;
const UPPER_PROB: f64 = 0.95;

/// A predicted waterfall: values sorted in decreasing order, each tagged with
/// its patient-fraction index in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedBand {
    pub index: Vec<f64>,
    pub predicted: Vec<f64>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    /// Mean over bootstrap replicates, when a band was computed.
    pub mean: Option<Vec<f64>>,
    /// Number of indices where the percentile band was widened to contain the
    /// point estimate.
    pub widened: usize,
}

impl PredictedBand {
    fn point(predicted: Vec<f64>) -> Self {
        Self {
            index: fraction_index(predicted.len()),
            predicted,
            lower: None,
            upper: None,
            mean: None,
            widened: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.predicted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicted.is_empty()
    }
}

/// `n` equally spaced points from 0 to 1 inclusive.
pub(crate) fn fraction_index(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn simulate(s1: &WaterfallSample, s2: &WaterfallSample, cfg: &CopulaConfig, rng: &mut StreamRng) -> Vec<f64> {
    let mut out: Vec<f64> = draw_pairs(s1, s2, cfg, rng)
        .into_iter()
        .map(|(a, b)| combine_pair(a, b, cfg.cutoff, cfg.rho, cfg.mode))
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Point prediction of the combination waterfall.
pub fn predict_waterfall(s1: &WaterfallSample, s2: &WaterfallSample, cfg: &CopulaConfig) -> Result<PredictedBand> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, 0);
    Ok(PredictedBand::point(simulate(s1, s2, cfg, &mut rng)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub nboot: usize,
    /// Size of each resampled arm; defaults to the arm's own size.
    pub resample_size: Option<usize>,
    pub parallel: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            nboot: 2000,
            resample_size: None,
            parallel: true,
        }
    }
}

fn resample(s: &WaterfallSample, size: usize, rng: &mut StreamRng) -> WaterfallSample {
    let v = s.values();
    let values = (0..size).map(|_| v[rng.random_range(0..v.len())]).collect();
    WaterfallSample::new(values).expect("resampling preserves validity")
}

/// Point prediction plus a per-index 90% percentile band from resampling both
/// monotherapy arms with replacement and re-running the prediction.
///
/// Replicate `k` draws from stream `k + 1` of `cfg.seed`, so serial and
/// parallel execution give identical bands.
pub fn bootstrap_band(
    s1: &WaterfallSample,
    s2: &WaterfallSample,
    cfg: &CopulaConfig,
    boot: BootstrapConfig,
) -> Result<PredictedBand> {
    if boot.nboot < 100 {
        return Err(Error::InvalidInput(format!("nboot = {} < 100", boot.nboot)));
    }
    if boot.resample_size == Some(0) {
        return Err(Error::InvalidInput("resample size must be positive".into()));
    }
    let mut band = predict_waterfall(s1, s2, cfg)?;

    let replicate = |k: usize| {
        let mut rng = stream_rng(cfg.seed, k as u64 + 1);
        let a = resample(s1, boot.resample_size.unwrap_or(s1.len()), &mut rng);
        let b = resample(s2, boot.resample_size.unwrap_or(s2.len()), &mut rng);
        simulate(&a, &b, cfg, &mut rng)
    };
    let reps: Vec<Vec<f64>> = if boot.parallel {
        (0..boot.nboot).into_par_iter().map(replicate).collect()
    } else {
        (0..boot.nboot).map(replicate).collect()
    };

    let summarize = |i: usize| {
        let mut col: Vec<f64> = reps.iter().map(|r| r[i]).collect();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        col.sort_by(f64::total_cmp);
        (quantile_sorted(&col, LOWER_PROB), quantile_sorted(&col, UPPER_PROB), mean)
    };
    let n = band.len();
    let stats: Vec<(f64, f64, f64)> = if boot.parallel {
        (0..n).into_par_iter().map(summarize).collect()
    } else {
        (0..n).map(summarize).collect()
    };

    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut mean = Vec::with_capacity(n);
    let mut widened = 0;
    for (&p, (lo, hi, m)) in band.predicted.iter().zip(stats) {
        if p < lo || p > hi {
            widened += 1;
        }
        lower.push(lo.min(p));
        upper.push(hi.max(p));
        mean.push(m);
    }
    band.lower = Some(lower);
    band.upper = Some(upper);
    band.mean = Some(mean);
    band.widened = widened;
    Ok(band)
}

/// Fraction of values at or below `-threshold_reduction` % change.
pub fn deep_response_rate(values: &[f64], threshold_reduction: f64) -> Result<Rate> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(threshold_reduction > 0.0 && threshold_reduction <= 100.0) {
        return Err(Error::InvalidInput(format!(
            "threshold {threshold_reduction} outside (0, 100]"
        )));
    }
    let hits = values.iter().filter(|&&v| v <= -threshold_reduction).count();
    Rate::new(hits as f64 / values.len() as f64)
}
