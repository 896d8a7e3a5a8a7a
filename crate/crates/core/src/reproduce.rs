//! Worked examples re-run against the bundled fixtures, each with a pinned
//! target.

use crate::design::{sample_size_two_proportions, DesignSpec};
use crate::error::Result;
use crate::fixtures::{self, CHECKMATE067_ORR, KEYNOTE062_ORR};
use crate::ida::{classify_median_ordering, predict_dor_curve, predict_orr, DorOptions, Ordering};
use crate::rate::{CorrelationSpec, Rate};
use crate::stats::ks_distance;
use crate::survival::SurvivalCurve;
use crate::waterfall::{
    bootstrap_band, deep_response_rate, predict_waterfall, BootstrapConfig, CopulaConfig, Mode, PredictedBand,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: String,
    pub target: String,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, value: impl Into<String>, target: impl Into<String>, pass: bool) -> Self {
        Self {
            name,
            value: value.into(),
            target: target.into(),
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReproduceOptions {
    pub seed: u64,
    pub nboot: usize,
    pub parallel: bool,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            seed: 20201,
            nboot: 2000,
            parallel: true,
        }
    }
}

/// Fraction of band indices at which the observed waterfall, read at the
/// same patient fraction, lies inside `[lower, upper]`.
pub fn band_coverage(band: &PredictedBand, observed: &[f64]) -> f64 {
    let (Some(lo), Some(hi)) = (&band.lower, &band.upper) else {
        return 0.0;
    };
    let mut obs = observed.to_vec();
    obs.sort_by(|a, b| b.total_cmp(a));
    let m = obs.len();
    let at = |x: f64| {
        if m == 1 {
            return obs[0];
        }
        let pos = x * (m - 1) as f64;
        let i = (pos.floor() as usize).min(m - 2);
        obs[i] + (pos - i as f64) * (obs[i + 1] - obs[i])
    };
    let inside = band
        .index
        .iter()
        .enumerate()
        .filter(|&(i, &x)| {
            let v = at(x);
            lo[i] <= v && v <= hi[i]
        })
        .count();
    inside as f64 / band.len() as f64
}

/// Index-by-index comparison of two same-seed predictions that differ only in
/// mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeComparison {
    /// Proposed equals palmer at every index where palmer is at or above the cutoff.
    pub identical_above_cutoff: bool,
    /// Proposed is at or below palmer at every index below the cutoff.
    pub never_shallower_below: bool,
    /// Indices below the cutoff where proposed is strictly deeper.
    pub strictly_deeper: usize,
    pub tail_len: usize,
    /// Mean of (proposed - palmer) over the tail.
    pub tail_mean_shift: f64,
}

pub fn compare_modes(proposed: &PredictedBand, palmer: &PredictedBand, cutoff: f64) -> ModeComparison {
    let mut identical = true;
    let mut never_shallower = true;
    let (mut deeper, mut tail, mut shift) = (0, 0, 0.0);
    for (&a, &b) in proposed.predicted.iter().zip(&palmer.predicted) {
        if b >= cutoff {
            identical &= a == b;
        } else {
            tail += 1;
            never_shallower &= a <= b;
            if a < b {
                deeper += 1;
            }
            shift += a - b;
        }
    }
    ModeComparison {
        identical_above_cutoff: identical,
        never_shallower_below: never_shallower,
        strictly_deeper: deeper,
        tail_len: tail,
        tail_mean_shift: if tail > 0 { shift / tail as f64 } else { 0.0 },
    }
}

fn rate(v: f64) -> Rate {
    Rate::new(v).expect("constant rate")
}

pub fn keynote062_dor_prediction() -> Result<(SurvivalCurve, f64)> {
    let chemo = fixtures::curve(fixtures::KEYNOTE062_CHEMO_DOR);
    let pembro = fixtures::curve(fixtures::KEYNOTE062_PEMBRO_DOR);
    let grid: Vec<f64> = (0..=60).map(|i| i as f64 * 0.5).collect();
    let pred = predict_dor_curve(
        &chemo,
        &pembro,
        rate(KEYNOTE062_ORR.0),
        rate(KEYNOTE062_ORR.1),
        CorrelationSpec::independent(),
        &DorOptions {
            grid: Some(grid),
            ..Default::default()
        },
    )?;
    let median = pred.curve.median().value().unwrap_or(f64::INFINITY);
    Ok((pred.curve, median))
}

pub fn run_all(opts: ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let r = predict_orr(rate(KEYNOTE062_ORR.0), rate(KEYNOTE062_ORR.1), 0.0)?.value();
    out.push(Check::new("orr_keynote062", format!("{r:.4}"), "0.4649 ± 0.0005", (r - 0.4649).abs() <= 5e-4));
    let r = predict_orr(rate(CHECKMATE067_ORR.0), rate(CHECKMATE067_ORR.1), 0.0)?.value();
    out.push(Check::new("orr_checkmate067", format!("{r:.4}"), "0.5440 ± 0.0005", (r - 0.5440).abs() <= 5e-4));

    let chemo = fixtures::curve(fixtures::KEYNOTE062_CHEMO_DOR);
    let pembro = fixtures::curve(fixtures::KEYNOTE062_PEMBRO_DOR);
    let u2 = pembro.median().value().unwrap_or(f64::NAN);
    out.push(Check::new("pembro_median_dor", format!("{u2:.2}"), "13.7 ± 0.1", (u2 - 13.7).abs() <= 0.1));
    let ord = classify_median_ordering(&chemo, rate(KEYNOTE062_ORR.1), 13.7)?;
    out.push(Check::new(
        "median_ordering_keynote062",
        format!("S1(u2)={:.2} threshold={:.3} {}", ord.s1_at_u2, ord.threshold, ord.verdict.as_str()),
        "threshold 0.460 ± 0.001, combo_shorter",
        (ord.threshold - 0.460).abs() <= 1e-3 && ord.verdict == Ordering::ComboShorter,
    ));
    let (_, median) = keynote062_dor_prediction()?;
    out.push(Check::new("dor_median_keynote062", format!("{median:.2}"), "[7.0, 9.0] months", (7.0..=9.0).contains(&median)));

    let ipi = fixtures::waterfall(fixtures::CHECKMATE067_IPI_WF);
    let nivo = fixtures::waterfall(fixtures::CHECKMATE067_NIVO_WF);
    let combo = fixtures::waterfall(fixtures::CHECKMATE067_COMBO_WF);
    let cfg = CopulaConfig {
        rho: 0.25,
        seed: opts.seed,
        ..Default::default()
    };
    let band = bootstrap_band(
        &ipi,
        &nivo,
        &cfg,
        BootstrapConfig {
            nboot: opts.nboot,
            resample_size: None,
            parallel: opts.parallel,
        },
    )?;
    let ks = ks_distance(&band.predicted, combo.values());
    out.push(Check::new("waterfall_checkmate067_ks", format!("{ks:.3}"), "<= 0.10", ks <= 0.10));
    let cov = band_coverage(&band, combo.values());
    out.push(Check::new(
        "waterfall_checkmate067_coverage",
        format!("{cov:.3}"),
        format!(">= 0.90 of indices (nboot {})", opts.nboot),
        cov >= 0.90,
    ));

    let h_nivo = fixtures::waterfall(fixtures::HODGKIN_NIVO_WF);
    let h_bv = fixtures::waterfall(fixtures::HODGKIN_BV_WF);
    let hcfg = CopulaConfig {
        rho: 0.0,
        cutoff: -50.0,
        seed: opts.seed,
        ..Default::default()
    };
    let proposed = predict_waterfall(&h_nivo, &h_bv, &hcfg)?;
    let palmer = predict_waterfall(&h_nivo, &h_bv, &CopulaConfig { mode: Mode::Palmer, ..hcfg })?;
    let cmp = compare_modes(&proposed, &palmer, -50.0);
    out.push(Check::new(
        "hodgkin_modes",
        format!(
            "identical>=-50: {}, deeper at {}/{} tail indices, mean shift {:.2}",
            cmp.identical_above_cutoff, cmp.strictly_deeper, cmp.tail_len, cmp.tail_mean_shift
        ),
        "identical >= -50, proposed deeper below",
        cmp.identical_above_cutoff && cmp.never_shallower_below && cmp.strictly_deeper > 0 && cmp.tail_mean_shift < 0.0,
    ));

    let r2 = crate::design::reverse_engineer_r2(rate(0.4649), rate(KEYNOTE062_ORR.0), 0.0)?.value();
    out.push(Check::new("reverse_orr_keynote062", format!("{r2:.4}"), "0.148 ± 0.001", (r2 - 0.148).abs() <= 1e-3));

    let orr_design = sample_size_two_proportions(&DesignSpec::new(0.70, 0.80)?)?;
    out.push(Check::new(
        "sample_size_orr_70_80",
        format!("{} total", orr_design.n_total),
        "462 (more than 400)",
        orr_design.n_total == 462,
    ));
    let deep_design = sample_size_two_proportions(&DesignSpec::new(0.40, 0.60)?)?;
    out.push(Check::new(
        "sample_size_deep_40_60",
        format!("{} total (method-ambiguous vs. 'approximately 200')", deep_design.n_total),
        "[150, 230]",
        (150..=230).contains(&deep_design.n_total),
    ));

    let d1 = fixtures::waterfall(fixtures::HYPOTHETICAL_DRUG1_WF);
    let d2 = fixtures::waterfall(fixtures::HYPOTHETICAL_DRUG2_WF);
    let deep1 = deep_response_rate(d1.values(), 75.0)?.value();
    out.push(Check::new("deep_response_drug1", format!("{deep1:.3}"), "0.40", (deep1 - 0.40).abs() < 1e-12));
    let pred = predict_waterfall(&d1, &d2, &CopulaConfig { rho: 0.0, seed: opts.seed, ..Default::default() })?;
    let deep_combo = deep_response_rate(&pred.predicted, 75.0)?.value();
    let orr_combo = pred.predicted.iter().filter(|&&v| v < -30.0).count() as f64 / pred.len() as f64;
    let planned = sample_size_two_proportions(&DesignSpec::new(deep1, deep_combo.clamp(deep1 + 1e-3, 0.999))?)?;
    out.push(Check::new(
        "deep_response_design_smaller",
        format!(
            "predicted combo ORR {orr_combo:.3}, deep {deep_combo:.3}; deep design {} vs ORR design {}",
            planned.n_total, orr_design.n_total
        ),
        "deep-response design needs fewer patients",
        deep_design.n_total < orr_design.n_total && planned.n_total < orr_design.n_total,
    ));
    Ok(out)
}
