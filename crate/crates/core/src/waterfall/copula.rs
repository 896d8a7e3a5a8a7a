use rand::Rng;
use rand_distr::StandardNormal;

use super::{CopulaConfig, QuantileTable, WaterfallSample};
use crate::error::Result;
use crate::rng::{stream_rng, StreamRng};
use crate::stats::norm_cdf;

/// Draw `cfg.n_draws` correlated (drug 1, drug 2) % change pairs: standard
/// normal pairs with correlation `cfg.rho`, mapped through each sample's
/// inverse ECDF. Uses stream 0 of `cfg.seed`.
pub fn gaussian_copula_pairs(
    s1: &WaterfallSample,
    s2: &WaterfallSample,
    cfg: &CopulaConfig,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, 0);
    Ok(draw_pairs(s1, s2, cfg, &mut rng))
}

pub(super) fn draw_pairs(
    s1: &WaterfallSample,
    s2: &WaterfallSample,
    cfg: &CopulaConfig,
    rng: &mut StreamRng,
) -> Vec<(f64, f64)> {
    let q1 = QuantileTable::new(s1, cfg);
    let q2 = QuantileTable::new(s2, cfg);
    let tail = (1.0 - cfg.rho * cfg.rho).sqrt();
    (0..cfg.n_draws)
        .map(|_| {
            let z1: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            let z2 = cfg.rho * z1 + tail * e;
            (q1.quantile(norm_cdf(z1)), q2.quantile(norm_cdf(z2)))
        })
        .collect()
}
