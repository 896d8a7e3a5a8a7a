//! Independent reference computations used by the integration and acceptance
//! tests. Nothing here calls into the prediction code it checks.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cell probabilities `(p11, p10, p01, p00)` of two Bernoulli variables with
/// success rates `a`, `b` and correlation `phi`.
pub fn bernoulli_table(a: f64, b: f64, phi: f64) -> Option<[f64; 4]> {
    let p11 = a * b + phi * (a * (1.0 - a) * b * (1.0 - b)).sqrt();
    let cells = [p11, a - p11, b - p11, 1.0 - a - b + p11];
    cells.iter().all(|&c| c >= -1e-12).then_some(cells)
}

/// One draw of a correlated Bernoulli pair from its cell table.
pub fn draw_pair(rng: &mut impl Rng, cells: &[f64; 4]) -> (bool, bool) {
    let u: f64 = rng.random();
    if u < cells[0] {
        (true, true)
    } else if u < cells[0] + cells[1] {
        (true, false)
    } else if u < cells[0] + cells[1] + cells[2] {
        (false, true)
    } else {
        (false, false)
    }
}

/// Empirical correlation of `X1*I1` and `X2*I2` where `(X1, X2)` and
/// `(I1, I2)` are independent correlated Bernoulli pairs.
pub fn simulate_indicator_correlation(
    rng: &mut impl Rng,
    n: usize,
    rates: (f64, f64, f64),
    surv: (f64, f64, f64),
) -> f64 {
    let x = bernoulli_table(rates.0, rates.1, rates.2).expect("feasible response table");
    let i = bernoulli_table(surv.0, surv.1, surv.2).expect("feasible duration table");
    let (mut s1, mut s2, mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let (x1, x2) = draw_pair(rng, &x);
        let (i1, i2) = draw_pair(rng, &i);
        let a = f64::from(u8::from(x1 && i1));
        let b = f64::from(u8::from(x2 && i2));
        s1 += a;
        s2 += b;
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
    }
    let n = n as f64;
    let cov = s12 / n - (s1 / n) * (s2 / n);
    let v1 = s11 / n - (s1 / n).powi(2);
    let v2 = s22 / n - (s2 / n).powi(2);
    cov / (v1 * v2).sqrt()
}

/// Model parameters for a patient-level duration-of-response simulation with
/// exponential monotherapy durations.
#[derive(Debug, Clone, Copy)]
pub struct DorConfig {
    pub r1: f64,
    pub r2: f64,
    pub phi_prime: f64,
    pub phi_dprime: f64,
    pub mean1: f64,
    pub mean2: f64,
}

impl DorConfig {
    pub fn s1(&self, t: f64) -> f64 {
        (-t / self.mean1).exp()
    }

    pub fn s2(&self, t: f64) -> f64 {
        (-t / self.mean2).exp()
    }
}

/// Estimate and standard error of the responder survival at each grid time.
///
/// With uncorrelated durations every patient gets a full trajectory
/// `Y = max(X1*T1, X2*T2)` with exponential `T_i`. With correlated durations
/// the duration indicators at each time are drawn from their joint table,
/// one independent cohort per grid time.
pub fn simulate_dor(rng: &mut impl Rng, cfg: &DorConfig, grid: &[f64], n: usize) -> Vec<(f64, f64)> {
    let x = bernoulli_table(cfg.r1, cfg.r2, cfg.phi_prime).expect("feasible response table");
    let est = |alive: usize, responders: usize| {
        let s = alive as f64 / responders as f64;
        (s, (s * (1.0 - s) / responders as f64).sqrt())
    };
    if cfg.phi_dprime == 0.0 {
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let (x1, x2) = draw_pair(rng, &x);
            let t1 = -cfg.mean1 * (1.0 - rng.random::<f64>()).ln();
            let t2 = -cfg.mean2 * (1.0 - rng.random::<f64>()).ln();
            if x1 || x2 {
                ys.push(f64::max(if x1 { t1 } else { 0.0 }, if x2 { t2 } else { 0.0 }));
            }
        }
        return grid
            .iter()
            .map(|&t| est(ys.iter().filter(|&&y| y > t).count(), ys.len()))
            .collect();
    }
    grid.iter()
        .map(|&t| {
            let i = bernoulli_table(cfg.s1(t), cfg.s2(t), cfg.phi_dprime).expect("feasible duration table");
            let (mut responders, mut alive) = (0, 0);
            for _ in 0..n {
                let (x1, x2) = draw_pair(rng, &x);
                let (i1, i2) = draw_pair(rng, &i);
                if x1 || x2 {
                    responders += 1;
                    if (x1 && i1) || (x2 && i2) {
                        alive += 1;
                    }
                }
            }
            est(alive, responders)
        })
        .collect()
}

/// Responder survival written from the cell probabilities of the response
/// and duration tables, holding the survival-indicator correlation `phi`
/// fixed. Used to propagate perturbed monotherapy survival values.
pub fn responder_survival_fixed_phi(r1: f64, r2: f64, phi_prime: f64, phi: f64, s1: f64, s2: f64) -> f64 {
    let x = bernoulli_table(r1, r2, phi_prime).expect("feasible response table");
    let r = x[0] + x[1] + x[2];
    let (y1, y2) = (r1 * s1, r2 * s2);
    let both_alive = y1 * y2 + phi * (y1 * (1.0 - y1) * y2 * (1.0 - y2)).sqrt();
    (y1 + y2 - both_alive) / r
}

/// Monte Carlo variance of the responder survival when the two monotherapy
/// survival values carry independent Gaussian errors.
#[allow(clippy::too_many_arguments)]
pub fn simulate_survival_variance(
    rng: &mut impl Rng,
    reps: usize,
    r1: f64,
    r2: f64,
    phi_prime: f64,
    phi: f64,
    s: (f64, f64),
    sigma: (f64, f64),
) -> f64 {
    let vals: Vec<f64> = (0..reps)
        .map(|_| {
            let e1: f64 = rng.sample(StandardNormal);
            let e2: f64 = rng.sample(StandardNormal);
            responder_survival_fixed_phi(r1, r2, phi_prime, phi, s.0 + sigma.0 * e1, s.1 + sigma.1 * e2)
        })
        .collect();
    let m = vals.iter().sum::<f64>() / reps as f64;
    vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (reps - 1) as f64
}

/// Exact distribution of the combined % change for independent discrete
/// marginals, keyed by the value rounded to 1e-6.
pub fn enumerate_combination(
    atoms1: &[(f64, f64)],
    atoms2: &[(f64, f64)],
    cutoff: f64,
) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    for &(v1, p1) in atoms1 {
        for &(v2, p2) in atoms2 {
            let v = if v1 < cutoff && v2 < cutoff {
                let (a, b) = (-v1 / 100.0, -v2 / 100.0);
                -100.0 * (a + b - a * b)
            } else {
                v1.min(v2)
            };
            *out.entry(atom_key(v)).or_insert(0.0) += p1 * p2;
        }
    }
    out
}

pub fn atom_key(v: f64) -> i64 {
    (v * 1e6).round() as i64
}

/// Atoms and weights of a sample treated as a discrete distribution.
pub fn atoms_of(sample: &[f64]) -> Vec<(f64, f64)> {
    let mut counts: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for &v in sample {
        counts.entry(atom_key(v)).or_insert((v, 0)).1 += 1;
    }
    let n = sample.len() as f64;
    counts.values().map(|&(v, c)| (v, c as f64 / n)).collect()
}

/// Largest deviation of sampled atom frequencies from an exact distribution,
/// in binomial standard errors. Infinite if a sampled value is not an atom.
pub fn worst_atom_deviation(sampled: &[f64], exact: &BTreeMap<i64, f64>) -> f64 {
    let n = sampled.len() as f64;
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &v in sampled {
        *counts.entry(atom_key(v)).or_insert(0) += 1;
    }
    if counts.keys().any(|k| !exact.contains_key(k)) {
        return f64::INFINITY;
    }
    exact
        .iter()
        .map(|(k, &p)| {
            let phat = *counts.get(k).unwrap_or(&0) as f64 / n;
            let se = (p * (1.0 - p) / n).sqrt();
            match (se == 0.0, phat == p) {
                (true, true) => 0.0,
                (true, false) => f64::INFINITY,
                _ => (phat - p).abs() / se,
            }
        })
        .fold(0.0, f64::max)
}
