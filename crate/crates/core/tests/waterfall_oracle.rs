mod oracle;

use std::collections::BTreeMap;

use ida_combo::stats::ks_distance;
use ida_combo::waterfall::{bootstrap_band, predict_waterfall, BootstrapConfig, CopulaConfig, WaterfallSample};

fn sample(v: &[f64]) -> WaterfallSample {
    WaterfallSample::new(v.to_vec()).unwrap()
}

fn worst_z(s1: &[f64], s2: &[f64], cutoff: f64, seed: u64) -> f64 {
    let cfg = CopulaConfig {
        rho: 0.0,
        n_draws: 20_000,
        cutoff,
        seed,
        ..Default::default()
    };
    let pred = predict_waterfall(&sample(s1), &sample(s2), &cfg).unwrap();
    let exact = oracle::enumerate_combination(&oracle::atoms_of(s1), &oracle::atoms_of(s2), cutoff);
    oracle::worst_atom_deviation(&pred.predicted, &exact)
}

#[test]
fn two_point_marginals_match_enumeration() {
    let exact = oracle::enumerate_combination(&[(-80.0, 0.5), (0.0, 0.5)], &[(-80.0, 0.5), (0.0, 0.5)], -30.0);
    let expected: BTreeMap<i64, f64> = [(-96.0, 0.25), (-80.0, 0.5), (0.0, 0.25)]
        .iter()
        .map(|&(v, p)| (oracle::atom_key(v), p))
        .collect();
    assert_eq!(exact, expected);
    let z = worst_z(&[-80.0, 0.0], &[-80.0, 0.0], -30.0, 1);
    assert!(z <= 3.0, "worst deviation {z} standard errors");
}

#[test]
fn small_marginals_match_enumeration() {
    let cases: [(&[f64], &[f64], f64); 4] = [
        (&[-60.0, -20.0, 10.0, 40.0], &[-50.0, -35.0, 5.0], -30.0),
        (&[-100.0, -45.0, -30.0, 20.0], &[-90.0, -31.0, 0.0, 60.0], -30.0),
        (&[-70.0, -70.0, -70.0, 15.0], &[-40.0, -10.0], -30.0),
        (&[-50.0], &[-60.0, 10.0], -50.0),
    ];
    for (k, (a, b, cutoff)) in cases.iter().enumerate() {
        let z = worst_z(a, b, *cutoff, 100 + k as u64);
        assert!(z <= 3.0, "case {k}: worst deviation {z} standard errors");
    }
}

#[test]
fn null_second_drug_gives_best_single_change() {
    let s1: Vec<f64> = (0..50).map(|i| -100.0 + 3.0 * i as f64).collect();
    let cfg = CopulaConfig { rho: 0.0, ..Default::default() };
    let pred = predict_waterfall(&sample(&s1), &sample(&[0.0]), &cfg).unwrap();
    let expected: Vec<f64> = s1.iter().map(|&v| v.min(0.0)).collect();
    let ks = ks_distance(&pred.predicted, &expected);
    // Dvoretzky-Kiefer-Wolfowitz 99.9% bound for 5000 draws is about 0.026
    assert!(ks <= 0.03, "KS {ks}");
    assert!(pred.predicted.iter().all(|&v| v <= 0.0));
}

#[test]
fn band_edges_settle_as_replicates_double() {
    let a: Vec<f64> = (0..120).map(|i| -100.0 + 1.5 * i as f64 + (i % 7) as f64).collect();
    let b: Vec<f64> = (0..90).map(|i| -95.0 + 1.9 * i as f64 - (i % 5) as f64).collect();
    let (a, b) = (sample(&a), sample(&b));
    let cfg = CopulaConfig {
        rho: 0.25,
        seed: 9,
        ..Default::default()
    };
    let run = |nboot| {
        bootstrap_band(&a, &b, &cfg, BootstrapConfig { nboot, ..Default::default() }).unwrap()
    };
    let (small, big) = (run(1000), run(2000));
    for (x, y) in [(&small.lower, &big.lower), (&small.upper, &big.upper)] {
        let d = ks_distance(x.as_ref().unwrap(), y.as_ref().unwrap());
        assert!(d < 0.02, "band edge moved {d} in CDF units");
    }
}

#[test]
fn band_contains_point_estimate() {
    let a = sample(&[-90.0, -60.0, -40.0, -10.0, 5.0, 30.0]);
    let b = sample(&[-70.0, -35.0, 0.0, 20.0]);
    let band = bootstrap_band(&a, &b, &CopulaConfig::default(), BootstrapConfig { nboot: 200, ..Default::default() })
        .unwrap();
    let (lo, hi) = (band.lower.as_ref().unwrap(), band.upper.as_ref().unwrap());
    for i in 0..band.len() {
        assert!(lo[i] <= band.predicted[i] && band.predicted[i] <= hi[i]);
    }
}
