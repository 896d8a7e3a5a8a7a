//! Decision support: recovering an unobserved monotherapy response rate and
//! sizing two-arm proof-of-concept studies on a binary endpoint.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rate::{joint_one_one, Rate};

const ROOT_TOL: f64 = 1e-13;
const SCAN_INTERVALS: usize = 4096;

/// Monotherapy response rate `r2` that, combined with `r1` at correlation
/// `phi_prime`, reproduces the combination rate `r`.
///
/// For `phi_prime = 0` this is `(r - r1) / (1 - r1)`. Otherwise `[0, 1]` is
/// scanned for sign changes and each bracket is bisected; only roots at which
/// `phi_prime` is feasible are kept. Two or more feasible roots yield
/// [`Error::NonUnique`] carrying all of them.
pub fn reverse_engineer_r2(r: Rate, r1: Rate, phi_prime: f64) -> Result<Rate> {
    let (r, a) = (r.value(), r1.value());
    if phi_prime == 0.0 {
        if a == 1.0 {
            return Err(Error::NoFeasibleSolution("r1 = 1 leaves r2 unidentified".into()));
        }
        let r2 = (r - a) / (1.0 - a);
        if !(-ROOT_TOL..=1.0 + ROOT_TOL).contains(&r2) {
            return Err(Error::NoFeasibleSolution(format!(
                "combination rate {r} is below r1 = {a}"
            )));
        }
        return Rate::new(r2.clamp(0.0, 1.0));
    }

    let scale_a = (a * (1.0 - a)).sqrt();
    let g = |b: f64| a + b * (1.0 - a) - phi_prime * scale_a * (b * (1.0 - b)).max(0.0).sqrt() - r;

    let mut roots = Vec::new();
    let step = 1.0 / SCAN_INTERVALS as f64;
    let mut lo = 0.0;
    let mut g_lo = g(lo);
    for i in 1..=SCAN_INTERVALS {
        let hi = if i == SCAN_INTERVALS { 1.0 } else { i as f64 * step };
        let g_hi = g(hi);
        if g_lo == 0.0 {
            roots.push(lo);
        } else if g_lo * g_hi < 0.0 {
            roots.push(bisect(g, lo, hi));
        }
        if i == SCAN_INTERVALS && g_hi == 0.0 {
            roots.push(hi);
        }
        lo = hi;
        g_lo = g_hi;
    }

    let feasible: Vec<f64> = roots
        .into_iter()
        .filter(|&b| joint_one_one(a, b, phi_prime).is_ok())
        .collect();
    match feasible.as_slice() {
        [] => Err(Error::NoFeasibleSolution(format!(
            "no r2 in [0, 1] reproduces r = {r} with r1 = {a}, phi' = {phi_prime}"
        ))),
        [b] => Rate::new(*b),
        many => Err(Error::NonUnique(many.to_vec())),
    }
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = g(lo);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-arm comparison of response proportions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec {
    pub p_control: f64,
    pub p_experimental: f64,
    pub alpha_one_sided: f64,
    pub power: f64,
    /// Experimental-arm size over control-arm size.
    pub allocation_ratio: f64,
    pub continuity_correction: bool,
}

impl DesignSpec {
    pub fn new(p_control: f64, p_experimental: f64) -> Result<Self> {
        let spec = Self {
            p_control,
            p_experimental,
            alpha_one_sided: 0.05,
            power: 0.80,
            allocation_ratio: 1.0,
            continuity_correction: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        for p in [self.p_control, self.p_experimental] {
            if !(p > 0.0 && p < 1.0) {
                return bad(format!("proportion {p} outside (0, 1)"));
            }
        }
        if self.p_control == self.p_experimental {
            return bad("proportions must differ".into());
        }
        if !(self.alpha_one_sided > 0.0 && self.alpha_one_sided < 0.5) {
            return bad(format!("alpha {} outside (0, 0.5)", self.alpha_one_sided));
        }
        if !(self.power > 0.5 && self.power < 1.0) {
            return bad(format!("power {} outside (0.5, 1)", self.power));
        }
        if !(self.allocation_ratio > 0.0 && self.allocation_ratio.is_finite()) {
            return bad("allocation ratio must be positive".into());
        }
        Ok(())
    }

    fn parts(&self) -> (f64, f64, f64) {
        let (p1, p2, k) = (self.p_control, self.p_experimental, self.allocation_ratio);
        let pbar = (p1 + k * p2) / (1.0 + k);
        let null_sd = (pbar * (1.0 - pbar) * (1.0 + 1.0 / k)).sqrt();
        let alt_sd = (p1 * (1.0 - p1) + p2 * (1.0 - p2) / k).sqrt();
        (null_sd, alt_sd, (p2 - p1).abs())
    }

    /// Continuity-correction constant `(k + 1) / (k |delta|)`.
    fn cc_constant(&self) -> f64 {
        let k = self.allocation_ratio;
        let (_, _, delta) = self.parts();
        (k + 1.0) / (k * delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSize {
    /// Control-arm size.
    pub n_control: u64,
    pub n_experimental: u64,
    pub n_total: u64,
}

impl SampleSize {
    /// Size of each arm under 1:1 allocation.
    pub fn n_per_arm(&self) -> u64 {
        self.n_control
    }
}

/// Normal-approximation sample size for a one-sided test of two proportions,
/// pooled variance under the null and unpooled under the alternative, rounded
/// up per arm. The optional continuity correction is Fleiss's.
pub fn sample_size_two_proportions(spec: &DesignSpec) -> Result<SampleSize> {
    spec.validate()?;
    let nd = Normal::standard();
    let z_a = nd.inverse_cdf(1.0 - spec.alpha_one_sided);
    let z_b = nd.inverse_cdf(spec.power);
    let (null_sd, alt_sd, delta) = spec.parts();
    let mut n = ((z_a * null_sd + z_b * alt_sd) / delta).powi(2);
    if spec.continuity_correction {
        n = n / 4.0 * (1.0 + (1.0 + 2.0 * spec.cc_constant() / n).sqrt()).powi(2);
    }
    // guard against 230.99999999 style rounding noise
    let n_control = (n - 1e-9).ceil() as u64;
    let n_experimental = (n_control as f64 * spec.allocation_ratio - 1e-9).ceil() as u64;
    Ok(SampleSize {
        n_control,
        n_experimental,
        n_total: n_control + n_experimental,
    })
}

/// Power achieved with `n_control` patients in the control arm (and
/// `n_control * allocation_ratio` in the experimental arm), under the same
/// approximation as [`sample_size_two_proportions`].
pub fn power_two_proportions(spec: &DesignSpec, n_control: u64) -> Result<f64> {
    spec.validate()?;
    if n_control < 2 {
        return Err(Error::InvalidInput("n per arm must be >= 2".into()));
    }
    let nd = Normal::standard();
    let z_a = nd.inverse_cdf(1.0 - spec.alpha_one_sided);
    let (null_sd, alt_sd, delta) = spec.parts();
    let mut n = n_control as f64;
    if spec.continuity_correction {
        let half = spec.cc_constant() / 2.0;
        n = if n > half { (n - half).powi(2) / n } else { 0.0 };
    }
    Ok(nd.cdf((delta * n.sqrt() - z_a * null_sd) / alt_sd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ida::predict_orr;
    use approx::assert_abs_diff_eq;

    fn rate(v: f64) -> Rate {
        Rate::new(v).unwrap()
    }

    #[test]
    fn reverse_examples() {
        let r2 = reverse_engineer_r2(rate(0.4649), rate(0.372), 0.0).unwrap();
        assert_abs_diff_eq!(r2.value(), 0.148, epsilon = 2e-4);
        assert_eq!(reverse_engineer_r2(rate(0.3), rate(0.3), 0.0).unwrap().value(), 0.0);
        let r = predict_orr(rate(0.3), rate(0.5), 0.2).unwrap();
        assert_abs_diff_eq!(r.value(), 0.60417, epsilon = 1e-5);
        let r2 = reverse_engineer_r2(r, rate(0.3), 0.2).unwrap();
        assert_abs_diff_eq!(r2.value(), 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(predict_orr(rate(0.3), r2, 0.2).unwrap().value(), 0.60417, epsilon = 1e-5);
    }

    #[test]
    fn reverse_without_solution() {
        assert!(matches!(
            reverse_engineer_r2(rate(0.2), rate(0.3), 0.0),
            Err(Error::NoFeasibleSolution(_))
        ));
        assert!(matches!(
            reverse_engineer_r2(rate(0.1), rate(0.3), 0.2),
            Err(Error::NoFeasibleSolution(_))
        ));
    }

    #[test]
    fn sample_size_examples() {
        let s = sample_size_two_proportions(&DesignSpec::new(0.70, 0.80).unwrap()).unwrap();
        assert_eq!((s.n_per_arm(), s.n_total), (231, 462));
        let spec = DesignSpec::new(0.40, 0.60).unwrap();
        let s = sample_size_two_proportions(&spec).unwrap();
        assert_eq!((s.n_per_arm(), s.n_total), (77, 154));
        let cc = DesignSpec { continuity_correction: true, ..spec };
        let s = sample_size_two_proportions(&cc).unwrap();
        assert_eq!((s.n_per_arm(), s.n_total), (86, 172));
    }

    #[test]
    fn doubling_effect_quarters_n() {
        let small = sample_size_two_proportions(&DesignSpec::new(0.45, 0.55).unwrap()).unwrap();
        let big = sample_size_two_proportions(&DesignSpec::new(0.40, 0.60).unwrap()).unwrap();
        let ratio = small.n_total as f64 / big.n_total as f64;
        assert!((3.5..4.3).contains(&ratio), "{ratio}");
    }

    #[test]
    fn power_round_trips() {
        for (p1, p2) in [(0.7, 0.8), (0.4, 0.6), (0.1, 0.25)] {
            for cc in [false, true] {
                let spec = DesignSpec { continuity_correction: cc, ..DesignSpec::new(p1, p2).unwrap() };
                let n = sample_size_two_proportions(&spec).unwrap().n_per_arm();
                assert!(power_two_proportions(&spec, n).unwrap() >= spec.power);
                assert!(power_two_proportions(&spec, n - 1).unwrap() < spec.power);
            }
        }
        let spec = DesignSpec::new(0.7, 0.8).unwrap();
        assert_abs_diff_eq!(power_two_proportions(&spec, 231).unwrap(), 0.80, epsilon = 2e-3);
        assert!(power_two_proportions(&spec, 1_000_000).unwrap() > 0.999_999);
    }

    #[test]
    fn unequal_allocation() {
        let spec = DesignSpec { allocation_ratio: 2.0, ..DesignSpec::new(0.4, 0.6).unwrap() };
        let s = sample_size_two_proportions(&spec).unwrap();
        assert_eq!(s.n_experimental, (s.n_control as f64 * 2.0).ceil() as u64);
        assert!(power_two_proportions(&spec, s.n_control).unwrap() >= 0.8);
    }

    #[test]
    fn spec_validation() {
        assert!(DesignSpec::new(0.5, 0.5).is_err());
        assert!(DesignSpec::new(0.0, 0.5).is_err());
        assert!(DesignSpec { power: 0.4, ..DesignSpec::new(0.3, 0.5).unwrap() }.validate().is_err());
    }
}
