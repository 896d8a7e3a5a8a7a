//! Command-line front end for combination-efficacy predictions.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ida_combo::design::{reverse_engineer_r2, sample_size_two_proportions, DesignSpec};
use ida_combo::ida::{
    classify_median_ordering, feasible_phi_range, orr_interval, predict_dor_curve, predict_dor_variance,
    predict_orr, responder_mix, DorOptions, DorVarianceInputs,
};
use ida_combo::io::{band_csv, curve_csv, load_survival_csv, load_waterfall_csv, write_atomic, StudyInput};
use ida_combo::reproduce::{run_all, ReproduceOptions};
use ida_combo::svg::waterfall_svg;
use ida_combo::waterfall::{
    bootstrap_band, deep_response_rate, predict_waterfall, BootstrapConfig, CopulaConfig, Mode, QuantileMethod,
    WaterfallSample,
};
use ida_combo::{CorrelationSpec, Error, Rate, SurvivalCurve};

const DEFAULT_SEED: u64 = 20201;

#[derive(Parser)]
#[command(name = "ida-combo", version, about = "Predict combination therapy efficacy from monotherapy data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Combination objective response rate.
    PredictOrr(PredictOrrArgs),
    /// Combination duration-of-response curve with pointwise variance.
    PredictDor(PredictDorArgs),
    /// Combination waterfall (best % change) with an optional bootstrap band.
    PredictWaterfall(PredictWaterfallArgs),
    /// Solve for the second monotherapy response rate.
    ReverseOrr(ReverseOrrArgs),
    /// Two-arm sample size for a difference in proportions.
    SampleSize(SampleSizeArgs),
    /// Deep-response rate of a waterfall sample.
    DeepResponse(DeepResponseArgs),
    /// Re-run the bundled worked examples against their targets.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct PredictOrrArgs {
    /// Study file supplying both rates, arm sizes and the correlation.
    #[arg(long)]
    study: Option<PathBuf>,
    #[arg(long, required_unless_present = "study")]
    r1: Option<f64>,
    #[arg(long, required_unless_present = "study")]
    r2: Option<f64>,
    /// Response-indicator correlation.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Arm sizes; both are needed for a confidence interval.
    #[arg(long)]
    n1: Option<u32>,
    #[arg(long)]
    n2: Option<u32>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct PredictDorArgs {
    #[arg(long)]
    study: Option<PathBuf>,
    /// DoR curve CSV for drug 1 (time_months,survival_prob).
    #[arg(long, required_unless_present = "study")]
    s1: Option<PathBuf>,
    #[arg(long, required_unless_present = "study")]
    s2: Option<PathBuf>,
    #[arg(long, required_unless_present = "study")]
    r1: Option<f64>,
    #[arg(long, required_unless_present = "study")]
    r2: Option<f64>,
    /// Arm sizes, used for binomial standard errors of each curve.
    #[arg(long, required_unless_present = "study")]
    n1: Option<u32>,
    #[arg(long, required_unless_present = "study")]
    n2: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    phi_prime: Option<f64>,
    /// Duration correlation among dual responders.
    #[arg(long, allow_hyphen_values = true)]
    phi_dprime: Option<f64>,
    /// Regular output grid step in months; defaults to the union of the input grids.
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictWaterfallArgs {
    #[arg(long)]
    study: Option<PathBuf>,
    /// Waterfall CSV for drug 1 (pchg).
    #[arg(long, required_unless_present = "study")]
    wf1: Option<PathBuf>,
    #[arg(long, required_unless_present = "study")]
    wf2: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
    cutoff: f64,
    #[arg(long, default_value = "proposed")]
    mode: Mode,
    /// Bootstrap replicates; 0 skips the band.
    #[arg(long, default_value_t = 2000)]
    nboot: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 5000)]
    draws: usize,
    #[arg(long, default_value_t = 1.0)]
    grid_step: f64,
    /// Use exact order-statistic quantiles instead of the grid.
    #[arg(long)]
    exact_quantile: bool,
    /// Run bootstrap replicates on one thread (output is identical).
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ReverseOrrArgs {
    /// Observed combination response rate.
    #[arg(long)]
    r: f64,
    #[arg(long)]
    r1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
}

#[derive(Args)]
struct SampleSizeArgs {
    /// Control-arm proportion.
    #[arg(long)]
    p0: f64,
    /// Experimental-arm proportion.
    #[arg(long)]
    p1: f64,
    /// One-sided significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.80)]
    power: f64,
    /// Experimental over control allocation.
    #[arg(long, default_value_t = 1.0)]
    ratio: f64,
    #[arg(long)]
    continuity_correction: bool,
}

#[derive(Args)]
struct DeepResponseArgs {
    #[arg(long)]
    wf: PathBuf,
    /// Reduction (in %) that counts as a deep response.
    #[arg(long, default_value_t = 75.0)]
    threshold: f64,
    /// Response cutoff on the % change scale.
    #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
    cutoff: f64,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, default_value_t = 2000)]
    nboot: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    serial: bool,
}

enum Failure {
    Usage(String),
    Model(Error),
    ChecksFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

type CliResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        "parse" => 3,
        "invariant" => 4,
        _ => 5,
    }
}

/// Key-value rows on stdout.
struct Rows(Vec<(String, String)>);

impl Rows {
    fn new() -> Self {
        Rows(Vec::new())
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn print(&self) {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "key,value");
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k},{v}");
        }
    }
}

fn load_study(path: &Path) -> Result<StudyInput, Failure> {
    Ok(StudyInput::load(path)?)
}

fn study_rates(study: &StudyInput) -> Result<(Rate, Rate), Failure> {
    let mut rates = Vec::new();
    for d in &study.drug {
        match study.rate(d)? {
            Some(r) => rates.push(r),
            None => return Err(Failure::Usage(format!("drug '{}' has no orr in the study file", d.label))),
        }
    }
    Ok((rates[0], rates[1]))
}

fn rate_arg(value: f64, n: Option<u32>) -> Result<Rate, Error> {
    match n {
        Some(n) => Rate::with_n(value, n),
        None => Rate::new(value),
    }
}

fn warn(corr: &CorrelationSpec) {
    for w in corr.warnings() {
        eprintln!("warning: {w}");
    }
}

fn predict_orr_cmd(a: PredictOrrArgs) -> CliResult {
    let (r1, r2, phi) = match &a.study {
        Some(p) => {
            let study = load_study(p)?;
            let (r1, r2) = study_rates(&study)?;
            (r1, r2, a.phi.unwrap_or(study.correlation.phi_prime))
        }
        None => (
            rate_arg(a.r1.unwrap(), a.n1)?,
            rate_arg(a.r2.unwrap(), a.n2)?,
            a.phi.unwrap_or(0.0),
        ),
    };
    let r = predict_orr(r1, r2, phi)?;
    let mut rows = Rows::new();
    rows.push("orr", format!("{:.4}", r.value()));
    if r1.n().is_some() && r2.n().is_some() {
        let ci = orr_interval(r1, r2, phi, a.level)?;
        rows.push("std_err", format!("{:.4}", ci.std_err));
        rows.push("ci_level", a.level);
        rows.push("ci_lower", format!("{:.4}", ci.lower));
        rows.push("ci_upper", format!("{:.4}", ci.upper));
    }
    if r.value() > 0.0 {
        let mix = responder_mix(r1, r2, phi)?;
        rows.push("share_dual_responders", format!("{:.4}", mix.r12));
        rows.push("share_drug1_only", format!("{:.4}", mix.r10));
        rows.push("share_drug2_only", format!("{:.4}", mix.r02));
    }
    if let Ok((lo, hi)) = feasible_phi_range(r1, r2) {
        rows.push("phi_min", format!("{lo:.4}"));
        rows.push("phi_max", format!("{hi:.4}"));
    }
    rows.print();
    Ok(())
}

fn load_curve(path: &Path) -> Result<SurvivalCurve, Failure> {
    let loaded = load_survival_csv(path)?;
    if loaded.inserted_origin {
        eprintln!("note: {} has no t = 0 row; (0, 1) was inserted", path.display());
    }
    Ok(loaded.curve)
}

fn predict_dor_cmd(a: PredictDorArgs) -> CliResult {
    let (s1, s2, r1, r2, mut corr) = match &a.study {
        Some(p) => {
            let study = load_study(p)?;
            let (r1, r2) = study_rates(&study)?;
            let paths: Vec<PathBuf> = study.drug.iter().filter_map(|d| study.dor_path(d)).collect();
            if paths.len() != 2 {
                return Err(Failure::Usage("study file needs dor_csv for both drugs".into()));
            }
            (load_curve(&paths[0])?, load_curve(&paths[1])?, r1, r2, study.correlation())
        }
        None => (
            load_curve(a.s1.as_ref().unwrap())?,
            load_curve(a.s2.as_ref().unwrap())?,
            rate_arg(a.r1.unwrap(), a.n1)?,
            rate_arg(a.r2.unwrap(), a.n2)?,
            CorrelationSpec::independent(),
        ),
    };
    if let Some(v) = a.phi_prime {
        corr.phi_prime = v;
    }
    if let Some(v) = a.phi_dprime {
        corr.phi_dprime = v;
    }
    let corr = CorrelationSpec::new(corr.phi_prime, corr.phi_dprime, corr.phi_tumor)?;
    warn(&corr);
    let (Some(n1), Some(n2)) = (r1.n(), r2.n()) else {
        return Err(Failure::Usage("arm sizes are required for the variance column".into()));
    };

    let grid = match a.grid_step {
        Some(step) if step > 0.0 => {
            let end = s1.support_end().min(s2.support_end());
            let k = (end / step + 1e-9).floor() as usize;
            Some((0..=k).map(|i| i as f64 * step).collect())
        }
        Some(step) => return Err(Failure::Usage(format!("grid step {step} must be positive"))),
        None => None,
    };
    let pred = predict_dor_curve(&s1, &s2, r1, r2, corr, &DorOptions { grid, ..Default::default() })?;
    let times = pred.curve.times();
    let inputs = DorVarianceInputs::binomial(
        &s1.resample(times),
        &s2.resample(times),
        r1.value() * n1 as f64,
        r2.value() * n2 as f64,
    )?;
    let var = predict_dor_variance(&pred, &s1, &s2, r1, r2, corr.phi_prime, &inputs)?;
    write_atomic(&a.out, curve_csv(&pred.curve, Some(&var)).as_bytes())?;

    let mut rows = Rows::new();
    rows.push("orr", format!("{:.4}", pred.orr));
    rows.push("points", times.len());
    rows.push(
        "median_months",
        pred.curve.median().value().map_or("not_reached".into(), |m| format!("{m:.3}")),
    );
    rows.push("max_monotone_adjustment", format!("{:.2e}", pred.max_monotone_adjustment));
    if let Some(u2) = s2.median().value() {
        let ord = classify_median_ordering(&s1, r2, u2)?;
        rows.push("median_ordering", ord.verdict.as_str());
        rows.push("ordering_threshold", format!("{:.4}", ord.threshold));
        rows.push("s1_at_median2", format!("{:.4}", ord.s1_at_u2));
        if ord.extrapolated {
            rows.push("ordering_note", "drug 2 median lies beyond drug 1 support");
        }
    }
    rows.push("output", a.out.display());
    rows.print();
    Ok(())
}

fn predict_waterfall_cmd(a: PredictWaterfallArgs) -> CliResult {
    let (w1, w2, study_rho, study_seed) = match &a.study {
        Some(p) => {
            let study = load_study(p)?;
            let paths: Vec<PathBuf> = study.drug.iter().filter_map(|d| study.waterfall_path(d)).collect();
            if paths.len() != 2 {
                return Err(Failure::Usage("study file needs waterfall_csv for both drugs".into()));
            }
            let corr = study.correlation();
            warn(&corr);
            (
                load_waterfall_csv(&paths[0])?,
                load_waterfall_csv(&paths[1])?,
                Some(corr.phi_tumor),
                study.seed,
            )
        }
        None => (
            load_waterfall_csv(a.wf1.as_ref().unwrap())?,
            load_waterfall_csv(a.wf2.as_ref().unwrap())?,
            None,
            None,
        ),
    };
    let seed = a.seed.or(study_seed).unwrap_or(DEFAULT_SEED);
    let rho = a.rho.or(study_rho).unwrap_or(0.0);
    let cfg = CopulaConfig {
        rho,
        n_draws: a.draws,
        cutoff: a.cutoff,
        grid_step: a.grid_step,
        mode: a.mode,
        seed,
        quantile: if a.exact_quantile { QuantileMethod::Exact } else { QuantileMethod::Grid },
        ..Default::default()
    };
    let band = if a.nboot == 0 {
        predict_waterfall(&w1, &w2, &cfg)?
    } else {
        let boot = BootstrapConfig {
            nboot: a.nboot,
            resample_size: None,
            parallel: !a.serial,
        };
        bootstrap_band(&w1, &w2, &cfg, boot)?
    };
    write_atomic(&a.out, band_csv(&band).as_bytes())?;
    if let Some(svg) = &a.svg {
        let chart = waterfall_svg(&band, &[("drug 1", w1.values()), ("drug 2", w2.values())]);
        write_atomic(svg, chart.as_bytes())?;
    }

    let mut rows = Rows::new();
    rows.push("seed", seed);
    rows.push("rho", rho);
    rows.push("cutoff", a.cutoff);
    rows.push("mode", a.mode);
    rows.push("draws", a.draws);
    rows.push("nboot", a.nboot);
    rows.push("predicted_orr", format!("{:.4}", response_fraction(&band.predicted, a.cutoff)));
    if a.nboot > 0 {
        rows.push("band_widened_indices", band.widened);
    }
    rows.push("output", a.out.display());
    rows.print();
    Ok(())
}

fn response_fraction(values: &[f64], cutoff: f64) -> f64 {
    values.iter().filter(|&&v| v < cutoff).count() as f64 / values.len() as f64
}

fn reverse_orr_cmd(a: ReverseOrrArgs) -> CliResult {
    let r2 = reverse_engineer_r2(Rate::new(a.r)?, Rate::new(a.r1)?, a.phi)?;
    let mut rows = Rows::new();
    rows.push("r2", format!("{:.4}", r2.value()));
    rows.print();
    Ok(())
}

fn sample_size_cmd(a: SampleSizeArgs) -> CliResult {
    let spec = DesignSpec {
        alpha_one_sided: a.alpha,
        power: a.power,
        allocation_ratio: a.ratio,
        continuity_correction: a.continuity_correction,
        ..DesignSpec::new(a.p0, a.p1)?
    };
    let n = sample_size_two_proportions(&spec)?;
    let other = sample_size_two_proportions(&DesignSpec {
        continuity_correction: !a.continuity_correction,
        ..spec
    })?;
    let mut rows = Rows::new();
    rows.push("n_control", n.n_control);
    rows.push("n_experimental", n.n_experimental);
    rows.push("n_total", n.n_total);
    rows.push(
        "method",
        if a.continuity_correction {
            "normal approximation with continuity correction"
        } else {
            "normal approximation"
        },
    );
    rows.push(
        if a.continuity_correction { "n_total_uncorrected" } else { "n_total_corrected" },
        other.n_total,
    );
    rows.push(
        "note",
        "totals depend on the method; exact or corrected methods give larger designs",
    );
    rows.print();
    Ok(())
}

fn deep_response_cmd(a: DeepResponseArgs) -> CliResult {
    let wf: WaterfallSample = load_waterfall_csv(&a.wf)?;
    let deep = deep_response_rate(wf.values(), a.threshold)?;
    let mut rows = Rows::new();
    rows.push("n", wf.len());
    rows.push("threshold", a.threshold);
    rows.push("deep_response_rate", format!("{:.4}", deep.value()));
    rows.push("response_rate", format!("{:.4}", response_fraction(wf.values(), a.cutoff)));
    rows.print();
    Ok(())
}

fn reproduce_cmd(a: ReproduceArgs) -> CliResult {
    let checks = run_all(ReproduceOptions {
        seed: a.seed,
        nboot: a.nboot,
        parallel: !a.serial,
    })?;
    println!("seed {}", a.seed);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{} {:width$}  {}  (target {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.target
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(Failure::ChecksFailed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::PredictOrr(a) => predict_orr_cmd(a),
        Command::PredictDor(a) => predict_dor_cmd(a),
        Command::PredictWaterfall(a) => predict_waterfall_cmd(a),
        Command::ReverseOrr(a) => reverse_orr_cmd(a),
        Command::SampleSize(a) => sample_size_cmd(a),
        Command::DeepResponse(a) => deep_response_cmd(a),
        Command::Reproduce(a) => reproduce_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error[usage]: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Model(e)) => {
            eprintln!("error[{}]: {}", e.category(), e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::ChecksFailed(n)) => {
            eprintln!("error[check]: {n} reproduction check(s) failed");
            ExitCode::from(1)
        }
    }
}
