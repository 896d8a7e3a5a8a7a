//! CSV ingestion and output.
//!
//! Schemas:
//! - survival curve: `time_months,survival_prob`
//! - waterfall sample: `pchg`
//! - predicted waterfall: `index,predicted,lower,upper`
//!
//! Lines starting with `#` are comments. Row numbers in errors count data
//! rows from 1, excluding the header and comments.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rate::{CorrelationSpec, Rate};
use crate::survival::SurvivalCurve;
use crate::waterfall::{PredictedBand, WaterfallSample, MIN_CHANGE};

#[derive(Debug, Clone)]
pub struct LoadedCurve {
    pub curve: SurvivalCurve,
    /// The file lacked a `t = 0` row and `(0, 1)` was prepended.
    pub inserted_origin: bool,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(|e| Error::Parse { row: 0, msg: e.to_string() })?;
    let got: Vec<&str> = headers.iter().collect();
    if got.is_empty() || got == [""] {
        return Err(Error::Parse { row: 0, msg: "empty file".into() });
    }
    if got != expected {
        return Err(Error::Parse {
            row: 0,
            msg: format!("expected header {}, found {}", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

fn parse_cell(cell: Option<&str>, row: usize, name: &str) -> Result<f64> {
    let cell = cell.ok_or_else(|| Error::Parse { row, msg: format!("missing {name}") })?;
    let v: f64 = cell.parse().map_err(|_| Error::Parse {
        row,
        msg: format!("{name} '{cell}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse { row, msg: format!("{name} '{cell}' is not finite") });
    }
    Ok(v)
}

pub fn parse_survival_csv(text: &str) -> Result<LoadedCurve> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &["time_months", "survival_prob"])?;
    let mut times = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        if rec.len() != 2 {
            return Err(Error::Parse { row, msg: format!("expected 2 columns, found {}", rec.len()) });
        }
        let t = parse_cell(rec.get(0), row, "time_months")?;
        let p = parse_cell(rec.get(1), row, "survival_prob")?;
        let violation = |msg: String| Err(Error::InvariantViolation { row, msg });
        if t < 0.0 {
            return violation(format!("negative time {t}"));
        }
        if !(0.0..=1.0).contains(&p) {
            return violation(format!("survival probability {p} outside [0, 1]"));
        }
        if let (Some(&t0), Some(&p0)) = (times.last(), probs.last()) {
            if t <= t0 {
                return violation(format!("time {t} does not increase past {t0}"));
            }
            if p > p0 {
                return violation(format!("survival probability rises from {p0} to {p}"));
            }
        } else if t == 0.0 && p != 1.0 {
            return violation(format!("survival at time 0 must be 1, found {p}"));
        }
        times.push(t);
        probs.push(p);
    }
    if times.is_empty() {
        return Err(Error::Parse { row: 0, msg: "no data rows".into() });
    }
    let inserted_origin = times[0] > 0.0;
    if inserted_origin {
        times.insert(0, 0.0);
        probs.insert(0, 1.0);
    }
    let curve = SurvivalCurve::new(times, probs)
        .map_err(|e| Error::InvariantViolation { row: 0, msg: e.to_string() })?;
    Ok(LoadedCurve { curve, inserted_origin })
}

pub fn load_survival_csv(path: impl AsRef<Path>) -> Result<LoadedCurve> {
    parse_survival_csv(&read(path.as_ref())?)
}

pub fn parse_waterfall_csv(text: &str) -> Result<WaterfallSample> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &["pchg"])?;
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        if rec.len() != 1 {
            return Err(Error::Parse { row, msg: format!("expected 1 column, found {}", rec.len()) });
        }
        let v = parse_cell(rec.get(0), row, "pchg")?;
        if v < MIN_CHANGE {
            return Err(Error::InvariantViolation {
                row,
                msg: format!("change {v} is below -100"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse { row: 0, msg: "no data rows".into() });
    }
    WaterfallSample::new(values)
}

pub fn load_waterfall_csv(path: impl AsRef<Path>) -> Result<WaterfallSample> {
    parse_waterfall_csv(&read(path.as_ref())?)
}

/// Read the `predicted` column of a predicted-waterfall CSV.
pub fn parse_band_predicted(text: &str) -> Result<Vec<f64>> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &["index", "predicted", "lower", "upper"])?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        out.push(parse_cell(rec.get(1), row, "predicted")?);
    }
    if out.is_empty() {
        return Err(Error::Parse { row: 0, msg: "no data rows".into() });
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn band_csv(band: &PredictedBand) -> String {
    let mut out = String::from("index,predicted,lower,upper\n");
    for i in 0..band.len() {
        let edge = |v: &Option<Vec<f64>>| v.as_ref().map(|v| v[i].to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            band.index[i],
            band.predicted[i],
            edge(&band.lower),
            edge(&band.upper)
        ));
    }
    out
}

/// Survival curve CSV, with an optional pointwise variance column.
pub fn curve_csv(curve: &SurvivalCurve, variance: Option<&[f64]>) -> String {
    let mut out = String::from("time_months,survival_prob");
    if variance.is_some() {
        out.push_str(",variance");
    }
    out.push('\n');
    for (i, (t, p)) in curve.times().iter().zip(curve.probs()).enumerate() {
        out.push_str(&format!("{t},{p}"));
        if let Some(v) = variance {
            out.push_str(&format!(",{}", v[i]));
        }
        out.push('\n');
    }
    out
}

/// Write via a temporary file in the destination directory and rename, so a
/// failure never leaves a partial file behind.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// A two-drug study description, read from TOML. Relative file paths resolve
/// against the study file's directory.
///
/// ```toml
/// seed = 20201
/// [correlation]
/// phi_prime = 0.0
/// [[drug]]
/// label = "chemo"
/// orr = 0.372
/// n = 250
/// dor_csv = "chemo_dor.csv"
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyInput {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub correlation: CorrelationInput,
    pub drug: Vec<DrugInput>,
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationInput {
    #[serde(default)]
    pub phi_prime: f64,
    #[serde(default)]
    pub phi_dprime: f64,
    #[serde(default)]
    pub phi_tumor: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrugInput {
    pub label: String,
    #[serde(default)]
    pub orr: Option<f64>,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub dor_csv: Option<PathBuf>,
    #[serde(default)]
    pub waterfall_csv: Option<PathBuf>,
}

impl StudyInput {
    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut s: StudyInput =
            toml::from_str(text).map_err(|e| Error::Parse { row: 0, msg: e.to_string() })?;
        s.base_dir = base_dir.into();
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&read(path)?, base)
    }

    fn validate(&self) -> Result<()> {
        if self.drug.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "a study needs exactly 2 drugs, found {}",
                self.drug.len()
            )));
        }
        CorrelationSpec::new(
            self.correlation.phi_prime,
            self.correlation.phi_dprime,
            self.correlation.phi_tumor,
        )?;
        for d in &self.drug {
            if d.orr.is_none() && d.dor_csv.is_none() && d.waterfall_csv.is_none() {
                return Err(Error::InvalidInput(format!("drug '{}' has no endpoint data", d.label)));
            }
            if d.dor_csv.is_some() && d.orr.is_none() {
                return Err(Error::InvalidInput(format!(
                    "drug '{}' has a DoR curve but no ORR",
                    d.label
                )));
            }
            self.rate(d)?;
            if let Some(p) = &d.dor_csv {
                load_survival_csv(self.base_dir.join(p))?;
            }
            if let Some(p) = &d.waterfall_csv {
                load_waterfall_csv(self.base_dir.join(p))?;
            }
        }
        Ok(())
    }

    pub fn correlation(&self) -> CorrelationSpec {
        CorrelationSpec {
            phi_prime: self.correlation.phi_prime,
            phi_dprime: self.correlation.phi_dprime,
            phi_tumor: self.correlation.phi_tumor,
        }
    }

    pub fn rate(&self, d: &DrugInput) -> Result<Option<Rate>> {
        match (d.orr, d.n) {
            (Some(v), Some(n)) => Rate::with_n(v, n).map(Some),
            (Some(v), None) => Rate::new(v).map(Some),
            (None, _) => Ok(None),
        }
    }

    pub fn dor_path(&self, d: &DrugInput) -> Option<PathBuf> {
        d.dor_csv.as_ref().map(|p| self.base_dir.join(p))
    }

    pub fn waterfall_path(&self, d: &DrugInput) -> Option<PathBuf> {
        d.waterfall_csv.as_ref().map(|p| self.base_dir.join(p))
    }
}
