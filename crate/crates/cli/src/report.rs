//! Scenario reports: JSON rendering, CSV curve dumps and exit statuses.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use susylab::deform::IsospectralityReport;
use susylab::potentials::Normalizability;
use susylab::susyqhj::{GozziReport, Phase};

use crate::config::ScenarioConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
/// Significant digits kept for floating-point values in rendered reports.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario_id: String,
    pub config: ScenarioConfig,
    pub run: RunInfo,
    pub versions: BTreeMap<String, String>,
    pub phase: PhaseEvidence,
    pub identities: BTreeMap<String, IdentityEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectra: Option<SpectraEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gozzi: Option<GozziReport>,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deformation: Option<DeformationEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<WindingEntry>,
    pub errata: Vec<Erratum>,
    pub verdicts: BTreeMap<String, bool>,
    pub errors: Vec<CapturedError>,
    /// Wall-clock seconds per stage. The only nondeterministic block.
    pub timing: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub seed: u64,
    pub stages: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseEvidence {
    pub declared: Phase,
    /// From the normalizability of `exp(−∫W)`; absent without a superpotential.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detected: Option<Phase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalizability: Option<Normalizability>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityEntry {
    pub lhs: String,
    pub rhs: String,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
    pub fitted_offset: f64,
    pub offset_residual: f64,
    /// Offset the two sides should differ by, when they are only equal up
    /// to a constant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_offset: Option<f64>,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub potential: String,
    pub energies: Vec<f64>,
    pub energies_coarse: Vec<f64>,
    pub energies_fine: Vec<f64>,
    pub node_counts: Vec<usize>,
    /// Node counts recounted with half the amplitude threshold.
    pub node_counts_half_threshold: Vec<usize>,
    pub solver_residuals: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectraEntry {
    pub minus: SpectrumEntry,
    pub plus: SpectrumEntry,
}

#[derive(Debug, Clone, Serialize)]
pub struct RiccatiEntry {
    pub potential: String,
    pub n: usize,
    pub energy: f64,
    pub residual: f64,
    pub trusted_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairResidual {
    pub n_minus: usize,
    pub n_plus: usize,
    pub energy: f64,
    pub residual: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningEntry {
    pub n_minus: usize,
    pub n_plus: usize,
    pub energy: f64,
    pub cos_similarity_a: f64,
    pub cos_similarity_adag: f64,
    pub c: f64,
    pub d: f64,
    pub cde: f64,
    pub cde_error: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Residuals {
    pub riccati: Vec<RiccatiEntry>,
    pub partner_relation: Vec<PairResidual>,
    pub product_identity: Vec<PairResidual>,
    pub intertwining: Vec<IntertwiningEntry>,
    pub bernoulli: Vec<LambdaValue>,
    pub strictness: Vec<LambdaValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaValue {
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyEntry {
    pub lambda: f64,
    /// `min |I₀ + λ|` over the grid.
    pub min_denominator: f64,
    /// Lower bound `min(|λ|, |λ + 1|)`.
    pub clearance: f64,
    pub bernoulli_residual: f64,
    pub strictness_residual: f64,
    /// Strictness on the refined grid, analytic ground state.
    pub strictness_refined: f64,
    /// `sup |Ṽ₋ − V₋|`.
    pub potential_difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isospectrality: Option<IsospectralityReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeformationEntry {
    pub families: Vec<FamilyEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<LambdaValue>,
    /// Spread of the maximal level deviations across the sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation_spread: Option<f64>,
    pub deviation_spread_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContourEntry {
    pub x_left: f64,
    pub x_right: f64,
    pub y_half: f64,
    pub samples_per_side: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindingState {
    pub n: usize,
    pub contour: ContourEntry,
    pub integral_re: f64,
    pub integral_im: f64,
    pub rounded: i64,
    pub rounding_error: f64,
    /// Change of the integral when the contour height is doubled.
    pub contour_shift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindingDifference {
    pub n: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindingEntry {
    pub states: Vec<WindingState>,
    pub differences: Vec<WindingDifference>,
    pub rounding_tolerance: f64,
    pub invariance_tolerance: f64,
}

/// A printed formula that the implementation does not follow literally.
#[derive(Debug, Clone, Serialize)]
pub struct Erratum {
    pub topic: String,
    pub printed: String,
    pub implemented: String,
    pub evidence: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapturedError {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

impl Report {
    pub fn all_verdicts_true(&self) -> bool {
        self.verdicts.values().all(|v| *v)
    }

    pub fn has_numerical_error(&self) -> bool {
        self.errors.iter().any(|e| e.numerical())
    }

    /// 0 when every verdict holds, 3 if a numerical failure was captured,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_verdicts_true() && self.errors.is_empty() {
            0
        } else if self.has_numerical_error() {
            3
        } else {
            1
        }
    }

    /// Pretty JSON with sorted keys and rounded floats. The config echo is
    /// left unrounded so that it parses back to the input.
    pub fn render(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            for (k, val) in map.iter_mut() {
                if k != "config" {
                    round_floats(val);
                }
            }
        }
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    /// [`render`](Self::render) without the timing block.
    pub fn render_without_timing(&self) -> String {
        let mut r = self.clone();
        r.timing.clear();
        r.render()
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}

impl CapturedError {
    pub fn new(stage: &str, err: &susylab::Error) -> Self {
        Self {
            stage: stage.to_owned(),
            kind: err.kind().to_owned(),
            message: err.to_string(),
        }
    }

    pub fn numerical(&self) -> bool {
        matches!(
            self.kind.as_str(),
            "degenerate" | "evaluation" | "solver" | "singular_family" | "zero_on_contour"
        )
    }
}

pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) =
                    serde_json::Number::from_f64(round_significant(x, SIGNIFICANT_DIGITS))
                {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// One CSV file: `x` plus value columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub file_name: String,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Curve {
    pub fn new(file_name: impl Into<String>, columns: Vec<(&str, Vec<f64>)>) -> Self {
        Self {
            file_name: file_name.into(),
            columns: columns
                .into_iter()
                .map(|(n, c)| (n.to_owned(), c))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }
}

/// Writes each curve to `dir/<file_name>`, creating `dir` if needed.
pub fn write_curves(dir: &Path, curves: &[Curve]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::with_capacity(curves.len());
    for c in curves {
        let path = dir.join(&c.file_name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::csv(&path, e))?;
        w.write_record(c.columns.iter().map(|(n, _)| n.as_str()))
            .map_err(|e| CliError::csv(&path, e))?;
        for i in 0..c.rows() {
            w.write_record(c.columns.iter().map(|(_, col)| format!("{:e}", col[i])))
                .map_err(|e| CliError::csv(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_significant(1.234567890123456, 12), 1.23456789012);
        assert_eq!(
            round_significant(-9.87654321098765e-7, 12),
            -9.87654321099e-7
        );
        assert_eq!(round_significant(0.0, 12), 0.0);
        let mut v = serde_json::json!({"a": [0.1234567890123456, 3], "b": {"c": 2.0000000000001}});
        round_floats(&mut v);
        assert_eq!(v["a"][0], serde_json::json!(0.123456789012));
        assert_eq!(v["a"][1], serde_json::json!(3));
        assert_eq!(v["b"]["c"], serde_json::json!(2.0));
    }

    #[test]
    fn curves_have_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let c = Curve::new(
            "f.csv",
            vec![("x", vec![0.0, 1.0, 2.0]), ("f", vec![1.0, 2.0, 3.0])],
        );
        let paths = write_curves(dir.path(), &[c]).unwrap();
        let text = fs::read_to_string(&paths[0]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "x,f");
        assert_eq!(lines[2], "1e0,2e0");
    }
}
