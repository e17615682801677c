//! Scenario configuration files (JSON).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use susylab::deform::DeformationParams;
use susylab::numgrid::{DomainKind, Grid, SampledFn};
use susylab::potentials::{Expr, RadialForm, SuperpotentialSpec};
use susylab::susyqhj::Phase;
use susylab::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superpotential: Option<SuperpotentialSpec>,
    /// Partner potentials given directly rather than through `W`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potentials: Option<PotentialPair>,
    pub grid: GridSpec,
    /// Number of degenerate pairs to verify.
    pub levels: usize,
    pub phase: Phase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winding: Option<WindingSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialPair {
    pub minus: PotentialSpec,
    pub plus: PotentialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Radial {
        form: RadialForm,
        omega: f64,
        l: f64,
    },
    Expression {
        expr: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl PotentialSpec {
    pub fn label(&self) -> String {
        match self {
            PotentialSpec::Radial { form, omega, l } => {
                let name = serde_json::to_value(form)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default();
                format!("{name}(omega={omega}, l={l})")
            }
            PotentialSpec::Expression { expr, .. } => format!("V(x) = {expr}"),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledFn<f64>> {
        match self {
            PotentialSpec::Radial { form, omega, l } => form.sample(grid, *omega, *l),
            PotentialSpec::Expression { expr, params } => {
                let e = Expr::parse(expr, params)?;
                let v: Vec<f64> = grid.points().map(|x| e.eval(x)).collect::<Result<_>>()?;
                SampledFn::new(*grid, v)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Radial { omega, .. } if !(*omega > 0.0) => Err(Error::Config(format!(
                "radial potential needs omega > 0 (got {omega})"
            ))),
            PotentialSpec::Expression { expr, params } => Expr::parse(expr, params).map(|_| ()),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub domain_kind: DomainKind,
    /// Required on the full line; on the half line it defaults to one
    /// spacing from the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        match (self.domain_kind, self.x_min) {
            (DomainKind::HalfLine, None) => Grid::half_line(self.x_max, self.n_points),
            (DomainKind::FullLine, None) => Err(Error::Config(
                "full-line grids need an explicit x_min".into(),
            )),
            (kind, Some(x_min)) => Grid::new(kind, x_min, self.x_max, self.n_points),
        }
        .map_err(|e| match e {
            Error::Domain(m) => Error::Config(m),
            other => other,
        })
    }
}

fn default_strictness() -> f64 {
    1e-4
}
fn default_strictness_refined() -> f64 {
    1e-6
}
fn default_bernoulli() -> f64 {
    1e-6
}
fn default_isospectral() -> f64 {
    1e-3
}
fn default_recovery() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative bisection width of the eigensolver.
    pub solver: f64,
    /// Relative energy mismatch accepted when pairing levels.
    pub pairing: f64,
    /// Bound on masked Riccati and partner-relation residuals and on `|CDE − 1|`.
    pub residual: f64,
    #[serde(default = "default_strictness")]
    pub strictness: f64,
    /// Strictness bound on the refined grid.
    #[serde(default = "default_strictness_refined")]
    pub strictness_refined: f64,
    #[serde(default = "default_bernoulli")]
    pub bernoulli: f64,
    /// Largest level deviation between `V₋` and a deformed `Ṽ₋`.
    #[serde(default = "default_isospectral")]
    pub isospectral: f64,
    /// `sup |Ṽ₋ − V₋|` bound for a very large deformation parameter.
    #[serde(default = "default_recovery")]
    pub recovery: f64,
}

fn default_samples() -> usize {
    susylab::susyqhj::RectContour::DEFAULT_SAMPLES
}
fn default_y_half() -> f64 {
    1.0
}
fn default_margin() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindingSpec {
    pub max_n: usize,
    #[serde(default = "default_samples")]
    pub samples_per_side: usize,
    /// Half-height in oscillator units `√(2/ω)`.
    #[serde(default = "default_y_half")]
    pub y_half: f64,
    /// Distance in oscillator units between the outermost classical turning
    /// point and the vertical sides.
    #[serde(default = "default_margin")]
    pub margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenario_id.trim().is_empty() {
            return Err(Error::Config("scenario_id must not be empty".into()));
        }
        if self.levels < 1 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("solver", t.solver),
            ("pairing", t.pairing),
            ("residual", t.residual),
            ("strictness", t.strictness),
            ("strictness_refined", t.strictness_refined),
            ("bernoulli", t.bernoulli),
            ("isospectral", t.isospectral),
            ("recovery", t.recovery),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "tolerance {name} must be positive (got {v})"
                )));
            }
        }
        if let Some(ls) = &self.lambdas {
            for &l in ls {
                DeformationParams::new(l)?;
            }
            if self.superpotential.is_none() {
                return Err(Error::Config("lambdas need a superpotential".into()));
            }
        }
        let grid = self.grid.build()?;
        match (&self.superpotential, &self.potentials) {
            (None, None) => {
                return Err(Error::Config(
                    "either superpotential or potentials must be given".into(),
                ))
            }
            (Some(s), _) => {
                let w = s.build()?;
                if let Some(kind) = w.domain() {
                    if kind != grid.kind() {
                        return Err(Error::Config(format!(
                            "{w} lives on the {kind:?} domain but the grid is {:?}",
                            grid.kind()
                        )));
                    }
                }
            }
            _ => {}
        }
        if let Some(p) = &self.potentials {
            p.minus.validate()?;
            p.plus.validate()?;
        }
        if let Some(w) = &self.winding {
            if w.samples_per_side < 64 || !(w.y_half > 0.0) || !(w.margin > 0.0) {
                return Err(Error::Config(
                    "winding needs samples_per_side >= 64 and positive y_half, margin".into(),
                ));
            }
        }
        Ok(())
    }
}
