//! Run configuration: one JSON document per run, overridable key by key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use inertia_core::certificates::{derive_gamma_certificate, derive_model_certificate, derive_p_certificate};
use inertia_core::problems::{preset as objective_preset, Objective, Quadratic};
use inertia_core::{
    Certificate, ConditionSet, DynamicsSpec, ExtraParams, GridSpec, IPConfig, IntegratorConfig, RateClaim, ScheduleSpec,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::RunError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveConfig {
    /// `quad-diag`, `quad-rank1`, `log-barrier`, `fig2-caption`, `fig2-eq` or `quad-custom`.
    pub preset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<f64>>,
}

impl ObjectiveConfig {
    pub fn named(preset: &str) -> Self {
        ObjectiveConfig { preset: preset.into(), matrix: None, linear: None }
    }

    pub fn build(&self) -> Result<Arc<dyn Objective>, RunError> {
        if self.preset != "quad-custom" {
            if self.matrix.is_some() || self.linear.is_some() {
                return Err(RunError::Config(format!("objective '{}' takes no matrix or linear term", self.preset)));
            }
            return Ok(objective_preset(&self.preset)?);
        }
        let rows = self.matrix.as_ref().ok_or_else(|| RunError::Config("quad-custom needs 'matrix'".into()))?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(RunError::Config("quad-custom matrix must be square and nonempty".into()));
        }
        let a = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let l = match &self.linear {
            Some(l) if l.len() != n => return Err(RunError::Config(format!("linear term has length {}, expected {n}", l.len()))),
            Some(l) => nalgebra::DVector::from_column_slice(l),
            None => nalgebra::DVector::zeros(n),
        };
        Ok(Arc::new(Quadratic::new(a, l)?))
    }
}

fn zero_schedule() -> ScheduleSpec {
    ScheduleSpec::constant(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub gamma: ScheduleSpec,
    #[serde(default = "zero_schedule")]
    pub beta: ScheduleSpec,
    pub b: ScheduleSpec,
    pub t0: f64,
}

impl DynamicsConfig {
    pub fn build(&self) -> Result<DynamicsSpec, RunError> {
        if !self.t0.is_finite() {
            return Err(RunError::Config("t0 must be finite".into()));
        }
        Ok(DynamicsSpec::new(self.gamma.build(self.t0)?, self.beta.build(self.t0)?, self.b.build(self.t0)?, self.t0))
    }
}

/// Lyapunov certificate attached to a simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateConfig {
    Gamma,
    P { r: f64, m: f64 },
    /// `γ = γ0 + 1/p0`; the dynamics' own `gamma` must describe the same composite.
    Model { gamma0: ScheduleSpec },
}

impl CertificateConfig {
    pub fn build(&self, spec: &DynamicsSpec) -> Result<Certificate, RunError> {
        Ok(match self {
            CertificateConfig::Gamma => derive_gamma_certificate(&spec.gamma, &spec.beta, &spec.b)?,
            CertificateConfig::P { r, m } => derive_p_certificate(&spec.gamma, &spec.beta, &spec.b, *r, *m)?,
            CertificateConfig::Model { gamma0 } => derive_model_certificate(&gamma0.build(spec.t0)?, &spec.b)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<Vec<f64>>,
    pub horizon: f64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateConfig>,
    /// Minimizer used by the energy; defaults to the projection of `x0` onto the solution set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub condition_set: ConditionSet,
    pub grid: GridSpec,
    #[serde(default)]
    pub params: ExtraParams,
    /// Needed for `SystemA`/`SystemB`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateConfig>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    /// Existing `trajectory.csv`; when absent the `simulate` block is run inline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    /// Minimum used for the numerical floor when reading a CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub command: String,
    /// Dotted config path → values; the grid is their Cartesian product.
    pub parameters: BTreeMap<String, Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureRun {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveConfig>,
    pub dynamics: DynamicsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub runs: Vec<FigureRun>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<RateClaim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ip: Option<IPConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureConfig>,
}

impl RunConfig {
    pub fn from_value(v: Value) -> Result<Self, RunError> {
        serde_json::from_value(v).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn objective(&self) -> Result<Arc<dyn Objective>, RunError> {
        self.objective.as_ref().ok_or_else(|| missing("objective"))?.build()
    }

    pub fn dynamics(&self) -> Result<DynamicsSpec, RunError> {
        self.dynamics.as_ref().ok_or_else(|| missing("dynamics"))?.build()
    }

    pub fn section<'a, T>(&self, field: &'a Option<T>, name: &str) -> Result<&'a T, RunError> {
        field.as_ref().ok_or_else(|| missing(name))
    }
}

pub fn missing(name: &str) -> RunError {
    RunError::Config(format!("config has no '{name}' section"))
}

/// Reads a JSON config file.
pub fn load_file(path: &Path) -> Result<Value, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::MissingInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
}

/// Applies `path.to.key=value`; the value is parsed as JSON, falling back to a string.
pub fn apply_set(doc: &mut Value, assignment: &str) -> Result<(), RunError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| RunError::Config(format!("--set expects path=value, got '{assignment}'")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(doc, path, value)
}

pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<(), RunError> {
    if path.is_empty() {
        return Err(RunError::Config("empty --set path".into()));
    }
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| RunError::Config(format!("'{part}' in '{path}' indexes an array and must be a number")))?;
                let len = items.len();
                items.get_mut(idx).ok_or_else(|| RunError::Config(format!("index {idx} out of range ({len}) in '{path}'")))?
            }
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Null => {
                *cur = Value::Object(Default::default());
                let Value::Object(map) = cur else { unreachable!() };
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            _ => return Err(RunError::Config(format!("'{path}' descends into a scalar"))),
        };
        if last {
            *cur = value;
            return Ok(());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn set_paths() {
        let mut v = json!({"simulate": {"x0": [1.0, 2.0], "horizon": 10}});
        apply_set(&mut v, "simulate.horizon=25").unwrap();
        apply_set(&mut v, "simulate.x0.1=3.5").unwrap();
        apply_set(&mut v, "objective.preset=quad-diag").unwrap();
        assert_eq!(v, json!({"simulate": {"x0": [1.0, 3.5], "horizon": 25}, "objective": {"preset": "quad-diag"}}));
        assert!(apply_set(&mut v, "simulate.horizon.deep=1").is_err());
        assert!(apply_set(&mut v, "novalue").is_err());
        assert!(apply_set(&mut v, "simulate.x0.7=1").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let v = json!({"objective": {"preset": "quad-diag", "presett": 1}});
        assert!(matches!(RunConfig::from_value(v), Err(RunError::Config(_))));
        let v = json!({"simulat": {}});
        assert!(RunConfig::from_value(v).is_err());
        let v = json!({"simulate": {"x0": [1.0], "horizon": 2.0, "integrator": {"rtoll": 1e-6}}});
        assert!(RunConfig::from_value(v).is_err());
    }

    #[test]
    fn custom_quadratic() {
        let o = ObjectiveConfig { preset: "quad-custom".into(), matrix: Some(vec![vec![2.0, 0.0], vec![0.0, 1.0]]), linear: None };
        assert_eq!(o.build().unwrap().dim(), 2);
        let bad = ObjectiveConfig { preset: "quad-custom".into(), matrix: Some(vec![vec![1.0, 2.0], vec![2.0, 1.0]]), linear: None };
        assert!(bad.build().is_err());
        assert!(ObjectiveConfig { matrix: Some(vec![vec![1.0]]), ..ObjectiveConfig::named("quad-diag") }.build().is_err());
    }
}
