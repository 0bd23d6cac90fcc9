//! JSON model files.
//!
//! ```json
//! { "drift": {"xi": 1.0, "eta": -2.0},
//!   "gaussian": {"var_xi": 0.0, "cov": 0.0, "var_eta": 0.0},
//!   "jumps": [{"rate": 1.0, "x": 0.5, "y": -1.0}] }
//! ```
//!
//! `jumps` may instead be `{"lambda": r, "atoms": [{"p": r, "x": r, "y": r}]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::levy_model::{AtomicJumpMeasure, BivariateTriplet, Drift, GaussianCovariance, JumpAtom, ModelError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed model file at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    drift: Drift,
    #[serde(default)]
    gaussian: GaussianCovariance,
    #[serde(default)]
    jumps: Option<Value>,
    #[serde(default)]
    #[allow(dead_code)]
    name: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompoundPoisson {
    lambda: f64,
    atoms: Vec<LawAtom>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LawAtom {
    p: f64,
    x: f64,
    y: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    rate: f64,
    x: f64,
    y: f64,
}

/// Canonical serialised form.
#[derive(Debug, Serialize)]
pub struct ModelFile<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<&'a str>,
    pub drift: Drift,
    pub gaussian: GaussianCovariance,
    pub jumps: &'a [JumpAtom],
}

fn field_err(field: impl Into<String>, e: impl std::fmt::Display) -> LoadError {
    LoadError::Field { field: field.into(), message: e.to_string() }
}

fn parse_jumps(v: Value) -> Result<AtomicJumpMeasure, LoadError> {
    match v {
        Value::Array(items) => {
            let mut atoms = Vec::with_capacity(items.len());
            for (i, item) in items.into_iter().enumerate() {
                let field = format!("jumps[{i}]");
                let a: RawAtom = serde_json::from_value(item).map_err(|e| field_err(&field, e))?;
                atoms.push(JumpAtom::new(a.rate, a.x, a.y).map_err(|e| field_err(&field, e))?);
            }
            Ok(AtomicJumpMeasure::new(atoms))
        }
        Value::Object(_) => {
            let cp: CompoundPoisson = serde_json::from_value(v).map_err(|e| field_err("jumps", e))?;
            AtomicJumpMeasure::from_compound_poisson(cp.lambda, cp.atoms.into_iter().map(|a| (a.p, a.x, a.y)))
                .map_err(|e| field_err("jumps", e))
        }
        Value::Null => Ok(AtomicJumpMeasure::default()),
        other => {
            Err(field_err("jumps", format!("expected an array of atoms or a compound Poisson object, got {other}")))
        }
    }
}

pub fn parse_model(text: &str) -> Result<BivariateTriplet, LoadError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| LoadError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let gaussian = GaussianCovariance::new(raw.gaussian.var_xi, raw.gaussian.cov, raw.gaussian.var_eta)
        .map_err(|e| field_err("gaussian", e))?;
    let jumps = parse_jumps(raw.jumps.unwrap_or(Value::Null))?;
    Ok(BivariateTriplet::new(raw.drift, gaussian, jumps)?)
}

pub fn load_model(path: &Path) -> Result<BivariateTriplet, LoadError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_model(&text)
}

pub fn to_json(triplet: &BivariateTriplet, name: Option<&str>) -> String {
    let file = ModelFile { name, drift: triplet.drift(), gaussian: triplet.gaussian(), jumps: triplet.atoms() };
    serde_json::to_string_pretty(&file).expect("model serialisation")
}
