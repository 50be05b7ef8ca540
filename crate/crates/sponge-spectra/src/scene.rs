//! Scene files: a system plus an optional measure, as JSON.
//!
//! ```json
//! {
//!   "name": "example",
//!   "dim": 2,
//!   "maps": [
//!     { "diag": ["0.5", "0.25"], "trans": [0, 0] },
//!     { "diag": [[1, 4], "0.5"], "trans": ["0.75", [1, 2]] }
//!   ],
//!   "measure": ["0.3", "0.7"]
//! }
//! ```
//!
//! Numeric entries are JSON numbers, decimal strings, or `[num, den]`
//! integer pairs; all three parse to exact rationals (the crate is built
//! with arbitrary-precision JSON numbers, so decimal literals survive
//! verbatim).

use crate::exact::Exact;
use crate::ifs::{DiagonalMap, SpongeIfs, ValidationReport};
use crate::potentials::WeightedMeasure;
use crate::system::System;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("scene field `{field}`: {message}")]
    Shape { field: String, message: String },
    #[error("invalid number at `{field}`: {message}")]
    Number { field: String, message: String },
    #[error("measure: {0}")]
    Measure(#[from] crate::potentials::PotentialError),
    #[error("invalid system:\n{}", format_violations(.0))]
    Invalid(ValidationReport),
    #[error("unknown built-in scene `{0}`")]
    UnknownBuiltin(String),
}

fn format_violations(report: &ValidationReport) -> String {
    report
        .violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A parsed scene: raw exact data, before validation.
#[derive(Debug, Clone)]
pub struct Scene {
    pub name: Option<String>,
    pub notes: Option<String>,
    pub dim: usize,
    pub maps: Vec<DiagonalMap>,
    pub measure_weights: Option<Vec<Exact>>,
}

fn shape_err(field: &str, message: impl Into<String>) -> SceneError {
    SceneError::Shape {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_exact(value: &Value, field: &str) -> Result<Exact, SceneError> {
    let err = |m: String| SceneError::Number {
        field: field.to_string(),
        message: m,
    };
    match value {
        Value::Number(n) => Exact::parse_decimal(&n.to_string()).map_err(|e| err(e.to_string())),
        Value::String(s) => Exact::parse_decimal(s).map_err(|e| err(e.to_string())),
        Value::Array(pair) if pair.len() == 2 => {
            let num = parse_exact(&pair[0], field)?;
            let den = parse_exact(&pair[1], field)?;
            if den.is_zero() {
                return Err(err("zero denominator".into()));
            }
            Ok(Exact(num.0 / den.0))
        }
        other => Err(err(format!(
            "expected a number, decimal string or [num, den] pair, got {other}"
        ))),
    }
}

fn parse_exact_list(value: &Value, field: &str, expected: usize) -> Result<Vec<Exact>, SceneError> {
    let arr = value
        .as_array()
        .ok_or_else(|| shape_err(field, "expected an array"))?;
    if arr.len() != expected {
        return Err(shape_err(
            field,
            format!("expected {expected} entries, got {}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(k, v)| parse_exact(v, &format!("{field}[{k}]")))
        .collect()
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Scene, SceneError> {
        let root: Value = serde_json::from_str(text)?;
        let obj = root
            .as_object()
            .ok_or_else(|| shape_err("<root>", "expected an object"))?;
        let dim = obj
            .get("dim")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| shape_err("dim", "expected a positive integer"))? as usize;
        if dim == 0 || dim > 30 {
            return Err(shape_err("dim", "dimension must lie in 1..=30"));
        }
        let maps_value = obj
            .get("maps")
            .and_then(|v| v.as_array())
            .ok_or_else(|| shape_err("maps", "expected an array of maps"))?;
        let mut maps = Vec::with_capacity(maps_value.len());
        for (k, m) in maps_value.iter().enumerate() {
            let mo = m
                .as_object()
                .ok_or_else(|| shape_err(&format!("maps[{k}]"), "expected an object"))?;
            let diag = parse_exact_list(
                mo.get("diag")
                    .ok_or_else(|| shape_err(&format!("maps[{k}].diag"), "missing"))?,
                &format!("maps[{k}].diag"),
                dim,
            )?;
            let trans = parse_exact_list(
                mo.get("trans")
                    .ok_or_else(|| shape_err(&format!("maps[{k}].trans"), "missing"))?,
                &format!("maps[{k}].trans"),
                dim,
            )?;
            maps.push(DiagonalMap::new(diag, trans));
        }
        let measure_weights = match obj.get("measure") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| shape_err("measure", "expected an array"))?;
                if arr.len() != maps.len() {
                    return Err(shape_err(
                        "measure",
                        format!("expected {} entries, got {}", maps.len(), arr.len()),
                    ));
                }
                Some(
                    arr.iter()
                        .enumerate()
                        .map(|(k, v)| parse_exact(v, &format!("measure[{k}]")))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };
        Ok(Scene {
            name: obj.get("name").and_then(|v| v.as_str()).map(String::from),
            notes: obj.get("notes").and_then(|v| v.as_str()).map(String::from),
            dim,
            maps,
            measure_weights,
        })
    }

    /// Serializes with `[num, den]` pairs, so a round trip is exact.
    pub fn to_json(&self) -> String {
        let rational = |x: &Exact| -> Value {
            Value::Array(vec![
                Value::String(x.0.numer().to_string()),
                Value::String(x.0.denom().to_string()),
            ])
        };
        let maps: Vec<Value> = self
            .maps
            .iter()
            .map(|m| {
                serde_json::json!({
                    "diag": m.diag.iter().map(rational).collect::<Vec<_>>(),
                    "trans": m.trans.iter().map(rational).collect::<Vec<_>>(),
                })
            })
            .collect();
        let mut obj = serde_json::Map::new();
        if let Some(name) = &self.name {
            obj.insert("name".into(), Value::String(name.clone()));
        }
        if let Some(notes) = &self.notes {
            obj.insert("notes".into(), Value::String(notes.clone()));
        }
        obj.insert("dim".into(), Value::from(self.dim as u64));
        obj.insert("maps".into(), Value::Array(maps));
        if let Some(ws) = &self.measure_weights {
            obj.insert(
                "measure".into(),
                Value::Array(ws.iter().map(rational).collect()),
            );
        }
        serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable")
    }

    /// Validates the system and resolves the measure (uniform by default).
    pub fn build(&self, seed: u64) -> Result<(System, WeightedMeasure), SceneError> {
        let ifs =
            SpongeIfs::new(self.dim, self.maps.clone()).map_err(SceneError::Invalid)?;
        let count = ifs.len();
        let system = System::with_seed(ifs, seed);
        let measure = match &self.measure_weights {
            Some(ws) => WeightedMeasure::from_exact(ws)?,
            None => WeightedMeasure::uniform(count),
        };
        Ok((system, measure))
    }

    /// Validation report for possibly-invalid scenes.
    pub fn validation(&self) -> ValidationReport {
        crate::ifs::validate(self.dim, &self.maps)
    }
}

/// Names of the scenes shipped with the crate.
pub const BUILTIN_SCENES: &[&str] = &[
    "self-similar",
    "baranski-planar",
    "bedford-mcmullen",
    "lalley-gatzouras",
    "fraser-jurga",
    "fraser-jurga-small",
];

/// Loads a built-in scene by name.
pub fn builtin_scene(name: &str) -> Result<Scene, SceneError> {
    let text = match name {
        "self-similar" => include_str!("../scenes/self-similar.json"),
        "baranski-planar" => include_str!("../scenes/baranski-planar.json"),
        "bedford-mcmullen" => include_str!("../scenes/bedford-mcmullen.json"),
        "lalley-gatzouras" => include_str!("../scenes/lalley-gatzouras.json"),
        "fraser-jurga" => include_str!("../scenes/fraser-jurga.json"),
        "fraser-jurga-small" => include_str!("../scenes/fraser-jurga-small.json"),
        other => return Err(SceneError::UnknownBuiltin(other.to_string())),
    };
    Scene::from_json(text)
}
