//! Input files: spaces (JSON or point-cloud CSV), covers and partial maps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nagata_core::covers::{Cover, FamilyDecomposition};
use nagata_core::metric::{point_cloud, FiniteMetricSpace, Norm};
use nagata_core::scalar::{parse_rational, Rational, Scalar};
use serde::Deserialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// A file read from disk with its digest.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub path: PathBuf,
    pub sha256: String,
    pub text: String,
}

pub fn read(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
    Ok(Loaded { path: path.to_path_buf(), sha256, text })
}

fn parse_json<T: for<'de> Deserialize<'de>>(file: &Loaded) -> Result<T, CliError> {
    serde_json::from_str(&file.text).map_err(|e| CliError::Input(format!("{}: {e}", file.path.display())))
}

/// A number given as a JSON number or a `"p/q"` / decimal string.
pub trait FromJson: Scalar {
    fn from_json(v: &Value) -> Result<Self, String>;
}

impl FromJson for f64 {
    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| format!("{n} is not a float")),
            Value::String(s) => parse_rational(s).map(|q| q.to_f64()).map_err(|e| e.to_string()),
            other => Err(format!("expected a number, got {other}")),
        }
    }
}

impl FromJson for Rational {
    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => parse_rational(&n.to_string()).map_err(|e| e.to_string()),
            Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
            other => Err(format!("expected a number, got {other}")),
        }
    }
}

/// Parses a command-line number exactly or as a float.
pub fn parse_number<S: FromJson>(text: &str) -> Result<S, CliError> {
    S::from_json(&Value::String(text.to_string())).map_err(|e| CliError::Usage(format!("`{text}`: {e}")))
}

/// Comma-separated scale list.
pub fn parse_scales<S: FromJson>(text: &str) -> Result<Vec<S>, CliError> {
    text.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_number(t.trim())).collect()
}

/// Emits a scalar: `"p/q"` strings in exact mode, floats otherwise, `null`
/// for non-finite floats.
pub fn num<S: Scalar>(v: &S) -> Value {
    if S::EXACT {
        Value::String(v.to_exact_string())
    } else {
        serde_json::Number::from_f64(v.to_f64()).map_or(Value::Null, Value::Number)
    }
}

pub fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    labels: Vec<String>,
    dist: Vec<Vec<Value>>,
}

/// Loads a JSON distance table, or a CSV point cloud with the given norm.
pub fn load_space<S: FromJson>(file: &Loaded, norm: Norm) -> Result<FiniteMetricSpace<S>, CliError> {
    let is_csv = file.path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let points = parse_csv(&file.text).map_err(|e| CliError::Input(format!("{}: {e}", file.path.display())))?;
        let space = point_cloud(&points, norm).map_err(|e| CliError::Input(e.to_string()))?;
        if S::EXACT {
            return Err(CliError::Usage("exact mode needs a JSON distance table, not a point cloud".into()));
        }
        return Ok(space.map_scalar(|v| S::from_f64(*v).expect("point cloud distances are finite")));
    }
    let raw: SpaceFile = parse_json(file)?;
    let rows = raw
        .dist
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| S::from_json(v).map_err(|e| CliError::Input(format!("dist[{i}][{j}]: {e}"))))
                .collect::<Result<Vec<S>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    FiniteMetricSpace::new(raw.labels, rows).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| format!("line {}: `{}` is not a number", i + 1, c.trim())))
                .collect()
        })
        .collect()
}

/// Serializes a space in the JSON input format.
pub fn space_json<S: Scalar>(space: &FiniteMetricSpace<S>) -> Value {
    serde_json::json!({
        "labels": space.labels(),
        "dist": space.rows().iter().map(|r| r.iter().map(num).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverFile {
    elements: Vec<Vec<String>>,
    #[serde(default)]
    families: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    r: Option<Value>,
}

/// A cover with its optional family structure.
#[derive(Debug, Clone)]
pub struct CoverInput<S> {
    pub cover: Cover,
    pub decomposition: Option<FamilyDecomposition<S>>,
    pub r: Option<S>,
}

fn index_labels<S: Scalar>(space: &FiniteMetricSpace<S>, labels: &[String], what: &str) -> Result<Vec<usize>, CliError> {
    labels
        .iter()
        .map(|l| space.index_of(l).ok_or_else(|| CliError::Input(format!("{what}: unknown point `{l}`"))))
        .collect()
}

pub fn load_cover<S: FromJson>(file: &Loaded, space: &FiniteMetricSpace<S>) -> Result<CoverInput<S>, CliError> {
    let raw: CoverFile = parse_json(file)?;
    let elements = raw
        .elements
        .iter()
        .enumerate()
        .map(|(i, e)| index_labels(space, e, &format!("element {i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let cover = Cover::new(space.len(), elements).map_err(|e| CliError::Input(e.to_string()))?;
    let r = raw.r.as_ref().map(S::from_json).transpose().map_err(|e| CliError::Input(format!("r: {e}")))?;
    let decomposition = match (&raw.families, &r) {
        (Some(families), Some(r)) => {
            let mut family_of = vec![usize::MAX; cover.len()];
            for (f, members) in families.iter().enumerate() {
                for &e in members {
                    let slot = family_of
                        .get_mut(e)
                        .ok_or_else(|| CliError::Input(format!("family {f} names element {e}, which does not exist")))?;
                    *slot = f;
                }
            }
            if let Some(e) = family_of.iter().position(|&f| f == usize::MAX) {
                return Err(CliError::Input(format!("element {e} belongs to no family")));
            }
            Some(
                FamilyDecomposition::new(cover.clone(), family_of, families.len(), r.clone())
                    .map_err(|e| CliError::Input(e.to_string()))?,
            )
        }
        (Some(_), None) => return Err(CliError::Input("families given without r".into())),
        _ => None,
    };
    Ok(CoverInput { cover, decomposition, r })
}

/// Serializes a cover with labels.
pub fn cover_json<S: Scalar>(space: &FiniteMetricSpace<S>, cover: &Cover) -> Value {
    Value::Array(
        cover
            .elements()
            .iter()
            .map(|e| Value::Array(e.iter().map(|&p| Value::String(space.label(p).to_string())).collect()))
            .collect(),
    )
}

/// Codomain of a partial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Target {
    Real,
    /// `{x >= 0, Σx = 1}` in `ℝ^vertices`.
    Simplex {
        vertices: usize,
        #[serde(default)]
        norm: Norm,
    },
    /// `{x >= 0, Σx <= 1}` in `ℝ^dim`.
    CornerSimplex {
        dim: usize,
        #[serde(default)]
        norm: Norm,
    },
    /// The boundary of the simplex with `vertices` vertices.
    SimplexBoundary {
        vertices: usize,
        #[serde(default)]
        norm: Norm,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    domain: Vec<String>,
    target: Target,
    values: BTreeMap<String, Value>,
    lambda: Value,
}

/// A partial map read from JSON, values still untyped.
#[derive(Debug, Clone)]
pub struct MapInput {
    pub domain: Vec<usize>,
    pub target: Target,
    pub values: Vec<Value>,
    pub lambda: Value,
}

pub fn load_map<S: Scalar>(file: &Loaded, space: &FiniteMetricSpace<S>) -> Result<MapInput, CliError> {
    let raw: MapFile = parse_json(file)?;
    let domain = index_labels(space, &raw.domain, "map domain")?;
    let values = raw
        .domain
        .iter()
        .map(|l| raw.values.get(l).cloned().ok_or_else(|| CliError::Input(format!("no value for domain point `{l}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(extra) = raw.values.keys().find(|k| !raw.domain.contains(k)) {
        return Err(CliError::Input(format!("value given for `{extra}`, which is not in the domain")));
    }
    Ok(MapInput { domain, target: raw.target, values, lambda: raw.lambda })
}

impl MapInput {
    pub fn real_values<S: FromJson>(&self) -> Result<Vec<S>, CliError> {
        self.values.iter().map(|v| S::from_json(v).map_err(CliError::Input)).collect()
    }

    pub fn vector_values(&self) -> Result<Vec<Vec<f64>>, CliError> {
        self.values
            .iter()
            .map(|v| match v {
                Value::Array(items) => items.iter().map(|x| f64::from_json(x).map_err(CliError::Input)).collect(),
                other => Err(CliError::Input(format!("expected a coordinate array, got {other}"))),
            })
            .collect()
    }
}
