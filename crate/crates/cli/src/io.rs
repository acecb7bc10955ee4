//! JSON framework files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "cross_section": 1.0,
//!   "strain_model": "gl",
//!   "knots": [ {"id": 1, "coords": [0.0, 0.0], "pinned": true} ],
//!   "edges": [ {"i": 1, "j": 4, "length": 11.0} ],
//!   "plates": [ {"i": 4, "j": 5, "k": 6} ],
//!   "configuration": [ [0.0, 0.0] ]
//! }
//! ```
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so a save/load round trip is bit-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use snapkit::model::{Configuration, Edge, Framework, Knot, StrainModel};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnotRecord {
    pub id: usize,
    pub coords: Vec<f64>,
    #[serde(default)]
    pub pinned: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateRecord {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelName {
    #[serde(rename = "gl")]
    Gl,
    #[serde(rename = "ce")]
    Ce,
}

impl From<ModelName> for StrainModel {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::Gl => StrainModel::GreenLagrange,
            ModelName::Ce => StrainModel::CauchyEngineering,
        }
    }
}

impl From<StrainModel> for ModelName {
    fn from(m: StrainModel) -> Self {
        match m {
            StrainModel::GreenLagrange => ModelName::Gl,
            StrainModel::CauchyEngineering => ModelName::Ce,
        }
    }
}

/// On-disk shape of a framework file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameworkFile {
    pub dimension: usize,
    pub cross_section: f64,
    pub strain_model: ModelName,
    pub knots: Vec<KnotRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub plates: Vec<PlateRecord>,
    /// Realization to analyse; the knots' coordinates when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<Vec<Vec<f64>>>,
}

impl FrameworkFile {
    /// Validates into the data model.
    pub fn build(&self) -> CliResult<(Framework, Configuration)> {
        let knots = self
            .knots
            .iter()
            .map(|k| Knot {
                id: k.id,
                coords: k.coords.clone(),
                pinned: k.pinned,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                i: e.i,
                j: e.j,
                rest_length: e.length,
            })
            .collect();
        let plates = self.plates.iter().map(|p| [p.i, p.j, p.k]).collect();
        let fw = Framework::new(self.dimension, knots, edges, plates, self.cross_section, self.strain_model.into())?;
        let cfg = match &self.configuration {
            Some(rows) => Configuration::from_rows(self.dimension, rows)?,
            None => fw.declared_configuration(),
        };
        fw.check_configuration(&cfg)?;
        Ok((fw, cfg))
    }

    pub fn from_model(fw: &Framework, cfg: Option<&Configuration>) -> Self {
        Self {
            dimension: fw.dimension(),
            cross_section: fw.cross_section(),
            strain_model: fw.strain_model().into(),
            knots: fw
                .knots()
                .iter()
                .map(|k| KnotRecord {
                    id: k.id,
                    coords: k.coords.clone(),
                    pinned: k.pinned,
                })
                .collect(),
            edges: fw
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    i: e.i,
                    j: e.j,
                    length: e.rest_length,
                })
                .collect(),
            plates: fw
                .plates()
                .iter()
                .map(|p| PlateRecord {
                    i: p.knots[0],
                    j: p.knots[1],
                    k: p.knots[2],
                })
                .collect(),
            configuration: cfg.map(|c| c.rows()),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_framework(text: &str, origin: &Path) -> CliResult<(Framework, Configuration)> {
    let file: FrameworkFile = serde_json::from_str(text).map_err(|source| CliError::Parse {
        path: origin.to_path_buf(),
        source,
    })?;
    file.build()
}

/// Reads and validates a framework file; returns the framework and the
/// realization stored in it.
pub fn load_framework(path: impl AsRef<Path>) -> CliResult<(Framework, Configuration)> {
    let path = path.as_ref();
    parse_framework(&read(path)?, path)
}

pub fn framework_to_json(fw: &Framework, cfg: Option<&Configuration>) -> String {
    let mut text = serde_json::to_string_pretty(&FrameworkFile::from_model(fw, cfg)).expect("framework serializes");
    text.push('\n');
    text
}

pub fn save_framework(path: impl AsRef<Path>, fw: &Framework, cfg: Option<&Configuration>) -> CliResult<()> {
    write_text(path.as_ref(), &framework_to_json(fw, cfg))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn rows_from_value(v: &Value) -> Option<Vec<Vec<f64>>> {
    let rows = v.as_array()?;
    rows.iter()
        .map(|r| r.as_array().and_then(|c| c.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>()))
        .collect()
}

/// Reads a realization from a JSON file holding either a bare array of
/// coordinate rows, a framework file (its `configuration`), or an analysis
/// report (its `witness`).
pub fn load_configuration(path: impl AsRef<Path>, dimension: usize) -> CliResult<Configuration> {
    let path = path.as_ref();
    let value: Value = serde_json::from_str(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let rows = rows_from_value(&value)
        .or_else(|| value.get("configuration").and_then(rows_from_value))
        .or_else(|| value.get("witness").and_then(rows_from_value))
        .ok_or_else(|| {
            CliError::Format(format!(
                "{}: expected coordinate rows, a \"configuration\" or a \"witness\" array",
                path.display()
            ))
        })?;
    Ok(Configuration::from_rows(dimension, &rows)?)
}
