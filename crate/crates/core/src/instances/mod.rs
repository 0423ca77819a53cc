//! Instance generators, instance and solution files, and benchmark
//! manifests.

mod generate;
mod json;
mod tsplib;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{InstanceError, Label, MetricInstance, Weight};

pub use generate::{gen_lower_bound, gen_random_euclidean, gen_random_graphic, gen_random_metric, FamilySpec};
pub use json::{parse_instance_json, serialize_instance_json, SolutionEdge, SolutionFile};
pub use tsplib::parse_tsplib;

#[derive(Debug, Error)]
pub enum InstancesError {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {message}")]
    Tsplib { line: usize, message: String },
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("node {0} has no coordinates")]
    MissingCoordinates(Label),
    #[error("unknown node {0}")]
    UnknownLabel(Label),
    #[error("edge from {0} to itself")]
    SelfLoop(Label),
    #[error("cannot read weight `{0}`")]
    BadWeight(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn read(path: &Path) -> Result<String, InstancesError> {
    std::fs::read_to_string(path).map_err(|source| InstancesError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses JSON or, when the text does not start with `{`, the TSPLIB subset.
pub fn parse_instance(text: &str) -> Result<MetricInstance, InstancesError> {
    if text.trim_start().starts_with('{') {
        parse_instance_json(text)
    } else {
        parse_tsplib(text)
    }
}

pub fn load_instance(path: &Path) -> Result<MetricInstance, InstancesError> {
    parse_instance(&read(path)?)
}

/// One benchmark entry; `path` is relative to the manifest's directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub path: PathBuf,
    #[serde(
        default,
        with = "crate::rational::opt_text",
        skip_serializing_if = "Option::is_none"
    )]
    pub opt: Option<Weight>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub instances: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, InstancesError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a manifest and makes entry paths absolute.
    pub fn load(path: &Path) -> Result<Self, InstancesError> {
        let mut m = Manifest::parse(&read(path)?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for e in &mut m.instances {
            if e.path.is_relative() {
                e.path = dir.join(&e.path);
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }
}
