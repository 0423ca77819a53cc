//! End-to-end algorithms: forest plus matching, its extension with heavy
//! edge removal and a postperson completion, the rural-postperson baseline,
//! the graphic variant, an exhaustive oracle and the alignment diagnostics.

mod alignment;
mod baseline;
mod christofides;
mod extended;
mod oracle;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forest::ForestError;
use crate::graph::{validate_tour, EdgeMultiset, InstanceError, Label, MetricInstance, Violation, Weight};
use crate::matching::MatchingError;
use crate::postperson::{DrppBackend, DrppCaps, DrppError};

pub use alignment::{alignment_diagnostics, parity_lemma_check, AlignmentEdge, AlignmentGraph};
pub use baseline::{depot_tour, solve_rpp_baseline, DepotTour, DepotTourMethod};
pub use christofides::{solve_graphic, solve_md_christofides};
pub use extended::solve_extended;
pub use oracle::{oracle_opt, OracleCap, OracleSolution};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("the graphic algorithm needs a unit-weight graph instance")]
    NotGraphic,
    #[error("oracle limit exceeded: n = {n}, d = {d} (limit n <= {max_nodes}, d <= {max_depots})")]
    OracleCap {
        n: usize,
        d: usize,
        max_nodes: usize,
        max_depots: usize,
    },
    #[error("tour does not split into subtours with one depot each: {0}")]
    NotDecomposable(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("produced an invalid tour: {0:?}")]
    InvalidTour(Vec<Violation>),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Drpp(#[from] DrppError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    ChristofidesMd,
    Extended,
    RppBaseline,
    Graphic,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::ChristofidesMd,
        Algorithm::Extended,
        Algorithm::RppBaseline,
        Algorithm::Graphic,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ChristofidesMd => "christofides-md",
            Algorithm::Extended => "extended",
            Algorithm::RppBaseline => "rpp-baseline",
            Algorithm::Graphic => "graphic",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Parameters that shaped a run, as recorded in solution files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveParams {
    #[serde(with = "crate::rational::opt_text", skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<Weight>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub backend: Option<DrppBackend>,
}

impl fmt::Display for SolveParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(e) = self.epsilon {
            parts.push(format!("epsilon={}", crate::rational::format_weight(e)));
        }
        if let Some(b) = self.backend {
            parts.push(format!("backend={b}"));
        }
        f.write_str(&parts.join(";"))
    }
}

/// Evidence behind a result. Nodes are given by their labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Certificate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest: Option<Vec<(Label, Label)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd_nodes: Option<Vec<Label>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heavy_edges: Option<Vec<(Label, Label)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed: Option<Vec<(Label, Label)>>,
    #[serde(with = "crate::rational::opt_text", skip_serializing_if = "Option::is_none")]
    pub completion_weight: Option<Weight>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsets_tried: Option<u64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub backend_fallback: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depot_tour_method: Option<DepotTourMethod>,
    #[serde(with = "crate::rational::opt_text", skip_serializing_if = "Option::is_none")]
    pub depot_tour_weight: Option<Weight>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub active_depots: Option<Vec<Label>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idle_depots_as_customers: Option<bool>,
    pub probabilistic: bool,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub params: SolveParams,
    pub tour: EdgeMultiset,
    pub weight: Weight,
    pub certificate: Certificate,
    pub wall_time: Duration,
}

impl SolveReport {
    /// Validates `tour` and fills in its weight.
    pub(crate) fn checked(
        inst: &MetricInstance,
        algorithm: Algorithm,
        params: SolveParams,
        tour: EdgeMultiset,
        certificate: Certificate,
    ) -> Result<Self, SolverError> {
        validate_tour(inst, &tour).map_err(SolverError::InvalidTour)?;
        Ok(SolveReport {
            algorithm,
            params,
            weight: inst.weight_of(&tour),
            tour,
            certificate,
            wall_time: Duration::ZERO,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub algorithm: Algorithm,
    pub epsilon: Weight,
    pub backend: DrppBackend,
    pub caps: DrppCaps,
    pub oracle_cap: OracleCap,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            algorithm: Algorithm::ChristofidesMd,
            epsilon: Weight::new(1, 4),
            backend: DrppBackend::Exact,
            caps: DrppCaps::default(),
            oracle_cap: OracleCap::default(),
        }
    }
}

/// Runs the configured algorithm and records its wall time.
pub fn solve(inst: &MetricInstance, config: &SolveConfig) -> Result<SolveReport, SolverError> {
    let start = std::time::Instant::now();
    let mut report = match config.algorithm {
        Algorithm::ChristofidesMd => solve_md_christofides(inst),
        Algorithm::Extended => solve_extended(inst, config.epsilon, config.backend, &config.caps),
        Algorithm::RppBaseline => solve_rpp_baseline(inst),
        Algorithm::Graphic => solve_graphic(inst),
        Algorithm::Oracle => oracle_opt(inst, &config.oracle_cap).and_then(|o| o.into_report(inst)),
    }?;
    report.wall_time = start.elapsed();
    Ok(report)
}

pub(crate) fn edge_labels(inst: &MetricInstance, edges: impl IntoIterator<Item = crate::graph::Edge>) -> Vec<(Label, Label)> {
    edges
        .into_iter()
        .map(|e| (inst.label(e.u()).clone(), inst.label(e.v()).clone()))
        .collect()
}

pub(crate) fn node_labels(inst: &MetricInstance, nodes: impl IntoIterator<Item = crate::graph::Node>) -> Vec<Label> {
    nodes.into_iter().map(|v| inst.label(v).clone()).collect()
}
