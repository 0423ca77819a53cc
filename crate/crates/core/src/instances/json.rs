//! JSON instance and solution files.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::InstancesError;
use crate::graph::{build_instance, Edge, EdgeMultiset, Label, MetricInstance, Node, Origin, RawInstance, RawMetric, Weight};
use crate::rational::{format_weight, parse_weight, weight_from_f64};
use crate::solver::{Certificate, SolveParams, SolveReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MetricKind {
    Explicit,
    Euclid2d,
    Graph,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeEntry {
    Point { id: Label, x: f64, y: f64 },
    Plain(Label),
}

impl NodeEntry {
    fn label(&self) -> &Label {
        match self {
            NodeEntry::Point { id, .. } | NodeEntry::Plain(id) => id,
        }
    }
}

/// A weight as written in a file: integer, float or text (`p/q`, `0.9`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum WeightValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl WeightValue {
    fn resolve(&self) -> Result<Weight, InstancesError> {
        match self {
            WeightValue::Int(i) => Ok(Weight::from_integer(*i)),
            WeightValue::Float(x) => weight_from_f64(*x).ok_or_else(|| InstancesError::BadWeight(x.to_string())),
            WeightValue::Text(s) => parse_weight(s).ok_or_else(|| InstancesError::BadWeight(s.clone())),
        }
    }

    fn from_weight(w: Weight) -> Self {
        if w.is_integer() {
            WeightValue::Int(*w.numer())
        } else {
            WeightValue::Text(format_weight(w))
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct EdgeEntry {
    u: Label,
    v: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<WeightValue>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct InstanceFile {
    #[serde(default)]
    name: String,
    metric: MetricKind,
    nodes: Vec<NodeEntry>,
    depots: Vec<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<WeightValue>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<EdgeEntry>>,
}

fn index_of(index: &HashMap<Label, Node>, label: &Label) -> Result<Node, InstancesError> {
    index
        .get(label)
        .copied()
        .ok_or_else(|| InstancesError::UnknownLabel(label.clone()))
}

pub fn parse_instance_json(text: &str) -> Result<MetricInstance, InstancesError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let labels: Vec<Label> = file.nodes.iter().map(|e| e.label().clone()).collect();
    let index: HashMap<Label, Node> = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let depots = file
        .depots
        .iter()
        .map(|l| index_of(&index, l))
        .collect::<Result<Vec<_>, _>>()?;
    let metric = match file.metric {
        MetricKind::Explicit => {
            let rows = file.matrix.ok_or(InstancesError::MissingField("matrix"))?;
            RawMetric::Matrix(
                rows.iter()
                    .map(|r| r.iter().map(WeightValue::resolve).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
        MetricKind::Euclid2d => RawMetric::Points(
            file.nodes
                .iter()
                .map(|e| match e {
                    NodeEntry::Point { x, y, .. } => Ok((*x, *y)),
                    NodeEntry::Plain(l) => Err(InstancesError::MissingCoordinates(l.clone())),
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        MetricKind::Graph => {
            let edges = file.edges.ok_or(InstancesError::MissingField("edges"))?;
            RawMetric::Graph(
                edges
                    .iter()
                    .map(|e| {
                        let w = e.w.as_ref().map(WeightValue::resolve).transpose()?;
                        Ok((index_of(&index, &e.u)?, index_of(&index, &e.v)?, w))
                    })
                    .collect::<Result<Vec<_>, InstancesError>>()?,
            )
        }
    };
    Ok(build_instance(RawInstance {
        name: file.name,
        labels,
        depots,
        metric,
    })?)
}

/// Pretty JSON with a trailing newline; parsing it back gives an equal
/// instance.
pub fn serialize_instance_json(inst: &MetricInstance) -> String {
    let labels = inst.labels();
    let depots = inst.depots().iter().map(|&d| labels[d].clone()).collect();
    let plain = || labels.iter().cloned().map(NodeEntry::Plain).collect();
    let file = match inst.origin() {
        Origin::Explicit => InstanceFile {
            name: inst.name().to_string(),
            metric: MetricKind::Explicit,
            nodes: plain(),
            depots,
            matrix: Some(
                (0..inst.n())
                    .map(|u| (0..inst.n()).map(|v| WeightValue::from_weight(inst.dist(u, v))).collect())
                    .collect(),
            ),
            edges: None,
        },
        Origin::Euclid2d { coords } => InstanceFile {
            name: inst.name().to_string(),
            metric: MetricKind::Euclid2d,
            nodes: labels
                .iter()
                .zip(coords)
                .map(|(l, &(x, y))| NodeEntry::Point { id: l.clone(), x, y })
                .collect(),
            depots,
            matrix: None,
            edges: None,
        },
        Origin::Graph { edges, unit } => InstanceFile {
            name: inst.name().to_string(),
            metric: MetricKind::Graph,
            nodes: plain(),
            depots,
            matrix: None,
            edges: Some(
                edges
                    .iter()
                    .map(|&(u, v, w)| EdgeEntry {
                        u: labels[u].clone(),
                        v: labels[v].clone(),
                        w: (!unit).then(|| WeightValue::from_weight(w)),
                    })
                    .collect(),
            ),
        },
    };
    let mut out = serde_json::to_string_pretty(&file).expect("instance serializes");
    out.push('\n');
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionEdge {
    pub u: Label,
    pub v: Label,
    pub mult: u32,
}

/// Solution file contents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub algorithm: String,
    #[serde(default)]
    pub params: SolveParams,
    #[serde(with = "crate::rational::as_text")]
    pub weight: Weight,
    pub edges: Vec<SolutionEdge>,
    #[serde(default)]
    pub certificate: Certificate,
}

impl SolutionFile {
    pub fn from_report(inst: &MetricInstance, report: &SolveReport) -> Self {
        SolutionFile {
            algorithm: report.algorithm.to_string(),
            params: report.params.clone(),
            weight: report.weight,
            edges: report
                .tour
                .iter()
                .map(|(e, mult)| SolutionEdge {
                    u: inst.label(e.u()).clone(),
                    v: inst.label(e.v()).clone(),
                    mult,
                })
                .collect(),
            certificate: report.certificate.clone(),
        }
    }

    /// The edge multiset over `inst`'s nodes.
    pub fn tour(&self, inst: &MetricInstance) -> Result<EdgeMultiset, InstancesError> {
        let mut tour = EdgeMultiset::new();
        for e in &self.edges {
            let u = inst.node_of(&e.u).ok_or_else(|| InstancesError::UnknownLabel(e.u.clone()))?;
            let v = inst.node_of(&e.v).ok_or_else(|| InstancesError::UnknownLabel(e.v.clone()))?;
            if u == v {
                return Err(InstancesError::SelfLoop(e.u.clone()));
            }
            tour.add_copies(Edge::new(u, v), e.mult);
        }
        Ok(tour)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("solution serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, InstancesError> {
        Ok(serde_json::from_str(text)?)
    }
}
