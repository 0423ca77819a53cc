//! Reader for the TSPLIB subset with `EDGE_WEIGHT_TYPE: EUC_2D` and a
//! `DEPOT_SECTION` terminated by `-1`.

use std::collections::HashMap;

use super::InstancesError;
use crate::graph::{build_instance, Label, MetricInstance, Node, RawInstance, RawMetric};

fn err(line: usize, message: impl Into<String>) -> InstancesError {
    InstancesError::Tsplib {
        line,
        message: message.into(),
    }
}

enum Section {
    Header,
    Coords,
    Depots,
    Done,
}

pub fn parse_tsplib(text: &str) -> Result<MetricInstance, InstancesError> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut labels: Vec<Label> = Vec::new();
    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut depot_ids: Vec<(usize, i64)> = Vec::new();
    let mut section = Section::Header;
    let mut depot_start = 0;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match section {
            Section::Header | Section::Coords if line == "NODE_COORD_SECTION" => {
                if weight_type.as_deref() != Some("EUC_2D") {
                    return Err(err(line_no, "EDGE_WEIGHT_TYPE must be EUC_2D before NODE_COORD_SECTION"));
                }
                section = Section::Coords;
            }
            Section::Header | Section::Coords if line == "DEPOT_SECTION" => {
                section = Section::Depots;
                depot_start = line_no;
            }
            _ if line == "EOF" => {
                if matches!(section, Section::Depots) {
                    return Err(err(line_no, "DEPOT_SECTION is not terminated by -1"));
                }
                break;
            }
            Section::Header => {
                let (key, value) = line
                    .split_once(':')
                    .ok_or_else(|| err(line_no, format!("expected `KEY : value`, found `{line}`")))?;
                let value = value.trim();
                match key.trim() {
                    "NAME" => name = value.to_string(),
                    "DIMENSION" => {
                        dimension = Some(value.parse().map_err(|_| err(line_no, "DIMENSION is not a number"))?)
                    }
                    "EDGE_WEIGHT_TYPE" => {
                        if value != "EUC_2D" {
                            return Err(err(line_no, format!("unsupported EDGE_WEIGHT_TYPE {value}")));
                        }
                        weight_type = Some(value.to_string());
                    }
                    "TYPE" | "COMMENT" => {}
                    other => return Err(err(line_no, format!("unsupported keyword {other}"))),
                }
            }
            Section::Coords => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(err(line_no, "coordinate line needs `id x y`"));
                }
                let id: i64 = parts[0].parse().map_err(|_| err(line_no, "node id is not an integer"))?;
                let x: f64 = parts[1].parse().map_err(|_| err(line_no, "x is not a number"))?;
                let y: f64 = parts[2].parse().map_err(|_| err(line_no, "y is not a number"))?;
                labels.push(Label::Int(id));
                coords.push((x, y));
            }
            Section::Depots => {
                for tok in line.split_whitespace() {
                    let id: i64 = tok.parse().map_err(|_| err(line_no, "depot id is not an integer"))?;
                    if id == -1 {
                        section = Section::Done;
                        break;
                    }
                    depot_ids.push((line_no, id));
                }
            }
            Section::Done => return Err(err(line_no, format!("unexpected content after DEPOT_SECTION: `{line}`"))),
        }
    }
    match section {
        Section::Depots => return Err(err(last_line.max(depot_start), "DEPOT_SECTION is not terminated by -1")),
        Section::Done => {}
        _ => return Err(err(last_line, "missing DEPOT_SECTION")),
    }
    if let Some(dim) = dimension {
        if dim != labels.len() {
            return Err(err(
                last_line,
                format!("DIMENSION is {dim} but {} coordinates were given", labels.len()),
            ));
        }
    }
    let index: HashMap<Label, Node> = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let depots = depot_ids
        .iter()
        .map(|&(line, id)| {
            index
                .get(&Label::Int(id))
                .copied()
                .ok_or_else(|| err(line, format!("depot {id} is not a node")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build_instance(RawInstance {
        name,
        labels,
        depots,
        metric: RawMetric::Points(coords),
    })?)
}
