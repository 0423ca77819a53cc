use super::{edge_labels, node_labels, Algorithm, Certificate, SolveParams, SolveReport, SolverError};
use crate::forest::{min_csf, min_csf_within, Forest};
use crate::graph::{odd_degree_nodes, EdgeMultiset, MetricInstance, Node};
use crate::matching::min_perfect_matching;

/// Minimum constrained spanning forest plus a minimum perfect matching on
/// its odd-degree nodes.
pub fn solve_md_christofides(inst: &MetricInstance) -> Result<SolveReport, SolverError> {
    let forest = min_csf(inst, inst.depots())?;
    let (tour, odd) = forest_plus_matching(inst, &forest)?;
    let certificate = Certificate {
        forest: Some(edge_labels(inst, forest.edges().iter().copied())),
        odd_nodes: Some(node_labels(inst, odd)),
        ..Certificate::default()
    };
    SolveReport::checked(inst, Algorithm::ChristofidesMd, SolveParams::default(), tour, certificate)
}

fn forest_plus_matching(inst: &MetricInstance, forest: &Forest) -> Result<(EdgeMultiset, Vec<Node>), SolverError> {
    let mut tour = forest.to_multiset();
    let odd = odd_degree_nodes(&tour);
    let m = min_perfect_matching(inst, &odd)?;
    tour.extend_from(&m.to_multiset());
    Ok((tour, odd))
}

/// Unit-weight graphs: guess the set of depots that actually leave home and
/// run the forest-plus-matching algorithm for it. Idle depots are tried both
/// left out of the forest and kept as ordinary cities. The tour is expanded
/// to edges of the source graph, so its weight is its edge count.
pub fn solve_graphic(inst: &MetricInstance) -> Result<SolveReport, SolverError> {
    if !inst.is_graphic() {
        return Err(SolverError::NotGraphic);
    }
    let depots = inst.depots();
    let d = depots.len();
    let mut subsets: Vec<Vec<Node>> = (1u64..1 << d)
        .map(|mask| (0..d).filter(|i| mask >> i & 1 == 1).map(|i| depots[i]).collect())
        .collect();
    subsets.sort();

    let mut best: Option<(i64, EdgeMultiset, Vec<Node>, bool)> = None;
    for active in subsets {
        let idle: Vec<Node> = depots.iter().copied().filter(|v| !active.contains(v)).collect();
        let kept: Vec<Node> = (0..inst.n()).filter(|v| !idle.contains(v)).collect();
        let without = min_csf_within(inst, &active, &kept)?;
        let restricted = inst.with_depots(&active)?;
        let with = min_csf(&restricted, &active)?;
        for (forest, as_customers) in [(without, false), (with, true)] {
            let (tour, _) = forest_plus_matching(inst, &forest)?;
            let tour = inst.expand_to_source(&tour);
            let w = inst.scaled_weight_of(&tour);
            if best.as_ref().is_none_or(|b| w < b.0) {
                best = Some((w, tour, active.clone(), as_customers));
            }
        }
    }
    let (_, tour, active, as_customers) = best.expect("at least one depot");
    let certificate = Certificate {
        active_depots: Some(node_labels(inst, active)),
        idle_depots_as_customers: Some(as_customers),
        ..Certificate::default()
    };
    SolveReport::checked(inst, Algorithm::Graphic, SolveParams::default(), tour, certificate)
}
