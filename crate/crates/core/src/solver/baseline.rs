use serde::{Deserialize, Serialize};

use super::oracle::{cycle_edges, HeldKarp};
use super::{Algorithm, Certificate, SolveParams, SolveReport, SolverError};
use crate::graph::{eulerian_circuits, odd_degree_nodes, shortcut_cycles, Edge, EdgeMultiset, MetricInstance, Node};
use crate::matching::min_perfect_matching;

/// Largest depot count for which the depot tour is computed exactly.
const EXACT_DEPOT_TOUR: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepotTourMethod {
    /// A single depot needs no tour.
    Trivial,
    HeldKarp,
    DoubleMst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepotTour {
    pub method: DepotTourMethod,
    pub edges: EdgeMultiset,
    pub scaled_weight: i64,
}

/// A closed walk through all depots: optimal up to fifteen depots, a
/// shortcut doubled spanning tree beyond.
pub fn depot_tour(inst: &MetricInstance) -> DepotTour {
    let depots = inst.depots();
    let (method, edges) = match depots.len() {
        1 => (DepotTourMethod::Trivial, EdgeMultiset::new()),
        d if d <= EXACT_DEPOT_TOUR => {
            let hk = HeldKarp::new(inst, depots[0], &depots[1..]);
            let order = hk.cycle_order((1 << (d - 1)) - 1);
            (DepotTourMethod::HeldKarp, cycle_edges(depots[0], &order))
        }
        _ => {
            let mut doubled = EdgeMultiset::new();
            for (_, u, v) in prim(depots.len(), 0, |i, j| (inst.sdist(depots[i], depots[j]), depots[i], depots[j])) {
                doubled.add_copies(Edge::new(u, v), 2);
            }
            let walks = eulerian_circuits(&doubled).expect("doubled tree is Eulerian");
            (DepotTourMethod::DoubleMst, shortcut_cycles(&walks))
        }
    };
    let scaled_weight = inst.scaled_weight_of(&edges);
    DepotTour {
        method,
        edges,
        scaled_weight,
    }
}

/// Rural-postperson baseline. With a closed walk `S` through all depots
/// required, every city becomes a component of its own; a minimum spanning
/// tree over these components plus a `T`-join on its odd nodes completes
/// the instance. The completion alone is a valid tour, since every tree
/// hangs off some depot, and it weighs at most `3/2·OPT + 1/2·w(S)`.
pub fn solve_rpp_baseline(inst: &MetricInstance) -> Result<SolveReport, SolverError> {
    let s = depot_tour(inst);
    let depots = inst.depots();
    let customers: Vec<Node> = inst.customers().collect();

    // component 0 is the depot walk, component i + 1 is customer i
    let link = |a: usize, b: usize| -> (i64, Node, Node) {
        let (a, b) = (a.min(b), a.max(b));
        let v = customers[b - 1];
        if a == 0 {
            depots
                .iter()
                .map(|&p| (inst.sdist(p, v), p, v))
                .min()
                .expect("at least one depot")
        } else {
            let u = customers[a - 1];
            (inst.sdist(u, v), u, v)
        }
    };
    let mut j = EdgeMultiset::new();
    for (_, u, v) in prim(customers.len() + 1, 0, link) {
        j.add_copies(Edge::new(u, v), 1);
    }
    let m = min_perfect_matching(inst, &odd_degree_nodes(&j))?;
    j.extend_from(&m.to_multiset());

    let certificate = Certificate {
        depot_tour_method: Some(s.method),
        depot_tour_weight: Some(inst.to_weight(s.scaled_weight)),
        completion_weight: Some(inst.weight_of(&j)),
        ..Certificate::default()
    };
    SolveReport::checked(inst, Algorithm::RppBaseline, SolveParams::default(), j, certificate)
}

/// Prim's algorithm on a complete graph over `0..k`; returns the chosen
/// links. Ties go to the smallest `(cost, vertex)`.
fn prim<F>(k: usize, start: usize, link: F) -> Vec<(i64, Node, Node)>
where
    F: Fn(usize, usize) -> (i64, Node, Node),
{
    let mut in_tree = vec![false; k];
    let mut best: Vec<Option<(i64, Node, Node)>> = vec![None; k];
    in_tree[start] = true;
    for (v, slot) in best.iter_mut().enumerate() {
        if v != start {
            *slot = Some(link(start, v));
        }
    }
    let mut out = Vec::with_capacity(k.saturating_sub(1));
    for _ in 1..k {
        let next = (0..k)
            .filter(|&v| !in_tree[v])
            .min_by_key(|&v| (best[v].expect("candidate").0, v))
            .expect("vertices remain");
        in_tree[next] = true;
        out.push(best[next].expect("candidate"));
        for v in 0..k {
            if !in_tree[v] {
                let l = link(next, v);
                if l.0 < best[v].expect("candidate").0 {
                    best[v] = Some(l);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_instance, Label, RawInstance, RawMetric, Weight};

    fn points(xs: &[(f64, f64)], depots: Vec<Node>) -> MetricInstance {
        build_instance(RawInstance {
            name: String::new(),
            labels: (0..xs.len()).map(Label::from).collect(),
            depots,
            metric: RawMetric::Points(xs.to_vec()),
        })
        .unwrap()
    }

    #[test]
    fn path_baseline_within_bound() {
        let inst = points(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)], vec![0, 3]);
        let r = solve_rpp_baseline(&inst).unwrap();
        assert_eq!(r.certificate.depot_tour_weight, Some(Weight::from_integer(6)));
        assert!(r.weight <= Weight::from_integer(9));
    }

    #[test]
    fn single_depot_has_trivial_walk() {
        let inst = points(&[(0.0, 0.0), (3.0, 4.0)], vec![0]);
        let s = depot_tour(&inst);
        assert_eq!(s.method, DepotTourMethod::Trivial);
        let r = solve_rpp_baseline(&inst).unwrap();
        assert_eq!(r.weight, Weight::from_integer(10));
    }

    #[test]
    fn many_depots_use_doubled_tree() {
        let xs: Vec<(f64, f64)> = (0..17).map(|i| (i as f64, 0.0)).collect();
        let inst = points(&xs, (0..16).collect());
        let s = depot_tour(&inst);
        assert_eq!(s.method, DepotTourMethod::DoubleMst);
        assert_eq!(s.scaled_weight, 30);
        let exact = points(&xs[..5], (0..4).collect());
        let s = depot_tour(&exact);
        assert_eq!(s.method, DepotTourMethod::HeldKarp);
        assert_eq!(s.scaled_weight, 6);
    }
}
