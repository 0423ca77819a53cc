use super::{edge_labels, node_labels, Algorithm, Certificate, SolveParams, SolveReport, SolverError};
use crate::forest::{classify_edges, min_csf};
use crate::graph::{odd_degree_nodes, validate_tour, Edge, EdgeMultiset, MetricInstance, Weight};
use crate::postperson::{
    drpp_connect_join, drpp_exact_with_costs, CostTable, DrppBackend, DrppCaps, DrppError, DrppInstance,
};

/// Starts from the doubled forest, then for every set `X` of at most `d`
/// heavy forest edges completes `F \ X` by a postperson solution that must
/// reach every city, keeping the lightest tour.
///
/// When the exact backend exceeds its limits on some `X`, that subset is
/// completed by connect-join instead and the certificate says so.
pub fn solve_extended(
    inst: &MetricInstance,
    epsilon: Weight,
    backend: DrppBackend,
    caps: &DrppCaps,
) -> Result<SolveReport, SolverError> {
    if epsilon <= Weight::from_integer(0) {
        return Err(SolverError::NonPositiveEpsilon);
    }
    let forest = min_csf(inst, inst.depots())?;
    let class = classify_edges(inst, &forest, epsilon)?;
    let heavy = class.heavy;
    let costs = CostTable::from_instance(inst);

    let mut best = forest.to_multiset();
    best.extend_from(&forest.to_multiset());
    let mut best_w = 2 * forest.scaled_weight();
    let mut best_x: Option<Vec<Edge>> = None;
    let mut best_j: Option<i64> = None;
    let mut tried = 0u64;
    let mut fallback = false;

    let max_size = inst.d().min(heavy.len());
    for size in 0..=max_size {
        for pick in Combinations::new(heavy.len(), size) {
            tried += 1;
            let removed: Vec<Edge> = pick.iter().map(|&i| heavy[i]).collect();
            let kept: EdgeMultiset = forest.edges().iter().copied().filter(|e| !removed.contains(e)).collect();
            let kept_w = inst.scaled_weight_of(&kept);
            let drpp = DrppInstance::new(inst, kept.clone(), true)?;
            let budget = best_w - kept_w;

            let completion = match backend {
                DrppBackend::Exact => match drpp_exact_with_costs(&drpp, &costs, caps, Some(budget)) {
                    Ok(found) => found.map(|(j, _)| j),
                    Err(DrppError::ExactCap(_)) => {
                        fallback = true;
                        Some(drpp_connect_join(&drpp, caps)?)
                    }
                    Err(e) => return Err(e.into()),
                },
                DrppBackend::ConnectJoin => Some(drpp_connect_join(&drpp, caps)?),
            };
            let Some(j) = completion else { continue };
            let mut tour = kept;
            tour.extend_from(&j);
            let w = inst.scaled_weight_of(&tour);
            if w < best_w && validate_tour(inst, &tour).is_ok() {
                best_w = w;
                best = tour;
                best_x = Some(removed);
                best_j = Some(inst.scaled_weight_of(&j));
            }
        }
    }

    let certificate = Certificate {
        forest: Some(edge_labels(inst, forest.edges().iter().copied())),
        odd_nodes: Some(node_labels(inst, odd_degree_nodes(&forest.to_multiset()))),
        heavy_edges: Some(edge_labels(inst, heavy.iter().copied())),
        removed: best_x.map(|x| edge_labels(inst, x)),
        completion_weight: best_j.map(|j| inst.to_weight(j)),
        subsets_tried: Some(tried),
        backend_fallback: fallback,
        ..Certificate::default()
    };
    let params = SolveParams {
        epsilon: Some(epsilon),
        backend: Some(backend),
    };
    SolveReport::checked(inst, Algorithm::Extended, params, best, certificate)
}

/// `k`-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
