//! Weight reduction to a polynomially bounded range, and the wrapper that
//! guesses the heaviest edge `beta` of an optimal completion.

use std::collections::BTreeMap;

use num_traits::Signed;

use super::{drpp_exact_with_costs, CostTable, DrppCaps, DrppError, DrppInstance};
use crate::graph::{Edge, EdgeMultiset, MetricInstance, Weight};

/// Floored weights `w' = floor(w · 2|E| / (ε β))` over a retained edge set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedWeights {
    pub beta: i64,
    pub epsilon: Weight,
    pub weights: BTreeMap<Edge, i64>,
}

impl ReducedWeights {
    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// Upper bound `2|E|/ε` on any reduced weight.
    pub fn cap(&self) -> Weight {
        Weight::from_integer(2 * self.edge_count() as i64) / self.epsilon
    }

    /// The unit `εβ / 2|E|` that maps reduced weights back to original ones.
    pub fn unit(&self) -> Weight {
        self.epsilon * self.beta / Weight::from_integer(2 * self.edge_count() as i64)
    }

    /// Reduced weight of `j`, or `None` if it uses an edge outside the set.
    pub fn weight_of(&self, j: &EdgeMultiset) -> Option<i64> {
        j.iter()
            .map(|(e, m)| self.weights.get(&e).map(|&w| w * m as i64))
            .sum()
    }
}

/// All node pairs whose distance is at most `beta`, with scaled weights.
pub fn retained_edges(inst: &MetricInstance, beta: i64) -> BTreeMap<Edge, i64> {
    let n = inst.n();
    let mut out = BTreeMap::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = inst.sdist(u, v);
            if w <= beta {
                out.insert(Edge::new(u, v), w);
            }
        }
    }
    out
}

pub fn reduce_weights(
    edges: &BTreeMap<Edge, i64>,
    epsilon: Weight,
    beta: i64,
) -> Result<ReducedWeights, DrppError> {
    if !epsilon.is_positive() {
        return Err(DrppError::NonPositiveEpsilon);
    }
    if beta <= 0 {
        return Err(DrppError::NonPositiveBeta);
    }
    if let Some((e, _)) = edges.iter().find(|&(_, &w)| w > beta) {
        return Err(DrppError::EdgeAboveBeta(e.u(), e.v()));
    }
    let mult = 2 * edges.len() as i128 * *epsilon.denom() as i128;
    let div = *epsilon.numer() as i128 * beta as i128;
    let weights = edges
        .iter()
        .map(|(&e, &w)| (e, (w as i128 * mult).div_euclid(div) as i64))
        .collect();
    Ok(ReducedWeights {
        beta,
        epsilon,
        weights,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSolution {
    pub j: EdgeMultiset,
    pub beta: i64,
    pub scaled_weight: i64,
}

/// Solves the instance exactly under reduced weights for every candidate
/// `beta` and keeps the completion that is lightest under the true weights.
pub fn drpp_weight_reduced(
    inst: &DrppInstance<'_>,
    epsilon: Weight,
    caps: &DrppCaps,
) -> Result<ReducedSolution, DrppError> {
    if !epsilon.is_positive() {
        return Err(DrppError::NonPositiveEpsilon);
    }
    let base = inst.base();
    let n = base.n();
    let floor = inst
        .required()
        .distinct_edges()
        .map(|e| base.sdist(e.u(), e.v()))
        .max()
        .unwrap_or(0)
        .max(1);
    let mut betas: Vec<i64> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| base.sdist(u, v)))
        .filter(|&w| w >= floor)
        .collect();
    betas.sort_unstable();
    betas.dedup();

    let mut best: Option<ReducedSolution> = None;
    let tried = betas.len();
    for beta in betas {
        let reduced = reduce_weights(&retained_edges(base, beta), epsilon, beta)?;
        let costs = CostTable::from_edges(n, reduced.weights.iter().map(|(&e, &w)| (e, w)));
        let Some((j, _)) = drpp_exact_with_costs(inst, &costs, caps, None)? else {
            continue;
        };
        let w = base.scaled_weight_of(&j);
        if best.as_ref().is_none_or(|b| w < b.scaled_weight) {
            best = Some(ReducedSolution {
                j,
                beta,
                scaled_weight: w,
            });
        }
    }
    if best.is_none() && tried == 0 {
        // every distance is zero, so nothing needs reducing
        let costs = CostTable::from_instance(base);
        if let Some((j, w)) = drpp_exact_with_costs(inst, &costs, caps, None)? {
            best = Some(ReducedSolution {
                j,
                beta: 0,
                scaled_weight: w,
            });
        }
    }
    best.ok_or(DrppError::Infeasible)
}
