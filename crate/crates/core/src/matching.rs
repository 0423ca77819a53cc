//! Exact minimum-weight perfect matching and T-joins on the metric.
//!
//! The matching itself runs Edmonds' weighted blossom algorithm from the
//! `mwmatching` crate on complemented weights with maximum cardinality, which
//! turns a maximum-weight matching into a minimum-weight perfect one.

use thiserror::Error;

use crate::graph::{Edge, EdgeMultiset, MetricInstance, Node, Weight};

/// Largest scaled distance the blossom backend accepts (it works on `i32`
/// with doubled dual variables).
pub const MAX_MATCHING_WEIGHT: i64 = 1 << 28;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("cannot perfectly match an odd number ({0}) of nodes")]
    OddCount(usize),
    #[error("node {0} listed twice")]
    Duplicate(Node),
    #[error("scaled distance {0} exceeds the matching backend range")]
    WeightRange(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(Node, Node)>,
    pub scaled_weight: i64,
}

impl Matching {
    pub fn weight(&self, inst: &MetricInstance) -> Weight {
        inst.to_weight(self.scaled_weight)
    }

    pub fn to_multiset(&self) -> EdgeMultiset {
        self.pairs.iter().copied().collect()
    }
}

/// Minimum-weight perfect matching of the complete graph on `nodes`.
pub fn min_perfect_matching(inst: &MetricInstance, nodes: &[Node]) -> Result<Matching, MatchingError> {
    min_perfect_matching_by(nodes, |u, v| inst.sdist(u, v))
}

/// Same as [`min_perfect_matching`] for an arbitrary symmetric cost.
pub fn min_perfect_matching_by(
    nodes: &[Node],
    cost: impl Fn(Node, Node) -> i64,
) -> Result<Matching, MatchingError> {
    let mut nodes = nodes.to_vec();
    nodes.sort_unstable();
    if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
        return Err(MatchingError::Duplicate(w[0]));
    }
    let k = nodes.len();
    if k % 2 == 1 {
        return Err(MatchingError::OddCount(k));
    }
    match k {
        0 => {
            return Ok(Matching {
                pairs: vec![],
                scaled_weight: 0,
            })
        }
        2 => {
            return Ok(Matching {
                pairs: vec![(nodes[0], nodes[1])],
                scaled_weight: cost(nodes[0], nodes[1]),
            })
        }
        _ => {}
    }

    let mut max_w = 0i64;
    let mut costs = vec![0i64; k * k];
    for i in 0..k {
        for j in i + 1..k {
            let c = cost(nodes[i], nodes[j]);
            if !(0..=MAX_MATCHING_WEIGHT).contains(&c) {
                return Err(MatchingError::WeightRange(c));
            }
            costs[i * k + j] = c;
            max_w = max_w.max(c);
        }
    }
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            edges.push((i, j, (max_w + 1 - costs[i * k + j]) as i32));
        }
    }
    let mate = mwmatching::Matching::new(edges).max_cardinality().solve();

    let mut pairs = Vec::with_capacity(k / 2);
    let mut scaled_weight = 0;
    for (i, &j) in mate.iter().enumerate() {
        debug_assert!(j != mwmatching::SENTINEL, "complete graph has a perfect matching");
        if i < j {
            pairs.push((nodes[i], nodes[j]));
            scaled_weight += costs[i * k + j];
        }
    }
    Ok(Matching { pairs, scaled_weight })
}

/// Minimum-weight `T`-join: a perfect matching on `terminals`, each pair
/// expanded to its shortest source-graph path when the instance keeps one.
/// The join weighs exactly as much as the matching.
pub fn min_t_join(inst: &MetricInstance, terminals: &[Node]) -> Result<EdgeMultiset, MatchingError> {
    let m = min_perfect_matching(inst, terminals)?;
    let mut join = EdgeMultiset::new();
    for &(u, v) in &m.pairs {
        for hop in inst.shortest_path(u, v).windows(2) {
            join.add_copies(Edge::new(hop[0], hop[1]), 1);
        }
    }
    Ok(join)
}
