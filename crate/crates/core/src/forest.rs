//! Constrained spanning forests: every tree holds at least one depot.

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::graph::{components, validate_tour, Edge, EdgeMultiset, MetricInstance, Node, Weight};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForestError {
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("depot subset is empty")]
    NoDepots,
    #[error("edge ({0},{1}) is not in the forest")]
    NotInForest(Node, Node),
    #[error("the supplied tour is not valid")]
    InvalidTour,
    #[error("edge set is not a constrained spanning forest")]
    NotCsf,
    #[error("exchange produced weight {got} above the tour weight {bound}")]
    WeightBound { got: Weight, bound: Weight },
}

/// An acyclic edge set whose trees each contain a depot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    edges: Vec<Edge>,
    depots: Vec<Node>,
    scaled_weight: i64,
}

impl Forest {
    /// Validates `edges` as a constrained spanning forest over `nodes` for
    /// the depot set `depots`.
    pub fn from_edges(
        inst: &MetricInstance,
        depots: &[Node],
        nodes: &[Node],
        mut edges: Vec<Edge>,
    ) -> Result<Forest, ForestError> {
        if !is_csf(inst.n(), depots, nodes, &edges) {
            return Err(ForestError::NotCsf);
        }
        edges.sort_unstable();
        let scaled_weight = edges.iter().map(|e| inst.sdist(e.u(), e.v())).sum();
        let mut depots = depots.to_vec();
        depots.sort_unstable();
        Ok(Forest {
            edges,
            depots,
            scaled_weight,
        })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn depots(&self) -> &[Node] {
        &self.depots
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn scaled_weight(&self) -> i64 {
        self.scaled_weight
    }

    pub fn weight(&self, inst: &MetricInstance) -> Weight {
        inst.to_weight(self.scaled_weight)
    }

    pub fn to_multiset(&self) -> EdgeMultiset {
        self.edges.iter().copied().collect()
    }

    /// Node sets of the trees, each paired with the depots it contains.
    pub fn component_depots(&self, n: usize) -> Vec<(Vec<Node>, Vec<Node>)> {
        components(&self.to_multiset(), n)
            .into_iter()
            .map(|comp| {
                let ds = comp.iter().copied().filter(|v| self.depots.binary_search(v).is_ok()).collect();
                (comp, ds)
            })
            .collect()
    }
}

/// True iff `edges` is acyclic over `nodes` and each tree touching `nodes`
/// contains a depot. Nodes outside `nodes` must not be touched.
pub fn is_csf(n: usize, depots: &[Node], nodes: &[Node], edges: &[Edge]) -> bool {
    let mut inside = vec![false; n];
    for &v in nodes {
        inside[v] = true;
    }
    let mut uf = UnionFind::<usize>::new(n);
    for e in edges {
        if !inside[e.u()] || !inside[e.v()] || !uf.union(e.u(), e.v()) {
            return false;
        }
    }
    let mut has_depot = vec![false; n];
    for &d in depots {
        if d < n && inside[d] {
            has_depot[uf.find(d)] = true;
        }
    }
    nodes.iter().all(|&v| has_depot[uf.find(v)])
}

/// Minimum-weight constrained spanning forest for the depot subset `depots`
/// over all nodes of the instance.
pub fn min_csf(inst: &MetricInstance, depots: &[Node]) -> Result<Forest, ForestError> {
    let nodes: Vec<Node> = (0..inst.n()).collect();
    min_csf_within(inst, depots, &nodes)
}

/// Minimum-weight constrained spanning forest restricted to `nodes`.
///
/// A virtual root is joined to every depot by an edge strictly lighter than
/// every real edge; Kruskal then takes all root edges first and the root is
/// dropped afterwards. Ties break on `(weight, u, v)`.
pub fn min_csf_within(inst: &MetricInstance, depots: &[Node], nodes: &[Node]) -> Result<Forest, ForestError> {
    if depots.is_empty() {
        return Err(ForestError::NoDepots);
    }
    let n = inst.n();
    let root = n;
    let mut nodes = nodes.to_vec();
    nodes.sort_unstable();
    nodes.dedup();

    let mut candidates: Vec<(i64, Node, Node)> = Vec::with_capacity(nodes.len() * nodes.len() / 2 + depots.len());
    let mut min_real = 0i64;
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            let w = inst.sdist(u, v);
            min_real = if candidates.is_empty() { w } else { min_real.min(w) };
            candidates.push((w, u, v));
        }
    }
    let root_weight = min_real - 1;
    candidates.extend(depots.iter().map(|&d| (root_weight, d, root)));
    candidates.sort_unstable();

    let mut uf = UnionFind::<usize>::new(n + 1);
    let mut edges = Vec::new();
    for (_, u, v) in candidates {
        if uf.union(u, v) && v != root {
            edges.push(Edge::new(u, v));
        }
    }
    Forest::from_edges(inst, depots, &nodes, edges)
}

/// Split of a forest into ε-light and ε-heavy edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeWeightClass {
    /// `(ε / d) · w(F)`.
    pub threshold: Weight,
    pub light: Vec<Edge>,
    pub heavy: Vec<Edge>,
}

/// An edge is light iff `w(e) ≤ (ε/d)·w(F)`, with `d` the number of depots
/// the forest was built for.
pub fn classify_edges(inst: &MetricInstance, forest: &Forest, epsilon: Weight) -> Result<EdgeWeightClass, ForestError> {
    if epsilon <= Weight::from_integer(0) {
        return Err(ForestError::NonPositiveEpsilon);
    }
    let d = forest.depots().len() as i128;
    let (num, den) = (*epsilon.numer() as i128, *epsilon.denom() as i128);
    let total = forest.scaled_weight() as i128;
    let mut light = Vec::new();
    let mut heavy = Vec::new();
    for &e in forest.edges() {
        // w(e) ≤ num·W / (den·d)
        if inst.sdist(e.u(), e.v()) as i128 * den * d <= num * total {
            light.push(e);
        } else {
            heavy.push(e);
        }
    }
    let threshold = epsilon / Weight::from_integer(d as i64) * forest.weight(inst);
    Ok(EdgeWeightClass { threshold, light, heavy })
}

/// Replacement edges `Â ⊆ E(T)` such that `(F \ X) ∪ Â` is a constrained
/// spanning forest no heavier than `T`.
///
/// Greedy completion: the forest `F \ X`, glued to a virtual root through
/// all depots, is extended by tour edges in increasing weight order. This is
/// the minimum-weight completion from a spanning forest of `T`, so the
/// multiple-exchange property of the graphic matroid bounds it by `w(T)` when
/// `F` is a minimum forest. The bound is re-checked before returning.
pub fn exchange_augment(
    inst: &MetricInstance,
    forest: &Forest,
    removed: &[Edge],
    tour: &EdgeMultiset,
) -> Result<Vec<Edge>, ForestError> {
    for &x in removed {
        if !forest.contains(x) {
            return Err(ForestError::NotInForest(x.u(), x.v()));
        }
    }
    validate_tour(inst, tour).map_err(|_| ForestError::InvalidTour)?;
    let n = inst.n();
    let root = n;
    let mut uf = UnionFind::<usize>::new(n + 1);
    for &d in inst.depots() {
        uf.union(d, root);
    }
    let mut kept = Vec::new();
    for &e in forest.edges() {
        if !removed.contains(&e) {
            uf.union(e.u(), e.v());
            kept.push(e);
        }
    }
    let mut tour_edges: Vec<(i64, Edge)> = tour.distinct_edges().map(|e| (inst.sdist(e.u(), e.v()), e)).collect();
    tour_edges.sort_unstable();
    let mut added = Vec::new();
    for (_, e) in tour_edges {
        if uf.union(e.u(), e.v()) {
            added.push(e);
        }
    }

    let mut result = kept;
    result.extend_from_slice(&added);
    let nodes: Vec<Node> = (0..n).collect();
    if !is_csf(n, inst.depots(), &nodes, &result) {
        return Err(ForestError::NotCsf);
    }
    let got: i64 = result.iter().map(|e| inst.sdist(e.u(), e.v())).sum();
    let bound = inst.scaled_weight_of(tour);
    if got > bound {
        return Err(ForestError::WeightBound {
            got: inst.to_weight(got),
            bound: inst.to_weight(bound),
        });
    }
    added.sort_unstable();
    Ok(added)
}
