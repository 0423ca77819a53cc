//! Depot rural postperson: complete a required edge multiset `R` with a
//! multiset `J` so that `R ⊎ J` is Eulerian and every component that needs
//! it contains a depot.
//!
//! Two deterministic backends are provided. [`drpp_exact`] is exact at desk
//! scale; [`drpp_connect_join`] enumerates depot assignments and connecting
//! trees and repairs parity with a matching.

mod connect_join;
mod exact;
mod reduce;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{components, odd_degree_nodes, Edge, EdgeMultiset, MetricInstance, Node};
use crate::matching::MatchingError;

pub use connect_join::{drpp_connect_join, drpp_star_baseline};
pub use exact::{drpp_exact, drpp_exact_on_edges};
pub(crate) use exact::drpp_exact_with_costs;
pub use reduce::{drpp_weight_reduced, reduce_weights, retained_edges, ReducedSolution, ReducedWeights};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DrppError {
    #[error("component {0:?} of the required edges contains more than one depot")]
    MultiDepotComponent(Vec<Node>),
    #[error("required edge endpoint {0} is not a node of the instance")]
    UnknownNode(Node),
    #[error("exact backend limit exceeded: {0}")]
    ExactCap(String),
    #[error("connect-join backend limit exceeded: {0}")]
    ConnectJoinCap(String),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("beta must be positive")]
    NonPositiveBeta,
    #[error("edge ({0},{1}) is heavier than beta")]
    EdgeAboveBeta(Node, Node),
    #[error("no feasible completion exists")]
    Infeasible,
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrppBackend {
    Exact,
    ConnectJoin,
}

impl fmt::Display for DrppBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DrppBackend::Exact => "exact",
            DrppBackend::ConnectJoin => "connect-join",
        })
    }
}

impl FromStr for DrppBackend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(DrppBackend::Exact),
            "connect-join" => Ok(DrppBackend::ConnectJoin),
            other => Err(format!("unknown DRPP backend `{other}`")),
        }
    }
}

/// Size limits for the two backends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DrppCaps {
    /// Nodes that may carry solution edges.
    pub exact_max_nodes: usize,
    /// Search-tree nodes the exact backend may visit before giving up.
    pub exact_search_limit: u64,
    /// Maximum number of components `k`.
    pub connect_join_max_components: usize,
    /// Maximum labelled trees enumerated for one depot group.
    pub connect_join_tree_budget: u64,
}

impl Default for DrppCaps {
    fn default() -> Self {
        DrppCaps {
            exact_max_nodes: 20,
            exact_search_limit: 2_000_000,
            connect_join_max_components: 12,
            connect_join_tree_budget: 200_000,
        }
    }
}

/// A depot rural postperson instance over a metric.
///
/// Components of `(V, R)` that matter are split into *anchors* (those with a
/// depot, isolated depots included) and *free* components (no depot; either
/// carrying an edge of `R`, or, when `spanning` is set, an isolated customer).
#[derive(Clone, Debug)]
pub struct DrppInstance<'a> {
    base: &'a MetricInstance,
    required: EdgeMultiset,
    spanning: bool,
    anchors: Vec<Vec<Node>>,
    anchor_depot: Vec<Node>,
    free: Vec<Vec<Node>>,
}

impl<'a> DrppInstance<'a> {
    pub fn new(base: &'a MetricInstance, required: EdgeMultiset, spanning: bool) -> Result<Self, DrppError> {
        let n = base.n();
        if let Some(m) = required.max_node() {
            if m >= n {
                return Err(DrppError::UnknownNode(m));
            }
        }
        let deg = required.degrees(n);
        let mut anchors = Vec::new();
        let mut anchor_depot = Vec::new();
        let mut free = Vec::new();
        for comp in components(&required, n) {
            let depots: Vec<Node> = comp.iter().copied().filter(|&v| base.is_depot(v)).collect();
            match depots.len() {
                0 => {
                    let touched = comp.len() > 1 || deg[comp[0]] > 0;
                    if touched || spanning {
                        free.push(comp);
                    }
                }
                1 => {
                    anchor_depot.push(depots[0]);
                    anchors.push(comp);
                }
                _ => return Err(DrppError::MultiDepotComponent(comp)),
            }
        }
        Ok(DrppInstance {
            base,
            required,
            spanning,
            anchors,
            anchor_depot,
            free,
        })
    }

    pub fn base(&self) -> &'a MetricInstance {
        self.base
    }

    pub fn required(&self) -> &EdgeMultiset {
        &self.required
    }

    pub fn spanning(&self) -> bool {
        self.spanning
    }

    /// Number of relevant components, anchors plus free ones.
    pub fn k(&self) -> usize {
        self.anchors.len() + self.free.len()
    }

    pub fn anchors(&self) -> &[Vec<Node>] {
        &self.anchors
    }

    /// Depot of each anchor component, in anchor order.
    pub fn anchor_depots(&self) -> &[Node] {
        &self.anchor_depot
    }

    pub fn free_components(&self) -> &[Vec<Node>] {
        &self.free
    }

    /// Nodes that may carry solution edges, ascending.
    pub fn relevant_nodes(&self) -> Vec<Node> {
        let mut nodes: Vec<Node> = self.anchors.iter().chain(&self.free).flatten().copied().collect();
        nodes.sort_unstable();
        nodes
    }

    /// Checks that `R ⊎ J` is Eulerian and that every component needing a
    /// depot has one.
    pub fn is_solution(&self, j: &EdgeMultiset) -> bool {
        let n = self.base.n();
        if j.max_node().is_some_and(|m| m >= n) {
            return false;
        }
        let mut all = self.required.clone();
        all.extend_from(j);
        if !odd_degree_nodes(&all).is_empty() {
            return false;
        }
        let deg = all.degrees(n);
        components(&all, n).iter().all(|comp| {
            let needs_depot = if self.spanning {
                comp.len() > 1 || !self.base.is_depot(comp[0])
            } else {
                comp.len() > 1 || deg[comp[0]] > 0
            };
            !needs_depot || comp.iter().any(|&v| self.base.is_depot(v))
        })
    }
}

/// Removes copies in pairs until every multiplicity is one or two. Parity is
/// unchanged and no edge disappears, so connectivity is kept too.
pub fn simplify_solution(j: &EdgeMultiset) -> EdgeMultiset {
    let mut out = EdgeMultiset::new();
    for (e, m) in j.iter() {
        out.add_copies(e, if m % 2 == 1 { 1 } else { 2 });
    }
    out
}

/// Every assignment of free components to depots, as a mixed-radix counter.
/// Item `i` of an assignment is the anchor index free component `i` joins.
pub struct DepotAssignments {
    radix: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for DepotAssignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == next.len() {
                self.current = None;
                break;
            }
            next[i] += 1;
            if next[i] < self.radix {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// Enumerates the `d^f` ways to hand each free component to one anchor.
pub fn enumerate_depot_partitions(inst: &DrppInstance<'_>) -> DepotAssignments {
    let radix = inst.anchors.len();
    let f = inst.free.len();
    DepotAssignments {
        radix,
        current: if f > 0 && radix == 0 { None } else { Some(vec![0; f]) },
    }
}

/// Metric closure over a set of usable edges with first-hop reconstruction,
/// so that solutions can be mapped back onto usable edges.
#[derive(Clone, Debug)]
pub(crate) struct CostTable {
    n: usize,
    cost: Vec<i64>,
    next: Vec<u32>,
}

pub(crate) const INF: i64 = i64::MAX / 4;

impl CostTable {
    pub(crate) fn from_instance(inst: &MetricInstance) -> Self {
        let n = inst.n();
        let mut cost = vec![0; n * n];
        let mut next = vec![0u32; n * n];
        for u in 0..n {
            for v in 0..n {
                cost[u * n + v] = inst.sdist(u, v);
                next[u * n + v] = v as u32;
            }
        }
        CostTable { n, cost, next }
    }

    /// Shortest-path closure of the given edge weights.
    pub(crate) fn from_edges(n: usize, edges: impl Iterator<Item = (Edge, i64)>) -> Self {
        let mut cost = vec![INF; n * n];
        let mut next = vec![u32::MAX; n * n];
        for v in 0..n {
            cost[v * n + v] = 0;
            next[v * n + v] = v as u32;
        }
        for (e, w) in edges {
            let (u, v) = (e.u(), e.v());
            if w < cost[u * n + v] {
                cost[u * n + v] = w;
                cost[v * n + u] = w;
                next[u * n + v] = v as u32;
                next[v * n + u] = u as u32;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = cost[i * n + k];
                if dik >= INF {
                    continue;
                }
                for j in 0..n {
                    let c = dik + cost[k * n + j];
                    if c < cost[i * n + j] {
                        cost[i * n + j] = c;
                        next[i * n + j] = next[i * n + k];
                    }
                }
            }
        }
        CostTable { n, cost, next }
    }

    #[inline]
    pub(crate) fn get(&self, u: Node, v: Node) -> i64 {
        self.cost[u * self.n + v]
    }

    /// Adds `copies` copies of the shortest path from `u` to `v`.
    pub(crate) fn add_path(&self, out: &mut EdgeMultiset, u: Node, v: Node, copies: u32) {
        let mut cur = u;
        while cur != v {
            let nxt = self.next[cur * self.n + v] as usize;
            out.add_copies(Edge::new(cur, nxt), copies);
            cur = nxt;
        }
    }
}

/// Runs the chosen backend.
pub fn solve_drpp(inst: &DrppInstance<'_>, backend: DrppBackend, caps: &DrppCaps) -> Result<EdgeMultiset, DrppError> {
    match backend {
        DrppBackend::Exact => drpp_exact(inst, caps),
        DrppBackend::ConnectJoin => drpp_connect_join(inst, caps),
    }
}
