//! Metric instances, edge multisets and the parity / connectivity queries
//! shared by every solver.
//!
//! Distances are exact rationals. On construction every distance is scaled by
//! the least common multiple of the input denominators, so all algorithms run
//! on `i64` and only reporting converts back to [`Weight`].

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact edge and tour weights.
pub type Weight = Ratio<i64>;

/// Dense node index into a [`MetricInstance`].
pub type Node = usize;

/// External node identifier, kept so files round-trip.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Name(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Name(s) => f.write_str(s),
        }
    }
}

impl From<usize> for Label {
    fn from(i: usize) -> Self {
        Label::Int(i as i64)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Name(s.to_string())
    }
}

/// Unordered node pair, stored with the smaller index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Node, Node);

impl Edge {
    pub fn new(u: Node, v: Node) -> Self {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn u(self) -> Node {
        self.0
    }

    pub fn v(self) -> Node {
        self.1
    }

    pub fn is_loop(self) -> bool {
        self.0 == self.1
    }

    pub fn contains(self, x: Node) -> bool {
        self.0 == x || self.1 == x
    }
}

impl From<(Node, Node)> for Edge {
    fn from((u, v): (Node, Node)) -> Self {
        Edge::new(u, v)
    }
}

/// Multiset of node pairs. Loops are dropped on insertion: they change
/// neither parity nor connectivity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EdgeMultiset {
    entries: BTreeMap<Edge, u32>,
}

impl EdgeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, u: Node, v: Node) {
        self.add_copies(Edge::new(u, v), 1);
    }

    pub fn add_copies(&mut self, e: Edge, copies: u32) {
        if e.is_loop() || copies == 0 {
            return;
        }
        *self.entries.entry(e).or_insert(0) += copies;
    }

    /// Disjoint union, `self ⊎ other`.
    pub fn extend_from(&mut self, other: &EdgeMultiset) {
        for (e, m) in other.iter() {
            self.add_copies(e, m);
        }
    }

    /// Removes up to `copies` copies of `e`; returns how many were removed.
    pub fn remove_copies(&mut self, e: Edge, copies: u32) -> u32 {
        match self.entries.get_mut(&e) {
            Some(m) => {
                let removed = copies.min(*m);
                *m -= removed;
                if *m == 0 {
                    self.entries.remove(&e);
                }
                removed
            }
            None => 0,
        }
    }

    pub fn multiplicity(&self, e: Edge) -> u32 {
        self.entries.get(&e).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, u32)> + '_ {
        self.entries.iter().map(|(e, m)| (*e, *m))
    }

    pub fn distinct_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.entries.keys().copied()
    }

    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    /// Number of edges counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.entries.values().map(|&m| m as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.entries.values().copied().max().unwrap_or(0)
    }

    pub fn max_node(&self) -> Option<Node> {
        self.entries.keys().map(|e| e.v()).max()
    }

    pub fn degrees(&self, n: usize) -> Vec<u64> {
        let mut deg = vec![0u64; n];
        for (e, m) in self.iter() {
            deg[e.u()] += m as u64;
            deg[e.v()] += m as u64;
        }
        deg
    }
}

impl FromIterator<(Node, Node)> for EdgeMultiset {
    fn from_iter<I: IntoIterator<Item = (Node, Node)>>(iter: I) -> Self {
        let mut ms = EdgeMultiset::new();
        for (u, v) in iter {
            ms.add(u, v);
        }
        ms
    }
}

impl FromIterator<Edge> for EdgeMultiset {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        let mut ms = EdgeMultiset::new();
        for e in iter {
            ms.add_copies(e, 1);
        }
        ms
    }
}

/// How the distances of an instance were obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    /// Distances given directly as a matrix.
    Explicit,
    /// Rounded Euclidean distances of planar points.
    Euclid2d { coords: Vec<(f64, f64)> },
    /// Shortest-path closure of an undirected weighted graph. `unit` is set
    /// when every source edge has weight one.
    Graph {
        edges: Vec<(Node, Node, Weight)>,
        unit: bool,
    },
}

/// The metric description an instance is built from.
#[derive(Clone, Debug, PartialEq)]
pub enum RawMetric {
    Matrix(Vec<Vec<Weight>>),
    Points(Vec<(f64, f64)>),
    /// Edge list; a missing weight means one.
    Graph(Vec<(Node, Node, Option<Weight>)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawInstance {
    pub name: String,
    pub labels: Vec<Label>,
    pub depots: Vec<Node>,
    pub metric: RawMetric,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance has no nodes")]
    Empty,
    #[error("depot set is empty")]
    NoDepots,
    #[error("depot index {0} is out of range")]
    DepotOutOfRange(Node),
    #[error("depot {0} listed twice")]
    DuplicateDepot(Label),
    #[error("node label {0} is not unique")]
    DuplicateLabel(Label),
    #[error("distance matrix must be {0}x{0}")]
    MatrixShape(usize),
    #[error("dist({0},{0}) must be zero")]
    NonZeroDiagonal(Label),
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(Label, Label),
    #[error("negative distance between {0} and {1}")]
    Negative(Label, Label),
    #[error("triangle inequality violated: dist({a},{c}) > dist({a},{b}) + dist({b},{c})")]
    TriangleViolated { a: Label, b: Label, c: Label },
    #[error("source graph is disconnected")]
    Disconnected,
    #[error("edge endpoint {0} is out of range")]
    EdgeOutOfRange(Node),
    #[error("self-loop at {0}")]
    SelfLoop(Label),
    #[error("non-finite coordinate at {0}")]
    NonFinite(Label),
    #[error("weights need a common denominator that overflows 64 bits")]
    ScaleOverflow,
}

/// A complete metric `(G, D, w)` with distinguished depots.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricInstance {
    name: String,
    labels: Vec<Label>,
    depots: Vec<Node>,
    is_depot: Vec<bool>,
    scaled: Vec<i64>,
    scale: i64,
    origin: Origin,
    next_hop: Option<Vec<u32>>,
}

fn checked_lcm(a: i64, b: i64) -> Option<i64> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b)
}

fn to_scaled(w: Weight, scale: i64) -> Option<i64> {
    let q = scale / w.denom();
    w.numer().checked_mul(q)
}

fn common_scale<'a>(weights: impl Iterator<Item = &'a Weight>) -> Result<i64, InstanceError> {
    let mut scale = 1i64;
    for w in weights {
        scale = checked_lcm(scale, *w.denom()).ok_or(InstanceError::ScaleOverflow)?;
    }
    Ok(scale)
}

const UNREACHABLE: i64 = i64::MAX / 4;
const NO_HOP: u32 = u32::MAX;

/// Floyd–Warshall in place; `next` (when given) tracks the first hop.
fn close_metric(n: usize, d: &mut [i64], mut next: Option<&mut [u32]>) {
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik >= UNREACHABLE {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                    if let Some(next) = next.as_deref_mut() {
                        next[i * n + j] = next[i * n + k];
                    }
                }
            }
        }
    }
}

/// Builds a [`MetricInstance`], validating the metric and closing graphs
/// and rounded point sets under shortest paths.
pub fn build_instance(raw: RawInstance) -> Result<MetricInstance, InstanceError> {
    let RawInstance {
        name,
        labels,
        depots,
        metric,
    } = raw;
    let n = labels.len();
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(InstanceError::DuplicateLabel(l.clone()));
            }
        }
    }
    if depots.is_empty() {
        return Err(InstanceError::NoDepots);
    }
    let mut is_depot = vec![false; n];
    for &d in &depots {
        if d >= n {
            return Err(InstanceError::DepotOutOfRange(d));
        }
        if is_depot[d] {
            return Err(InstanceError::DuplicateDepot(labels[d].clone()));
        }
        is_depot[d] = true;
    }
    let mut depots = depots;
    depots.sort_unstable();

    let (scaled, scale, origin, next_hop) = match metric {
        RawMetric::Matrix(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(InstanceError::MatrixShape(n));
            }
            let scale = common_scale(rows.iter().flatten())?;
            let mut d = vec![0i64; n * n];
            for i in 0..n {
                for j in 0..n {
                    let w = rows[i][j];
                    if i == j && !w.is_zero() {
                        return Err(InstanceError::NonZeroDiagonal(labels[i].clone()));
                    }
                    if w.is_negative() {
                        return Err(InstanceError::Negative(labels[i].clone(), labels[j].clone()));
                    }
                    if w != rows[j][i] {
                        return Err(InstanceError::NotSymmetric(labels[i].clone(), labels[j].clone()));
                    }
                    d[i * n + j] = to_scaled(w, scale).ok_or(InstanceError::ScaleOverflow)?;
                }
            }
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if d[a * n + c] > d[a * n + b] + d[b * n + c] {
                            return Err(InstanceError::TriangleViolated {
                                a: labels[a].clone(),
                                b: labels[b].clone(),
                                c: labels[c].clone(),
                            });
                        }
                    }
                }
            }
            (d, scale, Origin::Explicit, None)
        }
        RawMetric::Points(coords) => {
            if coords.len() != n {
                return Err(InstanceError::MatrixShape(n));
            }
            for (i, (x, y)) in coords.iter().enumerate() {
                if !x.is_finite() || !y.is_finite() {
                    return Err(InstanceError::NonFinite(labels[i].clone()));
                }
            }
            let mut d = vec![0i64; n * n];
            for i in 0..n {
                for j in 0..n {
                    let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
                    d[i * n + j] = (dx * dx + dy * dy).sqrt().round() as i64;
                }
            }
            // Rounding can break the triangle inequality by one unit.
            close_metric(n, &mut d, None);
            (d, 1, Origin::Euclid2d { coords }, None)
        }
        RawMetric::Graph(edges) => {
            let one = Weight::from_integer(1);
            let mut resolved = Vec::with_capacity(edges.len());
            for (u, v, w) in edges {
                if u >= n {
                    return Err(InstanceError::EdgeOutOfRange(u));
                }
                if v >= n {
                    return Err(InstanceError::EdgeOutOfRange(v));
                }
                if u == v {
                    return Err(InstanceError::SelfLoop(labels[u].clone()));
                }
                let w = w.unwrap_or(one);
                if w.is_negative() {
                    return Err(InstanceError::Negative(labels[u].clone(), labels[v].clone()));
                }
                resolved.push((u, v, w));
            }
            let scale = common_scale(resolved.iter().map(|(_, _, w)| w))?;
            let mut d = vec![UNREACHABLE; n * n];
            let mut next = vec![NO_HOP; n * n];
            for i in 0..n {
                d[i * n + i] = 0;
                next[i * n + i] = i as u32;
            }
            for &(u, v, w) in &resolved {
                let s = to_scaled(w, scale).ok_or(InstanceError::ScaleOverflow)?;
                if s < d[u * n + v] {
                    d[u * n + v] = s;
                    d[v * n + u] = s;
                    next[u * n + v] = v as u32;
                    next[v * n + u] = u as u32;
                }
            }
            close_metric(n, &mut d, Some(&mut next));
            if d.iter().any(|&x| x >= UNREACHABLE) {
                return Err(InstanceError::Disconnected);
            }
            let unit = resolved.iter().all(|(_, _, w)| *w == one);
            (
                d,
                scale,
                Origin::Graph {
                    edges: resolved,
                    unit,
                },
                Some(next),
            )
        }
    };

    Ok(MetricInstance {
        name,
        labels,
        depots,
        is_depot,
        scaled,
        scale,
        origin,
        next_hop,
    })
}

impl MetricInstance {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.depots.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, v: Node) -> &Label {
        &self.labels[v]
    }

    pub fn node_of(&self, label: &Label) -> Option<Node> {
        self.labels.iter().position(|l| l == label)
    }

    /// Depots in increasing index order.
    pub fn depots(&self) -> &[Node] {
        &self.depots
    }

    pub fn is_depot(&self, v: Node) -> bool {
        self.is_depot[v]
    }

    pub fn customers(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.n()).filter(|&v| !self.is_depot[v])
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// True for the shortest-path metric of an unweighted graph.
    pub fn is_graphic(&self) -> bool {
        matches!(self.origin, Origin::Graph { unit: true, .. })
    }

    /// Common denominator of all distances.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Distance in integer units of `1 / scale`.
    #[inline]
    pub fn sdist(&self, u: Node, v: Node) -> i64 {
        self.scaled[u * self.n() + v]
    }

    pub fn dist(&self, u: Node, v: Node) -> Weight {
        self.to_weight(self.sdist(u, v))
    }

    pub fn to_weight(&self, scaled: i64) -> Weight {
        Weight::new(scaled, self.scale)
    }

    /// Converts a rational weight into scaled units when it is representable.
    pub fn to_scaled(&self, w: Weight) -> Option<i64> {
        let s = w * Weight::from_integer(self.scale);
        s.is_integer().then(|| s.to_integer())
    }

    pub fn scaled_weight_of(&self, t: &EdgeMultiset) -> i64 {
        t.iter().map(|(e, m)| m as i64 * self.sdist(e.u(), e.v())).sum()
    }

    pub fn weight_of(&self, t: &EdgeMultiset) -> Weight {
        self.to_weight(self.scaled_weight_of(t))
    }

    /// Same metric with a different depot set.
    pub fn with_depots(&self, depots: &[Node]) -> Result<MetricInstance, InstanceError> {
        if depots.is_empty() {
            return Err(InstanceError::NoDepots);
        }
        let mut out = self.clone();
        out.is_depot = vec![false; self.n()];
        for &d in depots {
            if d >= self.n() {
                return Err(InstanceError::DepotOutOfRange(d));
            }
            if out.is_depot[d] {
                return Err(InstanceError::DuplicateDepot(self.labels[d].clone()));
            }
            out.is_depot[d] = true;
        }
        out.depots = depots.to_vec();
        out.depots.sort_unstable();
        Ok(out)
    }

    /// Node sequence of a shortest path in the source graph, or the direct
    /// pair when the instance has no source graph.
    pub fn shortest_path(&self, u: Node, v: Node) -> Vec<Node> {
        let n = self.n();
        match &self.next_hop {
            Some(next) => {
                let mut path = vec![u];
                let mut cur = u;
                while cur != v {
                    cur = next[cur * n + v] as usize;
                    path.push(cur);
                }
                path
            }
            None => vec![u, v],
        }
    }

    /// Replaces every edge by the edges of its shortest source-graph path.
    /// Parity of every node and the total weight are unchanged.
    pub fn expand_to_source(&self, t: &EdgeMultiset) -> EdgeMultiset {
        if self.next_hop.is_none() {
            return t.clone();
        }
        let mut out = EdgeMultiset::new();
        for (e, m) in t.iter() {
            let path = self.shortest_path(e.u(), e.v());
            for w in path.windows(2) {
                out.add_copies(Edge::new(w[0], w[1]), m);
            }
        }
        out
    }
}

/// Nodes with odd degree in `t`, ascending.
pub fn odd_degree_nodes(t: &EdgeMultiset) -> Vec<Node> {
    let n = t.max_node().map_or(0, |m| m + 1);
    t.degrees(n)
        .into_iter()
        .enumerate()
        .filter(|(_, d)| d % 2 == 1)
        .map(|(v, _)| v)
        .collect()
}

/// Connected components of `({0..n}, t)`, each sorted and ordered by their
/// smallest node. Untouched nodes are singletons.
pub fn components(t: &EdgeMultiset, n: usize) -> Vec<Vec<Node>> {
    let mut uf = UnionFind::<usize>::new(n);
    for e in t.distinct_edges() {
        uf.union(e.u(), e.v());
    }
    let mut index = vec![usize::MAX; n];
    let mut out: Vec<Vec<Node>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if index[r] == usize::MAX {
            index[r] = out.len();
            out.push(Vec::new());
        }
        out[index[r]].push(v);
    }
    out
}

/// Component index of every node, consistent with [`components`].
pub fn component_labels(t: &EdgeMultiset, n: usize) -> Vec<usize> {
    let mut label = vec![0; n];
    for (i, comp) in components(t, n).iter().enumerate() {
        for &v in comp {
            label[v] = i;
        }
    }
    label
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TourCertificate {
    pub components: Vec<Vec<Node>>,
    pub odd_nodes: Vec<Node>,
    /// Nodes lying in a component that contains a depot.
    pub covered: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("edge endpoint {0} is not a node of the instance")]
    UnknownNode(Node),
    #[error("P1 violated: node {0} has odd degree")]
    OddDegree(Node),
    #[error("customer {0} is not visited")]
    Uncovered(Node),
    #[error("P2 violated: component {0:?} contains no depot")]
    DepotlessComponent(Vec<Node>),
}

/// Checks the tour properties: even degree everywhere, every customer
/// touched, and a depot in every component that has an edge or a customer.
/// Isolated depots are idle salespersons and are accepted.
pub fn validate_tour(inst: &MetricInstance, t: &EdgeMultiset) -> Result<TourCertificate, Vec<Violation>> {
    let n = inst.n();
    let mut violations = Vec::new();
    if let Some(m) = t.max_node() {
        if m >= n {
            let mut bad: Vec<Node> = t
                .distinct_edges()
                .flat_map(|e| [e.u(), e.v()])
                .filter(|&x| x >= n)
                .collect();
            bad.sort_unstable();
            bad.dedup();
            return Err(bad.into_iter().map(Violation::UnknownNode).collect());
        }
    }
    let deg = t.degrees(n);
    let odd: Vec<Node> = (0..n).filter(|&v| deg[v] % 2 == 1).collect();
    violations.extend(odd.iter().map(|&v| Violation::OddDegree(v)));
    for v in inst.customers() {
        if deg[v] == 0 {
            violations.push(Violation::Uncovered(v));
        }
    }
    let comps = components(t, n);
    let mut covered = Vec::new();
    for comp in &comps {
        if comp.iter().any(|&v| inst.is_depot(v)) {
            covered.extend_from_slice(comp);
        } else if comp.len() > 1 {
            violations.push(Violation::DepotlessComponent(comp.clone()));
        }
    }
    covered.sort_unstable();
    if violations.is_empty() {
        Ok(TourCertificate {
            components: comps,
            odd_nodes: odd,
            covered,
        })
    } else {
        Err(violations)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("nodes {0:?} have odd degree")]
    OddDegree(Vec<Node>),
}

/// One closed walk per non-singleton component, each edge copy traversed
/// once. Walks start at the smallest node of their component.
pub fn eulerian_circuits(t: &EdgeMultiset) -> Result<Vec<Vec<Node>>, GraphError> {
    let odd = odd_degree_nodes(t);
    if !odd.is_empty() {
        return Err(GraphError::OddDegree(odd));
    }
    let n = t.max_node().map_or(0, |m| m + 1);
    let mut ends: Vec<(Node, Node)> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, m) in t.iter() {
        for _ in 0..m {
            let id = ends.len();
            ends.push((e.u(), e.v()));
            adj[e.u()].push(id);
            adj[e.v()].push(id);
        }
    }
    let mut used = vec![false; ends.len()];
    let mut cursor = vec![0usize; n];
    let mut walks = Vec::new();
    for start in 0..n {
        if adj[start].is_empty() || adj[start].iter().all(|&id| used[id]) {
            continue;
        }
        let mut stack = vec![start];
        let mut walk = Vec::new();
        while let Some(&v) = stack.last() {
            let mut advanced = false;
            while cursor[v] < adj[v].len() {
                let id = adj[v][cursor[v]];
                cursor[v] += 1;
                if !used[id] {
                    used[id] = true;
                    let (a, b) = ends[id];
                    stack.push(if a == v { b } else { a });
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                walk.push(v);
                stack.pop();
            }
        }
        walk.reverse();
        walks.push(walk);
    }
    Ok(walks)
}

/// Shortcuts closed walks to simple cycles over the same node sets. Two-node
/// walks become a doubled edge. Under the triangle inequality the weight
/// never increases.
pub fn shortcut_cycles(walks: &[Vec<Node>]) -> EdgeMultiset {
    let mut out = EdgeMultiset::new();
    for walk in walks {
        let mut seen = std::collections::HashSet::new();
        let order: Vec<Node> = walk.iter().copied().filter(|v| seen.insert(*v)).collect();
        match order.len() {
            0 | 1 => {}
            2 => out.add_copies(Edge::new(order[0], order[1]), 2),
            k => {
                for i in 0..k {
                    out.add(order[i], order[(i + 1) % k]);
                }
            }
        }
    }
    out
}

/// Weight of a walk, summing consecutive hops.
pub fn walk_weight(inst: &MetricInstance, walk: &[Node]) -> i64 {
    walk.windows(2).map(|w| inst.sdist(w[0], w[1])).sum()
}
