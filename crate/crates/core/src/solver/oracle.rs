use super::{Algorithm, Certificate, SolveParams, SolveReport, SolverError};
use crate::graph::{Edge, EdgeMultiset, MetricInstance, Node, Weight};

/// Size limits for the exhaustive oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCap {
    pub max_nodes: usize,
    pub max_depots: usize,
}

impl Default for OracleCap {
    fn default() -> Self {
        OracleCap {
            max_nodes: 10,
            max_depots: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSolution {
    pub scaled_weight: i64,
    pub weight: Weight,
    pub tour: EdgeMultiset,
    /// One closed route per used depot, as the node sequence after the depot.
    pub routes: Vec<(Node, Vec<Node>)>,
}

impl OracleSolution {
    pub fn into_report(self, inst: &MetricInstance) -> Result<SolveReport, SolverError> {
        SolveReport::checked(
            inst,
            Algorithm::Oracle,
            SolveParams::default(),
            self.tour,
            Certificate::default(),
        )
    }
}

/// Exact optimum: every split of the cities among depots, each part served
/// by one optimal cycle through its depot. In a metric a depot never needs
/// two cycles, and a cycle never needs two depots, so this is exhaustive.
pub fn oracle_opt(inst: &MetricInstance, cap: &OracleCap) -> Result<OracleSolution, SolverError> {
    let (n, d) = (inst.n(), inst.d());
    if n > cap.max_nodes || d > cap.max_depots {
        return Err(SolverError::OracleCap {
            n,
            d,
            max_nodes: cap.max_nodes,
            max_depots: cap.max_depots,
        });
    }
    let customers: Vec<Node> = inst.customers().collect();
    let k = customers.len();
    let full = (1usize << k) - 1;
    let tables: Vec<HeldKarp> = inst
        .depots()
        .iter()
        .map(|&p| HeldKarp::new(inst, p, &customers))
        .collect();

    // cheapest single cycle per city subset, and which depot achieves it
    let mut single = vec![(0i64, 0usize); full + 1];
    for (mask, slot) in single.iter_mut().enumerate().skip(1) {
        *slot = tables
            .iter()
            .enumerate()
            .map(|(i, t)| (t.cycle_cost(mask), i))
            .min()
            .expect("at least one depot");
    }
    let mut best = vec![0i64; full + 1];
    let mut choice = vec![0usize; full + 1];
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        let mut top = (i64::MAX, 0);
        loop {
            let part = sub | low;
            top = top.min((single[part].0 + best[mask ^ part], part));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[mask] = top.0;
        choice[mask] = top.1;
    }

    let mut tour = EdgeMultiset::new();
    let mut routes = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let part = choice[mask];
        let table = &tables[single[part].1];
        let order = table.cycle_order(part);
        tour.extend_from(&cycle_edges(table.root, &order));
        routes.push((table.root, order));
        mask ^= part;
    }
    routes.sort();
    Ok(OracleSolution {
        scaled_weight: best[full],
        weight: inst.to_weight(best[full]),
        tour,
        routes,
    })
}

/// Edges of the closed walk `root, order..., root`; a single city gives a
/// doubled edge.
pub(crate) fn cycle_edges(root: Node, order: &[Node]) -> EdgeMultiset {
    let mut out = EdgeMultiset::new();
    let mut prev = root;
    for &v in order.iter().chain(std::iter::once(&root)) {
        out.add_copies(Edge::new(prev, v), 1);
        prev = v;
    }
    out
}

/// Held-Karp table of shortest paths from `root` through every subset of
/// `nodes`.
pub(crate) struct HeldKarp {
    pub(crate) root: Node,
    nodes: Vec<Node>,
    dist: Vec<i64>,
    root_dist: Vec<i64>,
    /// `path[mask * k + j]`: cheapest root path visiting `mask`, ending at `j`.
    path: Vec<i64>,
}

impl HeldKarp {
    pub(crate) fn new(inst: &MetricInstance, root: Node, nodes: &[Node]) -> Self {
        let k = nodes.len();
        let mut dist = vec![0; k * k];
        for i in 0..k {
            for j in 0..k {
                dist[i * k + j] = inst.sdist(nodes[i], nodes[j]);
            }
        }
        let root_dist: Vec<i64> = nodes.iter().map(|&v| inst.sdist(root, v)).collect();
        let mut path = vec![i64::MAX; k << k];
        for j in 0..k {
            path[(1 << j) * k + j] = root_dist[j];
        }
        for mask in 1usize..1 << k {
            for j in 0..k {
                let cur = path[mask * k + j];
                if mask >> j & 1 == 0 || cur == i64::MAX {
                    continue;
                }
                for t in 0..k {
                    if mask >> t & 1 == 1 {
                        continue;
                    }
                    let next = mask | 1 << t;
                    let c = cur + dist[j * k + t];
                    if c < path[next * k + t] {
                        path[next * k + t] = c;
                    }
                }
            }
        }
        HeldKarp {
            root,
            nodes: nodes.to_vec(),
            dist,
            root_dist,
            path,
        }
    }

    fn k(&self) -> usize {
        self.nodes.len()
    }

    fn closing(&self, mask: usize) -> (i64, usize) {
        let k = self.k();
        (0..k)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| (self.path[mask * k + j] + self.root_dist[j], j))
            .min()
            .expect("nonempty subset")
    }

    pub(crate) fn cycle_cost(&self, mask: usize) -> i64 {
        if mask == 0 {
            0
        } else {
            self.closing(mask).0
        }
    }

    /// Visiting order of an optimal cycle through `mask`.
    pub(crate) fn cycle_order(&self, mask: usize) -> Vec<Node> {
        if mask == 0 {
            return vec![];
        }
        let k = self.k();
        let (_, mut last) = self.closing(mask);
        let mut mask = mask;
        let mut rev = vec![self.nodes[last]];
        while mask.count_ones() > 1 {
            let cur = self.path[mask * k + last];
            let prev_mask = mask ^ 1 << last;
            let prev = (0..k)
                .find(|&j| {
                    prev_mask >> j & 1 == 1
                        && self.path[prev_mask * k + j] != i64::MAX
                        && self.path[prev_mask * k + j] + self.dist[j * k + last] == cur
                })
                .expect("table is consistent");
            rev.push(self.nodes[prev]);
            mask = prev_mask;
            last = prev;
        }
        rev.reverse();
        rev
    }
}
