//! Independent exhaustive oracles and instance helpers shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use mdmtsp::graph::{Edge, EdgeMultiset, MetricInstance, Node};
use mdmtsp::instances::{gen_random_euclidean, gen_random_graphic, gen_random_metric};
use rand::seq::SliceRandom;
use rand::Rng;

pub const INF: i64 = i64::MAX / 4;

/// Which generator to draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Euclidean,
    Metric,
    Graphic,
}

pub const ORIGINS: [Origin; 3] = [Origin::Euclidean, Origin::Metric, Origin::Graphic];

pub fn random_instance(origin: Origin, n: usize, d: usize, seed: u64) -> MetricInstance {
    match origin {
        Origin::Euclidean => gen_random_euclidean(n, d, seed),
        Origin::Metric => gen_random_metric(n, d, seed),
        Origin::Graphic => gen_random_graphic(n, d, 0.5, seed),
    }
    .expect("valid generator parameters")
}

/// Decodes a Prüfer sequence over `0..m` into tree edges.
fn prufer_tree(seq: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; m];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    for &x in seq {
        let leaf = (0..m).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..m).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Minimum constrained spanning forest weight by enumerating every spanning
/// tree of the graph with all depots glued into one root. Each such tree,
/// with each root edge sent to its nearest depot, is a forest whose
/// components hold exactly one depot, and every such forest arises this way.
pub fn csf_brute(inst: &MetricInstance) -> i64 {
    let customers: Vec<Node> = inst.customers().collect();
    let c = customers.len();
    if c == 0 {
        return 0;
    }
    let to_root: Vec<i64> = customers
        .iter()
        .map(|&v| inst.depots().iter().map(|&p| inst.sdist(p, v)).min().unwrap())
        .collect();
    // node 0 is the root, node i + 1 is customer i
    let w = |a: usize, b: usize| -> i64 {
        match (a.min(b), a.max(b)) {
            (0, b) => to_root[b - 1],
            (a, b) => inst.sdist(customers[a - 1], customers[b - 1]),
        }
    };
    let m = c + 1;
    if m == 2 {
        return w(0, 1);
    }
    let len = m - 2;
    let mut seq = vec![0usize; len];
    let mut best = INF;
    loop {
        let cost: i64 = prufer_tree(&seq, m).into_iter().map(|(a, b)| w(a, b)).sum();
        best = best.min(cost);
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < m {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return best;
        }
    }
}

/// Cheapest multiset of edges, each used at most twice, whose odd-degree
/// nodes are exactly `terminals`. Dynamic programming over parity vectors,
/// one edge at a time.
pub fn t_join_brute(inst: &MetricInstance, terminals: &[Node]) -> i64 {
    let n = inst.n();
    let mut best = vec![INF; 1 << n];
    best[0] = 0;
    for u in 0..n {
        for v in u + 1..n {
            let w = inst.sdist(u, v);
            let flip = (1usize << u) | (1 << v);
            let prev = best.clone();
            for (s, &c) in prev.iter().enumerate() {
                if c == INF {
                    continue;
                }
                best[s ^ flip] = best[s ^ flip].min(c + w);
                best[s] = best[s].min(c + 2 * w);
            }
        }
    }
    let target = terminals.iter().fold(0usize, |m, &t| m ^ (1 << t));
    best[target]
}

/// Minimum perfect matching weight by trying every partner of the first node.
pub fn matching_brute(inst: &MetricInstance, nodes: &[Node]) -> i64 {
    if nodes.is_empty() {
        return 0;
    }
    let first = nodes[0];
    let mut best = INF;
    for i in 1..nodes.len() {
        let rest: Vec<Node> = nodes[1..].iter().enumerate().filter(|&(j, _)| j + 1 != i).map(|(_, &v)| v).collect();
        best = best.min(inst.sdist(first, nodes[i]) + matching_brute(inst, &rest));
    }
    best
}

fn canonical(labels: &mut [u8]) {
    let mut map = [u8::MAX; 32];
    let mut next = 0u8;
    for l in labels.iter_mut() {
        if map[*l as usize] == u8::MAX {
            map[*l as usize] = next;
            next += 1;
        }
        *l = map[*l as usize];
    }
}

/// Cheapest completion `J` (each edge used at most twice) such that `R ⊎ J`
/// has even degrees and every component that needs a depot has one. A
/// component needs a depot when it has an edge or, in spanning mode, when
/// it is a lone city. `weight` gives the usable edges.
///
/// Dynamic programming over (component partition, parity) states.
pub fn drpp_brute(
    inst: &MetricInstance,
    required: &EdgeMultiset,
    spanning: bool,
    weight: impl Fn(Node, Node) -> Option<i64>,
) -> Option<i64> {
    let n = inst.n();
    let mut labels: Vec<u8> = (0..n as u8).collect();
    let mut parity = 0u32;
    for (e, m) in required.iter() {
        let (a, b) = (labels[e.u()], labels[e.v()]);
        for l in labels.iter_mut() {
            if *l == b {
                *l = a;
            }
        }
        if m % 2 == 1 {
            parity ^= (1 << e.u()) | (1 << e.v());
        }
    }
    canonical(&mut labels);

    let mut states: HashMap<(Vec<u8>, u32), i64> = HashMap::new();
    states.insert((labels, parity), 0);
    for u in 0..n {
        for v in u + 1..n {
            let Some(w) = weight(u, v) else { continue };
            let mut next = states.clone();
            for ((labels, parity), &c) in &states {
                let mut merged = labels.clone();
                let (a, b) = (merged[u], merged[v]);
                for l in merged.iter_mut() {
                    if *l == b {
                        *l = a;
                    }
                }
                canonical(&mut merged);
                for (copies, p) in [(1, parity ^ (1 << u) ^ (1 << v)), (2, *parity)] {
                    let key = (merged.clone(), p);
                    let cost = c + copies * w;
                    let slot = next.entry(key).or_insert(INF);
                    *slot = (*slot).min(cost);
                }
            }
            states = next;
        }
    }

    states
        .iter()
        .filter(|((labels, parity), _)| {
            if *parity != 0 {
                return false;
            }
            let mut size = vec![0usize; n];
            let mut depot = vec![false; n];
            for v in 0..n {
                size[labels[v] as usize] += 1;
                depot[labels[v] as usize] |= inst.is_depot(v);
            }
            (0..n).all(|v| {
                let b = labels[v] as usize;
                let needs = size[b] > 1 || (spanning && !inst.is_depot(v));
                !needs || depot[b]
            })
        })
        .map(|(_, &c)| c)
        .min()
}

/// `drpp_brute` over the full metric.
pub fn drpp_brute_metric(inst: &MetricInstance, required: &EdgeMultiset, spanning: bool) -> Option<i64> {
    drpp_brute(inst, required, spanning, |u, v| Some(inst.sdist(u, v)))
}

/// Random required multiset whose components hold at most one depot each.
pub fn random_required(inst: &MetricInstance, rng: &mut impl Rng, edges: usize) -> EdgeMultiset {
    let n = inst.n();
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    let mut has_depot: Vec<bool> = (0..n).map(|v| inst.is_depot(v)).collect();
    let mut r = EdgeMultiset::new();
    let mut pairs: Vec<(Node, Node)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    for (u, v) in pairs.into_iter().take(edges * 3) {
        if r.total() as usize >= edges {
            break;
        }
        let (a, b) = (find(&mut uf, u), find(&mut uf, v));
        if a != b && has_depot[a] && has_depot[b] {
            continue;
        }
        if a != b {
            uf[b] = a;
            has_depot[a] |= has_depot[b];
        }
        r.add_copies(Edge::new(u, v), rng.gen_range(1..=2));
    }
    r
}

/// Random subset of `items`, each kept with probability one half.
pub fn random_subset<T: Copy>(items: &[T], rng: &mut impl Rng) -> Vec<T> {
    items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}
