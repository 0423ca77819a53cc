//! Seeded instance generators and the lower-bound family.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::InstancesError;
use crate::graph::{build_instance, Label, MetricInstance, Node, RawInstance, RawMetric, Weight};

/// Coordinates of random Euclidean instances lie in `[0, GRID]²`.
const GRID: i64 = 100;
/// Edge weights of random metric instances lie in `1..=MAX_EDGE`.
const MAX_EDGE: i64 = 20;
/// Probability of an extra edge in random metric instances.
const EXTRA_EDGE: f64 = 0.3;
const MAX_GRAPH_ATTEMPTS: usize = 10_000;

/// A generator together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    LowerBound {
        d: usize,
        #[serde(with = "crate::rational::as_text")]
        delta: Weight,
    },
    RandomEuclidean {
        n: usize,
        d: usize,
        seed: u64,
    },
    RandomMetric {
        n: usize,
        d: usize,
        seed: u64,
    },
    RandomGraphic {
        n: usize,
        d: usize,
        density: f64,
        seed: u64,
    },
}

impl FamilySpec {
    pub fn generate(&self) -> Result<MetricInstance, InstancesError> {
        match *self {
            FamilySpec::LowerBound { d, delta } => gen_lower_bound(d, delta),
            FamilySpec::RandomEuclidean { n, d, seed } => gen_random_euclidean(n, d, seed),
            FamilySpec::RandomMetric { n, d, seed } => gen_random_metric(n, d, seed),
            FamilySpec::RandomGraphic { n, d, density, seed } => gen_random_graphic(n, d, density, seed),
        }
    }
}

fn check_sizes(n: usize, d: usize) -> Result<(), InstancesError> {
    if d == 0 || d > n {
        return Err(InstancesError::Param(format!("need 1 <= d <= n, got n = {n}, d = {d}")));
    }
    Ok(())
}

fn pick_depots(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Node> {
    let mut depots = sample(rng, n, d).into_vec();
    depots.sort_unstable();
    depots
}

/// Cities `a1..ad` on a cycle of unit edges (a single edge when `d = 2`),
/// depot `pi` hanging off `ai` at distance `1 − δ`. Nodes `0..d` are the
/// cities and `d..2d` the depots.
///
/// The minimum forest is the star of spokes, so forest plus matching pays
/// `2d(1 − δ)`, while the walk `p1, a1, …, ad, p1` costs `d + 2(1 − δ)`.
pub fn gen_lower_bound(d: usize, delta: Weight) -> Result<MetricInstance, InstancesError> {
    let zero = Weight::from_integer(0);
    let one = Weight::from_integer(1);
    if d < 2 {
        return Err(InstancesError::Param(format!("lower-bound family needs d >= 2, got {d}")));
    }
    if delta <= zero || delta >= one {
        return Err(InstancesError::Param("delta must lie strictly between 0 and 1".into()));
    }
    let mut labels: Vec<Label> = (1..=d).map(|i| Label::Name(format!("a{i}"))).collect();
    labels.extend((1..=d).map(|i| Label::Name(format!("p{i}"))));
    let mut edges = Vec::new();
    let ring = if d == 2 { 1 } else { d };
    for i in 0..ring {
        edges.push((i, (i + 1) % d, Some(one)));
    }
    for i in 0..d {
        edges.push((i, d + i, Some(one - delta)));
    }
    Ok(build_instance(RawInstance {
        name: format!("lower-bound-d{d}-delta{}", crate::rational::format_weight(delta)),
        labels,
        depots: (d..2 * d).collect(),
        metric: RawMetric::Graph(edges),
    })?)
}

/// Integer points in `[0, 100]²` with rounded distances.
pub fn gen_random_euclidean(n: usize, d: usize, seed: u64) -> Result<MetricInstance, InstancesError> {
    check_sizes(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0..=GRID) as f64, rng.gen_range(0..=GRID) as f64))
        .collect();
    let depots = pick_depots(&mut rng, n, d);
    Ok(build_instance(RawInstance {
        name: format!("euclid-n{n}-d{d}-s{seed}"),
        labels: (0..n).map(Label::from).collect(),
        depots,
        metric: RawMetric::Points(coords),
    })?)
}

/// Shortest-path closure of a random connected graph with small integer
/// weights, stored as an explicit matrix.
pub fn gen_random_metric(n: usize, d: usize, seed: u64) -> Result<MetricInstance, InstancesError> {
    check_sizes(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const INF: i64 = i64::MAX / 4;
    let mut dist = vec![INF; n * n];
    for v in 0..n {
        dist[v * n + v] = 0;
    }
    let connect = |u: usize, v: usize, w: i64, dist: &mut Vec<i64>| {
        if w < dist[u * n + v] {
            dist[u * n + v] = w;
            dist[v * n + u] = w;
        }
    };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let w = rng.gen_range(1..=MAX_EDGE);
        connect(u, v, w, &mut dist);
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(EXTRA_EDGE) {
                let w = rng.gen_range(1..=MAX_EDGE);
                connect(u, v, w, &mut dist);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let c = dist[i * n + k] + dist[k * n + j];
                if c < dist[i * n + j] {
                    dist[i * n + j] = c;
                }
            }
        }
    }
    let depots = pick_depots(&mut rng, n, d);
    let rows = (0..n)
        .map(|i| (0..n).map(|j| Weight::from_integer(dist[i * n + j])).collect())
        .collect();
    Ok(build_instance(RawInstance {
        name: format!("metric-n{n}-d{d}-s{seed}"),
        labels: (0..n).map(Label::from).collect(),
        depots,
        metric: RawMetric::Matrix(rows),
    })?)
}

/// Unit-weight `G(n, p)` graph, redrawn until connected.
pub fn gen_random_graphic(n: usize, d: usize, density: f64, seed: u64) -> Result<MetricInstance, InstancesError> {
    check_sizes(n, d)?;
    if !(density > 0.0 && density <= 1.0) {
        return Err(InstancesError::Param(format!("density must lie in (0, 1], got {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_GRAPH_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(density) {
                    edges.push((u, v));
                }
            }
        }
        if !connected(n, &edges) {
            continue;
        }
        let depots = pick_depots(&mut rng, n, d);
        return Ok(build_instance(RawInstance {
            name: format!("graphic-n{n}-d{d}-s{seed}"),
            labels: (0..n).map(Label::from).collect(),
            depots,
            metric: RawMetric::Graph(edges.into_iter().map(|(u, v)| (u, v, None)).collect()),
        })?);
    }
    Err(InstancesError::Param(format!(
        "no connected graph after {MAX_GRAPH_ATTEMPTS} draws with density {density}"
    )))
}

fn connected(n: usize, edges: &[(Node, Node)]) -> bool {
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
    let mut parts = n;
    for &(u, v) in edges {
        if uf.union(u, v) {
            parts -= 1;
        }
    }
    parts <= 1
}
