use std::collections::BTreeMap;

use super::SolverError;
use crate::forest::{exchange_augment, Forest};
use crate::graph::{component_labels, components, odd_degree_nodes, Edge, EdgeMultiset, MetricInstance, Node};
use crate::matching::min_perfect_matching_by;

/// Edge of the alignment graph between the depots of two subtours.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlignmentEdge {
    pub depots: Edge,
    pub scaled_weight: i64,
    /// Lightest forest edge with one end in each subtour.
    pub witness: Edge,
}

/// How a forest crosses the subtours of a fixed tour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentGraph {
    pub edges: Vec<AlignmentEdge>,
    /// Depots whose subtour holds an odd number of odd-degree forest nodes.
    pub odd_depots: Vec<Node>,
    /// A minimum join on `odd_depots` in the alignment graph.
    pub join: Vec<Edge>,
    /// Witness forest edges of `join`.
    pub witnesses: Vec<Edge>,
}

/// Depot owning each node's subtour. Fails when a component with edges or
/// cities has no depot or more than one.
fn subtour_depots(inst: &MetricInstance, tour: &EdgeMultiset) -> Result<Vec<Node>, SolverError> {
    let mut owner = vec![usize::MAX; inst.n()];
    for comp in components(tour, inst.n()) {
        let depots: Vec<Node> = comp.iter().copied().filter(|&v| inst.is_depot(v)).collect();
        if depots.len() != 1 {
            return Err(SolverError::NotDecomposable(format!(
                "component {:?} has {} depots",
                comp,
                depots.len()
            )));
        }
        for &v in &comp {
            owner[v] = depots[0];
        }
    }
    Ok(owner)
}

pub fn alignment_diagnostics(
    inst: &MetricInstance,
    forest: &Forest,
    tour: &EdgeMultiset,
) -> Result<AlignmentGraph, SolverError> {
    let owner = subtour_depots(inst, tour)?;

    let mut crossing: BTreeMap<Edge, (i64, Edge)> = BTreeMap::new();
    for &e in forest.edges() {
        let (a, b) = (owner[e.u()], owner[e.v()]);
        if a == b {
            continue;
        }
        let cand = (inst.sdist(e.u(), e.v()), e);
        crossing
            .entry(Edge::new(a, b))
            .and_modify(|cur| *cur = (*cur).min(cand))
            .or_insert(cand);
    }
    let edges: Vec<AlignmentEdge> = crossing
        .iter()
        .map(|(&depots, &(w, witness))| AlignmentEdge {
            depots,
            scaled_weight: w,
            witness,
        })
        .collect();

    let mut odd_count: BTreeMap<Node, usize> = BTreeMap::new();
    for v in odd_degree_nodes(&forest.to_multiset()) {
        *odd_count.entry(owner[v]).or_default() += 1;
    }
    let odd_depots: Vec<Node> = inst
        .depots()
        .iter()
        .copied()
        .filter(|p| odd_count.get(p).copied().unwrap_or(0) % 2 == 1)
        .collect();

    let join = depot_join(inst, &edges, &odd_depots)?;
    let witnesses = join.iter().map(|e| crossing[e].1).collect();
    Ok(AlignmentGraph {
        edges,
        odd_depots,
        join,
        witnesses,
    })
}

/// Minimum `T`-join in the alignment graph, computed per component by
/// matching on shortest-path distances and reducing the paths mod 2.
fn depot_join(inst: &MetricInstance, edges: &[AlignmentEdge], terminals: &[Node]) -> Result<Vec<Edge>, SolverError> {
    let depots = inst.depots();
    let d = depots.len();
    let index: BTreeMap<Node, usize> = depots.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    const INF: i64 = i64::MAX / 4;
    let mut dist = vec![INF; d * d];
    let mut next = vec![usize::MAX; d * d];
    for i in 0..d {
        dist[i * d + i] = 0;
        next[i * d + i] = i;
    }
    for e in edges {
        let (a, b) = (index[&e.depots.u()], index[&e.depots.v()]);
        dist[a * d + b] = e.scaled_weight;
        dist[b * d + a] = e.scaled_weight;
        next[a * d + b] = b;
        next[b * d + a] = a;
    }
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let c = dist[i * d + k].saturating_add(dist[k * d + j]);
                if c < dist[i * d + j] {
                    dist[i * d + j] = c;
                    next[i * d + j] = next[i * d + k];
                }
            }
        }
    }

    let h: EdgeMultiset = edges.iter().map(|e| e.depots).collect();
    let label = component_labels(&h, inst.n());
    let mut by_comp: BTreeMap<usize, Vec<Node>> = BTreeMap::new();
    for &t in terminals {
        by_comp.entry(label[t]).or_default().push(t);
    }
    let mut parity: BTreeMap<Edge, u32> = BTreeMap::new();
    for (_, group) in by_comp {
        if group.len() % 2 == 1 {
            return Err(SolverError::Inconsistent(format!(
                "alignment component holds an odd number of odd depots: {group:?}"
            )));
        }
        let m = min_perfect_matching_by(&group, |u, v| dist[index[&u] * d + index[&v]])?;
        for (u, v) in m.pairs {
            let (mut cur, target) = (index[&u], index[&v]);
            while cur != target {
                let nxt = next[cur * d + target];
                *parity.entry(Edge::new(depots[cur], depots[nxt])).or_default() += 1;
                cur = nxt;
            }
        }
    }
    Ok(parity.into_iter().filter(|&(_, c)| c % 2 == 1).map(|(e, _)| e).collect())
}

/// Checks the parity statement behind the extended algorithm: with `Â`
/// the exchange completion of `F \ X` from the tour, every component of
/// `T ∪ (A \ X)` holds an even number of odd-degree nodes of `(F \ X) ∪ Â`.
pub fn parity_lemma_check(
    inst: &MetricInstance,
    forest: &Forest,
    tour: &EdgeMultiset,
    witnesses: &[Edge],
    removed: &[Edge],
) -> Result<bool, SolverError> {
    for e in witnesses {
        if !forest.contains(*e) {
            return Err(SolverError::Inconsistent(format!("witness {e:?} is not a forest edge")));
        }
    }
    for e in removed {
        if !witnesses.contains(e) {
            return Err(SolverError::Inconsistent(format!("removed edge {e:?} is not a witness")));
        }
    }
    let hat = exchange_augment(inst, forest, removed, tour)?;
    let mut patched: EdgeMultiset = forest.edges().iter().copied().filter(|e| !removed.contains(e)).collect();
    for e in hat {
        patched.add_copies(e, 1);
    }
    let odd = odd_degree_nodes(&patched);

    let mut joined = tour.clone();
    for e in witnesses.iter().filter(|e| !removed.contains(e)) {
        joined.add_copies(*e, 1);
    }
    let label = component_labels(&joined, inst.n());
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for v in odd {
        *count.entry(label[v]).or_default() += 1;
    }
    Ok(count.values().all(|c| c % 2 == 0))
}
