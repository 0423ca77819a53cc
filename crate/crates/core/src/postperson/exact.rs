//! Exact backend.
//!
//! An optimal completion splits into a set `S` of connecting edges, one per
//! free component, that hangs every free component below exactly one anchor,
//! plus a minimum `T`-join fixing the parity left over by `R ⊎ S`. The search
//! enumerates `S` by branch and bound over cross-component node pairs in
//! ascending cost order and evaluates the join by a memoized pairing DP.

use std::collections::{BTreeMap, HashMap};

use super::{simplify_solution, CostTable, DrppCaps, DrppError, DrppInstance, INF};
use crate::graph::{Edge, EdgeMultiset};

/// Optimal completion under the instance metric.
pub fn drpp_exact(inst: &DrppInstance<'_>, caps: &DrppCaps) -> Result<EdgeMultiset, DrppError> {
    let costs = CostTable::from_instance(inst.base());
    match drpp_exact_with_costs(inst, &costs, caps, None)? {
        Some((j, _)) => Ok(j),
        None => Err(DrppError::Infeasible),
    }
}

/// Optimal completion using only the listed edges with the given weights,
/// together with its weight. `None` if the edges cannot connect the instance.
pub fn drpp_exact_on_edges(
    inst: &DrppInstance<'_>,
    edges: &BTreeMap<Edge, i64>,
    caps: &DrppCaps,
) -> Result<Option<(EdgeMultiset, i64)>, DrppError> {
    let costs = CostTable::from_edges(inst.base().n(), edges.iter().map(|(&e, &w)| (e, w)));
    drpp_exact_with_costs(inst, &costs, caps, None)
}

/// Optimal completion under `costs`, or `None` if nothing is strictly
/// cheaper than `upper`. Edges of the result are edges of the table.
pub(crate) fn drpp_exact_with_costs(
    inst: &DrppInstance<'_>,
    costs: &CostTable,
    caps: &DrppCaps,
    upper: Option<i64>,
) -> Result<Option<(EdgeMultiset, i64)>, DrppError> {
    let nodes = inst.relevant_nodes();
    let m = nodes.len();
    if m > caps.exact_max_nodes.min(32) {
        return Err(DrppError::ExactCap(format!(
            "{m} relevant nodes, limit {}",
            caps.exact_max_nodes
        )));
    }
    let n = inst.base().n();
    let a = inst.anchors().len();
    let f = inst.free_components().len();
    if f > 0 && a == 0 {
        return Ok(None);
    }

    let mut local = vec![usize::MAX; n];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let mut comp = vec![0usize; m];
    for (c, members) in inst.anchors().iter().chain(inst.free_components()).enumerate() {
        for &v in members {
            comp[local[v]] = c;
        }
    }
    let deg = inst.required().degrees(n);
    let odd = nodes
        .iter()
        .enumerate()
        .filter(|&(_, &v)| deg[v] % 2 == 1)
        .fold(0u32, |acc, (i, _)| acc | 1 << i);

    let pair_cost: Vec<i64> = (0..m * m).map(|x| costs.get(nodes[x / m], nodes[x % m])).collect();
    let mut cands = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let c = pair_cost[i * m + j];
            if comp[i] != comp[j] && (comp[i] >= a || comp[j] >= a) && c < INF {
                cands.push((c, i, j));
            }
        }
    }
    cands.sort_unstable();

    let mut search = Search {
        m,
        a,
        f,
        comp: &comp,
        cands: &cands,
        pair_cost: &pair_cost,
        odd,
        tj: HashMap::new(),
        best: upper.unwrap_or(INF),
        best_s: None,
        chosen: Vec::with_capacity(f),
        visited: 0,
        limit: caps.exact_search_limit,
    };
    let mut tree: Vec<usize> = (0..a + f).collect();
    search.dfs(0, 0, &mut tree)?;

    let Some((s_edges, mask)) = search.best_s.take() else {
        return Ok(None);
    };
    let mut j = EdgeMultiset::new();
    for &(u, v) in &s_edges {
        costs.add_path(&mut j, nodes[u], nodes[v], 1);
    }
    for (u, v) in search.pairing(mask) {
        costs.add_path(&mut j, nodes[u], nodes[v], 1);
    }
    Ok(Some((simplify_solution(&j), search.best)))
}

struct Search<'c> {
    m: usize,
    a: usize,
    f: usize,
    comp: &'c [usize],
    cands: &'c [(i64, usize, usize)],
    pair_cost: &'c [i64],
    odd: u32,
    tj: HashMap<u32, i64>,
    best: i64,
    best_s: Option<(Vec<(usize, usize)>, u32)>,
    chosen: Vec<(usize, usize)>,
    visited: u64,
    limit: u64,
}

impl Search<'_> {
    fn dfs(&mut self, start: usize, cost: i64, tree: &mut Vec<usize>) -> Result<(), DrppError> {
        self.visited += 1;
        if self.visited > self.limit {
            return Err(DrppError::ExactCap(format!("search exceeded {} nodes", self.limit)));
        }
        let depth = self.chosen.len();
        if depth == self.f {
            let mut mask = self.odd;
            for &(u, v) in &self.chosen {
                mask ^= 1 << u | 1 << v;
            }
            let total = cost.saturating_add(self.join_cost(mask));
            if total < self.best {
                self.best = total;
                self.best_s = Some((self.chosen.clone(), mask));
            }
            return Ok(());
        }
        let rest = self.f - depth - 1;
        for idx in start..self.cands.len() {
            if self.cands.len() - idx <= rest {
                break;
            }
            let (c, u, v) = self.cands[idx];
            let tail: i64 = self.cands[idx + 1..idx + 1 + rest].iter().map(|x| x.0).sum();
            if cost + c + tail >= self.best {
                break;
            }
            let (tu, tv) = (tree[self.comp_of(u)], tree[self.comp_of(v)]);
            // trees are labelled by their smallest component, so anchors keep labels below `a`
            if tu == tv || (tu < self.a && tv < self.a) {
                continue;
            }
            let saved = tree.clone();
            let (keep, drop) = (tu.min(tv), tu.max(tv));
            for t in tree.iter_mut() {
                if *t == drop {
                    *t = keep;
                }
            }
            self.chosen.push((u, v));
            let r = self.dfs(idx + 1, cost + c, tree);
            self.chosen.pop();
            *tree = saved;
            r?;
        }
        Ok(())
    }

    fn comp_of(&self, local: usize) -> usize {
        self.comp[local]
    }

    /// Minimum perfect matching on the nodes of `mask`.
    fn join_cost(&mut self, mask: u32) -> i64 {
        if mask == 0 {
            return 0;
        }
        if let Some(&c) = self.tj.get(&mask) {
            return c;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = INF;
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let c = self.pair_cost[i * self.m + j].saturating_add(self.join_cost(rest & !(1 << j)));
            best = best.min(c);
        }
        let best = best.min(INF);
        self.tj.insert(mask, best);
        best
    }

    fn pairing(&mut self, mut mask: u32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while mask != 0 {
            let target = self.join_cost(mask);
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let mut bits = rest;
            let mut found = None;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if self.pair_cost[i * self.m + j].saturating_add(self.join_cost(rest & !(1 << j))) == target {
                    found = Some(j);
                    break;
                }
            }
            let j = found.expect("memoized optimum is attained by some pair");
            out.push((i, j));
            mask = rest & !(1 << j);
        }
        out
    }
}
