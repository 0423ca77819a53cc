//! Connect-join backend: assign free components to depots, connect each
//! group by its best labelled tree over the components, then repair parity
//! with one global matching.

use std::collections::HashMap;

use super::{enumerate_depot_partitions, simplify_solution, DrppCaps, DrppError, DrppInstance};
use crate::graph::{odd_degree_nodes, Edge, EdgeMultiset, MetricInstance, Node};
use crate::matching::min_perfect_matching;

/// Cheapest node pair joining two components.
type Link = (i64, Node, Node);

struct Group {
    cost: i64,
    links: Vec<(Link, u32)>,
    mst: i64,
    mst_links: Vec<Link>,
}

struct Planner<'a> {
    base: &'a MetricInstance,
    comps: Vec<&'a [Node]>,
    a: usize,
    links: Vec<Vec<Link>>,
    odd: Vec<bool>,
    budget: u64,
    memo: HashMap<(usize, u32), Group>,
    join_memo: HashMap<Vec<Node>, i64>,
}

pub fn drpp_connect_join(inst: &DrppInstance<'_>, caps: &DrppCaps) -> Result<EdgeMultiset, DrppError> {
    let k = inst.k();
    if k > caps.connect_join_max_components {
        return Err(DrppError::ConnectJoinCap(format!(
            "{k} components, limit {}",
            caps.connect_join_max_components
        )));
    }
    let a = inst.anchors().len();
    let f = inst.free_components().len();
    if f > 0 && a == 0 {
        return Err(DrppError::Infeasible);
    }
    let base = inst.base();
    let comps: Vec<&[Node]> = inst
        .anchors()
        .iter()
        .chain(inst.free_components())
        .map(Vec::as_slice)
        .collect();
    let links = cheapest_links(base, &comps);
    let mut odd = vec![false; base.n()];
    for v in odd_degree_nodes(inst.required()) {
        odd[v] = true;
    }
    let mut planner = Planner {
        base,
        comps,
        a,
        links,
        odd,
        budget: caps.connect_join_tree_budget,
        memo: HashMap::new(),
        join_memo: HashMap::new(),
    };

    let mut best_single: Option<(i64, Vec<usize>)> = None;
    let mut best_double: Option<(i64, Vec<usize>)> = None;
    for assignment in enumerate_depot_partitions(inst) {
        let masks = group_masks(&assignment, a);
        let mut cost = 0;
        let mut mst = 0;
        for (x, &mask) in masks.iter().enumerate() {
            let g = planner.group(x, mask)?;
            cost += g.cost;
            mst += g.mst;
        }
        if best_single.as_ref().is_none_or(|b| cost < b.0) {
            best_single = Some((cost, assignment.clone()));
        }
        if best_double.as_ref().is_none_or(|b| mst < b.0) {
            best_double = Some((mst, assignment));
        }
    }
    let (_, single) = best_single.expect("at least one assignment");
    let (_, double) = best_double.expect("at least one assignment");

    let mut s_single = EdgeMultiset::new();
    for (x, mask) in group_masks(&single, a).into_iter().enumerate() {
        for &((_, u, v), copies) in &planner.memo[&(x, mask)].links {
            s_single.add_copies(Edge::new(u, v), copies);
        }
    }
    let mut s_double = EdgeMultiset::new();
    for (x, mask) in group_masks(&double, a).into_iter().enumerate() {
        for &(_, u, v) in &planner.memo[&(x, mask)].mst_links {
            s_double.add_copies(Edge::new(u, v), 2);
        }
    }
    let first = complete_parity(inst, s_single)?;
    let second = complete_parity(inst, s_double)?;
    let j = if base.scaled_weight_of(&second) < base.scaled_weight_of(&first) {
        second
    } else {
        first
    };
    Ok(simplify_solution(&j))
}

/// Doubles the cheapest link from every free component to its nearest
/// anchor and fixes parity by matching. The connect-join result never
/// weighs more than this.
pub fn drpp_star_baseline(inst: &DrppInstance<'_>) -> Result<EdgeMultiset, DrppError> {
    let a = inst.anchors().len();
    if !inst.free_components().is_empty() && a == 0 {
        return Err(DrppError::Infeasible);
    }
    let comps: Vec<&[Node]> = inst
        .anchors()
        .iter()
        .chain(inst.free_components())
        .map(Vec::as_slice)
        .collect();
    let links = cheapest_links(inst.base(), &comps);
    let mut s = EdgeMultiset::new();
    for y in a..comps.len() {
        let (_, u, v) = links[..a].iter().map(|row| row[y]).min_by_key(|l| l.0).expect("anchors exist");
        s.add_copies(Edge::new(u, v), 2);
    }
    complete_parity(inst, s).map(|j| simplify_solution(&j))
}

fn cheapest_links(base: &MetricInstance, comps: &[&[Node]]) -> Vec<Vec<Link>> {
    let k = comps.len();
    let mut links = vec![vec![(0, 0, 0); k]; k];
    for x in 0..k {
        for y in x + 1..k {
            let mut best = (i64::MAX, 0, 0);
            for &u in comps[x] {
                for &v in comps[y] {
                    best = best.min((base.sdist(u, v), u, v));
                }
            }
            links[x][y] = best;
            links[y][x] = best;
        }
    }
    links
}

fn group_masks(assignment: &[usize], a: usize) -> Vec<u32> {
    let mut masks = vec![0u32; a];
    for (i, &x) in assignment.iter().enumerate() {
        masks[x] |= 1 << i;
    }
    masks
}

fn complete_parity(inst: &DrppInstance<'_>, s: EdgeMultiset) -> Result<EdgeMultiset, DrppError> {
    let mut all = inst.required().clone();
    all.extend_from(&s);
    let m = min_perfect_matching(inst.base(), &odd_degree_nodes(&all))?;
    let mut j = s;
    j.extend_from(&m.to_multiset());
    Ok(j)
}

impl Planner<'_> {
    fn group(&mut self, anchor: usize, mask: u32) -> Result<&Group, DrppError> {
        if !self.memo.contains_key(&(anchor, mask)) {
            let g = self.build_group(anchor, mask)?;
            self.memo.insert((anchor, mask), g);
        }
        Ok(&self.memo[&(anchor, mask)])
    }

    fn build_group(&mut self, anchor: usize, mask: u32) -> Result<Group, DrppError> {
        let mut members = vec![anchor];
        members.extend((0..32).filter(|i| mask >> i & 1 == 1).map(|i| self.a + i));
        let c = members.len() as u64;
        let odd_nodes: Vec<Node> = members
            .iter()
            .flat_map(|&x| self.comps[x].iter().copied())
            .filter(|&v| self.odd[v])
            .collect();
        let base_join = self.join(odd_nodes.clone())?;
        if c == 1 {
            return Ok(Group {
                cost: base_join,
                links: vec![],
                mst: 0,
                mst_links: vec![],
            });
        }
        let trees = c.checked_pow(c as u32 - 2).unwrap_or(u64::MAX);
        if trees > self.budget {
            return Err(DrppError::ConnectJoinCap(format!(
                "{trees} trees on {c} components, budget {}",
                self.budget
            )));
        }

        let mut best: Option<(i64, Vec<(Link, u32)>)> = None;
        let mut mst: Option<(i64, Vec<Link>)> = None;
        let mut seq = vec![0usize; c as usize - 2];
        loop {
            let tree: Vec<Link> = prufer_edges(&seq, c as usize)
                .into_iter()
                .map(|(p, q)| self.links[members[p]][members[q]])
                .collect();
            let w: i64 = tree.iter().map(|l| l.0).sum();

            let mut toggled = odd_nodes.clone();
            for &(_, u, v) in &tree {
                for x in [u, v] {
                    match toggled.iter().position(|&y| y == x) {
                        Some(i) => {
                            toggled.swap_remove(i);
                        }
                        None => toggled.push(x),
                    }
                }
            }
            let single = w + self.join(toggled)?;
            let doubled = 2 * w + base_join;
            let (cost, copies) = if doubled < single { (doubled, 2) } else { (single, 1) };
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, tree.iter().map(|&l| (l, copies)).collect()));
            }
            if mst.as_ref().is_none_or(|b| w < b.0) {
                mst = Some((w, tree));
            }

            if !advance(&mut seq, c as usize) {
                break;
            }
        }
        let (cost, links) = best.expect("at least one tree");
        let (mst, mst_links) = mst.expect("at least one tree");
        Ok(Group {
            cost,
            links,
            mst,
            mst_links,
        })
    }

    fn join(&mut self, mut nodes: Vec<Node>) -> Result<i64, DrppError> {
        nodes.sort_unstable();
        if let Some(&c) = self.join_memo.get(&nodes) {
            return Ok(c);
        }
        let c = min_perfect_matching(self.base, &nodes)?.scaled_weight;
        self.join_memo.insert(nodes, c);
        Ok(c)
    }
}

fn advance(seq: &mut [usize], radix: usize) -> bool {
    for digit in seq.iter_mut() {
        *digit += 1;
        if *digit < radix {
            return true;
        }
        *digit = 0;
    }
    false
}

/// Edges of the labelled tree on `0..c` encoded by a Prüfer sequence.
fn prufer_edges(seq: &[usize], c: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; c];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(c - 1);
    for &x in seq {
        let leaf = (0..c).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..c).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}
