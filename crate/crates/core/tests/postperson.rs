mod common;

use std::collections::BTreeMap;

use common::{drpp_brute, drpp_brute_metric, random_instance, random_required, random_subset, ORIGINS};
use mdmtsp::forest::min_csf;
use mdmtsp::graph::{Edge, EdgeMultiset, Weight};
use mdmtsp::postperson::{
    drpp_connect_join, drpp_exact, drpp_exact_on_edges, drpp_star_baseline, drpp_weight_reduced,
    enumerate_depot_partitions, reduce_weights, retained_edges, DrppCaps, DrppInstance,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(max_n: usize) -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (0usize..3, 2usize..=max_n, 1usize..=3, any::<u64>()).prop_map(|(o, n, d, s)| (o, n, d.min(n), s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn backends_against_brute_force((o, n, d, seed) in params(7), spanning in any::<bool>(), size in 0usize..5) {
        let inst = random_instance(ORIGINS[o], n, d, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let r = random_required(&inst, &mut rng, size);
        let drpp = DrppInstance::new(&inst, r.clone(), spanning).unwrap();
        let caps = DrppCaps::default();
        let best = drpp_brute_metric(&inst, &r, spanning).unwrap();

        let exact = drpp_exact(&drpp, &caps).unwrap();
        prop_assert!(drpp.is_solution(&exact));
        prop_assert!(exact.max_multiplicity() <= 2);
        prop_assert_eq!(inst.scaled_weight_of(&exact), best);

        let cj = drpp_connect_join(&drpp, &caps).unwrap();
        prop_assert!(drpp.is_solution(&cj));
        let star = drpp_star_baseline(&drpp).unwrap();
        prop_assert!(drpp.is_solution(&star));
        prop_assert!(inst.scaled_weight_of(&cj) >= best);
        prop_assert!(inst.scaled_weight_of(&cj) <= inst.scaled_weight_of(&star));
    }

    #[test]
    fn forest_minus_edges_as_in_the_extended_algorithm((o, n, d, seed) in params(7)) {
        let inst = random_instance(ORIGINS[o], n, d, seed);
        let f = min_csf(&inst, inst.depots()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let removed = random_subset(f.edges(), &mut rng);
        let kept: EdgeMultiset = f.edges().iter().copied().filter(|e| !removed.contains(e)).collect();
        let drpp = DrppInstance::new(&inst, kept.clone(), true).unwrap();
        prop_assert_eq!(drpp.k(), d + removed.len());
        let exact = drpp_exact(&drpp, &DrppCaps::default()).unwrap();
        prop_assert_eq!(Some(inst.scaled_weight_of(&exact)), drpp_brute_metric(&inst, &kept, true));
    }

    #[test]
    fn depot_assignments_are_complete((o, n, d, seed) in params(6), size in 0usize..4) {
        let inst = random_instance(ORIGINS[o], n, d, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_required(&inst, &mut rng, size);
        let drpp = DrppInstance::new(&inst, r, true).unwrap();
        let a = drpp.anchors().len();
        let f = drpp.free_components().len();
        let all: Vec<Vec<usize>> = enumerate_depot_partitions(&drpp).collect();
        prop_assert_eq!(all.len(), a.pow(f as u32));
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), all.len());
    }

    #[test]
    fn reduced_weights_sandwich((o, n, d, seed) in params(8), num in 1i64..6, den in 1i64..6) {
        let inst = random_instance(ORIGINS[o], n, d, seed);
        let eps = Weight::new(num, den);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = inst.sdist(rng.gen_range(0..n), rng.gen_range(0..n)).max(1);
        let edges = retained_edges(&inst, beta);
        prop_assume!(!edges.is_empty());
        let red = reduce_weights(&edges, eps, beta).unwrap();
        for &w in red.weights.values() {
            prop_assert!(Weight::from_integer(w) <= red.cap());
        }
        let list: Vec<Edge> = edges.keys().copied().collect();
        let mut j = EdgeMultiset::new();
        for &e in &list {
            j.add_copies(e, rng.gen_range(0..=2));
        }
        let scale = Weight::from_integer(inst.scale());
        let w = Weight::from_integer(inst.scaled_weight_of(&j)) / scale;
        let unit = red.unit() / scale;
        let low = unit * red.weight_of(&j).unwrap();
        prop_assert!(low <= w);
        prop_assert!(w <= low + unit * j.total() as i64);
        prop_assert!(w <= low + eps * Weight::from_integer(beta) / scale);
    }
}

/// Optimal completions under reduced weights lose at most `εβ` against the
/// optimum over the same edges.
#[test]
fn reduced_optimum_transfers() {
    let caps = DrppCaps::default();
    let eps_values = [Weight::new(1, 4), Weight::new(1, 2), Weight::from_integer(1)];
    for seed in 0..30u64 {
        let o = ORIGINS[seed as usize % 3];
        let inst = random_instance(o, 4 + seed as usize % 4, 1 + seed as usize % 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_required(&inst, &mut rng, 2);
        let drpp = DrppInstance::new(&inst, r.clone(), true).unwrap();
        let floor = r.distinct_edges().map(|e| inst.sdist(e.u(), e.v())).max().unwrap_or(0).max(1);
        let mut betas: Vec<i64> = (0..inst.n())
            .flat_map(|u| (u + 1..inst.n()).map(move |v| (u, v)))
            .map(|(u, v)| inst.sdist(u, v))
            .filter(|&w| w >= floor)
            .collect();
        betas.sort_unstable();
        betas.dedup();
        for &beta in &betas {
            let edges = retained_edges(&inst, beta);
            let opt = drpp_brute(&inst, &r, true, |u, v| edges.get(&Edge::new(u, v)).copied());
            for &eps in &eps_values {
                let red = reduce_weights(&edges, eps, beta).unwrap();
                let found = drpp_exact_on_edges(&drpp, &red.weights, &caps).unwrap();
                let reduced_opt = drpp_brute(&inst, &r, true, |u, v| red.weights.get(&Edge::new(u, v)).copied());
                match (found, opt) {
                    (Some((j, wj)), Some(opt)) => {
                        assert_eq!(Some(wj), reduced_opt);
                        assert!(drpp.is_solution(&j));
                        let slack = eps * Weight::from_integer(beta);
                        assert!(
                            Weight::from_integer(inst.scaled_weight_of(&j)) <= Weight::from_integer(opt) + slack,
                            "seed {seed}, beta {beta}"
                        );
                    }
                    (None, None) => assert_eq!(reduced_opt, None),
                    other => panic!("feasibility differs: {other:?}"),
                }
            }
        }
        let best = drpp_weight_reduced(&drpp, Weight::new(1, 4), &caps).unwrap();
        assert!(drpp.is_solution(&best.j));
        let exact = inst.scaled_weight_of(&drpp_exact(&drpp, &caps).unwrap());
        assert!(best.scaled_weight >= exact);
    }
}

#[test]
fn reduced_weights_at_the_extremes() {
    let mut edges = BTreeMap::new();
    edges.insert(Edge::new(0, 1), 10);
    edges.insert(Edge::new(1, 2), 0);
    let red = reduce_weights(&edges, Weight::new(1, 3), 10).unwrap();
    assert_eq!(red.weights[&Edge::new(0, 1)], 12);
    assert_eq!(red.weights[&Edge::new(1, 2)], 0);
    assert!(reduce_weights(&edges, Weight::new(1, 3), 9).is_err());
    assert!(reduce_weights(&edges, Weight::from_integer(0), 10).is_err());
}
