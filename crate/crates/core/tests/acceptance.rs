//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    csf_brute, drpp_brute, matching_brute, random_instance, random_required, random_subset, t_join_brute, Origin,
    ORIGINS,
};
use mdmtsp::forest::min_csf;
use mdmtsp::graph::{odd_degree_nodes, validate_tour, Edge, EdgeMultiset, MetricInstance, Node, Weight};
use mdmtsp::instances::gen_lower_bound;
use mdmtsp::matching::{min_perfect_matching, min_t_join};
use mdmtsp::postperson::{
    drpp_connect_join, drpp_exact, drpp_exact_on_edges, reduce_weights, retained_edges, DrppBackend, DrppCaps,
    DrppInstance,
};
use mdmtsp::rational::format_weight;
use mdmtsp::solver::{
    alignment_diagnostics, oracle_opt, parity_lemma_check, solve, Algorithm, OracleCap, SolveConfig, SolveReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VALIDITY_BUDGET: Duration = Duration::from_secs(300);

fn w(x: i64) -> Weight {
    Weight::from_integer(x)
}

fn ratio_text(r: Weight) -> String {
    format!("{} ({:.4})", format_weight(r), *r.numer() as f64 / *r.denom() as f64)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn config(algorithm: Algorithm, epsilon: Weight, backend: DrppBackend) -> SolveConfig {
    SolveConfig {
        algorithm,
        epsilon,
        backend,
        ..SolveConfig::default()
    }
}

fn run(inst: &MetricInstance, cfg: &SolveConfig) -> Result<SolveReport, String> {
    let report = solve(inst, cfg).map_err(|e| e.to_string())?;
    validate_tour(inst, &report.tour).map_err(|v| format!("{v:?}"))?;
    if report.weight != inst.weight_of(&report.tour) {
        return Err("reported weight differs from tour weight".into());
    }
    Ok(report)
}

/// An instance with its exact optimum.
struct Solved {
    inst: MetricInstance,
    opt: Weight,
    tour: EdgeMultiset,
}

fn solved(inst: MetricInstance) -> Solved {
    let o = oracle_opt(&inst, &OracleCap::default()).expect("within oracle cap");
    Solved {
        opt: o.weight,
        tour: o.tour,
        inst,
    }
}

/// Mixed-origin suite with `n ≤ 9`, `d ≤ 3`.
fn oracle_suite() -> Vec<Solved> {
    (0..200usize)
        .map(|i| {
            let n = 2 + (i / 3) % 8;
            let d = (1 + (i / 24) % 3).min(n);
            solved(random_instance(ORIGINS[i % 3], n, d, 10_000 + i as u64))
        })
        .collect()
}

/// Connected unit-weight graphs with `n ≤ 9`, `d ≤ 3`.
fn graphic_suite() -> Vec<Solved> {
    (0..100usize)
        .map(|i| {
            let n = 2 + i % 8;
            let d = (1 + (i / 8) % 3).min(n);
            solved(random_instance(Origin::Graphic, n, d, 20_000 + i as u64))
        })
        .collect()
}

fn validity() -> Outcome {
    let start = Instant::now();
    let oracle = SolveConfig {
        oracle_cap: OracleCap {
            max_nodes: 12,
            max_depots: 4,
        },
        ..config(Algorithm::Oracle, Weight::new(1, 4), DrppBackend::Exact)
    };
    let mut configs = vec![
        config(Algorithm::ChristofidesMd, Weight::new(1, 4), DrppBackend::Exact),
        config(Algorithm::Extended, Weight::new(1, 4), DrppBackend::Exact),
        config(Algorithm::Extended, Weight::new(1, 4), DrppBackend::ConnectJoin),
        config(Algorithm::RppBaseline, Weight::new(1, 4), DrppBackend::Exact),
        oracle,
    ];
    let graphic = config(Algorithm::Graphic, Weight::new(1, 4), DrppBackend::Exact);
    let (mut runs, mut failures) = (0, Vec::new());
    for i in 0..500usize {
        let origin = ORIGINS[i % 3];
        let n = 1 + (i / 3) % 12;
        let d = (1 + (i / 36) % 4).min(n);
        let inst = random_instance(origin, n, d, i as u64);
        if origin == Origin::Graphic {
            configs.push(graphic);
        }
        for cfg in &configs {
            runs += 1;
            if let Err(e) = run(&inst, cfg) {
                failures.push(format!("{} / {}: {e}", inst.name(), cfg.algorithm));
            }
        }
        if origin == Origin::Graphic {
            configs.pop();
        }
    }
    let elapsed = start.elapsed();
    eprintln!("  [validity suite took {:.1}s]", elapsed.as_secs_f64());
    let pass = failures.is_empty() && elapsed < VALIDITY_BUDGET;
    let mut detail = format!("{runs} solver runs on 500 instances, {} invalid", failures.len());
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    if elapsed >= VALIDITY_BUDGET {
        detail.push_str("; over the time budget");
    }
    Outcome::new(pass, detail)
}

fn christofides_bound(suite: &[Solved]) -> Outcome {
    let cfg = config(Algorithm::ChristofidesMd, Weight::new(1, 4), DrppBackend::Exact);
    let mut ok = true;
    let mut worst = w(1);
    for s in suite {
        let alg = run(&s.inst, &cfg).unwrap().weight;
        ok &= alg <= w(2) * s.opt;
        if s.opt > w(0) {
            worst = worst.max(alg / s.opt);
        }
    }

    let delta = Weight::new(1, 10);
    let b3 = gen_lower_bound(3, delta).unwrap();
    let b3_alg = run(&b3, &cfg).unwrap().weight;
    let b3_opt = oracle_opt(&b3, &OracleCap::default()).unwrap().weight;
    let b3_ok = b3_alg == Weight::new(27, 5) && b3_opt == Weight::new(24, 5);

    let b10 = gen_lower_bound(10, delta).unwrap();
    let b10_alg = run(&b10, &cfg).unwrap().weight;
    let mut walk: EdgeMultiset = (0..9).map(|i| (i, i + 1)).collect();
    walk.add(10, 0);
    walk.add(9, 10);
    let walk_ok = validate_tour(&b10, &walk).is_ok() && b10.weight_of(&walk) == Weight::new(59, 5);
    let b10_ratio = b10_alg / b10.weight_of(&walk);
    let b10_ok = walk_ok && b10_alg == w(18) && b10_ratio == w(18) / Weight::new(59, 5);

    Outcome::new(
        ok && b3_ok && b10_ok,
        format!(
            "200 instances within 2·OPT: {ok}, max ratio {}; B(3) {} vs OPT {}; B(10) {} vs walk {}, ratio ≥ {}",
            ratio_text(worst),
            format_weight(b3_alg),
            format_weight(b3_opt),
            format_weight(b10_alg),
            format_weight(b10.weight_of(&walk)),
            ratio_text(b10_ratio),
        ),
    )
}

fn extended_bound(suite: &[Solved]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [Weight::new(1, 8), Weight::new(1, 4)] {
        let cfg = config(Algorithm::Extended, eps, DrppBackend::Exact);
        let bound = Weight::new(3, 2) + w(4) * eps;
        let (mut worst, mut violations, mut fallbacks) = (w(1), 0, 0);
        for s in suite {
            let r = run(&s.inst, &cfg).unwrap();
            if r.weight > bound * s.opt {
                violations += 1;
            }
            fallbacks += r.certificate.backend_fallback as usize;
            if s.opt > w(0) {
                worst = worst.max(r.weight / s.opt);
            }
        }
        pass &= violations == 0;
        parts.push(format!(
            "ε={}: bound {}, max ratio {}, {violations} over, {fallbacks} fallbacks",
            format_weight(eps),
            format_weight(bound),
            ratio_text(worst)
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn weight_reduction() -> Outcome {
    let eps_values = [Weight::new(1, 8), Weight::new(1, 4), Weight::new(1, 2), w(1), w(2)];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut trials, mut bad) = (0, 0);
    while trials < 1000 {
        let n = rng.gen_range(2..=8);
        let d = rng.gen_range(1..=n.min(3));
        let inst = random_instance(ORIGINS[trials % 3], n, d, rng.gen());
        let beta = inst.sdist(rng.gen_range(0..n), rng.gen_range(0..n));
        let edges = retained_edges(&inst, beta);
        if beta == 0 || edges.is_empty() {
            continue;
        }
        trials += 1;
        let eps = eps_values[rng.gen_range(0..eps_values.len())];
        let red = reduce_weights(&edges, eps, beta).unwrap();
        let cap_ok = red.weights.values().all(|&x| w(x) <= red.cap());
        let mut j = EdgeMultiset::new();
        for &e in edges.keys() {
            j.add_copies(e, rng.gen_range(0..=2));
        }
        // all quantities in scaled units
        let wj = w(inst.scaled_weight_of(&j));
        let low = red.unit() * red.weight_of(&j).unwrap();
        let sandwich = low <= wj && wj <= low + red.unit() * j.total() as i64 && wj <= low + eps * beta;
        bad += (!cap_ok || !sandwich) as usize;
    }

    let caps = DrppCaps::default();
    let (mut transfers, mut transfer_bad) = (0, 0);
    for seed in 0..40u64 {
        let n = 3 + seed as usize % 5;
        let inst = random_instance(ORIGINS[seed as usize % 3], n, 1 + seed as usize % 2, 30_000 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_required(&inst, &mut rng, 2);
        let drpp = DrppInstance::new(&inst, r.clone(), true).unwrap();
        let floor = r.distinct_edges().map(|e| inst.sdist(e.u(), e.v())).max().unwrap_or(0).max(1);
        let mut betas: Vec<i64> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| inst.sdist(u, v))
            .filter(|&x| x >= floor)
            .collect();
        betas.sort_unstable();
        betas.dedup();
        for beta in betas {
            let edges = retained_edges(&inst, beta);
            let opt = drpp_brute(&inst, &r, true, |u, v| edges.get(&Edge::new(u, v)).copied());
            for eps in [Weight::new(1, 4), Weight::new(1, 2), w(1)] {
                transfers += 1;
                let red = reduce_weights(&edges, eps, beta).unwrap();
                let found = drpp_exact_on_edges(&drpp, &red.weights, &caps).unwrap();
                let ok = match (found, opt) {
                    (Some((j, _)), Some(opt)) => {
                        drpp.is_solution(&j)
                            && j.max_multiplicity() <= 2
                            && w(inst.scaled_weight_of(&j)) <= w(opt) + eps * beta
                    }
                    (None, None) => true,
                    _ => false,
                };
                transfer_bad += (!ok) as usize;
            }
        }
    }
    Outcome::new(
        bad == 0 && transfer_bad == 0,
        format!(
            "{trials} cap/sandwich trials, {bad} violations; {transfers} exhaustive α=1 transfers on n ≤ 7, {transfer_bad} violations"
        ),
    )
}

fn csf_optimality(suites: &[&[Solved]]) -> Outcome {
    let mut mismatches = 0;
    for i in 0..100usize {
        let n = 1 + i % 8;
        let d = (1 + (i / 8) % 4).min(n);
        let inst = random_instance(ORIGINS[i % 3], n, d, 40_000 + i as u64);
        let f = min_csf(&inst, inst.depots()).unwrap();
        mismatches += (f.scaled_weight() != csf_brute(&inst)) as usize;
    }
    let mut checked = 0;
    let mut above = 0;
    for s in suites.iter().flat_map(|s| s.iter()) {
        checked += 1;
        let f = min_csf(&s.inst, s.inst.depots()).unwrap();
        above += (f.weight(&s.inst) > s.opt) as usize;
    }
    Outcome::new(
        mismatches == 0 && above == 0,
        format!("100 enumerations, {mismatches} mismatches; forest ≤ OPT on {checked} instances, {above} violations"),
    )
}

fn join_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut join_bad, mut match_bad) = (0, 0);
    for i in 0..100usize {
        let n = 2 + i % 7;
        let inst = random_instance(ORIGINS[i % 3], n, 1, 50_000 + i as u64);
        let mut terminals: Vec<Node> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if terminals.len() % 2 == 1 {
            terminals.pop();
        }
        let j = min_t_join(&inst, &terminals).unwrap();
        let ok = odd_degree_nodes(&j) == terminals
            && j.max_multiplicity() <= 2
            && inst.scaled_weight_of(&j) == t_join_brute(&inst, &terminals);
        join_bad += (!ok) as usize;
        let m = min_perfect_matching(&inst, &terminals).unwrap();
        match_bad += (m.scaled_weight != matching_brute(&inst, &terminals)) as usize;
    }
    Outcome::new(
        join_bad == 0 && match_bad == 0,
        format!("100 T-joins, {join_bad} mismatches; 100 matchings, {match_bad} mismatches"),
    )
}

fn graphic_bounds(suite: &[Solved]) -> Outcome {
    let g = config(Algorithm::Graphic, Weight::new(1, 4), DrppBackend::Exact);
    let a1 = config(Algorithm::ChristofidesMd, Weight::new(1, 4), DrppBackend::Exact);
    let (mut g_bad, mut a1_bad, mut tight) = (0, 0, 0);
    for s in suite {
        let gw = run(&s.inst, &g).unwrap().weight;
        let aw = run(&s.inst, &a1).unwrap().weight;
        let limit = if s.opt == w(0) {
            w(0)
        } else {
            (Weight::new(3, 2) * s.opt).ceil() - w(1)
        };
        g_bad += (gw > limit) as usize;
        tight += (gw == limit && s.opt > w(0)) as usize;
        a1_bad += (aw > Weight::new(3, 2) * s.opt + w(s.inst.d() as i64 - 1)) as usize;
    }
    Outcome::new(
        g_bad == 0 && a1_bad == 0,
        format!(
            "100 graphs: graphic over ⌈3/2·OPT⌉−1 on {g_bad} (tight on {tight}); forest-plus-matching over 3/2·OPT+(d−1) on {a1_bad}"
        ),
    )
}

fn baseline_bound(suites: &[&[Solved]]) -> Outcome {
    let cfg = config(Algorithm::RppBaseline, Weight::new(1, 4), DrppBackend::Exact);
    let (mut checked, mut bad) = (0, 0);
    let mut worst = w(1);
    for s in suites.iter().flat_map(|s| s.iter()) {
        let r = run(&s.inst, &cfg).unwrap();
        let depot_walk = r.certificate.depot_tour_weight.unwrap();
        checked += 1;
        bad += (r.weight > Weight::new(3, 2) * s.opt + depot_walk / w(2)) as usize;
        if s.opt > w(0) {
            worst = worst.max(r.weight / s.opt);
        }
    }
    Outcome::new(
        bad == 0,
        format!(
            "{checked} instances, {bad} over 3/2·OPT + w(S)/2; max ratio to OPT {}",
            ratio_text(worst)
        ),
    )
}

/// Triples whose alignment graph has at least one edge, so that `X` has
/// something to choose from; the draw is capped to keep the run bounded.
fn parity_checks() -> Outcome {
    let (mut bad, mut odd, mut nonempty, mut triples) = (0, 0, 0, 0);
    let mut seed = 70_000u64;
    while triples < 100 && seed < 75_000 {
        seed += 1;
        let n = 4 + seed as usize % 6;
        let d = 2 + seed as usize % 2;
        let s = solved(random_instance(ORIGINS[seed as usize % 3], n, d, seed));
        let f = min_csf(&s.inst, s.inst.depots()).unwrap();
        let h = alignment_diagnostics(&s.inst, &f, &s.tour).unwrap();
        if h.edges.is_empty() {
            continue;
        }
        triples += 1;
        odd += (h.odd_depots.len() % 2) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_subset(&h.witnesses, &mut rng);
        nonempty += (!x.is_empty()) as usize;
        bad += (!parity_lemma_check(&s.inst, &f, &s.tour, &h.witnesses, &x).unwrap()) as usize;
    }
    Outcome::new(
        triples == 100 && bad == 0 && odd == 0,
        format!("{triples} triples with a nonempty alignment graph ({nonempty} with X ≠ ∅), {bad} parity failures, {odd} odd |D_odd|"),
    )
}

fn backend_consistency() -> Outcome {
    let caps = DrppCaps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut count, mut invalid, mut below, mut equal) = (0, 0, 0, 0);
    let mut worst = w(1);
    let mut attempt = 0u64;
    while count < 100 {
        attempt += 1;
        let n = rng.gen_range(3..=9);
        let d = rng.gen_range(1..=2);
        let inst = random_instance(ORIGINS[count % 3], n, d, 60_000 + attempt);
        let (required, spanning) = if count % 2 == 0 {
            let f = min_csf(&inst, inst.depots()).unwrap();
            let x = random_subset(f.edges(), &mut rng);
            let kept: EdgeMultiset = f.edges().iter().copied().filter(|e| !x.contains(e)).collect();
            (kept, true)
        } else {
            let size = rng.gen_range(1..=4);
            (random_required(&inst, &mut rng, size), false)
        };
        let drpp = DrppInstance::new(&inst, required, spanning).unwrap();
        if drpp.k() > 3 {
            continue;
        }
        count += 1;
        let exact = drpp_exact(&drpp, &caps).unwrap();
        let cj = drpp_connect_join(&drpp, &caps).unwrap();
        invalid += (!drpp.is_solution(&exact) || !drpp.is_solution(&cj)) as usize;
        let (we, wc) = (inst.scaled_weight_of(&exact), inst.scaled_weight_of(&cj));
        below += (wc < we) as usize;
        equal += (wc == we) as usize;
        if we > 0 {
            worst = worst.max(Weight::new(wc, we));
        }
    }
    Outcome::new(
        invalid == 0 && below == 0,
        format!(
            "100 instances, {invalid} invalid, {below} with connect-join below exact; equal on {equal}, max gap {}",
            ratio_text(worst)
        ),
    )
}

/// Criteria 1 to 10 in order.
fn suite() -> Vec<Outcome> {
    let oracle = oracle_suite();
    let graphic = graphic_suite();
    vec![
        validity(),
        christofides_bound(&oracle),
        extended_bound(&oracle),
        weight_reduction(),
        csf_optimality(&[&oracle, &graphic]),
        join_exactness(),
        graphic_bounds(&graphic),
        baseline_bound(&[&oracle, &graphic]),
        parity_checks(),
        backend_consistency(),
    ]
}

fn render(outcomes: &[Outcome]) -> String {
    outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| format!("criterion {:>2} {}: {}\n", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail))
        .collect()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let first = suite();
    let report = render(&first);
    print!("{report}");
    let second = render(&suite());
    let same = report == second;
    println!(
        "criterion 11 {}: repeated run {} ({} bytes)",
        if same { "PASS" } else { "FAIL" },
        if same { "byte-identical" } else { "differs" },
        report.len()
    );
    eprintln!("  [acceptance took {:.1}s]", start.elapsed().as_secs_f64());
    if first.iter().all(|o| o.pass) && same {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
