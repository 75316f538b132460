//! End-to-end acceptance checks. Each test writes one PASS/FAIL line to stderr, past the
//! output capture, and then asserts.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submat_core::dynbase::{BackendKind, BucketedBase};
use submat_core::lazy::{lazy_sampling_greedy, LazyGreedyConfig};
use submat_core::pipeline::{
    baseline_greedy, brute_force_opt, estimate_opt, solve, welfare_reduce, Algo, PipelineConfig, WelfareInstance,
};
use submat_core::rounding::{swap_round, BaseCombination, RoundingPath};
use submat_core::selfcheck::{self, SelfcheckConfig};
use submat_core::{gen, ElementSet, MatroidInstance, ModularObjective, SetFunction, ValuationOracle};

const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;

const DYNBASE_SEQUENCES: usize = 10_000;
const DYNBASE_SECS: f64 = 120.0;
const PARTITION_UPDATES: u64 = 100_000;
const PARTITION_C: f64 = 0.1;
const EULER_OPS: usize = 100_000;
const EULER_C: f64 = 8.0;
const ROUNDINGS: usize = 2000;
const ROUNDING_SE: f64 = 2.0;
const DISTRIBUTION_SIGMA: f64 = 3.0;
const GOODNESS_RUNS: u64 = 20;
const GOODNESS_FRACTION: f64 = 0.5;
const E2E_INSTANCES: u64 = 100;
const E2E_EPS: f64 = 0.1;
const E2E_SLACK: f64 = 0.15;
const E2E_RATE: f64 = 0.9;
const E2E_SECS: f64 = 600.0;
const SCALING_EPS: f64 = 0.2;
const PIPELINE_SLOPE: f64 = 1.15;
const BASELINE_SLOPE: f64 = 1.6;
const WELFARE_SEEDS: u64 = 50;

fn verdict(id: u32, name: &str, ok: bool, detail: String) {
    let line = format!(
        "acceptance {id} [{name}]: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(ok, "{line}");
}

fn random_base<R: Rng + ?Sized>(m: &MatroidInstance, rng: &mut R) -> ElementSet {
    let w: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen()).collect();
    m.max_weight_base_bruteforce(&w)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) = (xs.iter().map(|x| x.ln()).collect(), ys.iter().map(|y| y.ln()).collect());
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[test]
fn c1_dynamic_base_equivalence() {
    let config = SelfcheckConfig {
        seed: 1,
        dynbase_sequences: DYNBASE_SEQUENCES,
        ..SelfcheckConfig::default()
    };
    let r = selfcheck::dynbase_equivalence(&config);
    verdict(
        1,
        "dynamic-base equivalence",
        r.passed() && r.cases == DYNBASE_SEQUENCES && r.secs < DYNBASE_SECS,
        format!(
            "{} sequences, {} checked updates, {} failures, {:.1}s < {DYNBASE_SECS}s {:?}",
            r.cases, r.checks, r.failed, r.secs, r.failures
        ),
    );
}

#[test]
fn c2_partition_amortized_bound() {
    let mut worst: f64 = 0.0;
    let mut cs = Vec::new();
    for scale in 0..10 {
        let n = 100usize << scale;
        let mut rng = ChaCha8Rng::seed_from_u64(scale as u64);
        let m: MatroidInstance = gen::random_partition(n, (n / 20).max(1), 8, &mut rng).into();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut db = BucketedBase::build(&m, &values, 1.0, 0.2, BackendKind::Partition).unwrap();
        for _ in 0..PARTITION_UPDATES {
            let e = db.sample_base(&mut rng).unwrap();
            let to = (db.level(e) + rng.gen_range(0..3)).min(db.grid().floor_level());
            db.update_level(e, to).unwrap();
        }
        let bound = n as f64 + PARTITION_UPDATES as f64 * f64::from(db.grid().buckets());
        let c = db.steps() as f64 / bound;
        cs.push(format!("{n}:{c:.4}"));
        worst = worst.max(c);
    }
    verdict(
        2,
        "partition amortized bound",
        worst <= PARTITION_C,
        format!("max C = {worst:.4} <= {PARTITION_C} over scales [{}]", cs.join(" ")),
    );
}

#[test]
fn c3_euler_forest() {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, seed) in [(64, 3), (1000, 4)] {
        let (r, per_op) = selfcheck::euler_equivalence(EULER_OPS, n, seed);
        let c = per_op / (n as f64).log2();
        ok &= r.passed() && r.checks == EULER_OPS as u64 && c <= EULER_C;
        parts.push(format!(
            "n={n}: {} mismatches, cost/op {per_op:.1} = {c:.2}·log2 n",
            r.failed
        ));
    }
    verdict(
        3,
        "euler forest",
        ok,
        format!("{} ops each, C <= {EULER_C}; {}", EULER_OPS, parts.join("; ")),
    );
}

#[test]
fn c4_swap_rounding() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let g = gen::random_connected_graph(50, 150, &mut rng);
    let f = gen::coverage_on_edges(&g, 40, 2, &mut rng);
    let m: MatroidInstance = g.clone().into();
    let trees: Vec<ElementSet> = (0..3).map(|_| random_base(&m, &mut rng)).collect();
    let comb = BaseCombination::new(&m, trees, vec![0.5, 0.3, 0.2]).unwrap();
    let x = comb.point(m.ground_size());
    let fx = f.multilinear(&x);
    let mut values = Vec::with_capacity(ROUNDINGS);
    let mut all_trees = true;
    for _ in 0..ROUNDINGS {
        let s = swap_round(&m, &comb, RoundingPath::Auto, &mut rng).unwrap();
        all_trees &= g.is_spanning_tree(&s);
        values.push(f.evaluate(&s));
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let se = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt();
    let mean_ok = mean >= fx - ROUNDING_SE * se;

    // fast path against the generic lowest-index merge on a small graph
    let small = gen::random_connected_graph(16, 36, &mut rng);
    let sm: MatroidInstance = small.into();
    let trees: Vec<ElementSet> = (0..3).map(|_| random_base(&sm, &mut rng)).collect();
    let comb = BaseCombination::new(&sm, trees, vec![0.4, 0.35, 0.25]).unwrap();
    let trials = 4000;
    let mut hits = [vec![0usize; sm.ground_size()], vec![0usize; sm.ground_size()]];
    for (i, path) in [RoundingPath::Auto, RoundingPath::Generic].into_iter().enumerate() {
        for _ in 0..trials {
            for &e in swap_round(&sm, &comb, path, &mut rng).unwrap().iter() {
                hits[i][e] += 1;
            }
        }
    }
    let worst_z = (0..sm.ground_size())
        .map(|e| {
            let (p1, p2) = (hits[0][e] as f64 / trials as f64, hits[1][e] as f64 / trials as f64);
            let p = (p1 + p2) / 2.0;
            let sd = (p * (1.0 - p) * 2.0 / trials as f64).sqrt();
            if sd == 0.0 {
                if p1 == p2 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (p1 - p2).abs() / sd
            }
        })
        .fold(0.0, f64::max);
    verdict(
        4,
        "swap rounding",
        all_trees && mean_ok && worst_z <= DISTRIBUTION_SIGMA,
        format!(
            "mean f {mean:.3} vs F(x) {fx:.3} - {ROUNDING_SE}·SE {se:.3}; all spanning trees: {all_trees}; \
             fast vs generic max |z| {worst_z:.2} <= {DISTRIBUTION_SIGMA}"
        ),
    );
}

#[test]
fn c5_bucket_goodness() {
    let mut audits = 0usize;
    let mut worst: f64 = 1.0;
    let mut leaks = 0usize;
    for seed in 0..GOODNESS_RUNS {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let f = gen::random_coverage(200, 300, 1..=12, &mut rng);
        let m: MatroidInstance = gen::blocks(200, 4).into();
        let oracle = ValuationOracle::new(f);
        let est = estimate_opt(&oracle, &m, 0.2).unwrap();
        let mut cfg = LazyGreedyConfig::new(0.2, est.m);
        // small c so the run continues to a full base instead of stopping at the first check
        cfg.c = Some(0.05);
        cfg.audit = true;
        let out = lazy_sampling_greedy(&oracle, &m, cfg, &mut rng).unwrap();
        for rec in &out.trace {
            for a in rec.audit.iter().flatten().filter(|a| a.size > 0) {
                audits += 1;
                leaks += a.above_cache;
                worst = worst.min(a.fraction());
            }
        }
    }
    verdict(
        5,
        "bucket goodness",
        audits > 0 && worst >= GOODNESS_FRACTION && leaks == 0,
        format!("{GOODNESS_RUNS} runs, {audits} nonempty bucket audits, min good fraction {worst:.3} >= {GOODNESS_FRACTION}"),
    );
}

#[test]
fn c6_end_to_end_approximation() {
    let start = Instant::now();
    let mut hits = 0;
    let mut worst: f64 = f64::INFINITY;
    for i in 0..E2E_INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(6000 + i);
        let n = rng.gen_range(8..=20);
        let f = gen::random_coverage(n, 30, 1..=6, &mut rng);
        let m = gen::random_matroid(n, 3, &mut rng);
        assert!(m.rank() <= 3);
        let oracle = ValuationOracle::new(f);
        let opt = brute_force_opt(&oracle, &m).unwrap().1;
        let config = PipelineConfig::new(E2E_EPS);
        assert_eq!(config.restarts, 3);
        let r = solve(&oracle, &m, Algo::Pipeline, &config, i).unwrap();
        assert!(m.is_independent(&r.solution));
        let ratio = if opt > 0.0 { r.value / opt } else { 1.0 };
        worst = worst.min(ratio);
        if r.value >= (ONE_MINUS_INV_E - E2E_SLACK) * opt - 1e-9 {
            hits += 1;
        }
    }
    let rate = hits as f64 / E2E_INSTANCES as f64;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        6,
        "end-to-end approximation",
        rate >= E2E_RATE && secs < E2E_SECS,
        format!(
            "{hits}/{E2E_INSTANCES} reach (1-1/e-{E2E_SLACK})·OPT, need {E2E_RATE}; worst ratio {worst:.3}; {secs:.1}s"
        ),
    );
}

#[test]
fn c7_oracle_scaling() {
    let sizes: Vec<usize> = (12..=16).map(|p| 1usize << p).collect();
    let (mut ours, mut base) = (Vec::new(), Vec::new());
    for &n in &sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let (f, m) = gen::scaling_coverage(n, &mut rng);
        let m: MatroidInstance = m.into();
        let oracle = ValuationOracle::new(f.clone());
        let r = solve(&oracle, &m, Algo::Pipeline, &PipelineConfig::new(SCALING_EPS), 7).unwrap();
        ours.push(r.total_calls as f64);
        let oracle = ValuationOracle::new(f);
        baseline_greedy(&oracle, &m).unwrap();
        base.push(oracle.call_count() as f64);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let (s_ours, s_base) = (slope(&xs, &ours), slope(&xs, &base));
    verdict(
        7,
        "near-linear oracle scaling",
        s_ours <= PIPELINE_SLOPE && s_base >= BASELINE_SLOPE,
        format!(
            "pipeline slope {s_ours:.3} <= {PIPELINE_SLOPE}, baseline slope {s_base:.3} >= {BASELINE_SLOPE}; calls {ours:?} vs {base:?}"
        ),
    );
}

#[test]
fn c8_welfare_reduction() {
    let mut hits = 0;
    for seed in 0..WELFARE_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
        let w: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.gen_range(0.0..10.0)).collect())
            .collect();
        // each item goes to one player or nobody
        let mut best: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let take = |item: usize, who: usize| if who < 2 { w[who][item] } else { 0.0 };
                best = best.max(take(0, a) + take(1, b));
            }
        }
        let vals: Vec<std::sync::Arc<dyn SetFunction>> = w
            .iter()
            .map(|v| std::sync::Arc::new(ModularObjective::new(v.clone()).unwrap()) as _)
            .collect();
        let red = welfare_reduce(&WelfareInstance::new(2, vals).unwrap());
        let r = solve(
            &red.oracle,
            &red.matroid,
            Algo::Pipeline,
            &PipelineConfig::new(0.1),
            seed,
        )
        .unwrap();
        assert!(red.matroid.is_independent(&r.solution));
        if r.value >= (ONE_MINUS_INV_E - 0.15) * best - 1e-9 {
            hits += 1;
        }
    }
    let rate = hits as f64 / WELFARE_SEEDS as f64;
    verdict(
        8,
        "welfare reduction",
        rate >= 0.9,
        format!("{hits}/{WELFARE_SEEDS} seeds reach (1-1/e-0.15)·optimum, need 0.9"),
    );
}
