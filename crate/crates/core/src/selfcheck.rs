//! Randomized equivalence suites against brute-force references, shared by the
//! `selfcheck` command and the test-suite.
//!
//! * dynamic base: every update keeps a maximum-weight base on the rounded weights
//! * Euler forest: link / cut / same-tree answers match a DFS over the live edges
//! * rounding: the partition and graphic fast paths replay the generic merge exactly
//!
//! Passing `BackendKind::FaultyNaive` as the dynamic-base backend plants a known bug,
//! which the first suite must report.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynbase::{BackendKind, BucketedBase};
use crate::euler::EulerForest;
use crate::gen;
use crate::matroid::MatroidInstance;
use crate::rounding::{merge_with, RoundingPath};
use crate::set::ElementSet;

const KEPT_FAILURES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub checks: u64,
    /// Total failures; only the first few messages are kept.
    pub failed: u64,
    pub failures: Vec<String>,
    pub secs: f64,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            checks: 0,
            failed: 0,
            failures: Vec::new(),
            secs: 0.0,
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(msg);
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfcheckConfig {
    pub seed: u64,
    pub dynbase_sequences: usize,
    pub updates_per_sequence: usize,
    pub euler_ops: usize,
    pub rounding_pairs: usize,
    /// Backend under test for both matroid kinds; `Auto` picks the fast ones.
    pub backend: BackendKind,
}

impl Default for SelfcheckConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            dynbase_sequences: 1000,
            updates_per_sequence: 20,
            euler_ops: 20_000,
            rounding_pairs: 500,
            backend: BackendKind::Auto,
        }
    }
}

pub fn run_all(config: &SelfcheckConfig) -> Vec<SuiteReport> {
    vec![
        dynbase_equivalence(config),
        euler_equivalence(config.euler_ops, 200, config.seed).0,
        rounding_equivalence(config.rounding_pairs, config.seed),
    ]
}

fn random_instance<R: Rng + ?Sized>(graphic: bool, rng: &mut R) -> MatroidInstance {
    if graphic {
        let v = rng.gen_range(2..=60);
        let edges = rng.gen_range(v - 1..=300);
        gen::random_connected_graph(v, edges, rng).into()
    } else {
        let n = rng.gen_range(1..=500);
        let parts = rng.gen_range(1..=n.min(40));
        gen::random_partition(n, parts, 6, rng).into()
    }
}

/// Random decrement sequences, alternating partition (`n ≤ 500`) and graphic
/// (`≤ 300` edges) matroids. After every update the base must be a maximum-weight base
/// for the current levels.
pub fn dynbase_equivalence(config: &SelfcheckConfig) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport::new("dynamic-base");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for seq in 0..config.dynbase_sequences {
        report.cases += 1;
        let m = random_instance(seq % 2 == 1, &mut rng);
        let n = m.ground_size();
        let eps = [0.1, 0.2, 0.3][seq % 3];
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut db = match BucketedBase::build(&m, &values, 1.0, eps, config.backend) {
            Ok(db) => db,
            Err(e) => {
                report.fail(format!("sequence {seq}: build failed: {e}"));
                continue;
            }
        };
        for t in 0..config.updates_per_sequence {
            let Some(e) = db.sample_base(&mut rng) else { break };
            let floor = db.grid().floor_level();
            let to = rng.gen_range(db.level(e)..=floor);
            let outcome = db
                .update_level(e, to)
                .map_err(|e| e.to_string())
                .and_then(|_| db.check_invariants());
            report.checks += 1;
            if let Err(msg) = outcome {
                report.fail(format!("sequence {seq} ({}, n={n}) update {t}: {msg}", m.kind()));
                break;
            }
        }
    }
    report.secs = start.elapsed().as_secs_f64();
    report
}

fn connected(n: usize, edges: &[Option<(usize, usize)>], s: usize, t: usize) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges.iter().flatten() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(x) = stack.pop() {
        if x == t {
            return true;
        }
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    false
}

/// Random link / cut / same-tree operations on `n` vertices. Also returns the average
/// instrumented cost per operation.
pub fn euler_equivalence(ops: usize, n: usize, seed: u64) -> (SuiteReport, f64) {
    let start = Instant::now();
    let mut report = SuiteReport::new("euler-forest");
    report.cases = 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forest = EulerForest::new(n);
    let mut edges: Vec<Option<(usize, usize)>> = Vec::new();
    let mut live: Vec<usize> = Vec::new();
    for i in 0..ops {
        report.checks += 1;
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        // links are tried twice as often as cuts so trees grow large
        match rng.gen_range(0..5) {
            0 | 1 => {
                let joined = connected(n, &edges, u, v);
                let id = edges.len();
                let res = forest.link(u, v, id);
                if res.is_err() != joined {
                    report.fail(format!("op {i}: link({u},{v}) gave {res:?}, connected = {joined}"));
                }
                if res.is_ok() {
                    edges.push(Some((u, v)));
                    live.push(id);
                } else {
                    edges.push(None);
                }
            }
            2 if !live.is_empty() => {
                let id = live.swap_remove(rng.gen_range(0..live.len()));
                let res = forest.cut(id);
                if res.as_ref().ok() != edges[id].as_ref() {
                    report.fail(format!("op {i}: cut({id}) gave {res:?}, expected {:?}", edges[id]));
                }
                edges[id] = None;
            }
            _ => {
                let (got, want) = (forest.same_tree(u, v), connected(n, &edges, u, v));
                if got != want {
                    report.fail(format!("op {i}: same_tree({u},{v}) = {got}, expected {want}"));
                }
            }
        }
    }
    report.secs = start.elapsed().as_secs_f64();
    let per_op = forest.cost() as f64 / ops.max(1) as f64;
    (report, per_op)
}

fn random_base<R: Rng + ?Sized>(m: &MatroidInstance, rng: &mut R) -> ElementSet {
    let w: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen()).collect();
    m.max_weight_base_bruteforce(&w)
}

/// Pairs of random bases merged once by a fast path and once generically from the
/// same seed; the results must be identical.
pub fn rounding_equivalence(pairs: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport::new("swap-rounding");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..pairs {
        report.cases += 1;
        let graphic = i % 2 == 1;
        let m: MatroidInstance = if graphic {
            let v = rng.gen_range(2..=30);
            gen::random_connected_graph(v, rng.gen_range(v - 1..=3 * v), &mut rng).into()
        } else {
            let n = rng.gen_range(1..=60);
            gen::random_partition(n, rng.gen_range(1..=n.min(8)), 4, &mut rng).into()
        };
        let (b1, b2) = (random_base(&m, &mut rng), random_base(&m, &mut rng));
        let beta1 = rng.gen_range(0.05..0.95);
        let generic = if graphic {
            RoundingPath::GenericLeafEdge
        } else {
            RoundingPath::Generic
        };
        let merge_seed: u64 = rng.gen();
        let fast = merge_with(
            &m,
            beta1,
            &b1,
            1.0 - beta1,
            &b2,
            RoundingPath::Auto,
            &mut ChaCha8Rng::seed_from_u64(merge_seed),
        );
        let slow = merge_with(
            &m,
            beta1,
            &b1,
            1.0 - beta1,
            &b2,
            generic,
            &mut ChaCha8Rng::seed_from_u64(merge_seed),
        );
        report.checks += 1;
        match (fast, slow) {
            (Ok(a), Ok(b)) if a == b && m.is_base(&a.0) => {}
            (a, b) => report.fail(format!("pair {i} ({}): fast {a:?} vs generic {b:?}", m.kind())),
        }
    }
    report.secs = start.elapsed().as_secs_f64();
    report
}
