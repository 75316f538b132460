//! End-to-end solver: estimate `M`, run the lazy sampling greedy, extend its solution with
//! the continuous greedy on the contracted problem, and swap-round the result.

mod baseline;
mod welfare;

pub use baseline::{baseline_greedy, brute_force_opt, complete_to_base, lazy_only};
pub use welfare::{welfare_reduce, WelfareInstance, WelfareObjective, WelfareReduction};

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::continuous::{continuous_greedy, ContinuousGreedyConfig, ContinuousOutcome};
use crate::dynbase::BackendKind;
use crate::error::{Error, Result};
use crate::lazy::{lazy_sampling_greedy, LazyGreedyConfig};
use crate::matroid::MatroidInstance;
use crate::oracle::{ContractedOracle, FractionalPoint, ValuationOracle};
use crate::rounding::{swap_round, RoundingPath};
use crate::set::ElementSet;

/// Version of the [`SolveReport`] JSON layout.
pub const REPORT_SCHEMA: u32 = 1;

const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    #[default]
    Pipeline,
    Greedy,
    LazyOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// `ε ∈ (0, 1/4)`; also the continuous greedy's `δ`.
    pub eps: f64,
    /// Independent runs; the best rounded solution by exact value wins.
    pub restarts: usize,
    /// Continuous greedy sample-count scale, see [`ContinuousGreedyConfig::sample_scale`].
    pub sample_scale: f64,
    pub samples: Option<usize>,
    /// Samples for the reported estimate of `F(1_S ∨ x)`.
    pub value_samples: usize,
    pub rounding: RoundingPath,
    pub backend: BackendKind,
}

impl PipelineConfig {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            restarts: 3,
            sample_scale: 1.0,
            samples: None,
            value_samples: 200,
            rounding: RoundingPath::Auto,
            backend: BackendKind::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.25) {
            return Err(Error::param(format!("eps must lie in (0, 1/4), got {}", self.eps)));
        }
        if self.restarts == 0 || self.value_samples == 0 {
            return Err(Error::param("restarts and value_samples must be at least 1"));
        }
        self.continuous().validate()
    }

    /// `c′ = ⌈8/ε⌉`, which keeps the `1/e − 3/c′` slack positive for every `ε < 1/4`.
    pub fn c_prime(&self) -> f64 {
        (8.0 / self.eps).ceil()
    }

    pub fn continuous(&self) -> ContinuousGreedyConfig {
        ContinuousGreedyConfig {
            delta: self.eps,
            c: self.c_prime(),
            sample_scale: self.sample_scale,
            samples: self.samples,
        }
    }
}

/// `M = 2G/(1−2ε)` from a threshold greedy value `G`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptEstimate {
    pub m: f64,
    pub greedy_value: f64,
    pub greedy_set: ElementSet,
}

/// Decreasing-threshold greedy: thresholds fall by `(1−ε)` from the largest singleton
/// value down to `ε·d/k`. Cached marginals only shrink, so elements below the current
/// threshold are skipped without evaluation.
pub fn estimate_opt(oracle: &ValuationOracle, matroid: &MatroidInstance, eps: f64) -> Result<OptEstimate> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::param(format!("eps must lie in (0, 1/4), got {eps}")));
    }
    let n = matroid.ground_size();
    let k = matroid.rank();
    let mut anchor = oracle.anchor(&[])?;
    let mut state = matroid.indep_new(&[])?;
    let mut cache = vec![f64::NEG_INFINITY; n];
    for e in 0..n {
        if state.can_add(e)? {
            cache[e] = anchor.marginal(e)?;
        }
    }
    let d = cache.iter().copied().fold(0.0, f64::max);
    if k > 0 && d > 0.0 {
        let floor = eps * d / k as f64;
        let mut tau = d;
        while tau >= floor && !state.is_full() {
            for e in 0..n {
                if cache[e] < tau || state.chosen().contains(e) {
                    continue;
                }
                if !state.can_add(e)? {
                    cache[e] = f64::NEG_INFINITY;
                    continue;
                }
                let g = anchor.marginal(e)?;
                cache[e] = g;
                if g >= tau {
                    state.add(e)?;
                    anchor.insert(e)?;
                    if state.is_full() {
                        break;
                    }
                }
            }
            tau *= 1.0 - eps;
        }
    }
    let g = anchor.value();
    Ok(OptEstimate {
        m: 2.0 * g / (1.0 - 2.0 * eps),
        greedy_value: g,
        greedy_set: state.chosen().clone(),
    })
}

/// Oracle calls per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCounts {
    pub estimate_opt: u64,
    pub lazy: u64,
    pub continuous: u64,
    pub rounding: u64,
    pub greedy: u64,
    pub evaluation: u64,
}

impl PhaseCounts {
    pub fn total(&self) -> u64 {
        self.estimate_opt + self.lazy + self.continuous + self.rounding + self.greedy + self.evaluation
    }

    fn add(&mut self, o: &PhaseCounts) {
        self.estimate_opt += o.estimate_opt;
        self.lazy += o.lazy;
        self.continuous += o.continuous;
        self.rounding += o.rounding;
        self.greedy += o.greedy;
        self.evaluation += o.evaluation;
    }
}

/// Wall time per phase, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimes {
    pub estimate_opt: f64,
    pub lazy: f64,
    pub continuous: f64,
    pub rounding: f64,
    pub greedy: f64,
    pub evaluation: f64,
}

impl PhaseTimes {
    fn add(&mut self, o: &PhaseTimes) {
        self.estimate_opt += o.estimate_opt;
        self.lazy += o.lazy;
        self.continuous += o.continuous;
        self.rounding += o.rounding;
        self.greedy += o.greedy;
        self.evaluation += o.evaluation;
    }
}

/// Snapshot-based accounting against one oracle.
struct Meter<'o> {
    oracle: &'o ValuationOracle,
    calls: PhaseCounts,
    secs: PhaseTimes,
}

impl<'o> Meter<'o> {
    fn new(oracle: &'o ValuationOracle) -> Self {
        Self {
            oracle,
            calls: PhaseCounts::default(),
            secs: PhaseTimes::default(),
        }
    }

    fn time<T>(&mut self, phase: Phase, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let before = self.oracle.call_count();
        let start = Instant::now();
        let out = f();
        let calls = self.oracle.call_count() - before;
        let secs = start.elapsed().as_secs_f64();
        let (c, s) = match phase {
            Phase::EstimateOpt => (&mut self.calls.estimate_opt, &mut self.secs.estimate_opt),
            Phase::Lazy => (&mut self.calls.lazy, &mut self.secs.lazy),
            Phase::Continuous => (&mut self.calls.continuous, &mut self.secs.continuous),
            Phase::Rounding => (&mut self.calls.rounding, &mut self.secs.rounding),
            Phase::Greedy => (&mut self.calls.greedy, &mut self.secs.greedy),
            Phase::Evaluation => (&mut self.calls.evaluation, &mut self.secs.evaluation),
        };
        *c += calls;
        *s += secs;
        out
    }
}

#[derive(Clone, Copy)]
enum Phase {
    EstimateOpt,
    Lazy,
    Continuous,
    Rounding,
    Greedy,
    Evaluation,
}

/// The fractional phase: `S` from the lazy greedy and `1_S ∨ x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuousMatroidOutcome {
    pub seed: ElementSet,
    pub seed_value: f64,
    /// `1_S ∨ x`.
    pub point: FractionalPoint,
    /// `None` when the continuous phase was skipped because `f(S) ≥ (1−1/e)·M`.
    pub continuous: Option<ContinuousOutcome>,
    pub calls: PhaseCounts,
    pub secs: PhaseTimes,
}

impl ContinuousMatroidOutcome {
    pub fn skipped(&self) -> bool {
        self.continuous.is_none()
    }
}

/// Lazy sampling greedy followed by the continuous greedy on `f_S` over `𝓜/S`.
pub fn continuous_matroid<R: Rng + ?Sized>(
    oracle: &ValuationOracle,
    matroid: &MatroidInstance,
    m: f64,
    config: &PipelineConfig,
    rng: &mut R,
) -> Result<ContinuousMatroidOutcome> {
    config.validate()?;
    let n = matroid.ground_size();
    let mut meter = Meter::new(oracle);
    let (seed, seed_value) = if m > 0.0 && matroid.rank() > 0 {
        let mut lazy = LazyGreedyConfig::new(config.eps, m);
        lazy.backend = config.backend;
        let out = meter.time(Phase::Lazy, || lazy_sampling_greedy(oracle, matroid, lazy, rng))?;
        (out.solution, out.value)
    } else {
        (ElementSet::new(), meter.time(Phase::Lazy, || oracle.eval(&[]))?)
    };
    let done = m <= 0.0 || seed.len() == matroid.rank() || seed_value >= ONE_MINUS_INV_E * m;
    let mut point = FractionalPoint::indicator(n, &seed);
    let continuous = if done {
        None
    } else {
        let out = meter.time(Phase::Continuous, || {
            let contracted = ContractedOracle::new(oracle, seed.clone())?;
            continuous_greedy(&contracted, matroid, &config.continuous(), rng)
        })?;
        point = point.join(&out.x);
        Some(out)
    };
    Ok(ContinuousMatroidOutcome {
        seed,
        seed_value,
        point,
        continuous,
        calls: meter.calls,
        secs: meter.secs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub algo: Algo,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
    pub solution: Vec<usize>,
    pub value: f64,
    pub m_estimate: Option<f64>,
    /// `|S|` from the lazy phase of the winning run.
    pub lazy_size: Option<usize>,
    /// Sampled `F(1_S ∨ x)` of the winning run before rounding.
    pub fractional_value: Option<f64>,
    pub skipped_continuous: Option<bool>,
    pub restarts: usize,
    pub best_restart: usize,
    pub calls: PhaseCounts,
    pub total_calls: u64,
    pub indep_ops: u64,
    pub secs: PhaseTimes,
    /// Brute-force optimum, filled in by callers that ask for it.
    pub opt: Option<f64>,
}

impl SolveReport {
    fn blank(algo: Algo, matroid: &MatroidInstance, config: &PipelineConfig, seed: u64) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            algo,
            n: matroid.ground_size(),
            k: matroid.rank(),
            eps: config.eps,
            seed,
            solution: Vec::new(),
            value: 0.0,
            m_estimate: None,
            lazy_size: None,
            fractional_value: None,
            skipped_continuous: None,
            restarts: 1,
            best_restart: 0,
            calls: PhaseCounts::default(),
            total_calls: 0,
            indep_ops: 0,
            secs: PhaseTimes::default(),
            opt: None,
        }
    }
}

/// The full pipeline, best of `config.restarts` runs.
pub fn maximize(
    oracle: &ValuationOracle,
    matroid: &MatroidInstance,
    config: &PipelineConfig,
    seed: u64,
) -> Result<SolveReport> {
    config.validate()?;
    check_sizes(oracle, matroid)?;
    let start_calls = oracle.call_count();
    let mut report = SolveReport::blank(Algo::Pipeline, matroid, config, seed);
    report.restarts = config.restarts;
    let mut meter = Meter::new(oracle);
    let est = meter.time(Phase::EstimateOpt, || estimate_opt(oracle, matroid, config.eps))?;
    report.m_estimate = Some(est.m);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, usize)> = None;
    for r in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        let cm = continuous_matroid(oracle, matroid, est.m, config, &mut rng)?;
        meter.calls.add(&cm.calls);
        meter.secs.add(&cm.secs);
        if let Some(c) = &cm.continuous {
            report.indep_ops += c.indep_ops;
        }
        let solution = match &cm.continuous {
            None => complete_to_base(matroid, &cm.seed)?,
            Some(c) => meter.time(Phase::Rounding, || {
                let comb = c.combination(matroid, &cm.seed)?;
                swap_round(matroid, &comb, config.rounding, &mut rng)
            })?,
        };
        let (value, fractional) = meter.time(Phase::Evaluation, || {
            let value = oracle.eval(&solution)?;
            let fractional = match cm.continuous {
                None => cm.seed_value,
                Some(_) => {
                    oracle
                        .multilinear_stats(&cm.point, &[], config.value_samples, &mut rng)?
                        .mean
                }
            };
            Ok((value, fractional))
        })?;
        if best.is_none_or(|(v, _)| value > v) {
            best = Some((value, r));
            report.solution = solution.into_vec();
            report.value = value;
            report.lazy_size = Some(cm.seed.len());
            report.fractional_value = Some(fractional);
            report.skipped_continuous = Some(cm.skipped());
            report.best_restart = r;
        }
    }
    report.calls = meter.calls;
    report.secs = meter.secs;
    report.total_calls = oracle.call_count() - start_calls;
    Ok(report)
}

/// Runs `algo` and reports it in the common format.
pub fn solve(
    oracle: &ValuationOracle,
    matroid: &MatroidInstance,
    algo: Algo,
    config: &PipelineConfig,
    seed: u64,
) -> Result<SolveReport> {
    if algo == Algo::Pipeline {
        return maximize(oracle, matroid, config, seed);
    }
    config.validate()?;
    check_sizes(oracle, matroid)?;
    let start_calls = oracle.call_count();
    let mut report = SolveReport::blank(algo, matroid, config, seed);
    let mut meter = Meter::new(oracle);
    let solution = match algo {
        Algo::Greedy => meter.time(Phase::Greedy, || baseline_greedy(oracle, matroid))?,
        _ => {
            let est = meter.time(Phase::EstimateOpt, || estimate_opt(oracle, matroid, config.eps))?;
            report.m_estimate = Some(est.m);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (set, lazy_size) = meter.time(Phase::Lazy, || {
                lazy_only(oracle, matroid, est.m, config.eps, config.backend, &mut rng)
            })?;
            report.lazy_size = Some(lazy_size);
            set
        }
    };
    report.value = meter.time(Phase::Evaluation, || oracle.eval(&solution))?;
    report.solution = solution.into_vec();
    report.calls = meter.calls;
    report.secs = meter.secs;
    report.total_calls = oracle.call_count() - start_calls;
    Ok(report)
}

fn check_sizes(oracle: &ValuationOracle, matroid: &MatroidInstance) -> Result<()> {
    if oracle.ground_size() != matroid.ground_size() {
        return Err(Error::param(format!(
            "objective has {} elements, matroid has {}",
            oracle.ground_size(),
            matroid.ground_size()
        )));
    }
    Ok(())
}
