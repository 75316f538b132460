//! Decreasing-threshold continuous greedy over the matroid polytope of `𝓜/S`.
//!
//! The point is built in `⌈1/δ⌉` rounds of equal step. Each round grows one independent
//! set `I_r` of `𝓜/S`: a threshold starts at the largest cached marginal and decays by
//! `(1−δ)`; in each pass the elements are scanned in index order and `e` joins `I_r`
//! when its estimated gain rate `∂F/∂x_e` at the current point clears the threshold.
//! Estimates use one batch of random sets `R(x)` per pass, shared by all elements.
//!
//! Cached marginals are lazy upper bounds: an element is only re-estimated once the
//! threshold drops to its last estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matroid::MatroidInstance;
use crate::oracle::{ContractedOracle, FractionalPoint, MarginalContext, SetFunction};
use crate::rounding::BaseCombination;
use crate::set::ElementSet;

/// Elements estimated together at most; blocks restart at one element after each take.
const MAX_BLOCK: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousGreedyConfig {
    /// Accuracy `δ ∈ (0,1)`; also the step size and the threshold decay.
    pub delta: f64,
    /// Bound `c ≥ 1` on the ratio between the modular optimum and `f_S(OPT)`.
    pub c: f64,
    /// Scale `κ` of the per-estimate sample count `⌈κ·ln(2n/δ)/δ²⌉`.
    pub sample_scale: f64,
    /// Fixed per-estimate sample count, overriding `sample_scale`.
    pub samples: Option<usize>,
}

impl ContinuousGreedyConfig {
    pub fn new(delta: f64, c: f64) -> Self {
        Self {
            delta,
            c,
            sample_scale: 1.0,
            samples: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if !(self.c.is_finite() && self.c >= 1.0) {
            return Err(Error::param(format!("c must be at least 1, got {}", self.c)));
        }
        if !(self.sample_scale.is_finite() && self.sample_scale > 0.0) {
            return Err(Error::param("sample_scale must be positive"));
        }
        if self.samples == Some(0) {
            return Err(Error::param("samples must be at least 1"));
        }
        Ok(())
    }

    pub fn rounds(&self) -> usize {
        (1.0 / self.delta).ceil() as usize
    }

    pub fn samples_for(&self, n: usize) -> usize {
        self.samples.unwrap_or_else(|| {
            let d = self.delta;
            let raw = self.sample_scale * (2.0 * n.max(1) as f64 / d).ln() / (d * d);
            (raw.ceil() as usize).max(1)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuousOutcome {
    /// `x = step·Σ_r 1_{I_r}`, zero on `S`.
    pub x: FractionalPoint,
    /// `I_r` per round, disjoint from `S`.
    pub sets: Vec<ElementSet>,
    pub step: f64,
    pub samples: usize,
    pub passes: u64,
    pub estimates: u64,
    pub indep_ops: u64,
}

impl ContinuousOutcome {
    /// The rounds padded to bases of `𝓜` containing `seed`, each with weight `step`.
    pub fn combination(&self, matroid: &MatroidInstance, seed: &ElementSet) -> Result<BaseCombination> {
        let weights = vec![self.step; self.sets.len()];
        pad_to_bases(matroid, seed, &self.sets, &weights)
    }
}

/// Completes each `seed ∪ Iᵢ` to a base of `𝓜` by adding elements in index order.
pub fn pad_to_bases(
    matroid: &MatroidInstance,
    seed: &ElementSet,
    sets: &[ElementSet],
    weights: &[f64],
) -> Result<BaseCombination> {
    let n = matroid.ground_size();
    let mut bases = Vec::with_capacity(sets.len());
    for set in sets {
        let mut state = matroid.indep_new(&seed.union(set))?;
        for e in 0..n {
            if state.is_full() {
                break;
            }
            if !state.chosen().contains(e) && state.can_add(e)? {
                state.add(e)?;
            }
        }
        bases.push(state.chosen().clone());
    }
    // equal steps may sum to 1 only up to rounding
    let total: f64 = weights.iter().sum();
    let weights = weights.iter().map(|w| w / total).collect();
    BaseCombination::new(matroid, bases, weights)
}

struct Sample<'a> {
    ctx: Box<dyn MarginalContext + 'a>,
    members: Vec<u64>,
    rng: ChaCha8Rng,
    out: Vec<f64>,
    calls: u64,
}

impl<'a> Sample<'a> {
    fn draw(func: &'a dyn SetFunction, seed: &[usize], x: &FractionalPoint, support: &[usize], rng_seed: u64) -> Self {
        let n = x.len();
        let mut s = Sample {
            ctx: func.context(),
            members: vec![0; n.div_ceil(64)],
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
            out: Vec::new(),
            calls: 0,
        };
        for &e in seed {
            s.insert(e);
        }
        for &e in support {
            if x.sample_includes(e, &mut s.rng) {
                s.insert(e);
            }
        }
        s
    }

    fn has(&self, e: usize) -> bool {
        self.members[e / 64] & (1 << (e % 64)) != 0
    }

    fn insert(&mut self, e: usize) {
        self.members[e / 64] |= 1 << (e % 64);
        self.ctx.insert(e);
    }

    fn estimate(&mut self, block: &[usize]) {
        self.out.clear();
        for &e in block {
            let g = if self.has(e) {
                0.0
            } else {
                self.calls += 1;
                self.ctx.extended(e) - self.ctx.value()
            };
            self.out.push(g);
        }
    }
}

/// Continuous greedy for `f_S` over `𝓜/S`, where `S` is the oracle's pinned set.
pub fn continuous_greedy<R: Rng + ?Sized>(
    oracle: &ContractedOracle<'_>,
    matroid: &MatroidInstance,
    config: &ContinuousGreedyConfig,
    rng: &mut R,
) -> Result<ContinuousOutcome> {
    config.validate()?;
    let n = oracle.ground_size();
    if matroid.ground_size() != n {
        return Err(Error::param(format!(
            "matroid has {} elements, objective has {n}",
            matroid.ground_size()
        )));
    }
    let seed = oracle.pinned().clone();
    let exec = oracle.base().execution();
    let func: &dyn SetFunction = &**oracle.base().function();
    let rounds = config.rounds();
    let step = 1.0 / rounds as f64;
    let samples = config.samples_for(n);
    let mut out = ContinuousOutcome {
        x: FractionalPoint::zeros(n),
        sets: vec![ElementSet::new(); rounds],
        step,
        samples,
        passes: 0,
        estimates: 0,
        indep_ops: 0,
    };

    let mut probe = matroid.indep_new(&seed)?;
    let k_rem = matroid.rank() - seed.len();
    if k_rem == 0 {
        return Ok(out);
    }
    let mut alive = vec![false; n];
    for e in 0..n {
        alive[e] = !seed.contains(e) && probe.can_add(e)?;
    }
    out.indep_ops += probe.ops();

    let anchor = oracle.anchor(&[])?;
    let mut ub = vec![0.0; n];
    for e in (0..n).filter(|&e| alive[e]) {
        ub[e] = anchor.marginal(e)?;
    }
    drop(anchor);
    let d0 = ub.iter().copied().fold(0.0, f64::max);
    if d0 <= 0.0 {
        return Ok(out);
    }
    let modular = matroid.max_weight_base_pinned(&ub, &seed);
    let w_mod: f64 = modular.iter().filter(|&&e| alive[e]).map(|&e| ub[e]).sum();
    let delta = config.delta;
    let mut taken = vec![0u32; n];
    let floor = (delta * d0 / n as f64).max(delta * w_mod / (config.c * k_rem as f64));

    for round in 0..rounds {
        let mut indep = matroid.indep_new(&seed)?;
        let mut dead: Vec<bool> = alive.iter().map(|a| !a).collect();
        let mut tau = (0..n).filter(|&e| !dead[e]).map(|e| ub[e]).fold(0.0, f64::max);
        while tau >= floor && tau > 0.0 && !indep.is_full() {
            out.passes += 1;
            let mut batch: Vec<Sample<'_>> = Vec::new();
            let mut next = 0;
            let mut block_len = 1;
            'scan: loop {
                let mut block = Vec::with_capacity(block_len);
                while next < n && block.len() < block_len {
                    let e = next;
                    next += 1;
                    if dead[e] || ub[e] < tau || indep.chosen().contains(e) {
                        continue;
                    }
                    if indep.can_add(e)? {
                        block.push(e);
                    } else {
                        dead[e] = true;
                    }
                }
                if block.is_empty() {
                    break;
                }
                if batch.is_empty() {
                    batch = draw_batch(func, &seed, &out.x, samples, exec, rng);
                    oracle.base().charge(samples as u64);
                }
                exec.for_each_mut(&mut batch, |_, s| s.estimate(&block));
                let calls: u64 = batch.iter_mut().map(|s| std::mem::take(&mut s.calls)).sum();
                oracle.base().charge(calls);
                for (p, &e) in block.iter().enumerate() {
                    // E[f(R+e) − f(R)] = (1 − x_e)·∂F/∂x_e, and x_e ≤ 1 − step here
                    let mean = batch.iter().map(|s| s.out[p]).sum::<f64>() / samples as f64;
                    let g = mean / (1.0 - out.x.get(e));
                    ub[e] = g;
                    out.estimates += 1;
                    if g >= tau {
                        indep.add(e)?;
                        let before = out.x.get(e);
                        taken[e] += 1;
                        out.x.set(e, f64::from(taken[e]) / rounds as f64);
                        let q = (step / (1.0 - before)).min(1.0);
                        exec.for_each_mut(&mut batch, |_, s| {
                            if !s.has(e) && s.rng.gen::<f64>() < q {
                                s.insert(e);
                            }
                        });
                        next = e + 1;
                        block_len = 1;
                        if indep.is_full() {
                            break 'scan;
                        }
                        continue 'scan;
                    }
                }
                block_len = (block_len * 2).min(MAX_BLOCK);
            }
            tau *= 1.0 - delta;
        }
        out.indep_ops += indep.ops();
        out.sets[round] = indep.chosen().difference(&seed);
    }
    Ok(out)
}

fn draw_batch<'a, R: Rng + ?Sized>(
    func: &'a dyn SetFunction,
    seed: &ElementSet,
    x: &FractionalPoint,
    samples: usize,
    exec: Execution,
    rng: &mut R,
) -> Vec<Sample<'a>> {
    let support = x.support();
    let seeds: Vec<u64> = (0..samples).map(|_| rng.gen()).collect();
    exec.map_indexed(samples, |i| Sample::draw(func, seed, x, &support, seeds[i]))
}
