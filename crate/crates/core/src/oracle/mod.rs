//! Value oracles.
//!
//! A [`SetFunction`] is the raw objective. [`ValuationOracle`] wraps one and counts every
//! evaluation: each distinct `f(T)` it computes adds one to [`ValuationOracle::call_count`].
//! [`Anchor`] memoizes `f(S)` for a growing set `S`, so a marginal `f(S + e) - f(S)` costs a
//! single counted evaluation.

mod objectives;

pub use objectives::{CoverageObjective, FacilityLocationObjective, ModularObjective};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::set::ElementSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// A nonnegative set function over the ground set `0..ground_size()`.
///
/// Implementations are expected to be monotone and submodular; nothing here checks it
/// beyond the spot checks in the test suite.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    /// `f(set)`; `set` holds distinct in-range elements in any order.
    fn evaluate(&self, set: &[usize]) -> f64;

    /// An empty incremental context. Objectives with cheap incremental structure
    /// (coverage counts, per-client maxima) override this.
    fn context(&self) -> Box<dyn MarginalContext + '_> {
        Box::new(GenericContext::new(self))
    }
}

/// Incremental evaluation state for a set `S` that only grows.
pub trait MarginalContext: Send {
    /// `f(S)`.
    fn value(&self) -> f64;
    /// `f(S ∪ {e})` for `e ∉ S`.
    fn extended(&self, e: usize) -> f64;
    fn insert(&mut self, e: usize);
}

struct GenericContext<'a, F: SetFunction + ?Sized> {
    func: &'a F,
    members: Vec<usize>,
    value: f64,
}

impl<'a, F: SetFunction + ?Sized> GenericContext<'a, F> {
    fn new(func: &'a F) -> Self {
        Self {
            func,
            members: Vec::new(),
            value: func.evaluate(&[]),
        }
    }
}

impl<F: SetFunction + ?Sized> MarginalContext for GenericContext<'_, F> {
    fn value(&self) -> f64 {
        self.value
    }

    fn extended(&self, e: usize) -> f64 {
        let mut with = Vec::with_capacity(self.members.len() + 1);
        with.extend_from_slice(&self.members);
        with.push(e);
        self.func.evaluate(&with)
    }

    fn insert(&mut self, e: usize) {
        self.members.push(e);
        self.value = self.func.evaluate(&self.members);
    }
}

/// A set function behind an evaluation counter.
pub struct ValuationOracle {
    func: Arc<dyn SetFunction>,
    calls: AtomicU64,
    exec: Execution,
}

impl std::fmt::Debug for ValuationOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ValuationOracle")
            .field("ground_size", &self.ground_size())
            .field("calls", &self.call_count())
            .finish()
    }
}

impl ValuationOracle {
    pub fn new(func: impl SetFunction + 'static) -> Self {
        Self::from_arc(Arc::new(func))
    }

    pub fn from_arc(func: Arc<dyn SetFunction>) -> Self {
        Self {
            func,
            calls: AtomicU64::new(0),
            exec: Execution::default(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn function(&self) -> &Arc<dyn SetFunction> {
        &self.func
    }

    pub fn ground_size(&self) -> usize {
        self.func.ground_size()
    }

    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub(crate) fn charge(&self, n: u64) {
        self.calls.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn check_elements(&self, set: &[usize]) -> Result<()> {
        let n = self.ground_size();
        match set.iter().find(|&&e| e >= n) {
            Some(&e) => Err(Error::Domain {
                element: e,
                ground_size: n,
            }),
            None => Ok(()),
        }
    }

    /// `f(set)`, one counted evaluation.
    pub fn eval(&self, set: &[usize]) -> Result<f64> {
        self.check_elements(set)?;
        self.charge(1);
        Ok(self.func.evaluate(set))
    }

    /// `f(set)` without touching the counter. Instrumentation only.
    pub fn peek(&self, set: &[usize]) -> f64 {
        self.func.evaluate(set)
    }

    /// `f(S ∪ {e}) − f(S)`; two counted evaluations.
    pub fn marginal(&self, set: &ElementSet, e: usize) -> Result<f64> {
        self.check_elements(set)?;
        self.check_elements(&[e])?;
        if set.contains(e) {
            return Err(Error::pre(format!("element {e} is already in the set")));
        }
        let base = self.eval(set)?;
        let with = self.eval(&set.with(e))?;
        Ok(with - base)
    }

    /// Memoizes `f(set)` (one counted evaluation) for cheap repeated marginals.
    pub fn anchor(&self, set: &[usize]) -> Result<Anchor<'_>> {
        self.check_elements(set)?;
        let mut ctx = self.func.context();
        let mut members = ElementSet::new();
        for &e in set {
            if members.insert(e) {
                ctx.insert(e);
            }
        }
        self.charge(1);
        Ok(Anchor {
            oracle: self,
            ctx,
            members,
        })
    }

    /// Unbiased estimate of the multilinear extension `F(x) = E[f(R(x))]`.
    pub fn estimate_multilinear<R: Rng + ?Sized>(
        &self,
        x: &FractionalPoint,
        num_samples: usize,
        rng: &mut R,
    ) -> Result<f64> {
        Ok(self.multilinear_stats(x, &[], num_samples, rng)?.mean)
    }

    /// Sample mean and standard error of `f(R(x) ∪ pinned)`.
    pub fn multilinear_stats<R: Rng + ?Sized>(
        &self,
        x: &FractionalPoint,
        pinned: &[usize],
        num_samples: usize,
        rng: &mut R,
    ) -> Result<MultilinearEstimate> {
        if num_samples == 0 {
            return Err(Error::param("num_samples must be at least 1"));
        }
        if x.len() != self.ground_size() {
            return Err(Error::param(format!(
                "point has {} coordinates, ground set has {}",
                x.len(),
                self.ground_size()
            )));
        }
        self.check_elements(pinned)?;
        let support = x.support();
        let seeds: Vec<u64> = (0..num_samples).map(|_| rng.gen()).collect();
        let values = self.exec.map_indexed(num_samples, |i| {
            let mut r = ChaCha8Rng::seed_from_u64(seeds[i]);
            let mut set: Vec<usize> = pinned.to_vec();
            for &e in &support {
                if x.sample_includes(e, &mut r) && !pinned.contains(&e) {
                    set.push(e);
                }
            }
            self.func.evaluate(&set)
        });
        self.charge(num_samples as u64);
        Ok(MultilinearEstimate::from_values(&values))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultilinearEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl MultilinearEstimate {
    pub(crate) fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_err: (var / n).sqrt(),
            samples: values.len(),
        }
    }
}

/// `f` restricted to sets containing a growing set `S`, with `f(S)` memoized.
pub struct Anchor<'a> {
    oracle: &'a ValuationOracle,
    ctx: Box<dyn MarginalContext + 'a>,
    members: ElementSet,
}

impl<'a> Anchor<'a> {
    pub fn value(&self) -> f64 {
        self.ctx.value()
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn contains(&self, e: usize) -> bool {
        self.members.contains(e)
    }

    /// `f(S ∪ {e}) − f(S)`; one counted evaluation.
    pub fn marginal(&self, e: usize) -> Result<f64> {
        self.oracle.check_elements(&[e])?;
        if self.members.contains(e) {
            return Err(Error::pre(format!("element {e} is already anchored")));
        }
        self.oracle.charge(1);
        Ok(self.ctx.extended(e) - self.ctx.value())
    }

    /// Marginal without counting; the caller charges the oracle in bulk.
    pub(crate) fn marginal_raw(&self, e: usize) -> f64 {
        if self.members.contains(e) {
            0.0
        } else {
            self.ctx.extended(e) - self.ctx.value()
        }
    }

    /// Grows `S` by `e`; one counted evaluation for the new `f(S)`.
    pub fn insert(&mut self, e: usize) -> Result<()> {
        self.oracle.check_elements(&[e])?;
        if self.members.insert(e) {
            self.ctx.insert(e);
            self.oracle.charge(1);
        }
        Ok(())
    }
}

/// The contracted function `f_S(S') = f(S' ∪ S) − f(S)`.
pub struct ContractedOracle<'a> {
    base: &'a ValuationOracle,
    pinned: ElementSet,
    pinned_value: f64,
}

impl<'a> ContractedOracle<'a> {
    /// One counted evaluation for `f(S)`.
    pub fn new(base: &'a ValuationOracle, pinned: ElementSet) -> Result<Self> {
        let pinned_value = base.eval(&pinned)?;
        Ok(Self {
            base,
            pinned,
            pinned_value,
        })
    }

    pub fn base(&self) -> &'a ValuationOracle {
        self.base
    }

    pub fn pinned(&self) -> &ElementSet {
        &self.pinned
    }

    pub fn pinned_value(&self) -> f64 {
        self.pinned_value
    }

    pub fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    /// `f_S(S')` for `S'` disjoint from `S`.
    pub fn value(&self, set: &[usize]) -> Result<f64> {
        if let Some(&e) = set.iter().find(|&&e| self.pinned.contains(e)) {
            return Err(Error::pre(format!("element {e} is pinned")));
        }
        let mut all = self.pinned.to_vec();
        all.extend_from_slice(set);
        Ok(self.base.eval(&all)? - self.pinned_value)
    }

    /// Anchor at `S ∪ S'`.
    pub fn anchor(&self, set: &[usize]) -> Result<Anchor<'a>> {
        let mut all = self.pinned.to_vec();
        all.extend(set.iter().copied().filter(|&e| !self.pinned.contains(e)));
        self.base.anchor(&all)
    }

    /// Estimate of `F_S(x) = E[f(R(x) ∪ S)] − f(S)`.
    pub fn estimate_multilinear<R: Rng + ?Sized>(
        &self,
        x: &FractionalPoint,
        num_samples: usize,
        rng: &mut R,
    ) -> Result<f64> {
        let est = self.base.multilinear_stats(x, &self.pinned, num_samples, rng)?;
        Ok(est.mean - self.pinned_value)
    }
}

/// A point of `[0,1]^n`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FractionalPoint {
    coords: Vec<f64>,
}

impl FractionalPoint {
    pub fn zeros(n: usize) -> Self {
        Self { coords: vec![0.0; n] }
    }

    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some((i, c)) = coords.iter().enumerate().find(|(_, c)| !(0.0..=1.0).contains(*c)) {
            return Err(Error::param(format!("coordinate {i} = {c} is outside [0,1]")));
        }
        Ok(Self { coords })
    }

    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut coords = vec![0.0; n];
        for &e in set {
            coords[e] = 1.0;
        }
        Self { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, e: usize) -> f64 {
        self.coords[e]
    }

    /// Adds `delta` to coordinate `e`, clamping at 1.
    pub fn bump(&mut self, e: usize, delta: f64) {
        self.coords[e] = (self.coords[e] + delta).min(1.0);
    }

    pub(crate) fn set(&mut self, e: usize, value: f64) {
        debug_assert!((0.0..=1.0).contains(&value));
        self.coords[e] = value;
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coords.len()).filter(|&e| self.coords[e] > 0.0).collect()
    }

    /// Coordinate-wise maximum.
    pub fn join(&self, other: &FractionalPoint) -> FractionalPoint {
        Self {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub(crate) fn sample_includes<R: Rng + ?Sized>(&self, e: usize, rng: &mut R) -> bool {
        let p = self.coords[e];
        p >= 1.0 || (p > 0.0 && rng.gen::<f64>() < p)
    }
}
