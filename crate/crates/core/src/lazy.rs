//! The lazy sampling greedy.
//!
//! Cached marginals live in a [`BucketedBase`]; each iteration spot-checks every bucket
//! by uniform sampling until `⌈4·log₂ n⌉` consecutive samples are still accurate, then
//! either stops (when the cached base weight `W` is at most `4cM`) or adds a uniform
//! unfrozen base member to the solution.

use log::debug;
use rand::Rng;
use serde::Serialize;

use crate::dynbase::{BackendKind, BucketedBase};
use crate::error::{Error, Result};
use crate::matroid::MatroidInstance;
use crate::oracle::{Anchor, ValuationOracle};
use crate::set::ElementSet;

#[derive(Clone, Debug)]
pub struct LazyGreedyConfig {
    pub eps: f64,
    /// Upper estimate of `f(OPT)`.
    pub m: f64,
    /// Overrides the stopping constant `c = ⌈4/ε⌉`.
    pub c: Option<f64>,
    pub backend: BackendKind,
    /// Run [`LazyGreedyState::bucket_goodness_audit`] after every refresh (uncounted).
    pub audit: bool,
    /// Log one debug line per iteration and per base swap.
    pub trace: bool,
}

impl LazyGreedyConfig {
    pub fn new(eps: f64, m: f64) -> Self {
        Self {
            eps,
            m,
            c: None,
            backend: BackendKind::Auto,
            audit: false,
            trace: false,
        }
    }

    pub fn c(&self) -> f64 {
        self.c.unwrap_or_else(|| (4.0 / self.eps).ceil())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BucketAudit {
    pub bucket: u32,
    pub size: usize,
    /// Members whose true marginal still rounds into this bucket or higher.
    pub good: usize,
    /// Members whose true marginal exceeds their cached weight; always 0 when the
    /// cached weights dominate.
    pub above_cache: usize,
}

impl BucketAudit {
    /// Fraction of correctly bucketed members; 1 for an empty bucket.
    pub fn fraction(&self) -> f64 {
        if self.size == 0 {
            1.0
        } else {
            self.good as f64 / self.size as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub t: usize,
    /// `W` after the refresh.
    pub w: f64,
    pub swaps: usize,
    pub samples: usize,
    /// `f(S)` at the end of the iteration.
    pub value: f64,
    pub added: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<Vec<BucketAudit>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `W ≤ 4cM` at the last check.
    Weight,
    /// `|S| = k`.
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct LazyOutcome {
    pub solution: ElementSet,
    pub value: f64,
    pub stop: StopReason,
    pub last_w: f64,
    /// `4cM`.
    pub threshold: f64,
    pub buckets: u32,
    pub trace: Vec<IterationRecord>,
    pub base_steps: u64,
}

pub struct LazyGreedyState<'a> {
    matroid: &'a MatroidInstance,
    anchor: Anchor<'a>,
    db: BucketedBase<'a>,
    config: LazyGreedyConfig,
    limit: usize,
    trace: Vec<IterationRecord>,
}

impl<'a> LazyGreedyState<'a> {
    /// Caches all singleton marginals (`n + 1` evaluations) and builds the bucketed base.
    pub fn new(oracle: &'a ValuationOracle, matroid: &'a MatroidInstance, config: LazyGreedyConfig) -> Result<Self> {
        let n = matroid.ground_size();
        if oracle.ground_size() != n {
            return Err(Error::param(format!(
                "oracle has {} elements, matroid has {n}",
                oracle.ground_size()
            )));
        }
        if !(config.eps > 0.0 && config.eps < 0.5) {
            return Err(Error::param(format!("eps must lie in (0, 1/2), got {}", config.eps)));
        }
        if !(config.c() > 0.0) {
            return Err(Error::param("c must be positive"));
        }
        let anchor = oracle.anchor(&[])?;
        let values: Vec<f64> = (0..n).map(|e| anchor.marginal(e)).collect::<Result<_>>()?;
        let mut db = BucketedBase::build(matroid, &values, config.m, config.eps, config.backend)?;
        db.set_trace(config.trace);
        let limit = ((4.0 * (n.max(2) as f64).log2()).ceil() as usize).max(1);
        Ok(Self {
            matroid,
            anchor,
            db,
            config,
            limit,
            trace: Vec::new(),
        })
    }

    pub fn solution(&self) -> &ElementSet {
        self.anchor.members()
    }

    pub fn value(&self) -> f64 {
        self.anchor.value()
    }

    pub fn base(&self) -> &BucketedBase<'a> {
        &self.db
    }

    /// Consecutive accurate samples needed to close a bucket.
    pub fn sample_limit(&self) -> usize {
        self.limit
    }

    pub fn threshold(&self) -> f64 {
        4.0 * self.config.c() * self.config.m
    }

    /// Spot-checks buckets `1..=N` in order; returns `(samples, swaps)`.
    pub fn refresh_values<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(usize, usize)> {
        let (mut samples, mut swaps) = (0, 0);
        for j in 1..=self.db.grid().buckets() {
            let mut streak = 0;
            while streak < self.limit {
                let Some(e) = self.db.sample_bucket(j, rng) else { break };
                let v = self.anchor.marginal(e)?;
                samples += 1;
                if self.db.grid().level_of(v) > j {
                    streak = 0;
                    let rec = self.db.update_base(e, v)?;
                    if let Some(f) = rec.replaced_by {
                        swaps += 1;
                        if self.config.trace {
                            debug!("swap {e} -> {f} (level {} -> {})", rec.from_level, rec.to_level);
                        }
                    }
                } else {
                    streak += 1;
                }
            }
        }
        Ok((samples, swaps))
    }

    /// Exact per-bucket accuracy from uncounted marginal recomputation.
    pub fn bucket_goodness_audit(&self) -> Vec<BucketAudit> {
        let grid = self.db.grid();
        (1..=grid.buckets())
            .map(|j| {
                let members = self.db.bucket(j);
                let mut audit = BucketAudit {
                    bucket: j,
                    size: members.len(),
                    good: 0,
                    above_cache: 0,
                };
                for &e in members {
                    let level = grid.level_of(self.anchor.marginal_raw(e));
                    if level <= j {
                        audit.good += 1;
                    }
                    if level < j {
                        audit.above_cache += 1;
                    }
                }
                audit
            })
            .collect()
    }

    /// Adds `e` to `S` and freezes it in the base.
    fn take(&mut self, e: usize) -> Result<()> {
        self.anchor.insert(e)?;
        self.db.freeze(e)
    }

    pub fn run<R: Rng + ?Sized>(mut self, rng: &mut R) -> Result<LazyOutcome> {
        let k = self.matroid.rank();
        let threshold = self.threshold();
        let mut stop = StopReason::Full;
        let mut last_w = self.db.total_weight();
        for t in 1..=k {
            let (samples, swaps) = self.refresh_values(rng)?;
            let audit = self.config.audit.then(|| self.bucket_goodness_audit());
            last_w = self.db.total_weight();
            let mut record = IterationRecord {
                t,
                w: last_w,
                swaps,
                samples,
                value: self.value(),
                added: None,
                audit,
            };
            if last_w <= threshold {
                stop = StopReason::Weight;
                self.log(&record);
                self.trace.push(record);
                break;
            }
            let e = self
                .db
                .sample_base(rng)
                .ok_or_else(|| Error::pre("base exhausted before |S| = k"))?;
            self.take(e)?;
            record.added = Some(e);
            record.value = self.value();
            self.log(&record);
            self.trace.push(record);
        }
        Ok(LazyOutcome {
            solution: self.anchor.members().clone(),
            value: self.value(),
            stop,
            last_w,
            threshold,
            buckets: self.db.grid().buckets(),
            base_steps: self.db.steps(),
            trace: self.trace,
        })
    }

    fn log(&self, r: &IterationRecord) {
        if self.config.trace {
            debug!(
                "t={} W={:.6} swaps={} samples={} f(S)={:.6} added={:?}",
                r.t, r.w, r.swaps, r.samples, r.value, r.added
            );
        }
    }
}

/// Runs the lazy sampling greedy to completion.
pub fn lazy_sampling_greedy<R: Rng + ?Sized>(
    oracle: &ValuationOracle,
    matroid: &MatroidInstance,
    config: LazyGreedyConfig,
    rng: &mut R,
) -> Result<LazyOutcome> {
    if matroid.rank() == 0 {
        return Ok(LazyOutcome {
            solution: ElementSet::new(),
            value: oracle.eval(&[])?,
            stop: StopReason::Full,
            last_w: 0.0,
            threshold: 4.0 * config.c() * config.m,
            buckets: 0,
            trace: Vec::new(),
            base_steps: 0,
        });
    }
    LazyGreedyState::new(oracle, matroid, config)?.run(rng)
}
