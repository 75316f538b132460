//! Maximum-weight base under weight decreases, with weights rounded to a geometric grid.
//!
//! Weights are stored as integer levels: level `j ∈ 1..=N` stands for `(1−ε)^{j−1}·M`
//! and level `N+1` is the floor `(1−ε)^N·M`. A lower level is a heavier element.
//! Unfrozen base members at levels `1..=N` form the buckets `B⁽ʲ⁾`.

mod graphic;
mod naive;
mod partition;

use log::debug;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matroid::MatroidInstance;
use crate::set::ElementSet;

use graphic::GraphicAux;
use naive::NaiveAux;
use partition::PartitionAux;

pub(crate) const NIL: usize = usize::MAX;

/// The geometric rounding grid `{(1−ε)^{j−1}·M}` with `N` buckets and a floor.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightGrid {
    m: f64,
    eps: f64,
    n_buckets: u32,
    /// `bounds[j] = (1−ε)^j·M` for `j = 0..=N`.
    bounds: Vec<f64>,
}

impl WeightGrid {
    /// `N = ⌈2·ln(k/ε)/ε⌉` (at least 1).
    pub fn new(m: f64, eps: f64, rank: usize) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::param(format!("M must be positive, got {m}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param(format!("eps must lie in (0,1), got {eps}")));
        }
        let raw = 2.0 * (rank as f64 / eps).ln() / eps;
        let n_buckets = if raw.is_finite() && raw > 1.0 {
            raw.ceil() as u32
        } else {
            1
        };
        Self::with_buckets(m, eps, n_buckets)
    }

    pub fn with_buckets(m: f64, eps: f64, n_buckets: u32) -> Result<Self> {
        if n_buckets == 0 {
            return Err(Error::param("need at least one bucket"));
        }
        let bounds = (0..=n_buckets).map(|j| (1.0 - eps).powi(j as i32) * m).collect();
        Ok(Self {
            m,
            eps,
            n_buckets,
            bounds,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `N`.
    pub fn buckets(&self) -> u32 {
        self.n_buckets
    }

    pub fn floor_level(&self) -> u32 {
        self.n_buckets + 1
    }

    /// `(1−ε)^j·M`, the exclusive lower end of bucket `j`.
    pub fn lower_bound(&self, j: u32) -> f64 {
        self.bounds[j as usize]
    }

    /// Level of the grid point `value` rounds up to; values above `M` land in bucket 1.
    pub fn level_of(&self, value: f64) -> u32 {
        // first j >= 1 with value > (1-eps)^j M
        let tail = &self.bounds[1..];
        let j = tail.partition_point(|&b| value <= b);
        j as u32 + 1
    }

    pub fn weight(&self, level: u32) -> f64 {
        debug_assert!(level >= 1 && level <= self.floor_level());
        self.bounds[level as usize - 1]
    }

    /// `Σ count[j]·weight(j)` over a per-level histogram indexed by level.
    pub fn weigh_histogram(&self, counts: &[usize]) -> f64 {
        counts
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c as f64 * self.weight(j as u32))
            .sum()
    }

    /// Histogram of `levels[e]` over the elements of `set`, indexed by level.
    pub fn histogram(&self, set: &[usize], levels: &[u32]) -> Vec<usize> {
        let mut counts = vec![0; self.floor_level() as usize + 1];
        for &e in set {
            counts[levels[e] as usize] += 1;
        }
        counts
    }
}

/// Disjoint lists with O(1) insert, remove and uniform sampling.
#[derive(Clone, Debug)]
pub(crate) struct SlotLists {
    lists: Vec<Vec<usize>>,
    home: Vec<usize>,
    pos: Vec<usize>,
}

impl SlotLists {
    pub(crate) fn new(n_lists: usize, n_elements: usize) -> Self {
        Self {
            lists: vec![Vec::new(); n_lists],
            home: vec![NIL; n_elements],
            pos: vec![0; n_elements],
        }
    }

    pub(crate) fn insert(&mut self, list: usize, e: usize) {
        debug_assert_eq!(self.home[e], NIL);
        self.home[e] = list;
        self.pos[e] = self.lists[list].len();
        self.lists[list].push(e);
    }

    pub(crate) fn remove(&mut self, e: usize) {
        let list = self.home[e];
        debug_assert_ne!(list, NIL);
        let p = self.pos[e];
        let items = &mut self.lists[list];
        items.swap_remove(p);
        if let Some(&moved) = items.get(p) {
            self.pos[moved] = p;
        }
        self.home[e] = NIL;
    }

    pub(crate) fn list(&self, list: usize) -> &[usize] {
        &self.lists[list]
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, list: usize, rng: &mut R) -> Option<usize> {
        let items = &self.lists[list];
        (!items.is_empty()).then(|| items[rng.gen_range(0..items.len())])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BackendKind {
    /// Pick the fast backend matching the matroid variant.
    #[default]
    Auto,
    Partition,
    Graphic,
    /// Full greedy recomputation after every update.
    Naive,
    /// The naive backend with a planted bug: it never re-maximizes. Used to check that
    /// the equivalence harness notices a wrong backend.
    FaultyNaive,
}

impl BackendKind {
    pub fn resolve(self, matroid: &MatroidInstance) -> BackendKind {
        match (self, matroid) {
            (BackendKind::Auto, MatroidInstance::Partition(_)) => BackendKind::Partition,
            (BackendKind::Auto, MatroidInstance::Graphic(_)) => BackendKind::Graphic,
            (kind, _) => kind,
        }
    }
}

#[derive(Clone, Debug)]
enum Backend<'a> {
    Partition(PartitionAux<'a>),
    Graphic(GraphicAux<'a>),
    Naive(NaiveAux<'a>),
}

/// The outcome of one [`BucketedBase::update_base`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapRecord {
    pub element: usize,
    pub from_level: u32,
    pub to_level: u32,
    /// `Some(f)` when `element` left the base and `f` entered.
    pub replaced_by: Option<usize>,
}

impl SwapRecord {
    pub fn is_noop(&self) -> bool {
        self.from_level == self.to_level
    }
}

/// Per-element view shared with the backends.
#[derive(Clone, Debug)]
pub(crate) struct Levels {
    pub(crate) level: Vec<u32>,
    pub(crate) in_base: Vec<bool>,
    pub(crate) frozen: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct BucketedBase<'a> {
    matroid: &'a MatroidInstance,
    grid: WeightGrid,
    state: Levels,
    /// Base members per level, frozen ones included; drives `W`.
    base_count: Vec<usize>,
    /// Unfrozen base members by level (`N+1` holds the floor, which is not a bucket).
    buckets: SlotLists,
    unfrozen: SlotLists,
    backend: Backend<'a>,
    steps: u64,
    updates: u64,
    trace: bool,
}

impl<'a> BucketedBase<'a> {
    /// Rounds `values` onto the grid and builds a maximum-weight base.
    pub fn build(matroid: &'a MatroidInstance, values: &[f64], m: f64, eps: f64, kind: BackendKind) -> Result<Self> {
        let grid = WeightGrid::new(m, eps, matroid.rank())?;
        Self::build_on_grid(matroid, values, grid, kind)
    }

    pub fn build_on_grid(
        matroid: &'a MatroidInstance,
        values: &[f64],
        grid: WeightGrid,
        kind: BackendKind,
    ) -> Result<Self> {
        let n = matroid.ground_size();
        if values.len() != n {
            return Err(Error::param(format!("{} values for a ground set of {n}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| v.is_nan()) {
            return Err(Error::param(format!("value {v} is not a number")));
        }
        let level: Vec<u32> = values.iter().map(|&v| grid.level_of(v)).collect();
        Self::from_levels(matroid, level, grid, kind)
    }

    /// Builds directly from integer levels in `1..=N+1`.
    pub fn from_levels(
        matroid: &'a MatroidInstance,
        level: Vec<u32>,
        grid: WeightGrid,
        kind: BackendKind,
    ) -> Result<Self> {
        let n = matroid.ground_size();
        if level.len() != n || level.iter().any(|&l| l == 0 || l > grid.floor_level()) {
            return Err(Error::param("levels must be one per element within 1..=N+1"));
        }
        let mut state = Levels {
            level,
            in_base: vec![false; n],
            frozen: vec![false; n],
        };
        let mut steps = 0;
        let backend = match kind.resolve(matroid) {
            BackendKind::Partition => match matroid {
                MatroidInstance::Partition(p) => {
                    Backend::Partition(PartitionAux::build(p, &grid, &mut state, &mut steps))
                }
                _ => return Err(Error::param("partition backend needs a partition matroid")),
            },
            BackendKind::Graphic => match matroid {
                MatroidInstance::Graphic(g) => Backend::Graphic(GraphicAux::build(g, &grid, &mut state, &mut steps)),
                _ => return Err(Error::param("graphic backend needs a graphic matroid")),
            },
            BackendKind::Naive => Backend::Naive(NaiveAux::build(matroid, false, &mut state)),
            BackendKind::FaultyNaive => Backend::Naive(NaiveAux::build(matroid, true, &mut state)),
            BackendKind::Auto => unreachable!("resolved above"),
        };
        let floor = grid.floor_level() as usize;
        let mut base_count = vec![0; floor + 1];
        let mut buckets = SlotLists::new(floor + 1, n);
        let mut unfrozen = SlotLists::new(1, n);
        for e in (0..n).filter(|&e| state.in_base[e]) {
            let l = state.level[e] as usize;
            base_count[l] += 1;
            buckets.insert(l, e);
            unfrozen.insert(0, e);
            steps += 1;
        }
        Ok(Self {
            matroid,
            grid,
            state,
            base_count,
            buckets,
            unfrozen,
            backend,
            steps,
            updates: 0,
            trace: false,
        })
    }

    /// Emit one debug log line per update.
    pub fn set_trace(&mut self, on: bool) {
        self.trace = on;
    }

    pub fn matroid(&self) -> &'a MatroidInstance {
        self.matroid
    }

    pub fn grid(&self) -> &WeightGrid {
        &self.grid
    }

    pub fn level(&self, e: usize) -> u32 {
        self.state.level[e]
    }

    pub fn levels(&self) -> &[u32] {
        &self.state.level
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.grid.weight(self.state.level[e])
    }

    pub fn in_base(&self, e: usize) -> bool {
        self.state.in_base[e]
    }

    pub fn is_frozen(&self, e: usize) -> bool {
        self.state.frozen[e]
    }

    pub fn base(&self) -> ElementSet {
        (0..self.state.in_base.len())
            .filter(|&e| self.state.in_base[e])
            .collect()
    }

    /// Unfrozen elements of bucket `j ∈ 1..=N`, in no particular order.
    pub fn bucket(&self, j: u32) -> &[usize] {
        if j == 0 || j > self.grid.buckets() {
            return &[];
        }
        self.buckets.list(j as usize)
    }

    pub fn unfrozen_count(&self) -> usize {
        self.unfrozen.list(0).len()
    }

    /// `W`, the cached weight of the base, frozen members included.
    pub fn total_weight(&self) -> f64 {
        self.grid.weigh_histogram(&self.base_count)
    }

    /// Base members per level, indexed by level.
    pub fn base_histogram(&self) -> &[usize] {
        &self.base_count
    }

    /// Elementary list, pointer and tree steps spent so far (build included).
    pub fn steps(&self) -> u64 {
        self.steps
            + match &self.backend {
                Backend::Graphic(g) => g.forest_cost(),
                _ => 0,
            }
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn sample_bucket<R: Rng + ?Sized>(&self, j: u32, rng: &mut R) -> Option<usize> {
        if j == 0 || j > self.grid.buckets() {
            return None;
        }
        self.buckets.sample(j as usize, rng)
    }

    /// A uniform unfrozen base member, or `None` once all of `B` is frozen.
    pub fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        self.unfrozen.sample(0, rng)
    }

    pub fn freeze(&mut self, e: usize) -> Result<()> {
        self.check(e)?;
        if !self.state.in_base[e] {
            return Err(Error::NotInBase(e));
        }
        if self.state.frozen[e] {
            return Err(Error::Frozen(e));
        }
        self.state.frozen[e] = true;
        self.buckets.remove(e);
        self.unfrozen.remove(e);
        self.steps += 2;
        Ok(())
    }

    /// Lowers `e`'s cached weight to the grid point for `value` and re-maximizes the base.
    pub fn update_base(&mut self, e: usize, value: f64) -> Result<SwapRecord> {
        let to = self.grid.level_of(value);
        self.update_level(e, to)
    }

    pub fn update_level(&mut self, e: usize, to: u32) -> Result<SwapRecord> {
        self.check(e)?;
        if !self.state.in_base[e] {
            return Err(Error::NotInBase(e));
        }
        if self.state.frozen[e] {
            return Err(Error::Frozen(e));
        }
        let from = self.state.level[e];
        if to < from {
            return Err(Error::WeightIncrease { element: e, from, to });
        }
        if to > self.grid.floor_level() {
            return Err(Error::param(format!("level {to} is beyond the floor")));
        }
        self.updates += 1;
        let mut record = SwapRecord {
            element: e,
            from_level: from,
            to_level: to,
            replaced_by: None,
        };
        if to == from {
            return Ok(record);
        }
        self.state.level[e] = to;
        let replacement = match &mut self.backend {
            Backend::Partition(p) => p.decrease(e, from, to, &mut self.state, &mut self.steps),
            Backend::Graphic(g) => g.decrease(e, from, to, &mut self.state, &mut self.steps),
            Backend::Naive(nv) => nv.decrease(e, &mut self.state),
        };
        self.buckets.remove(e);
        self.base_count[from as usize] -= 1;
        self.steps += 2;
        match replacement {
            Some(f) => {
                debug_assert!(!self.state.in_base[e] && self.state.in_base[f]);
                self.unfrozen.remove(e);
                self.unfrozen.insert(0, f);
                let lf = self.state.level[f] as usize;
                self.buckets.insert(lf, f);
                self.base_count[lf] += 1;
                self.steps += 3;
            }
            None => {
                debug_assert!(self.state.in_base[e]);
                self.buckets.insert(to as usize, e);
                self.base_count[to as usize] += 1;
            }
        }
        record.replaced_by = replacement;
        if self.trace {
            debug!(
                "update e={e} level {from}->{to} swap={:?} W={}",
                replacement,
                self.total_weight()
            );
        }
        Ok(record)
    }

    /// Recomputes every structural invariant from first principles: `B` is a base of
    /// maximum rounded weight, `W` matches it, frozen elements stay in `B` and the
    /// buckets hold exactly the unfrozen base members of their level.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let m = self.matroid;
        let base = self.base();
        if !m.is_base(&base) {
            return Err(format!("{base:?} is not a base"));
        }
        let neg: Vec<f64> = self.state.level.iter().map(|&l| -f64::from(l)).collect();
        let best = m.max_weight_base_bruteforce(&neg);
        let g = &self.grid;
        let have = g.histogram(&base, &self.state.level);
        if g.histogram(&best, &self.state.level) != have {
            return Err(format!(
                "base weight {} below the optimum {}",
                g.weigh_histogram(&have),
                g.weigh_histogram(&g.histogram(&best, &self.state.level))
            ));
        }
        if self.total_weight() != g.weigh_histogram(&have) {
            return Err("cached W disagrees with the base".into());
        }
        if let Some(e) = (0..self.state.frozen.len()).find(|&e| self.state.frozen[e] && !self.state.in_base[e]) {
            return Err(format!("frozen element {e} left the base"));
        }
        let mut bucketed = 0;
        for j in 1..=g.buckets() {
            for &e in self.bucket(j) {
                if !self.state.in_base[e] || self.state.frozen[e] || self.state.level[e] != j {
                    return Err(format!("element {e} misplaced in bucket {j}"));
                }
                bucketed += 1;
            }
        }
        let expect = base
            .iter()
            .filter(|&&e| !self.state.frozen[e] && self.state.level[e] <= g.buckets())
            .count();
        if bucketed != expect {
            return Err(format!("buckets hold {bucketed} elements, expected {expect}"));
        }
        Ok(())
    }

    fn check(&self, e: usize) -> Result<()> {
        let n = self.state.level.len();
        if e < n {
            Ok(())
        } else {
            Err(Error::Domain {
                element: e,
                ground_size: n,
            })
        }
    }
}

#[cfg(test)]
mod tests;
