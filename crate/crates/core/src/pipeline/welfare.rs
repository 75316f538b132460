use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::{MatroidInstance, PartitionMatroid};
use crate::oracle::{MarginalContext, SetFunction, ValuationOracle};

/// `m` items shared among `k` players with monotone submodular valuations over the items.
#[derive(Clone)]
pub struct WelfareInstance {
    items: usize,
    valuations: Vec<Arc<dyn SetFunction>>,
}

impl std::fmt::Debug for WelfareInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WelfareInstance")
            .field("items", &self.items)
            .field("players", &self.valuations.len())
            .finish()
    }
}

impl WelfareInstance {
    pub fn new(items: usize, valuations: Vec<Arc<dyn SetFunction>>) -> Result<Self> {
        if valuations.is_empty() {
            return Err(Error::param("need at least one player"));
        }
        if let Some(i) = valuations.iter().position(|v| v.ground_size() != items) {
            return Err(Error::param(format!(
                "player {i} values {} items, expected {items}",
                valuations[i].ground_size()
            )));
        }
        Ok(Self { items, valuations })
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn players(&self) -> usize {
        self.valuations.len()
    }
}

/// `f(S) = Σᵢ vᵢ(Sᵢ)` where element `item·k + i` gives `item` to player `i`.
pub struct WelfareObjective {
    items: usize,
    valuations: Vec<Arc<dyn SetFunction>>,
    calls: Vec<AtomicU64>,
}

impl WelfareObjective {
    pub fn players(&self) -> usize {
        self.valuations.len()
    }

    pub fn element(&self, item: usize, player: usize) -> usize {
        item * self.players() + player
    }

    /// `(item, player)` of a ground element.
    pub fn decode(&self, e: usize) -> (usize, usize) {
        (e / self.players(), e % self.players())
    }

    /// Direct evaluations of each player's valuation so far.
    pub fn player_calls(&self) -> Vec<u64> {
        self.calls.iter().map(|c| c.load(Ordering::Relaxed)).collect()
    }

    /// Player per item, `None` for unassigned items.
    pub fn assignment(&self, set: &[usize]) -> Vec<Option<usize>> {
        let mut out = vec![None; self.items];
        for &e in set {
            let (item, player) = self.decode(e);
            out[item] = Some(player);
        }
        out
    }
}

impl SetFunction for WelfareObjective {
    fn ground_size(&self) -> usize {
        self.items * self.players()
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let mut bundles = vec![Vec::new(); self.players()];
        for &e in set {
            let (item, player) = self.decode(e);
            bundles[player].push(item);
        }
        bundles
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .map(|(i, b)| {
                self.calls[i].fetch_add(1, Ordering::Relaxed);
                self.valuations[i].evaluate(b)
            })
            .sum()
    }

    fn context(&self) -> Box<dyn MarginalContext + '_> {
        let parts: Vec<_> = self.valuations.iter().map(|v| v.context()).collect();
        let value = parts.iter().map(|c| c.value()).sum();
        Box::new(WelfareContext {
            obj: self,
            parts,
            value,
        })
    }
}

struct WelfareContext<'a> {
    obj: &'a WelfareObjective,
    parts: Vec<Box<dyn MarginalContext + 'a>>,
    value: f64,
}

impl MarginalContext for WelfareContext<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn extended(&self, e: usize) -> f64 {
        let (item, player) = self.obj.decode(e);
        let part = &self.parts[player];
        self.value - part.value() + part.extended(item)
    }

    fn insert(&mut self, e: usize) {
        let (item, player) = self.obj.decode(e);
        let part = &mut self.parts[player];
        self.value -= part.value();
        part.insert(item);
        self.value += part.value();
    }
}

/// The reduced problem: oracle, partition matroid and the composite objective.
pub struct WelfareReduction {
    pub oracle: ValuationOracle,
    pub matroid: MatroidInstance,
    pub objective: Arc<WelfareObjective>,
}

/// One copy of every item per player; each item's copies form a part of budget 1.
pub fn welfare_reduce(inst: &WelfareInstance) -> WelfareReduction {
    let k = inst.players();
    let objective = Arc::new(WelfareObjective {
        items: inst.items,
        valuations: inst.valuations.clone(),
        calls: (0..k).map(|_| AtomicU64::new(0)).collect(),
    });
    let part_of = (0..inst.items * k).map(|e| e / k).collect();
    let matroid = PartitionMatroid::new(part_of, vec![1; inst.items])
        .expect("every part is nonempty")
        .into();
    let oracle = ValuationOracle::from_arc(objective.clone());
    WelfareReduction {
        oracle,
        matroid,
        objective,
    }
}
