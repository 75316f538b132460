use super::{Levels, SlotLists, WeightGrid};
use crate::euler::EulerForest;
use crate::matroid::{GraphicMatroid, UnionFind};

/// Maximum spanning tree in an Euler-tour forest, non-tree edges grouped by level.
#[derive(Clone, Debug)]
pub(crate) struct GraphicAux<'a> {
    graph: &'a GraphicMatroid,
    forest: EulerForest,
    nontree: SlotLists,
}

impl<'a> GraphicAux<'a> {
    pub(crate) fn build(graph: &'a GraphicMatroid, grid: &WeightGrid, state: &mut Levels, steps: &mut u64) -> Self {
        let m = graph.ground_size();
        let floor = grid.floor_level() as usize;
        let mut by_level = vec![Vec::new(); floor + 1];
        for e in 0..m {
            by_level[state.level[e] as usize].push(e);
        }
        let mut uf = UnionFind::new(graph.vertices());
        let mut forest = EulerForest::new(graph.vertices());
        let mut nontree = SlotLists::new(floor + 1, m);
        for (level, edges) in by_level.iter().enumerate() {
            for &e in edges {
                let (u, v) = graph.edge(e);
                if uf.union(u, v).is_some() {
                    state.in_base[e] = true;
                    forest.link(u, v, e).expect("kruskal only links across trees");
                } else {
                    nontree.insert(level, e);
                }
                *steps += 1;
            }
        }
        Self { graph, forest, nontree }
    }

    pub(crate) fn forest_cost(&self) -> u64 {
        self.forest.cost()
    }

    /// Cut `e`, then look for the heaviest non-tree edge across the cut that is strictly
    /// heavier than `e`'s new level; ties go to the lowest index.
    pub(crate) fn decrease(
        &mut self,
        e: usize,
        _from: u32,
        to: u32,
        state: &mut Levels,
        steps: &mut u64,
    ) -> Option<usize> {
        let (u, v) = self.forest.cut(e).expect("base edges live in the forest");
        let mut best = None;
        for level in 1..to as usize {
            for &f in self.nontree.list(level) {
                *steps += 1;
                let (a, b) = self.graph.edge(f);
                if !self.forest.same_tree(a, b) && best.is_none_or(|g| f < g) {
                    best = Some(f);
                }
            }
            if best.is_some() {
                break;
            }
        }
        match best {
            Some(f) => {
                let (a, b) = self.graph.edge(f);
                self.forest.link(a, b, f).expect("f crosses the cut");
                self.nontree.remove(f);
                self.nontree.insert(to as usize, e);
                state.in_base[f] = true;
                state.in_base[e] = false;
                Some(f)
            }
            None => {
                self.forest.link(u, v, e).expect("e reconnects its own cut");
                None
            }
        }
    }
}
