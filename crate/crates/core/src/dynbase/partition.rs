use super::{Levels, WeightGrid, NIL};
use crate::matroid::PartitionMatroid;

/// Per part and level, a doubly-linked list `V_i⁽ʲ⁾` with base members first.
#[derive(Clone, Debug)]
pub(crate) struct PartitionAux<'a> {
    matroid: &'a PartitionMatroid,
    stride: usize,
    head: Vec<usize>,
    tail: Vec<usize>,
    first_nonbase: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    /// Per part, a level at or before the first one holding a non-base element.
    partial: Vec<u32>,
}

impl<'a> PartitionAux<'a> {
    pub(crate) fn build(matroid: &'a PartitionMatroid, grid: &WeightGrid, state: &mut Levels, steps: &mut u64) -> Self {
        let n = matroid.ground_size();
        let stride = grid.floor_level() as usize + 1;
        let slots = matroid.budgets().len() * stride;
        let mut aux = Self {
            matroid,
            stride,
            head: vec![NIL; slots],
            tail: vec![NIL; slots],
            first_nonbase: vec![NIL; slots],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            partial: vec![1; matroid.budgets().len()],
        };
        let mut by_level = vec![Vec::new(); stride];
        for e in 0..n {
            by_level[state.level[e] as usize].push(e);
        }
        let mut taken = vec![0usize; matroid.budgets().len()];
        for (level, elems) in by_level.iter().enumerate() {
            for &e in elems {
                let part = matroid.part_of(e);
                if taken[part] < matroid.budgets()[part] {
                    taken[part] += 1;
                    state.in_base[e] = true;
                    aux.push_base(part, level, e);
                } else {
                    aux.push_nonbase(part, level, e);
                }
                *steps += 1;
            }
        }
        aux
    }

    fn slot(&self, part: usize, level: usize) -> usize {
        part * self.stride + level
    }

    fn push_base(&mut self, part: usize, level: usize, e: usize) {
        let s = self.slot(part, level);
        let old = self.head[s];
        self.prev[e] = NIL;
        self.next[e] = old;
        if old == NIL {
            self.tail[s] = e;
        } else {
            self.prev[old] = e;
        }
        self.head[s] = e;
    }

    fn push_nonbase(&mut self, part: usize, level: usize, e: usize) {
        let s = self.slot(part, level);
        let old = self.tail[s];
        self.next[e] = NIL;
        self.prev[e] = old;
        if old == NIL {
            self.head[s] = e;
        } else {
            self.next[old] = e;
        }
        self.tail[s] = e;
        if self.first_nonbase[s] == NIL {
            self.first_nonbase[s] = e;
        }
    }

    fn unlink(&mut self, part: usize, level: usize, e: usize) {
        let s = self.slot(part, level);
        let (p, q) = (self.prev[e], self.next[e]);
        if p == NIL {
            self.head[s] = q;
        } else {
            self.next[p] = q;
        }
        if q == NIL {
            self.tail[s] = p;
        } else {
            self.prev[q] = p;
        }
        if self.first_nonbase[s] == e {
            self.first_nonbase[s] = q;
        }
    }

    /// `e` (in the base) dropped from level `from` to `to`; returns its replacement.
    pub(crate) fn decrease(
        &mut self,
        e: usize,
        from: u32,
        to: u32,
        state: &mut Levels,
        steps: &mut u64,
    ) -> Option<usize> {
        let part = self.matroid.part_of(e);
        self.unlink(part, from as usize, e);
        *steps += 1;
        let floor = self.stride as u32 - 1;
        let mut level = self.partial[part];
        while level <= floor && self.first_nonbase[self.slot(part, level as usize)] == NIL {
            level += 1;
            *steps += 1;
        }
        self.partial[part] = level;
        if level < to {
            let s = self.slot(part, level as usize);
            let c = self.first_nonbase[s];
            self.first_nonbase[s] = self.next[c];
            state.in_base[c] = true;
            state.in_base[e] = false;
            self.push_nonbase(part, to as usize, e);
            *steps += 2;
            Some(c)
        } else {
            self.push_base(part, to as usize, e);
            *steps += 1;
            None
        }
    }
}
