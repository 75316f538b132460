//! Explicit partition and graphic matroids.

mod union_find;

pub use union_find::UnionFind;

use crate::error::{Error, Result};
use crate::set::ElementSet;

/// `|S ∩ V_i| ≤ k_i` for every part `V_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionMatroid {
    part_of: Vec<usize>,
    budgets: Vec<usize>,
    parts: Vec<Vec<usize>>,
}

impl PartitionMatroid {
    /// `part_of[e]` names the part of element `e`; `budgets[i]` is `k_i`.
    pub fn new(part_of: Vec<usize>, budgets: Vec<usize>) -> Result<Self> {
        let mut parts = vec![Vec::new(); budgets.len()];
        for (e, &p) in part_of.iter().enumerate() {
            let part = parts
                .get_mut(p)
                .ok_or_else(|| Error::Matroid(format!("element {e} names missing part {p}")))?;
            part.push(e);
        }
        for (i, (&k, part)) in budgets.iter().zip(&parts).enumerate() {
            if k > part.len() {
                return Err(Error::Matroid(format!(
                    "part {i} has budget {k} but only {} elements",
                    part.len()
                )));
            }
        }
        Ok(Self {
            part_of,
            budgets,
            parts,
        })
    }

    /// Builds from explicit `(budget, elements)` parts over `0..n`.
    pub fn from_parts(n: usize, parts: Vec<(usize, Vec<usize>)>) -> Result<Self> {
        let mut part_of = vec![usize::MAX; n];
        let mut budgets = Vec::with_capacity(parts.len());
        for (i, (k, elems)) in parts.into_iter().enumerate() {
            budgets.push(k);
            for e in elems {
                if e >= n {
                    return Err(Error::Matroid(format!("element {e} outside 0..{n}")));
                }
                if part_of[e] != usize::MAX {
                    return Err(Error::Matroid(format!("element {e} listed in two parts")));
                }
                part_of[e] = i;
            }
        }
        if let Some(e) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::Matroid(format!("element {e} belongs to no part")));
        }
        Self::new(part_of, budgets)
    }

    /// A single part holding everything: the cardinality constraint `|S| ≤ k`.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![0; n], vec![k])
    }

    pub fn part_of(&self, e: usize) -> usize {
        self.part_of[e]
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn ground_size(&self) -> usize {
        self.part_of.len()
    }

    pub fn rank(&self) -> usize {
        self.budgets.iter().sum()
    }
}

/// Forests of a connected multigraph without self-loops.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphicMatroid {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::Matroid("graph needs at least one vertex".into()));
        }
        let mut uf = UnionFind::new(vertices);
        let mut components = vertices;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= vertices || v >= vertices {
                return Err(Error::Matroid(format!("edge {i} = ({u},{v}) has an unknown endpoint")));
            }
            if u == v {
                return Err(Error::Matroid(format!("edge {i} is a self-loop")));
            }
            if uf.union(u, v).is_some() {
                components -= 1;
            }
        }
        if components != 1 {
            return Err(Error::Matroid(format!("graph has {components} components")));
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn ground_size(&self) -> usize {
        self.edges.len()
    }

    pub fn rank(&self) -> usize {
        self.vertices - 1
    }

    /// The edges of `set` (assumed in range) form a forest.
    pub fn is_forest(&self, set: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        set.iter().all(|&e| {
            let (u, v) = self.edges[e];
            uf.union(u, v).is_some()
        })
    }

    pub fn is_spanning_tree(&self, set: &[usize]) -> bool {
        set.len() == self.rank() && set.iter().all(|&e| e < self.edges.len()) && self.is_forest(set)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatroidInstance {
    Partition(PartitionMatroid),
    Graphic(GraphicMatroid),
}

impl From<PartitionMatroid> for MatroidInstance {
    fn from(m: PartitionMatroid) -> Self {
        MatroidInstance::Partition(m)
    }
}

impl From<GraphicMatroid> for MatroidInstance {
    fn from(m: GraphicMatroid) -> Self {
        MatroidInstance::Graphic(m)
    }
}

impl MatroidInstance {
    pub fn ground_size(&self) -> usize {
        match self {
            MatroidInstance::Partition(p) => p.ground_size(),
            MatroidInstance::Graphic(g) => g.ground_size(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            MatroidInstance::Partition(p) => p.rank(),
            MatroidInstance::Graphic(g) => g.rank(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MatroidInstance::Partition(_) => "partition",
            MatroidInstance::Graphic(_) => "graphic",
        }
    }

    fn check(&self, set: &[usize]) -> Result<()> {
        let n = self.ground_size();
        match set.iter().find(|&&e| e >= n) {
            Some(&e) => Err(Error::Domain {
                element: e,
                ground_size: n,
            }),
            None => Ok(()),
        }
    }

    /// Independence of a set of distinct elements (repeats count twice).
    pub fn is_independent(&self, set: &[usize]) -> bool {
        if self.check(set).is_err() {
            return false;
        }
        match self {
            MatroidInstance::Partition(p) => {
                let mut counts = vec![0usize; p.budgets.len()];
                set.iter().all(|&e| {
                    let part = p.part_of[e];
                    counts[part] += 1;
                    counts[part] <= p.budgets[part]
                })
            }
            MatroidInstance::Graphic(g) => g.is_forest(set),
        }
    }

    pub fn is_base(&self, set: &[usize]) -> bool {
        set.len() == self.rank() && self.is_independent(set)
    }

    /// `e` cannot be in any independent set.
    pub fn is_loop(&self, e: usize) -> bool {
        match self {
            MatroidInstance::Partition(p) => p.budgets[p.part_of[e]] == 0,
            MatroidInstance::Graphic(_) => false,
        }
    }

    /// Independence state seeded with `seed`; this also represents the contraction by `seed`.
    pub fn indep_new(&self, seed: &[usize]) -> Result<IndepState<'_>> {
        self.check(seed)?;
        let mut state = IndepState::empty(self);
        for &e in seed {
            if state.chosen.contains(e) || !state.fits(e) {
                return Err(Error::Dependent(format!("seed {seed:?} is not independent")));
            }
            state.commit(e);
        }
        Ok(state)
    }

    /// Greedy maximum-weight base; ties go to the lowest index.
    pub fn max_weight_base_bruteforce(&self, weights: &[f64]) -> ElementSet {
        self.max_weight_base_pinned(weights, &[])
    }

    /// Greedy maximum-weight base among those containing the independent set `pinned`.
    pub fn max_weight_base_pinned(&self, weights: &[f64], pinned: &[usize]) -> ElementSet {
        let mut order: Vec<usize> = (0..self.ground_size()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let mut state = self.indep_new(pinned).expect("pinned elements must be independent");
        for e in order {
            if !state.chosen.contains(e) && state.fits(e) {
                state.commit(e);
            }
        }
        state.chosen
    }

    /// A `j ∈ B2 ∖ B1` with both `B1 − i + j` and `B2 − j + i` independent (lowest index).
    pub fn find_swap_pair_bruteforce(&self, b1: &ElementSet, b2: &ElementSet, i: usize) -> Result<usize> {
        if !self.is_base(b1) || !self.is_base(b2) {
            return Err(Error::pre("both sets must be bases"));
        }
        if b1 == b2 {
            return Err(Error::pre("bases are equal"));
        }
        if !b1.contains(i) || b2.contains(i) {
            return Err(Error::pre(format!("{i} is not in B1 \\ B2")));
        }
        let mut b1_minus: ElementSet = b1.clone();
        b1_minus.remove(i);
        b2.difference(b1)
            .iter()
            .copied()
            .find(|&j| {
                let mut b2_swapped = b2.clone();
                b2_swapped.remove(j);
                b2_swapped.insert(i);
                self.is_independent(&b1_minus.with(j)) && self.is_independent(&b2_swapped)
            })
            .ok_or_else(|| Error::pre("no exchange partner; inputs are not bases"))
    }

    /// Every base, by exhaustive enumeration. Intended for ground sets of a few dozen
    /// elements and small rank.
    pub fn enumerate_bases(&self) -> Vec<ElementSet> {
        let (n, k) = (self.ground_size(), self.rank());
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(k);
        self.enumerate_from(0, n, k, &mut stack, &mut out);
        out
    }

    fn enumerate_from(&self, start: usize, n: usize, k: usize, stack: &mut Vec<usize>, out: &mut Vec<ElementSet>) {
        if stack.len() == k {
            out.push(ElementSet::from(stack.clone()));
            return;
        }
        for e in start..n {
            if n - e < k - stack.len() {
                break;
            }
            stack.push(e);
            if self.is_independent(stack) {
                self.enumerate_from(e + 1, n, k, stack, out);
            }
            stack.pop();
        }
    }
}

#[derive(Clone, Debug)]
enum Tracker {
    Partition(Vec<usize>),
    Graphic(UnionFind),
}

/// An independent set that grows by guarded additions.
#[derive(Clone, Debug)]
pub struct IndepState<'a> {
    matroid: &'a MatroidInstance,
    chosen: ElementSet,
    tracker: Tracker,
    ops: u64,
}

impl<'a> IndepState<'a> {
    fn empty(matroid: &'a MatroidInstance) -> Self {
        let tracker = match matroid {
            MatroidInstance::Partition(p) => Tracker::Partition(vec![0; p.budgets.len()]),
            MatroidInstance::Graphic(g) => Tracker::Graphic(UnionFind::new(g.vertices)),
        };
        Self {
            matroid,
            chosen: ElementSet::new(),
            tracker,
            ops: 0,
        }
    }

    fn fits(&mut self, e: usize) -> bool {
        match (&mut self.tracker, self.matroid) {
            (Tracker::Partition(counts), MatroidInstance::Partition(p)) => {
                let part = p.part_of[e];
                counts[part] < p.budgets[part]
            }
            (Tracker::Graphic(uf), MatroidInstance::Graphic(g)) => {
                let (u, v) = g.edges[e];
                !uf.same(u, v)
            }
            _ => unreachable!("tracker always matches the matroid variant"),
        }
    }

    fn commit(&mut self, e: usize) {
        match (&mut self.tracker, self.matroid) {
            (Tracker::Partition(counts), MatroidInstance::Partition(p)) => {
                counts[p.part_of[e]] += 1;
            }
            (Tracker::Graphic(uf), MatroidInstance::Graphic(g)) => {
                let (u, v) = g.edges[e];
                uf.union(u, v);
            }
            _ => unreachable!("tracker always matches the matroid variant"),
        }
        self.chosen.insert(e);
    }

    pub fn matroid(&self) -> &'a MatroidInstance {
        self.matroid
    }

    pub fn chosen(&self) -> &ElementSet {
        &self.chosen
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// `chosen` is a base.
    pub fn is_full(&self) -> bool {
        self.chosen.len() == self.matroid.rank()
    }

    /// Number of `can_add` / `add` calls so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn can_add(&mut self, e: usize) -> Result<bool> {
        self.matroid.check(&[e])?;
        if self.chosen.contains(e) {
            return Err(Error::pre(format!("element {e} is already chosen")));
        }
        self.ops += 1;
        Ok(self.fits(e))
    }

    pub fn add(&mut self, e: usize) -> Result<()> {
        if !self.can_add(e)? {
            return Err(Error::Dependent(format!("adding {e} breaks independence")));
        }
        self.commit(e);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_element_part() -> MatroidInstance {
        PartitionMatroid::from_parts(2, vec![(1, vec![0, 1])]).unwrap().into()
    }

    pub(crate) fn triangle() -> MatroidInstance {
        GraphicMatroid::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap().into()
    }

    #[test]
    fn independence_examples() {
        let p = two_element_part();
        assert!(p.is_independent(&[0]));
        assert!(!p.is_independent(&[0, 1]));
        let t = triangle();
        assert!(!t.is_independent(&[0, 1, 2]));
        assert!(t.is_independent(&[0, 2]));
    }

    #[test]
    fn indep_state_examples() {
        let p = two_element_part();
        let mut s = p.indep_new(&[0]).unwrap();
        assert!(!s.can_add(1).unwrap());
        assert!(s.add(1).is_err());
        assert!(s.can_add(0).is_err());
        assert!(p.indep_new(&[0, 1]).is_err());

        let t = triangle();
        let mut s = t.indep_new(&[0]).unwrap();
        assert!(s.can_add(1).unwrap());
        s.add(1).unwrap();
        assert!(!s.can_add(2).unwrap());
        assert!(s.is_full());
        assert_eq!(s.ops(), 3);

        assert!(t.indep_new(&[]).unwrap().is_empty());
        let spanning = t.indep_new(&[0, 1]).unwrap();
        match &spanning.tracker {
            Tracker::Graphic(uf) => assert!((0..3).all(|v| uf.root(v) == uf.root(0))),
            _ => unreachable!(),
        }
    }

    #[test]
    fn max_weight_base_examples() {
        let p = two_element_part();
        assert_eq!(p.max_weight_base_bruteforce(&[5.0, 3.0]).as_slice(), &[0]);
        let t = triangle();
        assert_eq!(t.max_weight_base_bruteforce(&[3.0, 2.0, 1.0]).as_slice(), &[0, 1]);
        let path: MatroidInstance = GraphicMatroid::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap().into();
        assert_eq!(path.max_weight_base_bruteforce(&[0.1, 9.0, 2.0]).as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn swap_pair_examples() {
        let p: MatroidInstance = PartitionMatroid::from_parts(2, vec![(1, vec![0, 1])]).unwrap().into();
        let (a, b) = (ElementSet::from(vec![0]), ElementSet::from(vec![1]));
        assert_eq!(p.find_swap_pair_bruteforce(&a, &b, 0).unwrap(), 1);
        let t = triangle();
        let (b1, b2) = (ElementSet::from(vec![0, 1]), ElementSet::from(vec![0, 2]));
        assert_eq!(t.find_swap_pair_bruteforce(&b1, &b2, 1).unwrap(), 2);
        assert!(t.find_swap_pair_bruteforce(&b1, &b1, 1).is_err());
    }

    #[test]
    fn validation_rejects_bad_instances() {
        assert!(PartitionMatroid::new(vec![0, 0], vec![3]).is_err());
        assert!(PartitionMatroid::from_parts(3, vec![(1, vec![0, 1])]).is_err());
        assert!(PartitionMatroid::from_parts(2, vec![(1, vec![0, 1]), (0, vec![1])]).is_err());
        assert!(GraphicMatroid::new(3, vec![(0, 1)]).is_err());
        assert!(GraphicMatroid::new(2, vec![(0, 0), (0, 1)]).is_err());
        assert!(GraphicMatroid::new(2, vec![(0, 5)]).is_err());
    }

    fn random_graph(rng: &mut ChaCha8Rng, max_v: usize, max_extra: usize) -> GraphicMatroid {
        let v = rng.gen_range(2..=max_v);
        let extra = rng.gen_range(0..=max_extra);
        let mut edges: Vec<(usize, usize)> = (1..v).map(|i| (rng.gen_range(0..i), i)).collect();
        for _ in 0..extra {
            let a = rng.gen_range(0..v);
            let mut b = rng.gen_range(0..v);
            while b == a {
                b = rng.gen_range(0..v);
            }
            edges.push((a, b));
        }
        // shuffle edge ids so the spanning path is not always edges 0..v-1
        for i in (1..edges.len()).rev() {
            let j = rng.gen_range(0..=i);
            edges.swap(i, j);
        }
        GraphicMatroid::new(v, edges).unwrap()
    }

    fn has_cycle_dfs(v: usize, edges: &[(usize, usize)]) -> bool {
        let mut adj = vec![Vec::new(); v];
        for (i, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        let mut seen = vec![false; v];
        for s in 0..v {
            if seen[s] {
                continue;
            }
            let mut stack = vec![(s, usize::MAX)];
            seen[s] = true;
            while let Some((x, via)) = stack.pop() {
                for &(y, id) in &adj[x] {
                    if id == via {
                        continue;
                    }
                    if seen[y] {
                        return true;
                    }
                    seen[y] = true;
                    stack.push((y, id));
                }
            }
        }
        false
    }

    #[test]
    fn independence_agrees_with_first_principles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=20);
            let h = rng.gen_range(1..=4);
            let part_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..h)).collect();
            let budgets: Vec<usize> = (0..h)
                .map(|i| {
                    let size = part_of.iter().filter(|&&p| p == i).count();
                    rng.gen_range(0..=size)
                })
                .collect();
            let m: MatroidInstance = PartitionMatroid::new(part_of.clone(), budgets.clone()).unwrap().into();
            for _ in 0..20 {
                let s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
                let ok = (0..h).all(|i| s.iter().filter(|&&e| part_of[e] == i).count() <= budgets[i]);
                assert_eq!(m.is_independent(&s), ok);
            }

            let g = random_graph(&mut rng, 8, 12);
            let m: MatroidInstance = g.clone().into();
            for _ in 0..20 {
                let s: Vec<usize> = (0..g.ground_size()).filter(|_| rng.gen_bool(0.4)).collect();
                let sub: Vec<(usize, usize)> = s.iter().map(|&e| g.edge(e)).collect();
                assert_eq!(m.is_independent(&s), !has_cycle_dfs(g.vertices(), &sub));
            }
        }
    }

    #[test]
    fn guarded_additions_stay_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for round in 0..100_000 {
            let m: MatroidInstance = if round % 2 == 0 {
                let g = random_graph(&mut rng, 7, 6);
                g.into()
            } else {
                let n = rng.gen_range(1..=10);
                PartitionMatroid::new((0..n).map(|e| e % 3).collect(), vec![1, 1, 2])
                    .or_else(|_| PartitionMatroid::uniform(n, n.min(2)))
                    .unwrap()
                    .into()
            };
            let mut state = m.indep_new(&[]).unwrap();
            for _ in 0..6 {
                let e = rng.gen_range(0..m.ground_size());
                if !state.chosen().contains(e) && state.can_add(e).unwrap() {
                    state.add(e).unwrap();
                }
            }
            assert!(m.is_independent(state.chosen()));
        }
    }

    #[test]
    fn greedy_base_is_optimal_among_all_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let m: MatroidInstance = if rng.gen_bool(0.5) {
                random_graph(&mut rng, 6, 6).into()
            } else {
                let n = rng.gen_range(1..=12);
                let part_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                let budgets = (0..3)
                    .map(|i| part_of.iter().filter(|&&p| p == i).count().min(2))
                    .collect();
                PartitionMatroid::new(part_of, budgets).unwrap().into()
            };
            if m.ground_size() > 12 {
                continue;
            }
            let w: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen_range(0..5) as f64).collect();
            let greedy = m.max_weight_base_bruteforce(&w);
            assert!(m.is_base(&greedy));
            let best = m
                .enumerate_bases()
                .iter()
                .map(|b| b.iter().map(|&e| w[e]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(greedy.iter().map(|&e| w[e]).sum::<f64>(), best);
        }
    }
}
