//! Graphic swap rounding with red-black gadgets over an Euler-tour forest.
//!
//! Each vertex class of a spanning tree `T` is expanded into a red-black tree of
//! "copies", one per incident tree edge; copies of the two endpoints of a tree edge are
//! joined by that edge. The expanded tree `T′` lives in an [`EulerForest`] whose edge ids
//! are `2y` for the gadget edge from copy `y` to its parent and `2g+1` for graph edge `g`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;

use super::rbtree::{RbArena, SENTINEL};
use crate::error::{Error, Result};
use crate::euler::EulerForest;
use crate::matroid::{GraphicMatroid, UnionFind};
use crate::set::ElementSet;

#[derive(Clone, Debug)]
pub struct GadgetTree {
    rb: RbArena,
    /// Graph edge of each copy.
    edge_of: Vec<usize>,
    /// Copies of each graph edge at its two endpoints, `SENTINEL` when absent.
    copies: Vec<[usize; 2]>,
    /// Gadget root and size per class, valid at class representatives.
    root: Vec<usize>,
    size: Vec<usize>,
    ett: EulerForest,
    /// Parent currently mirrored into the tour for each copy.
    mirrored: Vec<usize>,
    edges: usize,
    /// Tour and rotation cost spent inside contractions.
    meld_steps: u64,
}

impl GadgetTree {
    fn new(graph: &GraphicMatroid) -> Self {
        Self {
            rb: RbArena::new(),
            edge_of: vec![usize::MAX],
            copies: vec![[SENTINEL; 2]; graph.ground_size()],
            root: vec![SENTINEL; graph.vertices()],
            size: vec![0; graph.vertices()],
            ett: EulerForest::new(1),
            mirrored: vec![SENTINEL],
            edges: 0,
            meld_steps: 0,
        }
    }

    pub fn contains(&self, g: usize) -> bool {
        self.copies[g][0] != SENTINEL
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Current degree of the class represented by `class`.
    pub fn degree(&self, class: usize) -> usize {
        self.size[class]
    }

    /// Graph edges incident to `class`, in gadget order.
    pub fn incident(&self, class: usize) -> Vec<usize> {
        self.rb
            .nodes(self.root[class])
            .into_iter()
            .map(|y| self.edge_of[y])
            .collect()
    }

    pub fn tour_cost(&self) -> u64 {
        self.ett.cost()
    }

    fn new_copy(&mut self, g: usize) -> usize {
        let y = self.rb.alloc();
        let v = self.ett.add_vertex();
        debug_assert_eq!(y, v);
        self.edge_of.push(g);
        self.mirrored.push(SENTINEL);
        y
    }

    /// Mirrors every logged parent change into the tour: all cuts, then all links.
    fn sync(&mut self) {
        let touched = self.rb.take_touched();
        let mut relink = Vec::new();
        for &y in &touched {
            let want = self.rb.parent(y);
            if want != self.mirrored[y] {
                if self.mirrored[y] != SENTINEL {
                    self.ett.cut(2 * y).expect("mirrored gadget edge exists");
                }
                self.mirrored[y] = want;
                if want != SENTINEL {
                    relink.push((y, want));
                }
            }
        }
        for (y, p) in relink {
            self.ett.link(y, p, 2 * y).expect("gadget shape is a forest");
        }
    }

    fn insert_copy(&mut self, class: usize, y: usize) {
        let mut root = self.root[class];
        self.rb.insert_max(&mut root, y);
        self.root[class] = root;
        self.size[class] += 1;
        self.sync();
    }

    fn remove_copy(&mut self, class: usize, y: usize) {
        let mut root = self.root[class];
        self.rb.delete(&mut root, y);
        self.root[class] = root;
        self.size[class] -= 1;
        self.sync();
    }

    fn add_edge(&mut self, graph: &GraphicMatroid, dsu: &mut UnionFind, g: usize) {
        let (a, b) = graph.edge(g);
        let (ca, cb) = (self.new_copy(g), self.new_copy(g));
        let (ra, rb) = (dsu.find(a), dsu.find(b));
        self.insert_copy(ra, ca);
        self.insert_copy(rb, cb);
        self.ett.link(ca, cb, 2 * g + 1).expect("edge joins two components");
        self.copies[g] = [ca, cb];
        self.edges += 1;
    }

    fn remove_edge(&mut self, graph: &GraphicMatroid, dsu: &mut UnionFind, g: usize) {
        let (a, b) = graph.edge(g);
        let [ca, cb] = self.copies[g];
        self.ett.cut(2 * g + 1).expect("tree edge is linked");
        let (ra, rb) = (dsu.find(a), dsu.find(b));
        self.remove_copy(ra, ca);
        self.remove_copy(rb, cb);
        self.copies[g] = [SENTINEL; 2];
        self.edges -= 1;
    }

    /// Drops `g` and melds the smaller endpoint gadget into the larger one; returns the
    /// class whose gadget survives. The caller merges the classes afterwards.
    fn contract(&mut self, graph: &GraphicMatroid, dsu: &mut UnionFind, g: usize) -> usize {
        let before = self.ett.cost() + self.rb.rotations();
        self.remove_edge(graph, dsu, g);
        let (a, b) = graph.edge(g);
        let (ra, rb) = (dsu.find(a), dsu.find(b));
        let (small, large) = if self.size[ra] < self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        let moving = self.rb.nodes(self.root[small]);
        for &y in &moving {
            self.remove_copy(small, y);
            self.insert_copy(large, y);
        }
        self.meld_steps += self.ett.cost() + self.rb.rotations() - before + moving.len() as u64;
        large
    }

    fn adopt(&mut self, from: usize, into: usize) {
        if from != into {
            self.root[into] = self.root[from];
            self.size[into] = self.size[from];
            self.root[from] = SENTINEL;
            self.size[from] = 0;
        }
    }

    /// The edge of `v`'s gadget whose side of `T′` holds the class `u`, found by cutting
    /// and relinking the gadget edges on the way down.
    fn partner(&mut self, v: usize, u: usize) -> usize {
        let target = self.root[u];
        let mut node = self.root[v];
        'descend: loop {
            for child in [self.rb.left(node), self.rb.right(node)] {
                if child == SENTINEL {
                    continue;
                }
                self.ett.cut(2 * child).expect("gadget edge is mirrored");
                let inside = self.ett.same_tree(child, target);
                self.ett.link(child, node, 2 * child).expect("relink restores the tree");
                if inside {
                    node = child;
                    continue 'descend;
                }
            }
            return self.edge_of[node];
        }
    }
}

/// Counters from one graphic merge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub swaps: usize,
    pub meld_steps: u64,
    pub tour_steps: u64,
}

/// State for merging two spanning trees by leaf-edge swaps.
#[derive(Clone, Debug)]
pub struct GraphicMerge<'a> {
    graph: &'a GraphicMatroid,
    dsu: UnionFind,
    t1: GadgetTree,
    t2: GadgetTree,
    leaves: BinaryHeap<Reverse<usize>>,
    contracted: ElementSet,
    swaps: usize,
}

impl<'a> GraphicMerge<'a> {
    /// Builds both gadget trees and contracts their common edges in ascending id order.
    pub fn new(graph: &'a GraphicMatroid, b1: &ElementSet, b2: &ElementSet) -> Result<Self> {
        if !graph.is_spanning_tree(b1) || !graph.is_spanning_tree(b2) {
            return Err(Error::Combination("merge inputs must be spanning trees".into()));
        }
        let mut merge = Self {
            graph,
            dsu: UnionFind::new(graph.vertices()),
            t1: GadgetTree::new(graph),
            t2: GadgetTree::new(graph),
            leaves: BinaryHeap::new(),
            contracted: ElementSet::new(),
            swaps: 0,
        };
        for &g in b1.iter() {
            merge.t1.add_edge(graph, &mut merge.dsu, g);
        }
        for &g in b2.iter() {
            merge.t2.add_edge(graph, &mut merge.dsu, g);
        }
        for &g in b1.intersection(b2).iter() {
            merge.contract(g);
        }
        for &g in b1.difference(b2).iter() {
            merge.push_if_leaf_edge(g);
        }
        Ok(merge)
    }

    pub fn is_done(&self) -> bool {
        self.t1.edge_count() == 0
    }

    pub fn first(&self) -> &GadgetTree {
        &self.t1
    }

    pub fn second(&self) -> &GadgetTree {
        &self.t2
    }

    /// Class representative of vertex `v`.
    pub fn class_of(&mut self, v: usize) -> usize {
        self.dsu.find(v)
    }

    pub fn contracted(&self) -> &ElementSet {
        &self.contracted
    }

    pub fn stats(&self) -> MergeStats {
        MergeStats {
            swaps: self.swaps,
            meld_steps: self.t1.meld_steps + self.t2.meld_steps,
            tour_steps: self.t1.tour_cost() + self.t2.tour_cost(),
        }
    }

    fn push_if_leaf_edge(&mut self, g: usize) {
        if self.is_leaf_edge(g) {
            self.leaves.push(Reverse(g));
        }
    }

    fn push_class(&mut self, class: usize) {
        if self.t1.degree(class) == 1 {
            let g = self.t1.incident(class)[0];
            self.leaves.push(Reverse(g));
        }
    }

    fn is_leaf_edge(&mut self, g: usize) -> bool {
        if !self.t1.contains(g) {
            return false;
        }
        let (a, b) = self.graph.edge(g);
        let (ra, rb) = (self.dsu.find(a), self.dsu.find(b));
        self.t1.degree(ra) == 1 || self.t1.degree(rb) == 1
    }

    fn contract(&mut self, g: usize) {
        let (a, b) = self.graph.edge(g);
        let keep1 = self.t1.contract(self.graph, &mut self.dsu, g);
        let keep2 = self.t2.contract(self.graph, &mut self.dsu, g);
        let root = self.dsu.union(a, b).expect("contracted edge joins two classes");
        self.t1.adopt(keep1, root);
        self.t2.adopt(keep2, root);
        self.contracted.insert(g);
    }

    /// The lowest-id edge `e = (v, u)` of the first tree with `v` a leaf class, and the
    /// edge `f` of the second tree at `v` on its path towards `u`.
    pub fn find_swap(&mut self) -> Result<(usize, usize)> {
        if self.is_done() {
            return Err(Error::pre("trees are equal"));
        }
        let e = loop {
            let Reverse(g) = self
                .leaves
                .pop()
                .ok_or_else(|| Error::Combination("no leaf edge found".into()))?;
            if self.is_leaf_edge(g) {
                break g;
            }
        };
        let (a, b) = self.graph.edge(e);
        let (ra, rb) = (self.dsu.find(a), self.dsu.find(b));
        let (v, u) = if self.t1.degree(ra) == 1 { (ra, rb) } else { (rb, ra) };
        Ok((e, self.t2.partner(v, u)))
    }

    /// With `to_second`, the second tree trades `f` for `e`; otherwise the first trades
    /// `e` for `f`. The now-common edge is contracted in both.
    pub fn swap_and_contract(&mut self, e: usize, f: usize, to_second: bool) -> Result<()> {
        let n = self.graph.ground_size();
        if e >= n || f >= n || !self.t1.contains(e) || self.t2.contains(e) {
            return Err(Error::pre(format!("{e} is not in T1 \\ T2")));
        }
        if !self.t2.contains(f) || self.t1.contains(f) {
            return Err(Error::pre(format!("{f} is not in T2 \\ T1")));
        }
        let g = if to_second {
            self.t2.remove_edge(self.graph, &mut self.dsu, f);
            self.t2.add_edge(self.graph, &mut self.dsu, e);
            e
        } else {
            self.t1.remove_edge(self.graph, &mut self.dsu, e);
            self.t1.add_edge(self.graph, &mut self.dsu, f);
            f
        };
        self.contract(g);
        self.swaps += 1;
        for x in [e, f] {
            let (a, b) = self.graph.edge(x);
            for v in [a, b] {
                let class = self.dsu.find(v);
                self.push_class(class);
            }
        }
        Ok(())
    }

    pub fn run<R: Rng + ?Sized>(mut self, beta1: f64, beta2: f64, rng: &mut R) -> Result<(ElementSet, MergeStats)> {
        let p = beta1 / (beta1 + beta2);
        while !self.is_done() {
            let (e, f) = self.find_swap()?;
            let coin = rng.gen::<f64>() < p;
            self.swap_and_contract(e, f, coin)?;
        }
        let stats = self.stats();
        Ok((self.contracted, stats))
    }
}

/// Graphic fast path of `merge_bases`.
pub fn merge_bases_graphic<R: Rng + ?Sized>(
    graph: &GraphicMatroid,
    beta1: f64,
    b1: &ElementSet,
    beta2: f64,
    b2: &ElementSet,
    rng: &mut R,
) -> Result<(ElementSet, MergeStats)> {
    GraphicMerge::new(graph, b1, b2)?.run(beta1, beta2, rng)
}
