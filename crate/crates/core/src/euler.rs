//! Euler-tour forest: link, cut and connectivity in expected `O(log n)`.
//!
//! Every tree is stored as one circular tour in a treap keyed by implicit position.
//! The tour holds one node per vertex plus one node per directed arc, so a tree with
//! `e` edges has `e + 1` vertex nodes and `2e` arc nodes. Rerooting rotates the
//! sequence; linking splices two rerooted tours with the new arcs in between.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const NIL: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Node {
    left: usize,
    right: usize,
    parent: usize,
    prio: u64,
    size: usize,
    arcs: usize,
    is_arc: bool,
    vertex: usize,
}

#[derive(Clone, Copy, Debug)]
struct EdgeArcs {
    u: usize,
    v: usize,
    forward: usize,
    backward: usize,
}

#[derive(Clone, Debug)]
pub struct EulerForest {
    nodes: Vec<Node>,
    vertices: usize,
    vertex_node: Vec<usize>,
    edges: Vec<Option<EdgeArcs>>,
    edge_count: usize,
    free: Vec<usize>,
    rng: ChaCha8Rng,
    cost: Cell<u64>,
}

impl EulerForest {
    /// `n` isolated vertices.
    pub fn new(n: usize) -> Self {
        let mut forest = Self {
            nodes: Vec::with_capacity(n),
            vertices: 0,
            vertex_node: Vec::with_capacity(n),
            edges: Vec::new(),
            edge_count: 0,
            free: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(0x005e_ede7),
            cost: Cell::new(0),
        };
        for _ in 0..n {
            forest.add_vertex();
        }
        forest
    }

    pub fn add_vertex(&mut self) -> usize {
        let node = self.alloc(false);
        self.nodes[node].vertex = self.vertices;
        self.vertex_node.push(node);
        self.vertices += 1;
        self.vertices - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, id: usize) -> bool {
        matches!(self.edges.get(id), Some(Some(_)))
    }

    /// Endpoints of a present edge, as passed to [`link`](Self::link).
    pub fn endpoints(&self, id: usize) -> Option<(usize, usize)> {
        self.edges.get(id).copied().flatten().map(|a| (a.u, a.v))
    }

    /// Elementary treap steps (node visits in splits, merges and root walks) so far.
    pub fn cost(&self) -> u64 {
        self.cost.get()
    }

    pub fn same_tree(&self, u: usize, v: usize) -> bool {
        u == v || self.root(self.vertex_node[u]) == self.root(self.vertex_node[v])
    }

    /// Length of the tour through `v`: twice the tree's edge count, or 1 when isolated.
    pub fn tour_len(&self, v: usize) -> usize {
        let arcs = self.nodes[self.root(self.vertex_node[v])].arcs;
        arcs.max(1)
    }

    /// Number of vertices in the tree containing `v`.
    pub fn tree_size(&self, v: usize) -> usize {
        let r = &self.nodes[self.root(self.vertex_node[v])];
        r.size - r.arcs
    }

    /// Vertices of `v`'s tree in tour order.
    pub fn tree_vertices(&self, v: usize) -> Vec<usize> {
        let root = self.root(self.vertex_node[v]);
        let mut order = Vec::new();
        let mut stack = Vec::new();
        let mut cur = root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur].left;
            }
            let x = stack.pop().expect("stack is nonempty");
            if !self.nodes[x].is_arc {
                order.push(self.nodes[x].vertex);
            }
            cur = self.nodes[x].right;
        }
        order
    }

    pub fn link(&mut self, u: usize, v: usize, id: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if self.has_edge(id) {
            return Err(Error::pre(format!("edge id {id} is already linked")));
        }
        if self.same_tree(u, v) {
            return Err(Error::Cycle(u, v));
        }
        let tu = self.reroot(u);
        let tv = self.reroot(v);
        let forward = self.alloc(true);
        let backward = self.alloc(true);
        let left = self.merge(tu, forward);
        let right = self.merge(tv, backward);
        self.merge(left, right);
        if self.edges.len() <= id {
            self.edges.resize(id + 1, None);
        }
        self.edges[id] = Some(EdgeArcs {
            u,
            v,
            forward,
            backward,
        });
        self.edge_count += 1;
        Ok(())
    }

    /// Removes edge `id`; returns its endpoints.
    pub fn cut(&mut self, id: usize) -> Result<(usize, usize)> {
        let arcs = self
            .edges
            .get_mut(id)
            .and_then(Option::take)
            .ok_or(Error::UnknownEdge(id))?;
        self.edge_count -= 1;
        let (mut first, mut second) = (arcs.forward, arcs.backward);
        if self.index_of(first) > self.index_of(second) {
            std::mem::swap(&mut first, &mut second);
        }
        let i = self.index_of(first);
        let j = self.index_of(second);
        let root = self.root(first);
        // tour = X first Y second Z
        let (x, rest) = self.split(root, i);
        let (first_y, rest) = self.split(rest, j - i);
        let (_, y) = self.split(first_y, 1);
        let (_, z) = self.split(rest, 1);
        self.detach(y);
        self.merge(x, z);
        self.release(first);
        self.release(second);
        Ok((arcs.u, arcs.v))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertices {
            Ok(())
        } else {
            Err(Error::pre(format!("unknown vertex {v}")))
        }
    }

    fn alloc(&mut self, is_arc: bool) -> usize {
        let node = Node {
            left: NIL,
            right: NIL,
            parent: NIL,
            prio: self.rng.gen(),
            size: 1,
            arcs: usize::from(is_arc),
            is_arc,
            vertex: NIL,
        };
        match self.free.pop() {
            Some(i) => {
                self.nodes[i] = node;
                i
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        }
    }

    fn release(&mut self, node: usize) {
        self.free.push(node);
    }

    fn tick(&self, n: u64) {
        self.cost.set(self.cost.get() + n);
    }

    fn root(&self, mut x: usize) -> usize {
        let mut steps = 1;
        while self.nodes[x].parent != NIL {
            x = self.nodes[x].parent;
            steps += 1;
        }
        self.tick(steps);
        x
    }

    fn size(&self, x: usize) -> usize {
        if x == NIL {
            0
        } else {
            self.nodes[x].size
        }
    }

    fn arcs(&self, x: usize) -> usize {
        if x == NIL {
            0
        } else {
            self.nodes[x].arcs
        }
    }

    fn pull(&mut self, x: usize) {
        let (l, r) = (self.nodes[x].left, self.nodes[x].right);
        let own_arc = usize::from(self.nodes[x].is_arc);
        self.nodes[x].size = 1 + self.size(l) + self.size(r);
        self.nodes[x].arcs = own_arc + self.arcs(l) + self.arcs(r);
        if l != NIL {
            self.nodes[l].parent = x;
        }
        if r != NIL {
            self.nodes[r].parent = x;
        }
    }

    fn detach(&mut self, x: usize) {
        if x != NIL {
            self.nodes[x].parent = NIL;
        }
    }

    fn index_of(&self, x: usize) -> usize {
        let mut idx = self.size(self.nodes[x].left);
        let mut cur = x;
        let mut steps = 1;
        while self.nodes[cur].parent != NIL {
            let p = self.nodes[cur].parent;
            if self.nodes[p].right == cur {
                idx += self.size(self.nodes[p].left) + 1;
            }
            cur = p;
            steps += 1;
        }
        self.tick(steps);
        idx
    }

    /// Splits the treap rooted at `t` into the first `k` nodes and the rest.
    fn split(&mut self, t: usize, k: usize) -> (usize, usize) {
        if t == NIL {
            return (NIL, NIL);
        }
        self.tick(1);
        let left_size = self.size(self.nodes[t].left);
        if k <= left_size {
            let l = self.nodes[t].left;
            self.detach(l);
            let (a, b) = self.split(l, k);
            self.nodes[t].left = b;
            self.pull(t);
            self.detach(t);
            self.detach(a);
            (a, t)
        } else {
            let r = self.nodes[t].right;
            self.detach(r);
            let (a, b) = self.split(r, k - left_size - 1);
            self.nodes[t].right = a;
            self.pull(t);
            self.detach(t);
            self.detach(b);
            (t, b)
        }
    }

    fn merge(&mut self, a: usize, b: usize) -> usize {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        self.tick(1);
        if self.nodes[a].prio > self.nodes[b].prio {
            let r = self.nodes[a].right;
            self.detach(r);
            let m = self.merge(r, b);
            self.nodes[a].right = m;
            self.pull(a);
            self.detach(a);
            a
        } else {
            let l = self.nodes[b].left;
            self.detach(l);
            let m = self.merge(a, l);
            self.nodes[b].left = m;
            self.pull(b);
            self.detach(b);
            b
        }
    }

    /// Rotates `v`'s tour to start at `v`; returns the treap root.
    fn reroot(&mut self, v: usize) -> usize {
        let node = self.vertex_node[v];
        let i = self.index_of(node);
        let root = self.root(node);
        let (a, b) = self.split(root, i);
        self.merge(b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_and_cut_basics() {
        let mut f = EulerForest::new(2);
        assert!(!f.same_tree(0, 1));
        assert_eq!(f.tour_len(0), 1);
        f.link(0, 1, 7).unwrap();
        assert!(f.same_tree(0, 1));
        assert_eq!(f.link(1, 0, 8), Err(Error::Cycle(1, 0)));
        assert_eq!(f.cut(7).unwrap(), (0, 1));
        assert!(!f.same_tree(0, 1));
        assert_eq!(f.cut(7), Err(Error::UnknownEdge(7)));
    }

    #[test]
    fn path_tour_has_twice_the_edges() {
        let n = 50;
        let mut f = EulerForest::new(n);
        for i in 1..n {
            f.link(i - 1, i, i).unwrap();
            assert_eq!(f.tour_len(0), 2 * i);
            assert_eq!(f.tree_size(i), i + 1);
        }
        let mut seen = f.tree_vertices(17);
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
        f.cut(25).unwrap();
        assert_eq!(f.tour_len(0), 2 * 24);
        assert_eq!(f.tour_len(n - 1), 2 * (n - 1 - 25));
        assert!(f.same_tree(0, 24) && f.same_tree(25, n - 1) && !f.same_tree(24, 25));
    }

    #[test]
    fn vertices_can_be_added_later() {
        let mut f = EulerForest::new(1);
        let v = f.add_vertex();
        f.link(0, v, 0).unwrap();
        assert!(f.same_tree(v, 0));
        assert!(f.link(0, 9, 1).is_err());
    }
}
