//! Arena red-black trees that only ever insert at the maximum.
//!
//! Node 0 is the shared black sentinel. Every parent-pointer change of a real node is
//! logged so the caller can mirror the tree's shape into another structure.

pub(crate) const SENTINEL: usize = 0;

#[derive(Clone, Debug)]
pub(crate) struct RbArena {
    left: Vec<usize>,
    right: Vec<usize>,
    parent: Vec<usize>,
    red: Vec<bool>,
    touched: Vec<usize>,
    rotations: u64,
}

impl RbArena {
    pub(crate) fn new() -> Self {
        Self {
            left: vec![SENTINEL],
            right: vec![SENTINEL],
            parent: vec![SENTINEL],
            red: vec![false],
            touched: Vec::new(),
            rotations: 0,
        }
    }

    pub(crate) fn alloc(&mut self) -> usize {
        self.left.push(SENTINEL);
        self.right.push(SENTINEL);
        self.parent.push(SENTINEL);
        self.red.push(false);
        self.left.len() - 1
    }

    pub(crate) fn left(&self, x: usize) -> usize {
        self.left[x]
    }

    pub(crate) fn right(&self, x: usize) -> usize {
        self.right[x]
    }

    pub(crate) fn parent(&self, x: usize) -> usize {
        self.parent[x]
    }

    pub(crate) fn rotations(&self) -> u64 {
        self.rotations
    }

    /// Nodes whose parent changed since the last call.
    pub(crate) fn take_touched(&mut self) -> Vec<usize> {
        let mut t = std::mem::take(&mut self.touched);
        t.sort_unstable();
        t.dedup();
        t
    }

    fn set_parent(&mut self, x: usize, p: usize) {
        self.parent[x] = p;
        if x != SENTINEL {
            self.touched.push(x);
        }
    }

    /// In-order node list of the tree rooted at `root`.
    pub(crate) fn nodes(&self, root: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        let mut cur = root;
        while cur != SENTINEL || !stack.is_empty() {
            while cur != SENTINEL {
                stack.push(cur);
                cur = self.left[cur];
            }
            let x = stack.pop().expect("nonempty stack");
            out.push(x);
            cur = self.right[x];
        }
        out
    }

    fn rotate_left(&mut self, root: &mut usize, x: usize) {
        self.rotations += 1;
        let y = self.right[x];
        self.right[x] = self.left[y];
        if self.left[y] != SENTINEL {
            let ly = self.left[y];
            self.set_parent(ly, x);
        }
        let px = self.parent[x];
        self.set_parent(y, px);
        if px == SENTINEL {
            *root = y;
        } else if x == self.left[px] {
            self.left[px] = y;
        } else {
            self.right[px] = y;
        }
        self.left[y] = x;
        self.set_parent(x, y);
    }

    fn rotate_right(&mut self, root: &mut usize, x: usize) {
        self.rotations += 1;
        let y = self.left[x];
        self.left[x] = self.right[y];
        if self.right[y] != SENTINEL {
            let ry = self.right[y];
            self.set_parent(ry, x);
        }
        let px = self.parent[x];
        self.set_parent(y, px);
        if px == SENTINEL {
            *root = y;
        } else if x == self.right[px] {
            self.right[px] = y;
        } else {
            self.left[px] = y;
        }
        self.right[y] = x;
        self.set_parent(x, y);
    }

    /// Inserts the detached node `z` as the new maximum.
    pub(crate) fn insert_max(&mut self, root: &mut usize, z: usize) {
        let mut y = SENTINEL;
        let mut x = *root;
        while x != SENTINEL {
            y = x;
            x = self.right[x];
        }
        self.set_parent(z, y);
        if y == SENTINEL {
            *root = z;
        } else {
            self.right[y] = z;
        }
        self.left[z] = SENTINEL;
        self.right[z] = SENTINEL;
        self.red[z] = true;
        self.insert_fixup(root, z);
    }

    fn insert_fixup(&mut self, root: &mut usize, mut z: usize) {
        while self.red[self.parent[z]] {
            let p = self.parent[z];
            let g = self.parent[p];
            if p == self.left[g] {
                let y = self.right[g];
                if self.red[y] {
                    self.red[p] = false;
                    self.red[y] = false;
                    self.red[g] = true;
                    z = g;
                } else {
                    if z == self.right[p] {
                        z = p;
                        self.rotate_left(root, z);
                    }
                    let p = self.parent[z];
                    let g = self.parent[p];
                    self.red[p] = false;
                    self.red[g] = true;
                    self.rotate_right(root, g);
                }
            } else {
                let y = self.left[g];
                if self.red[y] {
                    self.red[p] = false;
                    self.red[y] = false;
                    self.red[g] = true;
                    z = g;
                } else {
                    if z == self.left[p] {
                        z = p;
                        self.rotate_right(root, z);
                    }
                    let p = self.parent[z];
                    let g = self.parent[p];
                    self.red[p] = false;
                    self.red[g] = true;
                    self.rotate_left(root, g);
                }
            }
        }
        let r = *root;
        self.red[r] = false;
    }

    fn transplant(&mut self, root: &mut usize, u: usize, v: usize) {
        let pu = self.parent[u];
        if pu == SENTINEL {
            *root = v;
        } else if u == self.left[pu] {
            self.left[pu] = v;
        } else {
            self.right[pu] = v;
        }
        self.set_parent(v, pu);
    }

    fn minimum(&self, mut x: usize) -> usize {
        while self.left[x] != SENTINEL {
            x = self.left[x];
        }
        x
    }

    /// Removes `z` from the tree rooted at `root`, leaving it detached.
    pub(crate) fn delete(&mut self, root: &mut usize, z: usize) {
        let mut y = z;
        let mut y_was_red = self.red[y];
        let x;
        if self.left[z] == SENTINEL {
            x = self.right[z];
            self.transplant(root, z, x);
        } else if self.right[z] == SENTINEL {
            x = self.left[z];
            self.transplant(root, z, x);
        } else {
            y = self.minimum(self.right[z]);
            y_was_red = self.red[y];
            x = self.right[y];
            if self.parent[y] == z {
                self.set_parent(x, y);
            } else {
                self.transplant(root, y, x);
                self.right[y] = self.right[z];
                let ry = self.right[y];
                self.set_parent(ry, y);
            }
            self.transplant(root, z, y);
            self.left[y] = self.left[z];
            let ly = self.left[y];
            self.set_parent(ly, y);
            self.red[y] = self.red[z];
        }
        if !y_was_red {
            self.delete_fixup(root, x);
        }
        self.left[z] = SENTINEL;
        self.right[z] = SENTINEL;
        self.set_parent(z, SENTINEL);
        self.red[z] = false;
        self.parent[SENTINEL] = SENTINEL;
    }

    fn delete_fixup(&mut self, root: &mut usize, mut x: usize) {
        while x != *root && !self.red[x] {
            let p = self.parent[x];
            if x == self.left[p] {
                let mut w = self.right[p];
                if self.red[w] {
                    self.red[w] = false;
                    self.red[p] = true;
                    self.rotate_left(root, p);
                    w = self.right[self.parent[x]];
                }
                if !self.red[self.left[w]] && !self.red[self.right[w]] {
                    self.red[w] = true;
                    x = self.parent[x];
                } else {
                    if !self.red[self.right[w]] {
                        let lw = self.left[w];
                        self.red[lw] = false;
                        self.red[w] = true;
                        self.rotate_right(root, w);
                        w = self.right[self.parent[x]];
                    }
                    let p = self.parent[x];
                    self.red[w] = self.red[p];
                    self.red[p] = false;
                    let rw = self.right[w];
                    self.red[rw] = false;
                    self.rotate_left(root, p);
                    x = *root;
                }
            } else {
                let mut w = self.left[p];
                if self.red[w] {
                    self.red[w] = false;
                    self.red[p] = true;
                    self.rotate_right(root, p);
                    w = self.left[self.parent[x]];
                }
                if !self.red[self.right[w]] && !self.red[self.left[w]] {
                    self.red[w] = true;
                    x = self.parent[x];
                } else {
                    if !self.red[self.left[w]] {
                        let rw = self.right[w];
                        self.red[rw] = false;
                        self.red[w] = true;
                        self.rotate_left(root, w);
                        w = self.left[self.parent[x]];
                    }
                    let p = self.parent[x];
                    self.red[w] = self.red[p];
                    self.red[p] = false;
                    let lw = self.left[w];
                    self.red[lw] = false;
                    self.rotate_right(root, p);
                    x = *root;
                }
            }
        }
        self.red[x] = false;
    }

    /// Black height of the tree at `x`, or `None` if a red-black rule is broken.
    #[cfg(test)]
    pub(crate) fn black_height(&self, x: usize) -> Option<usize> {
        if x == SENTINEL {
            return Some(1);
        }
        let (l, r) = (self.left[x], self.right[x]);
        if self.red[x] && (self.red[l] || self.red[r]) {
            return None;
        }
        if (l != SENTINEL && self.parent[l] != x) || (r != SENTINEL && self.parent[r] != x) {
            return None;
        }
        let hl = self.black_height(l)?;
        let hr = self.black_height(r)?;
        (hl == hr).then_some(hl + usize::from(!self.red[x]))
    }
}
