//! Element sets: sorted, deduplicated index lists with a bitmask fast path for
//! ground sets of at most 64 elements.

use serde::Serialize;
use std::ops::Deref;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ElementSet {
    items: Vec<usize>,
    #[serde(skip)]
    mask: Option<u64>,
}

impl ElementSet {
    pub fn new() -> Self {
        Self {
            items: Vec::new(),
            mask: Some(0),
        }
    }

    pub fn from_unsorted(mut items: Vec<usize>) -> Self {
        items.sort_unstable();
        items.dedup();
        let mask = mask_of(&items);
        Self { items, mask }
    }

    pub fn singleton(e: usize) -> Self {
        Self::from_unsorted(vec![e])
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.items
    }

    pub fn contains(&self, e: usize) -> bool {
        match self.mask {
            Some(m) if e < 64 => m & (1u64 << e) != 0,
            Some(_) => false,
            None => self.items.binary_search(&e).is_ok(),
        }
    }

    /// Returns `true` if `e` was not present.
    pub fn insert(&mut self, e: usize) -> bool {
        match self.items.binary_search(&e) {
            Ok(_) => false,
            Err(pos) => {
                self.items.insert(pos, e);
                self.mask = match self.mask {
                    Some(m) if e < 64 => Some(m | (1u64 << e)),
                    _ => None,
                };
                true
            }
        }
    }

    pub fn remove(&mut self, e: usize) -> bool {
        match self.items.binary_search(&e) {
            Ok(pos) => {
                self.items.remove(pos);
                self.mask = match self.mask {
                    Some(m) => Some(m & !(1u64 << e)),
                    None => mask_of(&self.items),
                };
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, e: usize) -> Self {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    pub fn union(&self, other: &ElementSet) -> Self {
        if let (Some(a), Some(b)) = (self.mask, other.mask) {
            return Self::from_mask(a | b);
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.items.len() && j < other.items.len() {
            let (a, b) = (self.items[i], other.items[j]);
            if a < b {
                out.push(a);
                i += 1;
            } else if b < a {
                out.push(b);
                j += 1;
            } else {
                out.push(a);
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&self.items[i..]);
        out.extend_from_slice(&other.items[j..]);
        let mask = mask_of(&out);
        Self { items: out, mask }
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &ElementSet) -> Self {
        if let (Some(a), Some(b)) = (self.mask, other.mask) {
            return Self::from_mask(a & !b);
        }
        let items: Vec<usize> = self.items.iter().copied().filter(|&e| !other.contains(e)).collect();
        let mask = mask_of(&items);
        Self { items, mask }
    }

    pub fn intersection(&self, other: &ElementSet) -> Self {
        if let (Some(a), Some(b)) = (self.mask, other.mask) {
            return Self::from_mask(a & b);
        }
        let items: Vec<usize> = self.items.iter().copied().filter(|&e| other.contains(e)).collect();
        let mask = mask_of(&items);
        Self { items, mask }
    }

    fn from_mask(mut m: u64) -> Self {
        let mask = m;
        let mut items = Vec::with_capacity(m.count_ones() as usize);
        while m != 0 {
            items.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        Self {
            items,
            mask: Some(mask),
        }
    }
}

fn mask_of(items: &[usize]) -> Option<u64> {
    items.iter().try_fold(0u64, |m, &e| (e < 64).then(|| m | (1u64 << e)))
}

impl Deref for ElementSet {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.items
    }
}

impl AsRef<[usize]> for ElementSet {
    fn as_ref(&self) -> &[usize] {
        &self.items
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_unsorted(iter.into_iter().collect())
    }
}

impl From<Vec<usize>> for ElementSet {
    fn from(v: Vec<usize>) -> Self {
        Self::from_unsorted(v)
    }
}
